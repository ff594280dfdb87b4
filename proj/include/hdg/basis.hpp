#pragma once

#include <array>
#include <vector>

namespace hdg {

/// 1D quadrature rule on the reference interval [0,1].
struct QuadratureRule {
    std::vector<double> points;
    std::vector<double> weights;
    int size() const { return static_cast<int>(points.size()); }
};

/// Tensor rule on the reference square [0,1]^2, x fastest.
struct QuadratureRule2D {
    std::vector<std::array<double, 2>> points;
    std::vector<double> weights;
    int size() const { return static_cast<int>(points.size()); }
};

/// Gauss-Legendre rule with q points, mapped to [0,1]. Exact for
/// polynomials of degree <= 2q-1. Nodes are constructed symmetrically about
/// the midpoint. Throws UnsupportedOrder outside 1 <= q <= 30.
QuadratureRule gauss_rule(int q);

QuadratureRule2D tensor_rule(const QuadratureRule& r1d);

/// Gauss-Lobatto nodes (n >= 2 points, endpoints included) on [0,1].
std::vector<double> lobatto_nodes(int n);

/// Values of the Lagrange basis through `nodes` at point x; out has
/// nodes.size() entries. Exact at the nodes (delta property).
void lagrange_values(const std::vector<double>& nodes, double x, double* out);

/// First derivatives of the Lagrange basis at point x.
void lagrange_derivs(const std::vector<double>& nodes, double x, double* out);

/// Tabulated tensor-product nodal basis on the reference square plus the
/// matching 1D face basis, all sampled at Gauss quadrature points.
///
/// Element basis index i = a + (k+1)*b pairs with the node
/// (nodes1d[a], nodes1d[b]); face basis index l pairs with nodes1d[l].
struct BasisTab {
    int degree = 0;
    int pe = 0; ///< (k+1)^2 element basis functions
    int pf = 0; ///< k+1 face basis functions
    int qe = 0; ///< tensor quadrature points per element
    int qf = 0; ///< quadrature points per face

    QuadratureRule rule1d;
    QuadratureRule2D rule2d;
    std::vector<double> nodes1d;

    std::vector<double> phi;      ///< pe x qe, [i + pe*g]
    std::vector<double> dphi_dxi; ///< pe x qe
    std::vector<double> dphi_deta;
    std::vector<double> psi; ///< pf x qf, [l + pf*g]

    /// Element basis values at each local face's quadrature points, in the
    /// element-local face parameterization (bottom/top by xi, left/right by
    /// eta). pe x qf per face.
    std::array<std::vector<double>, 4> trace_phi;

    /// Reference coordinates of local face lf at parameter s.
    static std::array<double, 2> face_point(int lf, double s);
};

/// Tabulates the degree-k nodal Lagrange basis on Gauss-Lobatto points of
/// [0,1]^2 at the given 1D Gauss rule (tensorized on the element). Throws
/// UnsupportedDegree outside 1 <= k <= 6.
BasisTab tabulate_basis(int k, const QuadratureRule& quad);

/// Element basis values at an arbitrary 2D rule (used by error studies that
/// integrate with a finer rule than assembly).
std::vector<double> eval_basis_at(const BasisTab& basis, const QuadratureRule2D& rule);

} // namespace hdg
