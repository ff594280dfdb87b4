#pragma once

#include <array>
#include <optional>
#include <vector>

#include "hdg/basis.hpp"
#include "hdg/dense_batch.hpp"
#include "hdg/mesh.hpp"
#include "hdg/models.hpp"

namespace hdg {

/// Discrete state: interior solution u, gradient unknowns q (always derived
/// from u and uhat), and the face trace uhat.
struct StateFields {
    int pe = 0, pf = 0, ne = 0, nf = 0;
    std::vector<double> u;                ///< pe per element
    std::array<std::vector<double>, 2> q; ///< pe per element, per direction
    std::vector<double> uhat;             ///< pf per face

    static StateFields zeros(const Mesh2D& mesh, const BasisTab& basis);
};

/// State-independent element factors, precomputed once per (mesh, basis):
/// mass matrices, the volume/face coupling matrices feeding the gradient
/// reconstruction, and their inverse-products.
struct LocalFactors {
    int pe = 0, pf = 0, ne = 0;
    DenseBatch mass;                    ///< pe x pe
    std::array<DenseBatch, 2> bmat;     ///< pe x pe, (u, d(test)/dx_d) volume coupling
    std::array<DenseBatch, 2> cmat;     ///< pe x 4pf, face coupling to uhat
    DenseBatch mass_inv;                ///< pe x pe
    std::array<DenseBatch, 2> minv_b;   ///< mass_inv * bmat
    std::array<DenseBatch, 2> minv_c;   ///< mass_inv * cmat
};

/// Condensed per-element operators for one Newton linearization, plus the
/// residual pieces needed for the global right-hand side and local recovery.
struct ElementOperators {
    int pe = 0, pf = 0, ne = 0;
    static constexpr int n_lfe = 4;
    DenseBatch kbar;     ///< (4pf)^2 condensed trace blocks
    DenseBatch ebar_inv; ///< pe x pe
    DenseBatch fbar;     ///< pe x 4pf
    DenseBatch hbar;     ///< 4pf x pe
    std::vector<double> rbar;    ///< 4pf per element, condensed trace residual
    std::vector<double> ru;      ///< pe per element, interior residual
    std::vector<double> ruhat_e; ///< 4pf per element, uncondensed trace residual part

    /// Uncondensed linearization blocks, kept only on request (test oracles).
    bool has_raw = false;
    DenseBatch e_raw, f_raw, h_raw, j_raw;
    std::array<DenseBatch, 2> d_raw, g_raw;
};

/// Residuals of the nonlinear system at a state (sign convention: these are
/// the Newton right-hand sides, i.e. the negated weak-form residuals).
struct Residuals {
    std::vector<double> trace;    ///< pf per face
    std::vector<double> interior; ///< pe per element
};

/// 2-norm over the stacked trace + interior residuals.
double residual_norm(const Residuals& r);

/// Backward-Euler context; empty dt selects the steady equations.
struct TimeContext {
    std::optional<double> dt;
    const std::vector<double>* u_prev = nullptr; ///< required iff dt is set
};

LocalFactors precompute_local_factors(const Mesh2D& mesh, const BasisTab& basis,
                                      const GeomFactors& geom);

/// Copies the per-face trace slices into per-element blocks, local-face
/// major (values stay in the face's canonical dof ordering).
std::vector<double> gather_element_trace(const Mesh2D& mesh, int pf,
                                         const std::vector<double>& face_values);

/// Reconstructs q from (u, uhat): q_d = -(M^-1)(B_d u + C_d uhat) per
/// element, via batched products. Overwrites state.q.
void compute_q(StateFields& state, const LocalFactors& factors, const Mesh2D& mesh);

/// Assembles the linearized element operators at the given state (q is
/// refreshed internally) and condenses them to the trace space. Throws
/// SingularLocalSolve when an element's condensed interior block cannot be
/// inverted, NonFiniteState on non-finite inputs.
ElementOperators assemble_element_operators(const PdeModel& model, StateFields& state,
                                            const Mesh2D& mesh, const BasisTab& basis,
                                            const GeomFactors& geom, const LocalFactors& factors,
                                            const TimeContext& time = {}, bool keep_raw = false);

/// Residual-only evaluation at the given state (q refreshed internally).
Residuals assemble_residual(const PdeModel& model, StateFields& state, const Mesh2D& mesh,
                            const BasisTab& basis, const GeomFactors& geom,
                            const LocalFactors& factors, const TimeContext& time = {});

/// Local recovery: du = Ebar^-1 (r_u - Fbar duhat) per element, with duhat
/// gathered per element (see gather_element_trace).
std::vector<double> recover_local(const ElementOperators& ops,
                                  const std::vector<double>& duhat_gathered);

/// Nodal interpolation of a scalar field onto the interior/trace dofs.
std::vector<double> interpolate_volume(const std::function<double(Vec2)>& fn, const Mesh2D& mesh,
                                       const BasisTab& basis);
std::vector<double> interpolate_trace(const std::function<double(Vec2)>& fn, const Mesh2D& mesh,
                                      const BasisTab& basis);

/// L2 error of the interior solution against an exact field, integrated
/// with a rule `extra` points finer than the assembly rule.
double l2_error(const std::vector<double>& u, const std::function<double(Vec2)>& exact,
                const Mesh2D& mesh, const BasisTab& basis, int extra = 2);

/// L2 norm of the interior solution (same quadrature as l2_error).
double l2_norm(const std::vector<double>& u, const Mesh2D& mesh, const BasisTab& basis,
               int extra = 2);

} // namespace hdg
