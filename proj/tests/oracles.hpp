#pragma once

#include <vector>

#include "hdg/local_ops.hpp"

namespace hdg::testing {

/// Unpivoted Gauss-Jordan inversion at extended precision; independent of
/// the production LU path. Input/output column-major n x n.
std::vector<double> gauss_jordan_inverse_ld(const std::vector<double>& a, int n);

/// Dense solve of a row-major n x n system with partial pivoting.
std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b, int n);

/// The full (un-condensed) Newton system assembled densely: unknown layout
/// [q_x | q_y | u | uhat], equations in the same order.
struct MonolithicSystem {
    int n = 0;
    int qoff[2] = {0, 0};
    int uoff = 0;
    int hoff = 0;
    std::vector<double> a; ///< row-major n x n
    std::vector<double> rhs;
};

MonolithicSystem build_monolithic_dense(const PdeModel& model, StateFields& state,
                                        const Mesh2D& mesh, const BasisTab& basis,
                                        const GeomFactors& geom, const LocalFactors& factors,
                                        const TimeContext& time = {});

} // namespace hdg::testing
