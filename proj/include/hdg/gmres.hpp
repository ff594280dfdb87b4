#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace hdg {

enum class Orth { CGS, MGS };

struct GmresConfig {
    int restart = 50;
    double tol = 1e-6; ///< relative preconditioned residual
    int max_iters = 1000;
    Orth orth = Orth::CGS;
    bool track_diagnostics = false; ///< fill residual_trace / orthonormality stats
};

struct GmresStats {
    int iters = 0; ///< outer Arnoldi steps (one preconditioned matvec each)
    int restarts = 0;
    double final_rel_residual = 0.0;
    double t_mv = 0.0;
    double t_prec = 0.0;
    double t_orth = 0.0;
    bool converged = false;

    /// Diagnostics, only with track_diagnostics: the Givens-tracked residual
    /// per iteration, the worst basis orthonormality defect over cycle ends,
    /// and the worst gap between tracked and recomputed residuals at restart
    /// boundaries.
    std::vector<double> residual_trace;
    double max_orth_error = 0.0;
    double max_residual_gap = 0.0;
};

using OpFn = std::function<void(const std::vector<double>&, std::vector<double>&)>;

/// Orthogonalizes w against the basis and normalizes it in place. Returns
/// the Hessenberg column: basis.size() projection coefficients followed by
/// the norm of the orthogonalized vector. CGS runs two bulk projection
/// passes (one re-orthogonalization); MGS a single sequential pass.
std::vector<double> orthogonalize(const std::vector<std::vector<double>>& basis,
                                  std::vector<double>& w, Orth mode);

/// Restarted left-preconditioned GMRES: solves P^-1 K x = P^-1 rhs to the
/// relative tolerance, with Givens-rotation Hessenberg updates and
/// back-substitution on the small least-squares problem. Throws NaNDetected
/// on non-finite inner products.
std::pair<std::vector<double>, GmresStats> gmres_solve(const OpFn& matvec, const OpFn& precond,
                                                       const std::vector<double>& rhs,
                                                       const std::vector<double>& x0,
                                                       const GmresConfig& cfg);

} // namespace hdg
