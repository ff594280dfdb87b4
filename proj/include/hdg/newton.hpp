#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hdg/gmres.hpp"
#include "hdg/local_ops.hpp"
#include "hdg/preconditioner.hpp"

namespace hdg {

struct NewtonConfig {
    double tol = 1e-8;
    int max_newton = 50;
    double min_alpha = 1.0 / 1024.0; ///< smallest line-search damping
    std::optional<double> dt;        ///< empty = steady
    int n_steps = 1;                 ///< backward-Euler steps when dt is set
};

/// Which preconditioner the linear solves use, and the polynomial wrapper
/// configuration.
struct PrecondSpec {
    PrecondKind kind = PrecondKind::BJ;
    int poly_degree = 0; ///< 0 = no polynomial preconditioning
    std::uint64_t ritz_seed = 12345;
    bool ritz_per_restart = false; ///< recompute Ritz values at every GMRES restart
};

struct SolveReport {
    int n_newton = 0;
    long n_gmres_total = 0; ///< outer GMRES iterations over all Newton steps
    long n_inner_prec_ops = 0; ///< operator applications inside the polynomial wrapper
    std::vector<double> residual_history;
    std::vector<int> gmres_per_newton;
    std::vector<double> alpha_history; ///< accepted line-search damping per step
    double final_residual = 0.0;
    double t_ass = 0.0; ///< operator/global assembly + preconditioner build
    double t_mv = 0.0;
    double t_prec = 0.0;
    double t_orth = 0.0;
    double t_total = 0.0;
    bool converged = false;

    void merge_timers(const SolveReport& other);
};

/// Builds the configured preconditioner for an assembled system, including
/// harmonic Ritz values on the base-preconditioned operator when a
/// polynomial wrapper is requested (degree clamped to the system size).
Preconditioner build_preconditioner(const PrecondSpec& spec, const FaceBlockMatrix& k,
                                    const ElementOperators& ops, const Mesh2D& mesh);

/// Damped Newton iteration: assemble + condense, solve the trace system
/// with preconditioned GMRES, recover the interior update, and accept the
/// first halved step that decreases the nonlinear residual norm. Stops at
/// tol or max_newton (converged=false, not an error); throws
/// LineSearchFailed when no admissible step decreases the residual.
SolveReport newton_solve(const PdeModel& model, const Mesh2D& mesh, const BasisTab& basis,
                         const GeomFactors& geom, const LocalFactors& factors, StateFields& state,
                         const NewtonConfig& ncfg, const GmresConfig& gcfg,
                         const PrecondSpec& pspec, const TimeContext& time = {});

/// Backward-Euler marching: cfg.n_steps steps of size cfg.dt, each solved
/// by newton_solve with the previous solution as initial guess.
std::vector<SolveReport> time_march(const PdeModel& model, const Mesh2D& mesh,
                                    const BasisTab& basis, const GeomFactors& geom,
                                    const LocalFactors& factors, StateFields& state,
                                    const NewtonConfig& ncfg, const GmresConfig& gcfg,
                                    const PrecondSpec& pspec);

} // namespace hdg
