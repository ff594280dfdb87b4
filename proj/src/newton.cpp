#include "hdg/newton.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "hdg/errors.hpp"
#include "hdg/face_matrix.hpp"

namespace hdg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

} // namespace

void SolveReport::merge_timers(const SolveReport& other) {
    t_ass += other.t_ass;
    t_mv += other.t_mv;
    t_prec += other.t_prec;
    t_orth += other.t_orth;
    t_total += other.t_total;
}

Preconditioner build_preconditioner(const PrecondSpec& spec, const FaceBlockMatrix& k,
                                    const ElementOperators& ops, const Mesh2D& mesh) {
    Preconditioner p;
    p.kind = spec.kind;
    switch (spec.kind) {
        case PrecondKind::BJ: p = build_bj(k); break;
        case PrecondKind::ASM: p = build_asm(ops, mesh); break;
        case PrecondKind::Identity: break;
    }
    if (spec.poly_degree > 0) {
        const std::size_t n = k.n_dof();
        const int degree = static_cast<int>(std::min<std::size_t>(spec.poly_degree, n));
        LinearOp base = make_base_apply(p, mesh);
        std::vector<double> scratch, kv;
        const LinearOp op = [&](const std::vector<double>& in, std::vector<double>& out) {
            block_matvec(k, in, kv, scratch);
            base(kv, out);
        };
        p.ritz = compute_harmonic_ritz(op, n, degree, spec.ritz_seed);
        p.poly_degree = degree;
    }
    return p;
}

SolveReport newton_solve(const PdeModel& model, const Mesh2D& mesh, const BasisTab& basis,
                         const GeomFactors& geom, const LocalFactors& factors, StateFields& state,
                         const NewtonConfig& ncfg, const GmresConfig& gcfg,
                         const PrecondSpec& pspec, const TimeContext& time) {
    const auto t_start = Clock::now();
    SolveReport report;

    Residuals res = assemble_residual(model, state, mesh, basis, geom, factors, time);
    double rnorm = residual_norm(res);
    report.residual_history.push_back(rnorm);

    for (int iter = 0;; ++iter) {
        if (rnorm <= ncfg.tol) {
            report.converged = true;
            break;
        }
        if (iter >= ncfg.max_newton) {
            report.converged = false;
            break;
        }

        auto t0 = Clock::now();
        ElementOperators ops =
            assemble_element_operators(model, state, mesh, basis, geom, factors, time);
        auto [k, rhs] = assemble_global(ops, mesh);
        Preconditioner prec = build_preconditioner(pspec, k, ops, mesh);
        report.t_ass += seconds_since(t0);

        std::vector<double> mv_scratch, mv_gather;
        const OpFn matvec = [&](const std::vector<double>& in, std::vector<double>& out) {
            block_matvec(k, in, out, mv_gather);
        };
        const OpFn apply = make_preconditioner_apply(prec, k, mesh, &report.n_inner_prec_ops);

        std::vector<double> duhat(k.n_dof(), 0.0);
        GmresStats gstats;
        if (!pspec.ritz_per_restart || pspec.poly_degree == 0) {
            std::tie(duhat, gstats) = gmres_solve(matvec, apply, rhs, duhat, gcfg);
        } else {
            // One restart cycle at a time, refreshing the Ritz values in
            // between; the iterate warm-starts each cycle.
            GmresConfig one = gcfg;
            while (true) {
                one.max_iters = std::min(gcfg.restart, gcfg.max_iters - gstats.iters);
                if (one.max_iters <= 0) break;
                auto [xc, sc] = gmres_solve(matvec, apply, rhs, duhat, one);
                duhat = std::move(xc);
                gstats.iters += sc.iters;
                gstats.restarts += sc.restarts + 1;
                gstats.t_mv += sc.t_mv;
                gstats.t_prec += sc.t_prec;
                gstats.t_orth += sc.t_orth;
                gstats.final_rel_residual = sc.final_rel_residual;
                if (sc.converged) {
                    gstats.converged = true;
                    break;
                }
                auto tr = Clock::now();
                prec = build_preconditioner(pspec, k, ops, mesh);
                report.t_ass += seconds_since(tr);
            }
        }
        report.n_gmres_total += gstats.iters;
        report.gmres_per_newton.push_back(gstats.iters);
        report.t_mv += gstats.t_mv;
        report.t_prec += gstats.t_prec;
        report.t_orth += gstats.t_orth;

        const std::vector<double> duhat_e = gather_element_trace(mesh, basis.pf, duhat);
        const std::vector<double> du = recover_local(ops, duhat_e);

        // Halving line search on the full nonlinear residual norm.
        bool accepted = false;
        for (double alpha = 1.0; alpha >= ncfg.min_alpha; alpha *= 0.5) {
            StateFields trial = state;
            for (std::size_t i = 0; i < trial.u.size(); ++i) trial.u[i] += alpha * du[i];
            for (std::size_t i = 0; i < trial.uhat.size(); ++i) trial.uhat[i] += alpha * duhat[i];
            Residuals tres = assemble_residual(model, trial, mesh, basis, geom, factors, time);
            const double tnorm = residual_norm(tres);
            if (tnorm < rnorm) {
                state = std::move(trial);
                res = std::move(tres);
                rnorm = tnorm;
                accepted = true;
                report.alpha_history.push_back(alpha);
                break;
            }
        }
        ++report.n_newton;
        if (!accepted) {
            report.t_total = seconds_since(t_start);
            report.final_residual = rnorm;
            throw LineSearchFailed(iter, ncfg.min_alpha);
        }
        report.residual_history.push_back(rnorm);
    }

    report.final_residual = rnorm;
    report.t_total = seconds_since(t_start);
    return report;
}

std::vector<SolveReport> time_march(const PdeModel& model, const Mesh2D& mesh,
                                    const BasisTab& basis, const GeomFactors& geom,
                                    const LocalFactors& factors, StateFields& state,
                                    const NewtonConfig& ncfg, const GmresConfig& gcfg,
                                    const PrecondSpec& pspec) {
    if (!ncfg.dt || *ncfg.dt <= 0.0) throw Error("time_march requires a positive dt");
    std::vector<SolveReport> reports;
    reports.reserve(ncfg.n_steps);
    for (int step = 0; step < ncfg.n_steps; ++step) {
        const std::vector<double> u_prev = state.u;
        TimeContext time{ncfg.dt, &u_prev};
        try {
            reports.push_back(
                newton_solve(model, mesh, basis, geom, factors, state, ncfg, gcfg, pspec, time));
        } catch (const Error& err) {
            throw Error("time step " + std::to_string(step) + ": " + err.what());
        }
    }
    return reports;
}

} // namespace hdg
