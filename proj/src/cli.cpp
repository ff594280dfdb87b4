#include "hdg/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "hdg/errors.hpp"
#include "hdg/parallel.hpp"
#include "hdg/study.hpp"

namespace hdg {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitNumerical = 3;

struct CaseOpts {
    std::string case_name = "burgers2d";
    int k = 1;
    int n = 16;
    std::string precond = "bj";
    int poly_degree = 0;
    std::uint64_t ritz_seed = 12345;
    bool ritz_per_restart = false;
    int restart = 50;
    double gmres_tol = 1e-6;
    int max_gmres = 1000;
    std::string orth = "cgs";
    double newton_tol = 1e-8;
    int max_newton = 50;
    double min_alpha = 1.0 / 1024.0;
    bool steady = false;
    double dt = 0.0;
    int steps = 1;
    double tau = 0.0;
    double nu = 1.0 / 200.0;
    double kappa = 1.0;
    std::vector<double> velocity{0.0, 1.0};
    int quad_points = 0;

    CLI::Option* opt_dt = nullptr;
    CLI::Option* opt_tau = nullptr;
};

void add_case_options(CLI::App* cmd, CaseOpts& o, bool with_kn = true) {
    cmd->add_option("--case", o.case_name, "Benchmark case")
        ->check(CLI::IsMember({"poisson2d", "convdiff2d", "burgers2d", "heat2d"}))
        ->capture_default_str();
    if (with_kn) {
        cmd->add_option("--k", o.k, "Polynomial degree")->check(CLI::Range(1, 6))->capture_default_str();
        cmd->add_option("--n", o.n, "Mesh resolution (1/h)")->check(CLI::PositiveNumber)->capture_default_str();
    }
    cmd->add_option("--precond", o.precond, "Preconditioner")
        ->check(CLI::IsMember({"none", "bj", "asm"}))
        ->capture_default_str();
    cmd->add_option("--poly-degree", o.poly_degree, "Polynomial preconditioner degree (0 = off)")
        ->check(CLI::Range(0, 1000))
        ->capture_default_str();
    cmd->add_option("--ritz-seed", o.ritz_seed, "Seed of the Arnoldi start vector")
        ->capture_default_str();
    cmd->add_flag("--ritz-per-restart", o.ritz_per_restart,
                  "Recompute Ritz values at every GMRES restart");
    cmd->add_option("--restart", o.restart, "GMRES restart dimension")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--gmres-tol", o.gmres_tol, "GMRES relative tolerance")->capture_default_str();
    cmd->add_option("--max-gmres", o.max_gmres, "Maximum GMRES iterations per solve")
        ->capture_default_str();
    cmd->add_option("--orth", o.orth, "Orthogonalization scheme")
        ->check(CLI::IsMember({"cgs", "mgs"}))
        ->capture_default_str();
    cmd->add_option("--newton-tol", o.newton_tol, "Nonlinear residual tolerance")
        ->capture_default_str();
    cmd->add_option("--max-newton", o.max_newton, "Maximum Newton iterations")->capture_default_str();
    cmd->add_option("--min-alpha", o.min_alpha, "Smallest line-search damping")->capture_default_str();
    CLI::Option* steady = cmd->add_flag("--steady", o.steady, "Steady solve (default)");
    o.opt_dt = cmd->add_option("--dt", o.dt, "Backward-Euler time step");
    o.opt_dt->excludes(steady);
    cmd->add_option("--steps", o.steps, "Number of time steps")
        ->needs(o.opt_dt)
        ->capture_default_str();
    o.opt_tau = cmd->add_option("--tau", o.tau, "Stabilization override");
    cmd->add_option("--nu", o.nu, "Burgers viscosity")->capture_default_str();
    cmd->add_option("--kappa", o.kappa, "Diffusivity (convdiff2d)")->capture_default_str();
    cmd->add_option("--velocity", o.velocity, "Transport velocity (convdiff2d)")
        ->expected(2)
        ->delimiter(',');
    cmd->add_option("--quad-points", o.quad_points, "1D quadrature points (0 = k+2)")
        ->capture_default_str();
}

CaseSpec to_case_spec(const CaseOpts& o) {
    CaseSpec spec;
    spec.case_name = o.case_name;
    spec.k = o.k;
    spec.n = o.n;
    spec.precond.kind = precond_kind_from_name(o.precond);
    spec.precond.poly_degree = o.poly_degree;
    spec.precond.ritz_seed = o.ritz_seed;
    spec.precond.ritz_per_restart = o.ritz_per_restart;
    spec.gmres.restart = o.restart;
    spec.gmres.tol = o.gmres_tol;
    spec.gmres.max_iters = o.max_gmres;
    spec.gmres.orth = (o.orth == "mgs") ? Orth::MGS : Orth::CGS;
    spec.newton.tol = o.newton_tol;
    spec.newton.max_newton = o.max_newton;
    spec.newton.min_alpha = o.min_alpha;
    if (o.opt_dt && o.opt_dt->count() > 0) {
        spec.newton.dt = o.dt;
        spec.newton.n_steps = o.steps;
    }
    if (o.opt_tau && o.opt_tau->count() > 0) spec.tau = o.tau;
    spec.nu = o.nu;
    spec.kappa = o.kappa;
    spec.velocity = {o.velocity[0], o.velocity[1]};
    spec.quad_points = o.quad_points;
    return spec;
}

void print_solve_summary(const CaseResult& r) {
    const CaseSpec& s = r.spec;
    std::printf("case:           %s  k=%d  n=%d  precond=%s  poly=%d\n", s.case_name.c_str(), s.k,
                s.n, precond_kind_name(s.precond.kind).c_str(), s.precond.poly_degree);
    std::printf("mode:           %s\n",
                s.newton.dt ? ("transient dt=" + std::to_string(*s.newton.dt) + " steps=" +
                               std::to_string(s.newton.n_steps))
                                  .c_str()
                            : "steady");
    std::printf("converged:      %s\n", r.report.converged ? "yes" : "no");
    std::printf("newton iters:   %d\n", r.report.n_newton);
    std::printf("gmres iters:    %ld\n", r.report.n_gmres_total);
    if (r.report.n_inner_prec_ops > 0) {
        std::printf("poly inner ops: %ld\n", r.report.n_inner_prec_ops);
    }
    std::printf("final residual: %.6e\n", r.report.final_residual);
    std::printf("t_ass=%.4fs t_mv=%.4fs t_prec=%.4fs t_orth=%.4fs t_total=%.4fs\n", r.report.t_ass,
                r.report.t_mv, r.report.t_prec, r.report.t_orth, r.report.t_total);
}

int exit_code_for(const Error& err) {
    if (is_numerical_failure(err)) return kExitNumerical;
    if (dynamic_cast<const LineSearchFailed*>(&err)) return kExitNotConverged;
    return kExitUsage;
}

std::vector<CaseSpec> expand_sweep(const CaseOpts& base, const std::vector<int>& ks,
                                   const std::vector<int>& ns,
                                   const std::vector<std::string>& preconds) {
    std::vector<CaseSpec> specs;
    for (int k : ks) {
        for (int n : ns) {
            for (const std::string& pc : preconds) {
                CaseOpts o = base;
                o.k = k;
                o.n = n;
                if (pc == "bj-pp") {
                    o.precond = "bj";
                } else if (pc == "asm-pp") {
                    o.precond = "asm";
                } else if (pc == "pp") {
                    o.precond = "none";
                } else {
                    o.precond = pc;
                    o.poly_degree = 0;
                }
                CaseSpec spec = to_case_spec(o);
                if (pc == "bj-pp" || pc == "asm-pp" || pc == "pp") {
                    spec.precond.poly_degree = base.poly_degree > 0 ? base.poly_degree : 10;
                }
                specs.push_back(std::move(spec));
            }
        }
    }
    return specs;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"HDG solver kit: condensed-trace solves with block-Jacobi, additive-Schwarz "
                 "and polynomial preconditioners"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from a key=value file");

    int threads = 1;
    app.add_option("--threads", threads, "Worker threads for batch loops (0 = hardware)")
        ->envname("HDG_THREADS")
        ->capture_default_str();
    bool verbose = false;
    app.add_flag("--verbose", verbose, "Chatty progress on stderr");

    // solve
    CLI::App* solve = app.add_subcommand("solve", "Run one case and print a summary");
    CaseOpts solve_opts;
    add_case_options(solve, solve_opts);
    std::string solve_dump, solve_json;
    solve->add_option("--dump-matrix", solve_dump,
                      "Write the condensed operator at the final state to this file");
    solve->add_option("--json", solve_json, "Write a JSON report to this file");

    // sweep
    CLI::App* sweep = app.add_subcommand("sweep", "Run a (k, n, preconditioner) sweep, emit CSV");
    CaseOpts sweep_opts;
    add_case_options(sweep, sweep_opts, /*with_kn=*/false);
    std::vector<int> sweep_k{1, 2, 3};
    std::vector<int> sweep_n{16, 32};
    std::vector<std::string> sweep_pc{"bj", "bj-pp", "asm", "asm-pp"};
    sweep->add_option("--k-list", sweep_k, "Polynomial degrees")->delimiter(',')->capture_default_str();
    sweep->add_option("--n-list", sweep_n, "Mesh resolutions")->delimiter(',')->capture_default_str();
    sweep->add_option("--precond-list", sweep_pc,
                      "Preconditioners (none, bj, asm, pp, bj-pp, asm-pp)")
        ->delimiter(',')
        ->capture_default_str();
    std::string sweep_out, sweep_json;
    int sweep_repeat = 1;
    bool sweep_warmup = false, sweep_parallel = false;
    sweep->add_option("--out", sweep_out, "CSV output path (default stdout)");
    sweep->add_option("--json", sweep_json, "JSON report path");
    sweep->add_option("--repeat", sweep_repeat, "Repetitions per case (min/median timing)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep->add_flag("--warmup", sweep_warmup, "One untimed warm-up run per case");
    sweep->add_flag("--parallel-cases", sweep_parallel,
                    "Run cases concurrently (timers unreliable)");

    // rates
    CLI::App* rates = app.add_subcommand("rates", "Convergence-rate study against the exact solution");
    CaseOpts rates_opts;
    rates_opts.case_name = "poisson2d";
    rates_opts.precond = "asm";
    add_case_options(rates, rates_opts, /*with_kn=*/false);
    std::vector<int> rates_k{1, 2, 3};
    std::vector<int> rates_n{16, 32};
    rates->add_option("--k-list", rates_k, "Polynomial degrees")->delimiter(',')->capture_default_str();
    rates->add_option("--n-list", rates_n, "Mesh resolutions")->delimiter(',')->capture_default_str();
    std::string rates_out;
    rates->add_option("--out", rates_out, "CSV output path (default stdout)");

    // dump
    CLI::App* dump = app.add_subcommand("dump", "Assemble at the initial state and dump K, r");
    CaseOpts dump_opts;
    add_case_options(dump, dump_opts);
    std::string dump_out;
    dump->add_option("--out", dump_out, "Output file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    set_threads(threads);
    if (threads != 1) {
        std::fprintf(stderr, "note: bit-reproducibility is only guaranteed with --threads 1\n");
    }

    try {
        if (*solve) {
            const CaseSpec spec = to_case_spec(solve_opts);
            CaseResult result = run_case(spec);
            if (!result.ok) {
                std::fprintf(stderr, "error: %s\n", result.error.c_str());
            }
            if (verbose) {
                const auto& rep = result.report;
                for (std::size_t i = 0; i + 1 < rep.residual_history.size(); ++i) {
                    std::fprintf(stderr, "newton %2zu: |r| %.6e -> %.6e  gmres %d  alpha %g\n", i,
                                 rep.residual_history[i], rep.residual_history[i + 1],
                                 i < rep.gmres_per_newton.size() ? rep.gmres_per_newton[i] : 0,
                                 i < rep.alpha_history.size() ? rep.alpha_history[i] : 0.0);
                }
            }
            print_solve_summary(result);
            if (!solve_json.empty()) write_json_report({result}, solve_json);
            if (!solve_dump.empty() && result.ok) {
                CaseSetup setup = make_case_setup(spec);
                TimeContext time;
                std::vector<double> u_prev;
                if (spec.newton.dt) {
                    u_prev = result.state.u;
                    time = {spec.newton.dt, &u_prev};
                }
                ElementOperators ops =
                    assemble_element_operators(setup.model, result.state, setup.mesh, setup.basis,
                                               setup.geom, setup.factors, time);
                auto [kmat, rhs] = assemble_global(ops, setup.mesh);
                write_matrix(solve_dump, kmat, rhs);
            }
            if (!result.ok) {
                return result.numerical_failure ? kExitNumerical : kExitNotConverged;
            }
            return result.report.converged ? kExitOk : kExitNotConverged;
        }

        if (*sweep) {
            std::vector<CaseSpec> specs = expand_sweep(sweep_opts, sweep_k, sweep_n, sweep_pc);
            std::ofstream file;
            if (!sweep_out.empty()) {
                file.open(sweep_out, std::ios::binary);
                if (!file) throw IoError("cannot open " + sweep_out);
            }
            std::ostream& csv = sweep_out.empty() ? std::cout : file;
            std::vector<CaseResult> results;
            if (sweep_parallel) {
                std::fprintf(stderr, "note: --parallel-cases makes timer columns unreliable\n");
                results.resize(specs.size());
                std::vector<std::thread> pool;
                for (std::size_t i = 0; i < specs.size(); ++i) {
                    pool.emplace_back([&specs, &results, i] { results[i] = run_case(specs[i]); });
                }
                for (auto& t : pool) t.join();
                write_csv_header(csv);
                for (const CaseResult& r : results) write_csv_row(csv, r, r.report.t_total);
            } else {
                results = run_sweep(specs, csv, sweep_repeat, sweep_warmup);
            }
            if (!sweep_json.empty()) write_json_report(results, sweep_json);
            return kExitOk;
        }

        if (*rates) {
            CaseSpec base = to_case_spec(rates_opts);
            const std::vector<RateRow> rows = convergence_study(base, rates_k, rates_n);
            std::ostringstream csv;
            csv << "schema_version,case,k,n,l2_error,order\r\n";
            for (const RateRow& row : rows) {
                csv << kCsvSchemaVersion << ',' << base.case_name << ',' << row.k << ',' << row.n
                    << ',';
                csv.precision(12);
                csv << row.error << ',' << row.order << "\r\n";
            }
            if (rates_out.empty()) {
                std::cout << csv.str();
            } else {
                std::ofstream os(rates_out, std::ios::binary);
                if (!os) throw IoError("cannot open " + rates_out);
                os << csv.str();
            }
            return kExitOk;
        }

        if (*dump) {
            const CaseSpec spec = to_case_spec(dump_opts);
            CaseSetup setup = make_case_setup(spec);
            StateFields state = make_initial_state(spec, setup);
            TimeContext time;
            std::vector<double> u_prev;
            if (spec.newton.dt) {
                u_prev = state.u;
                time = {spec.newton.dt, &u_prev};
            }
            ElementOperators ops = assemble_element_operators(setup.model, state, setup.mesh,
                                                              setup.basis, setup.geom,
                                                              setup.factors, time);
            auto [kmat, rhs] = assemble_global(ops, setup.mesh);
            write_matrix(dump_out, kmat, rhs);
            if (verbose) {
                std::fprintf(stderr, "wrote %s: pf=%d nf=%d (%zu dofs)\n", dump_out.c_str(),
                             kmat.pf, kmat.nf, kmat.n_dof());
            }
            return kExitOk;
        }
    } catch (const Error& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return exit_code_for(err);
    }
    return kExitUsage;
}

} // namespace hdg
