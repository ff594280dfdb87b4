#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hdg/newton.hpp"

namespace hdg {

inline constexpr int kCsvSchemaVersion = 1;

/// One benchmark case: discretization, preconditioner, solver settings.
struct CaseSpec {
    std::string case_name = "burgers2d"; ///< poisson2d | convdiff2d | burgers2d | heat2d
    int k = 1;
    int n = 16;
    PrecondSpec precond;
    GmresConfig gmres;
    NewtonConfig newton;
    std::optional<double> tau; ///< stabilization override
    double nu = 1.0 / 200.0;   ///< Burgers viscosity
    double kappa = 1.0;        ///< convection-diffusion diffusivity
    Vec2 velocity{0.0, 1.0};   ///< convection-diffusion transport
    int quad_points = 0;       ///< 1D quadrature points, 0 = k+2
};

struct CaseResult {
    CaseSpec spec;
    SolveReport report; ///< totals over all time steps for transient runs
    std::vector<SolveReport> steps;
    StateFields state;
    bool ok = true;
    bool numerical_failure = false; ///< singularity/NaN class (vs non-convergence)
    std::string error;
};

/// Assembled per-case context, reusable across runs of the same case.
struct CaseSetup {
    Mesh2D mesh;
    BasisTab basis;
    GeomFactors geom;
    LocalFactors factors;
    PdeModel model;
};

PdeModel make_case_model(const CaseSpec& spec);
CaseSetup make_case_setup(const CaseSpec& spec);
StateFields make_initial_state(const CaseSpec& spec, const CaseSetup& setup);

/// Runs one case end to end; solver errors are captured in the result
/// rather than thrown.
CaseResult run_case(const CaseSpec& spec);

/// Runs every case and emits one CSV row each (versioned schema; failures
/// appear as converged=false rows). With repeat > 1 the timing columns come
/// from the run with the smallest total time and the median total is
/// reported alongside. `warmup` adds one untimed run per case.
std::vector<CaseResult> run_sweep(const std::vector<CaseSpec>& specs, std::ostream& csv,
                                  int repeat = 1, bool warmup = false);

void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const CaseResult& result, double t_total_median);

/// JSON array mirroring the CSV rows.
void write_json_report(const std::vector<CaseResult>& results, const std::string& path);

struct RateRow {
    int k = 0;
    int n = 0;
    double error = 0.0;
    std::string order; ///< observed order vs the previous n, "exact" below 1e-10
};

/// L2-error convergence study for a case with a known exact solution. Uses
/// tightened solver tolerances so discretization error dominates.
std::vector<RateRow> convergence_study(const CaseSpec& base, const std::vector<int>& ks,
                                       const std::vector<int>& ns);

/// Max-norm violation of the Burgers reflection property
/// u(x, y) = -u(1-x, y), evaluated on the volume nodes of a symmetric mesh.
double burgers_antisymmetry_error(const StateFields& state, const Mesh2D& mesh,
                                  const BasisTab& basis);

} // namespace hdg
