#pragma once

#include <random>
#include <vector>

#include "hdg/face_matrix.hpp"
#include "hdg/study.hpp"

namespace hdg::testing {

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::vector<double> v(n);
    for (double& x : v) x = scale * (2.0 * (static_cast<double>(rng() >> 11) * 0x1p-53) - 1.0);
    return v;
}

/// Case setup plus an assembled system at a given state.
struct AssembledCase {
    CaseSetup setup;
    StateFields state;
    ElementOperators ops;
    FaceBlockMatrix k;
    TraceVector rhs;
};

inline AssembledCase assemble_case(const CaseSpec& spec, bool keep_raw = false,
                                   std::uint64_t perturb_seed = 0, double perturb = 0.0) {
    AssembledCase out;
    out.setup = make_case_setup(spec);
    out.state = make_initial_state(spec, out.setup);
    if (perturb > 0.0) {
        const auto du = random_vector(out.state.u.size(), perturb_seed, perturb);
        const auto dh = random_vector(out.state.uhat.size(), perturb_seed + 1, perturb);
        for (std::size_t i = 0; i < du.size(); ++i) out.state.u[i] += du[i];
        for (std::size_t i = 0; i < dh.size(); ++i) out.state.uhat[i] += dh[i];
    }
    out.ops = assemble_element_operators(out.setup.model, out.state, out.setup.mesh,
                                         out.setup.basis, out.setup.geom, out.setup.factors, {},
                                         keep_raw);
    auto [k, rhs] = assemble_global(out.ops, out.setup.mesh);
    out.k = std::move(k);
    out.rhs = std::move(rhs);
    return out;
}

inline CaseSpec poisson_spec(int k, int n) {
    CaseSpec spec;
    spec.case_name = "poisson2d";
    spec.k = k;
    spec.n = n;
    return spec;
}

inline CaseSpec burgers_spec(int k, int n) {
    CaseSpec spec;
    spec.case_name = "burgers2d";
    spec.k = k;
    spec.n = n;
    return spec;
}

} // namespace hdg::testing
