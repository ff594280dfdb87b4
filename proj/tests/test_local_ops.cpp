#include "hdg/local_ops.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "hdg/errors.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace hdg;
namespace ht = hdg::testing;

namespace {

// Reference k=1 mass matrix on [0,1]^2: Kronecker square of the 1D
// [[1/3, 1/6], [1/6, 1/3]] block, node ordering (a + 2b).
double mref_k1(int i, int j) {
    const double m1[2][2] = {{1.0 / 3.0, 1.0 / 6.0}, {1.0 / 6.0, 1.0 / 3.0}};
    return m1[i % 2][j % 2] * m1[i / 2][j / 2];
}

} // namespace

TEST(PrecomputeLocalFactors, UniformMeshBlocksIdentical) {
    const auto c = ht::assemble_case(ht::poisson_spec(2, 4));
    const LocalFactors& lf = c.setup.factors;
    for (int e = 1; e < lf.ne; ++e) {
        for (std::size_t i = 0; i < lf.mass.block_size(); ++i) {
            EXPECT_NEAR(lf.mass.block(e)[i], lf.mass.block(0)[i], 1e-14);
        }
    }
}

TEST(PrecomputeLocalFactors, MassMatchesSymbolicK1) {
    const int n = 4;
    const auto c = ht::assemble_case(ht::poisson_spec(1, n));
    const LocalFactors& lf = c.setup.factors;
    const double h2 = 1.0 / (n * n);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            EXPECT_NEAR(lf.mass.at(i, j, 0), h2 * mref_k1(i, j), 1e-15);
        }
    }
}

TEST(PrecomputeLocalFactors, MassInverseResidual) {
    const auto c = ht::assemble_case(ht::poisson_spec(3, 3));
    const LocalFactors& lf = c.setup.factors;
    const DenseBatch prod = gemm_batch(lf.mass, lf.mass_inv);
    for (int e = 0; e < lf.ne; ++e) {
        for (int i = 0; i < lf.pe; ++i) {
            for (int j = 0; j < lf.pe; ++j) {
                EXPECT_NEAR(prod.at(i, j, e), i == j ? 1.0 : 0.0, 1e-10);
            }
        }
    }
}

TEST(PrecomputeLocalFactors, BRowSumsMatchBoundaryIntegral) {
    // Row sums of B_d equal the boundary integral of phi_i n_d (divergence
    // theorem with partition of unity).
    const auto c = ht::assemble_case(ht::poisson_spec(2, 2));
    const auto& s = c.setup;
    const int pe = s.basis.pe, qf = s.basis.qf;
    for (int e = 0; e < s.mesh.n_elements; ++e) {
        for (int d = 0; d < 2; ++d) {
            for (int i = 0; i < pe; ++i) {
                double row = 0.0;
                for (int j = 0; j < pe; ++j) row += s.factors.bmat[d].at(i, j, e);
                double bnd = 0.0;
                for (int lf = 0; lf < 4; ++lf) {
                    const int f = s.mesh.element_to_face[e][lf];
                    const int side =
                        (s.mesh.face_to_elements[f][0] == e && s.mesh.face_local_index[f][0] == lf)
                            ? 0
                            : 1;
                    for (int g = 0; g < qf; ++g) {
                        const std::size_t fi = static_cast<std::size_t>(f) * qf + g;
                        const std::size_t ni = (static_cast<std::size_t>(f) * 2 + side) * qf + g;
                        bnd += s.basis.rule1d.weights[g] * s.geom.face_detjac[fi] *
                               s.basis.trace_phi[lf][i + pe * g] *
                               s.geom.face_normal[ni * 2 + d];
                    }
                }
                EXPECT_NEAR(row, bnd, 1e-13);
            }
        }
    }
}

TEST(ComputeQ, ConstantStateGivesZeroGradient) {
    const auto c = ht::assemble_case(ht::poisson_spec(2, 3));
    StateFields state = StateFields::zeros(c.setup.mesh, c.setup.basis);
    std::fill(state.u.begin(), state.u.end(), 3.7);
    std::fill(state.uhat.begin(), state.uhat.end(), 3.7);
    compute_q(state, c.setup.factors, c.setup.mesh);
    for (int d = 0; d < 2; ++d) {
        for (double v : state.q[d]) EXPECT_NEAR(v, 0.0, 1e-12);
    }
}

TEST(ComputeQ, LinearFieldReproducedExactly) {
    const auto c = ht::assemble_case(ht::poisson_spec(1, 4));
    StateFields state = StateFields::zeros(c.setup.mesh, c.setup.basis);
    const auto fx = [](Vec2 x) { return x.x; };
    state.u = interpolate_volume(fx, c.setup.mesh, c.setup.basis);
    state.uhat = interpolate_trace(fx, c.setup.mesh, c.setup.basis);
    compute_q(state, c.setup.factors, c.setup.mesh);
    for (double v : state.q[0]) EXPECT_NEAR(v, 1.0, 1e-12);
    for (double v : state.q[1]) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(ComputeQ, MatchesDenseElementSolve) {
    const auto c = ht::assemble_case(ht::poisson_spec(2, 3));
    const auto& s = c.setup;
    StateFields state = StateFields::zeros(s.mesh, s.basis);
    state.u = ht::random_vector(state.u.size(), 91);
    state.uhat = ht::random_vector(state.uhat.size(), 92);
    compute_q(state, s.factors, s.mesh);

    const int pe = s.basis.pe, nfl = 4 * s.basis.pf;
    const auto uhat_e = gather_element_trace(s.mesh, s.basis.pf, state.uhat);
    for (int e = 0; e < s.mesh.n_elements; ++e) {
        for (int d = 0; d < 2; ++d) {
            // Solve M q = -(B u + C uhat) densely (row-major copy of M).
            std::vector<double> m(static_cast<std::size_t>(pe) * pe);
            std::vector<double> rhsv(pe, 0.0);
            for (int i = 0; i < pe; ++i) {
                for (int j = 0; j < pe; ++j) {
                    m[static_cast<std::size_t>(i) * pe + j] = s.factors.mass.at(i, j, e);
                    rhsv[i] -= s.factors.bmat[d].at(i, j, e) * state.u[e * pe + j];
                }
                for (int l = 0; l < nfl; ++l) {
                    rhsv[i] -= s.factors.cmat[d].at(i, l, e) * uhat_e[e * nfl + l];
                }
            }
            const std::vector<double> q = ht::dense_solve(m, rhsv, pe);
            for (int i = 0; i < pe; ++i) {
                EXPECT_NEAR(state.q[d][e * pe + i], q[i], 1e-12);
            }
        }
    }
}

TEST(AssembleElementOperators, PoissonOperatorsStateIndependent) {
    const auto& spec = ht::poisson_spec(2, 2);
    const CaseSetup s = make_case_setup(spec);
    StateFields a = StateFields::zeros(s.mesh, s.basis);
    StateFields b = StateFields::zeros(s.mesh, s.basis);
    b.u = ht::random_vector(b.u.size(), 5);
    b.uhat = ht::random_vector(b.uhat.size(), 6);
    const ElementOperators oa =
        assemble_element_operators(s.model, a, s.mesh, s.basis, s.geom, s.factors);
    const ElementOperators ob =
        assemble_element_operators(s.model, b, s.mesh, s.basis, s.geom, s.factors);
    EXPECT_EQ(oa.kbar.data, ob.kbar.data);
}

TEST(AssembleElementOperators, RejectsNonFiniteState) {
    const CaseSpec spec = ht::poisson_spec(1, 2);
    const CaseSetup s = make_case_setup(spec);
    StateFields state = StateFields::zeros(s.mesh, s.basis);
    state.u[3] = std::nan("");
    EXPECT_THROW(assemble_element_operators(s.model, state, s.mesh, s.basis, s.geom, s.factors),
                 NonFiniteState);
}

// Condensed solve + recovery vs the monolithic dense system, one element.
TEST(AssembleElementOperators, OneElementCondensationMatchesDense) {
    CaseSpec spec = ht::poisson_spec(1, 1);
    auto c = ht::assemble_case(spec, /*keep_raw=*/true);
    auto& s = c.setup;

    const ht::MonolithicSystem sys = ht::build_monolithic_dense(
        s.model, c.state, s.mesh, s.basis, s.geom, s.factors);
    const std::vector<double> full = ht::dense_solve(sys.a, sys.rhs, sys.n);

    const std::vector<double> kd = to_dense(c.k);
    const std::vector<double> duhat =
        ht::dense_solve(kd, c.rhs, static_cast<int>(c.k.n_dof()));
    const auto du = recover_local(c.ops, gather_element_trace(s.mesh, s.basis.pf, duhat));

    double scale = 0.0;
    for (double v : full) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < duhat.size(); ++i) {
        EXPECT_NEAR(duhat[i], full[sys.hoff + i], 1e-11 * std::max(1.0, scale));
    }
    for (std::size_t i = 0; i < du.size(); ++i) {
        EXPECT_NEAR(du[i], full[sys.uoff + i], 1e-11 * std::max(1.0, scale));
    }
}

// FD check of the q-eliminated linearization blocks for Burgers at a
// randomized state: the directional derivative of (r_u, r_uhat_e) must
// match -[Ebar Fbar; Hbar Jbar] v. Ebar and Jbar are reconstructed from the
// raw blocks and the precomputed inverse products.
TEST(AssembleElementOperators, BurgersJacobianMatchesFiniteDifferences) {
    CaseSpec spec = ht::burgers_spec(1, 2);
    auto c = ht::assemble_case(spec, /*keep_raw=*/true, /*perturb_seed=*/31, /*perturb=*/0.3);
    auto& s = c.setup;
    const int pe = s.basis.pe, nfl = 4 * s.basis.pf, ne = s.mesh.n_elements;

    StateFields dir = StateFields::zeros(s.mesh, s.basis);
    dir.u = ht::random_vector(dir.u.size(), 41, 1.0);
    dir.uhat = ht::random_vector(dir.uhat.size(), 42, 1.0);
    const auto dir_uhat_e = gather_element_trace(s.mesh, s.basis.pf, dir.uhat);

    const double eps = 1e-6;
    StateFields sp = c.state, sm = c.state;
    for (std::size_t i = 0; i < sp.u.size(); ++i) {
        sp.u[i] += eps * dir.u[i];
        sm.u[i] -= eps * dir.u[i];
    }
    for (std::size_t i = 0; i < sp.uhat.size(); ++i) {
        sp.uhat[i] += eps * dir.uhat[i];
        sm.uhat[i] -= eps * dir.uhat[i];
    }
    const ElementOperators op =
        assemble_element_operators(s.model, sp, s.mesh, s.basis, s.geom, s.factors);
    const ElementOperators om =
        assemble_element_operators(s.model, sm, s.mesh, s.basis, s.geom, s.factors);

    for (int e = 0; e < ne; ++e) {
        for (int i = 0; i < pe; ++i) {
            const double fd = -(op.ru[e * pe + i] - om.ru[e * pe + i]) / (2 * eps);
            double an = 0.0;
            for (int j = 0; j < pe; ++j) {
                double ebar = c.ops.e_raw.at(i, j, e);
                for (int d = 0; d < 2; ++d) {
                    for (int p = 0; p < pe; ++p) {
                        ebar -= c.ops.d_raw[d].at(i, p, e) * s.factors.minv_b[d].at(p, j, e);
                    }
                }
                an += ebar * dir.u[e * pe + j];
            }
            for (int l = 0; l < nfl; ++l) {
                double fbar = c.ops.f_raw.at(i, l, e);
                for (int d = 0; d < 2; ++d) {
                    for (int p = 0; p < pe; ++p) {
                        fbar -= c.ops.d_raw[d].at(i, p, e) * s.factors.minv_c[d].at(p, l, e);
                    }
                }
                an += fbar * dir_uhat_e[e * nfl + l];
            }
            EXPECT_NEAR(fd, an, 1e-5 * std::max(1.0, std::abs(an)));
        }
        for (int l = 0; l < nfl; ++l) {
            const double fd = -(op.ruhat_e[e * nfl + l] - om.ruhat_e[e * nfl + l]) / (2 * eps);
            double an = 0.0;
            for (int j = 0; j < pe; ++j) {
                double hbar = c.ops.h_raw.at(l, j, e);
                for (int d = 0; d < 2; ++d) {
                    for (int p = 0; p < pe; ++p) {
                        hbar -= c.ops.g_raw[d].at(l, p, e) * s.factors.minv_b[d].at(p, j, e);
                    }
                }
                an += hbar * dir.u[e * pe + j];
            }
            for (int lp = 0; lp < nfl; ++lp) {
                double jbar = c.ops.j_raw.at(l, lp, e);
                for (int d = 0; d < 2; ++d) {
                    for (int p = 0; p < pe; ++p) {
                        jbar -= c.ops.g_raw[d].at(l, p, e) * s.factors.minv_c[d].at(p, lp, e);
                    }
                }
                an += jbar * dir_uhat_e[e * nfl + lp];
            }
            EXPECT_NEAR(fd, an, 1e-5 * std::max(1.0, std::abs(an)));
        }
    }
}

TEST(AssembleResidual, ExactPolynomialSolutionHasTinyResidual) {
    // u = x + y solves the convection-diffusion equation with constant
    // forcing c_x + c_y; the k>=1 interpolant is exact.
    const Vec2 c{0.7, 1.3};
    const double kappa = 0.4;
    PdeModel model = convdiff_model(
        c, kappa, [c](Vec2) { return c.x + c.y; }, [](Vec2 x) { return x.x + x.y; });
    const CaseSpec spec = ht::poisson_spec(2, 3); // geometry only
    const CaseSetup s = make_case_setup(spec);
    StateFields state = StateFields::zeros(s.mesh, s.basis);
    const auto exact = [](Vec2 x) { return x.x + x.y; };
    state.u = interpolate_volume(exact, s.mesh, s.basis);
    state.uhat = interpolate_trace(exact, s.mesh, s.basis);
    const Residuals r = assemble_residual(model, state, s.mesh, s.basis, s.geom, s.factors);
    EXPECT_LE(residual_norm(r), 1e-10);
}

TEST(AssembleResidual, LinearInForcing) {
    const CaseSpec spec = ht::poisson_spec(1, 2);
    const CaseSetup s = make_case_setup(spec);
    PdeModel m1 = poisson_model([](Vec2) { return 1.0; }, [](Vec2) { return 0.0; });
    PdeModel m2 = poisson_model([](Vec2) { return 2.0; }, [](Vec2) { return 0.0; });
    StateFields state = StateFields::zeros(s.mesh, s.basis);
    const Residuals r1 = assemble_residual(m1, state, s.mesh, s.basis, s.geom, s.factors);
    StateFields state2 = StateFields::zeros(s.mesh, s.basis);
    const Residuals r2 = assemble_residual(m2, state2, s.mesh, s.basis, s.geom, s.factors);
    for (std::size_t i = 0; i < r1.interior.size(); ++i) {
        EXPECT_NEAR(r2.interior[i], 2.0 * r1.interior[i], 1e-14);
    }
}

TEST(RecoverLocal, ZeroInputsGiveZero) {
    auto c = ht::assemble_case(ht::poisson_spec(2, 2));
    c.ops.ru.assign(c.ops.ru.size(), 0.0);
    const std::vector<double> duhat_e(static_cast<std::size_t>(4 * c.setup.basis.pf) *
                                          c.setup.mesh.n_elements,
                                      0.0);
    const auto du = recover_local(c.ops, duhat_e);
    for (double v : du) EXPECT_EQ(v, 0.0);
}

TEST(RecoverLocal, LinearInInputs) {
    auto c = ht::assemble_case(ht::poisson_spec(2, 2));
    const std::size_t nfl = static_cast<std::size_t>(4 * c.setup.basis.pf) * c.setup.mesh.n_elements;
    const auto duhat_e = ht::random_vector(nfl, 77);
    const auto du1 = recover_local(c.ops, duhat_e);
    std::vector<double> doubled(duhat_e.size());
    for (std::size_t i = 0; i < duhat_e.size(); ++i) doubled[i] = 2.0 * duhat_e[i];
    for (double& v : c.ops.ru) v *= 2.0;
    const auto du2 = recover_local(c.ops, doubled);
    for (std::size_t i = 0; i < du1.size(); ++i) {
        EXPECT_NEAR(du2[i], 2.0 * du1[i], 1e-12 * std::max(1.0, std::abs(du1[i])));
    }
}

TEST(RecoverLocal, TimeTermShieldsInterior) {
    // With dt -> 0 the interior block is mass-dominated, so the recovered
    // interior update for a pure trace increment collapses.
    const CaseSpec spec = ht::burgers_spec(1, 2);
    const CaseSetup s = make_case_setup(spec);
    StateFields state = make_initial_state(spec, s);
    const std::vector<double> u_prev = state.u;

    ElementOperators steady =
        assemble_element_operators(s.model, state, s.mesh, s.basis, s.geom, s.factors);
    TimeContext tc{1e-6, &u_prev};
    ElementOperators stiff =
        assemble_element_operators(s.model, state, s.mesh, s.basis, s.geom, s.factors, tc);

    const std::size_t nfl = static_cast<std::size_t>(4 * s.basis.pf) * s.mesh.n_elements;
    const auto duhat_e = ht::random_vector(nfl, 13);
    steady.ru.assign(steady.ru.size(), 0.0);
    stiff.ru.assign(stiff.ru.size(), 0.0);
    const auto du_steady = recover_local(steady, duhat_e);
    const auto du_stiff = recover_local(stiff, duhat_e);
    double ns = 0.0, nt = 0.0;
    for (double v : du_steady) ns += v * v;
    for (double v : du_stiff) nt += v * v;
    EXPECT_LE(std::sqrt(nt), 1e-3 * std::sqrt(ns));
}

TEST(L2Error, ExactForInterpolatedPolynomials) {
    const CaseSpec spec = ht::poisson_spec(2, 3);
    const CaseSetup s = make_case_setup(spec);
    const auto poly = [](Vec2 x) { return 1.0 + x.x * x.x - 2.0 * x.y + x.x * x.y; };
    const auto u = interpolate_volume(poly, s.mesh, s.basis);
    EXPECT_LE(l2_error(u, poly, s.mesh, s.basis), 1e-13);
}

TEST(AssembleResidual, BurgersConstantStateHasZeroInteriorResidual) {
    // A constant state with matching trace makes the flux divergence-free
    // and the stabilization term vanish.
    const CaseSpec spec = ht::burgers_spec(2, 3);
    const CaseSetup s = make_case_setup(spec);
    StateFields state = StateFields::zeros(s.mesh, s.basis);
    std::fill(state.u.begin(), state.u.end(), 0.8);
    std::fill(state.uhat.begin(), state.uhat.end(), 0.8);
    const Residuals r = assemble_residual(s.model, state, s.mesh, s.basis, s.geom, s.factors);
    for (double v : r.interior) EXPECT_NEAR(v, 0.0, 1e-13);
}
