#include "hdg/face_matrix.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <gtest/gtest.h>

#include "hdg/errors.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace hdg;
namespace ht = hdg::testing;

namespace {

// Unpivoted Cholesky; returns false when a pivot is non-positive.
bool cholesky_ok(std::vector<double> a, int n) {
    for (int k = 0; k < n; ++k) {
        double d = a[static_cast<std::size_t>(k) * n + k];
        for (int p = 0; p < k; ++p) {
            const double l = a[static_cast<std::size_t>(k) * n + p];
            d -= l * l;
        }
        if (d <= 0.0) return false;
        const double lkk = std::sqrt(d);
        a[static_cast<std::size_t>(k) * n + k] = lkk;
        for (int r = k + 1; r < n; ++r) {
            double v = a[static_cast<std::size_t>(r) * n + k];
            for (int p = 0; p < k; ++p) {
                v -= a[static_cast<std::size_t>(r) * n + p] * a[static_cast<std::size_t>(k) * n + p];
            }
            a[static_cast<std::size_t>(r) * n + k] = v / lkk;
        }
    }
    return true;
}

} // namespace

TEST(AssembleGlobal, OneElementStructure) {
    const auto c = ht::assemble_case(ht::poisson_spec(1, 1));
    EXPECT_EQ(c.k.nf, 4);
    EXPECT_EQ(c.k.nb(), 7);
    for (int f = 0; f < 4; ++f) {
        EXPECT_EQ(c.k.neighbor_at(f, 0), f);
        // Slots 1..3: the remaining three faces of the single element.
        std::vector<bool> seen(4, false);
        seen[f] = true;
        for (int slot = 1; slot < 4; ++slot) {
            const auto g = c.k.neighbor_at(f, slot);
            ASSERT_GE(g, 0);
            ASSERT_LT(g, 4);
            EXPECT_FALSE(seen[g]);
            seen[g] = true;
        }
        // Second-element slots empty with zero blocks.
        for (int slot = 4; slot < 7; ++slot) {
            EXPECT_EQ(c.k.neighbor_at(f, slot), kNoFace);
            for (int r = 0; r < c.k.block_dim(); ++r) {
                for (int col = 0; col < c.k.block_dim(); ++col) {
                    EXPECT_EQ(c.k.blocks.at(r, slot * c.k.block_dim() + col, f), 0.0);
                }
            }
        }
    }
}

TEST(AssembleGlobal, NeighborStructureSymmetric) {
    const auto c = ht::assemble_case(ht::poisson_spec(1, 3));
    const auto contains = [&](int f, std::int64_t g) {
        for (int slot = 0; slot < c.k.nb(); ++slot) {
            if (c.k.neighbor_at(f, slot) == g) return true;
        }
        return false;
    };
    for (int f = 0; f < c.k.nf; ++f) {
        for (int slot = 0; slot < c.k.nb(); ++slot) {
            const auto g = c.k.neighbor_at(f, slot);
            if (g == kNoFace) continue;
            EXPECT_TRUE(contains(static_cast<int>(g), f)) << "f=" << f << " g=" << g;
        }
    }
}

TEST(AssembleGlobal, PoissonTraceOperatorSymmetricDefinite) {
    // The condensed Poisson operator is symmetric and definite on the
    // flux-continuity rows (interior faces). Dirichlet faces carry the
    // uhat = u_D constraint row instead, which is structurally one-sided.
    for (int n : {2, 3}) {
        const auto c = ht::assemble_case(ht::poisson_spec(2, n));
        const std::vector<double> dense = to_dense(c.k);
        const std::size_t nd = c.k.n_dof();
        const int pf = c.setup.basis.pf;
        std::vector<int> keep;
        for (int f = 0; f < c.setup.mesh.n_faces; ++f) {
            if (c.setup.mesh.is_boundary(f)) continue;
            for (int b = 0; b < pf; ++b) keep.push_back(f * pf + b);
        }
        const int m = static_cast<int>(keep.size());
        ASSERT_GT(m, 0);
        std::vector<double> sub(static_cast<std::size_t>(m) * m);
        double asym = 0.0, scale = 0.0;
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                const double v = dense[static_cast<std::size_t>(keep[i]) * nd + keep[j]];
                sub[static_cast<std::size_t>(i) * m + j] = -v; // definite after sign flip
                scale = std::max(scale, std::abs(v));
            }
        }
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                asym = std::max(asym, std::abs(sub[static_cast<std::size_t>(i) * m + j] -
                                               sub[static_cast<std::size_t>(j) * m + i]));
            }
        }
        EXPECT_LE(asym, 1e-12 * std::max(1.0, scale));
        EXPECT_TRUE(cholesky_ok(sub, m));
    }
}

TEST(AssembleGlobal, SelfBlocksInvertible) {
    const auto c = ht::assemble_case(ht::poisson_spec(1, 3));
    DenseBatch diag(c.k.block_dim(), c.k.block_dim(), c.k.nf);
    for (int f = 0; f < c.k.nf; ++f) {
        for (int col = 0; col < c.k.block_dim(); ++col) {
            for (int r = 0; r < c.k.block_dim(); ++r) diag.at(r, col, f) = c.k.blocks.at(r, col, f);
        }
    }
    EXPECT_NO_THROW(lu_invert_batch(diag));
}

TEST(GatherExtended, SlotOrderIsBitCopy) {
    const auto c = ht::assemble_case(ht::poisson_spec(1, 2));
    const auto x = ht::random_vector(c.k.n_dof(), 123);
    const auto gathered = gather_extended(x, c.k);
    const int mpf = c.k.block_dim();
    for (int f = 0; f < c.k.nf; ++f) {
        for (int slot = 0; slot < c.k.nb(); ++slot) {
            const auto g = c.k.neighbor_at(f, slot);
            for (int i = 0; i < mpf; ++i) {
                const double want = (g == kNoFace) ? 0.0 : x[g * mpf + i];
                EXPECT_EQ(gathered[(static_cast<std::size_t>(f) * c.k.nb() + slot) * mpf + i], want);
            }
        }
    }
}

TEST(GatherExtended, ScatterTransposeCountsMultiplicity) {
    // Scatter-adding all-ones back through the neighbor table counts how
    // often each face appears in a neighbor list: 7 for interior faces
    // (self + 3 per adjacent element), 4 for boundary faces.
    const auto c = ht::assemble_case(ht::poisson_spec(1, 3));
    const std::vector<double> ones(c.k.n_dof(), 1.0);
    const auto gathered = gather_extended(ones, c.k);
    std::vector<double> counts(c.k.n_dof(), 0.0);
    const int mpf = c.k.block_dim();
    for (int f = 0; f < c.k.nf; ++f) {
        for (int slot = 0; slot < c.k.nb(); ++slot) {
            const auto g = c.k.neighbor_at(f, slot);
            if (g == kNoFace) continue;
            for (int i = 0; i < mpf; ++i) {
                counts[g * mpf + i] += gathered[(static_cast<std::size_t>(f) * c.k.nb() + slot) * mpf + i];
            }
        }
    }
    for (int f = 0; f < c.k.nf; ++f) {
        const double expect = c.setup.mesh.is_boundary(f) ? 4.0 : 7.0;
        for (int i = 0; i < mpf; ++i) EXPECT_EQ(counts[f * mpf + i], expect);
    }
}

TEST(BlockMatvec, IdentitySelfBlocks) {
    auto c = ht::assemble_case(ht::poisson_spec(1, 2));
    std::fill(c.k.blocks.data.begin(), c.k.blocks.data.end(), 0.0);
    for (int f = 0; f < c.k.nf; ++f) {
        for (int i = 0; i < c.k.block_dim(); ++i) c.k.blocks.at(i, i, f) = 1.0;
    }
    const auto x = ht::random_vector(c.k.n_dof(), 9);
    const auto y = block_matvec(c.k, x);
    EXPECT_EQ(x, y);
}

TEST(BlockMatvec, MatchesDenseOracle) {
    for (int kdeg : {1, 2}) {
        const auto c = ht::assemble_case(ht::burgers_spec(kdeg, 3), false, 3, 0.2);
        const std::vector<double> dense = to_dense(c.k);
        const std::size_t nd = c.k.n_dof();
        for (int trial = 0; trial < 100; ++trial) {
            const auto x = ht::random_vector(nd, 1000 + trial);
            const auto y = block_matvec(c.k, x);
            double scale = 0.0;
            for (double v : y) scale = std::max(scale, std::abs(v));
            for (std::size_t i = 0; i < nd; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < nd; ++j) acc += dense[i * nd + j] * x[j];
                EXPECT_NEAR(y[i], acc, 1e-13 * std::max(1.0, scale));
            }
        }
    }
}

TEST(BlockMatvec, Linear) {
    const auto c = ht::assemble_case(ht::poisson_spec(2, 3));
    const auto x = ht::random_vector(c.k.n_dof(), 21);
    const auto y = ht::random_vector(c.k.n_dof(), 22);
    std::vector<double> xy(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) xy[i] = x[i] + y[i];
    const auto ax = block_matvec(c.k, x);
    const auto ay = block_matvec(c.k, y);
    const auto axy = block_matvec(c.k, xy);
    for (std::size_t i = 0; i < x.size(); ++i) {
        EXPECT_NEAR(axy[i], ax[i] + ay[i], 1e-13 * std::max(1.0, std::abs(axy[i])));
    }
}

TEST(BlockMatvec, DimensionMismatch) {
    const auto c = ht::assemble_case(ht::poisson_spec(1, 2));
    const std::vector<double> x(c.k.n_dof() + 1, 0.0);
    EXPECT_THROW(block_matvec(c.k, x), DimensionMismatch);
}

TEST(ToDense, GuardsAgainstHugeSystems) {
    FaceBlockMatrix k;
    k.pf = 10;
    k.nf = 3000;
    EXPECT_THROW(to_dense(k), TooLargeForDense);
}

TEST(MatrixDump, RoundTripBitExact) {
    const auto c = ht::assemble_case(ht::burgers_spec(1, 2));
    const std::string p1 = ::testing::TempDir() + "k1.hdgk";
    const std::string p2 = ::testing::TempDir() + "k2.hdgk";
    write_matrix(p1, c.k, c.rhs);
    auto [k2, r2] = read_matrix(p1);
    EXPECT_EQ(k2.pf, c.k.pf);
    EXPECT_EQ(k2.nf, c.k.nf);
    EXPECT_EQ(k2.neighbor, c.k.neighbor);
    EXPECT_EQ(k2.blocks.data, c.k.blocks.data);
    EXPECT_EQ(r2, c.rhs);
    write_matrix(p2, k2, r2);

    std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
    const std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    const std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    EXPECT_EQ(b1, b2);
    EXPECT_FALSE(b1.empty());
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST(MatrixDump, RejectsCorruptHeader) {
    const std::string p = ::testing::TempDir() + "bad.hdgk";
    std::ofstream os(p, std::ios::binary);
    os << "NOPE";
    os.close();
    EXPECT_THROW(read_matrix(p), IoError);
    std::remove(p.c_str());
}

// Flipping the canonical direction of one interior face relabels that
// face's dofs in reverse; the solve must produce the same physical answer
// with reversed coefficients on the flipped face.
TEST(Orientation, ReversedFaceGivesMirroredCoefficients) {
    CaseSpec spec = ht::poisson_spec(2, 2);
    const CaseSetup base = make_case_setup(spec);

    CaseSetup flipped = make_case_setup(spec);
    int target = -1;
    for (int f = 0; f < flipped.mesh.n_faces; ++f) {
        if (!flipped.mesh.is_boundary(f)) {
            target = f;
            break;
        }
    }
    ASSERT_GE(target, 0);
    std::swap(flipped.mesh.face_vertices[target][0], flipped.mesh.face_vertices[target][1]);
    flipped.mesh.face_side_reversed[target][0] = !flipped.mesh.face_side_reversed[target][0];
    flipped.mesh.face_side_reversed[target][1] = !flipped.mesh.face_side_reversed[target][1];
    flipped.geom = compute_geometry(flipped.mesh, gauss_rule(spec.k + 2));
    flipped.factors = precompute_local_factors(flipped.mesh, flipped.basis, flipped.geom);

    const auto solve_one = [](const CaseSetup& s) {
        StateFields state = StateFields::zeros(s.mesh, s.basis);
        ElementOperators ops =
            assemble_element_operators(s.model, state, s.mesh, s.basis, s.geom, s.factors);
        auto [k, rhs] = assemble_global(ops, s.mesh);
        return ht::dense_solve(to_dense(k), rhs, static_cast<int>(k.n_dof()));
    };
    const auto ub = solve_one(base);
    const auto uf = solve_one(flipped);
    const int pf = base.basis.pf;
    for (int f = 0; f < base.mesh.n_faces; ++f) {
        for (int b = 0; b < pf; ++b) {
            const double expect = (f == target) ? uf[f * pf + (pf - 1 - b)] : uf[f * pf + b];
            EXPECT_NEAR(ub[f * pf + b], expect, 1e-11);
        }
    }
}
