#include "hdg/preconditioner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include <Eigen/Dense>

#include "hdg/errors.hpp"
#include "hdg/parallel.hpp"

namespace hdg {

PrecondKind precond_kind_from_name(const std::string& name) {
    if (name == "none") return PrecondKind::Identity;
    if (name == "bj") return PrecondKind::BJ;
    if (name == "asm") return PrecondKind::ASM;
    throw Error("unknown preconditioner '" + name + "' (expected none, bj, or asm)");
}

std::string precond_kind_name(PrecondKind k) {
    switch (k) {
        case PrecondKind::Identity: return "none";
        case PrecondKind::BJ: return "bj";
        default: return "asm";
    }
}

Preconditioner build_bj(const FaceBlockMatrix& k) {
    const int mpf = k.block_dim();
    DenseBatch diag(mpf, mpf, k.nf);
    for (int f = 0; f < k.nf; ++f) {
        for (int c = 0; c < mpf; ++c) {
            for (int r = 0; r < mpf; ++r) diag.at(r, c, f) = k.blocks.at(r, c, f);
        }
    }
    Preconditioner p;
    p.kind = PrecondKind::BJ;
    try {
        p.bj_inv = lu_invert_batch(diag);
    } catch (const SingularBlock& sb) {
        throw SingularBlock(sb.index, "build_bj (face block)");
    }
    return p;
}

TraceVector apply_bj(const Preconditioner& p, const TraceVector& y) {
    TraceVector z(y.size());
    gemv_strided_batch(p.bj_inv, y, z, false);
    return z;
}

Preconditioner build_asm(const ElementOperators& ops, const Mesh2D& mesh) {
    const int pf = ops.pf;
    DenseBatch pbar = ops.kbar;
    // Enrich the diagonal sub-block of every interior face with the
    // neighboring element's matching diagonal sub-block, on both sides.
    parallel_for(static_cast<std::size_t>(mesh.n_faces), [&](std::size_t f0, std::size_t f1) {
        for (std::size_t f = f0; f < f1; ++f) {
            const int e2 = mesh.face_to_elements[f][1];
            if (e2 == kNoElement) continue;
            const int e1 = mesh.face_to_elements[f][0];
            const int l1 = mesh.face_local_index[f][0];
            const int l2 = mesh.face_local_index[f][1];
            for (int c = 0; c < pf; ++c) {
                for (int r = 0; r < pf; ++r) {
                    const double sum = ops.kbar.at(l1 * pf + r, l1 * pf + c, e1) +
                                       ops.kbar.at(l2 * pf + r, l2 * pf + c, e2);
                    pbar.at(l1 * pf + r, l1 * pf + c, e1) = sum;
                    pbar.at(l2 * pf + r, l2 * pf + c, e2) = sum;
                }
            }
        }
    });
    Preconditioner p;
    p.kind = PrecondKind::ASM;
    try {
        p.asm_inv = lu_invert_batch(pbar);
    } catch (const SingularBlock& sb) {
        throw SingularBlock(sb.index, "build_asm (element block)");
    }
    return p;
}

TraceVector apply_asm(const Preconditioner& p, const TraceVector& y, const Mesh2D& mesh) {
    const int pf = p.asm_inv.rows / 4;
    const std::vector<double> ye = gather_element_trace(mesh, pf, y);
    std::vector<double> ze(ye.size());
    gemv_strided_batch(p.asm_inv, ye, ze, false);
    TraceVector z(y.size(), 0.0);
    parallel_for(static_cast<std::size_t>(mesh.n_faces), [&](std::size_t f0, std::size_t f1) {
        for (std::size_t f = f0; f < f1; ++f) {
            for (int side = 0; side < 2; ++side) {
                const int e = mesh.face_to_elements[f][side];
                if (e == kNoElement) continue;
                const int l = mesh.face_local_index[f][side];
                for (int b = 0; b < pf; ++b) {
                    z[f * pf + b] += ze[static_cast<std::size_t>(e) * 4 * pf + l * pf + b];
                }
            }
        }
    });
    return z;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

} // namespace

std::vector<std::complex<double>> compute_harmonic_ritz(const LinearOp& op, std::size_t n_dof,
                                                        int degree, std::uint64_t seed) {
    if (degree < 1) throw DimensionMismatch("polynomial degree must be >= 1");
    if (static_cast<std::size_t>(degree) > n_dof) {
        throw DimensionMismatch("polynomial degree exceeds the operator dimension");
    }

    // Seeded start vector; raw 53-bit draws keep the sequence identical
    // across standard library implementations.
    std::mt19937_64 rng(seed);
    std::vector<double> v0(n_dof);
    for (double& x : v0) x = 2.0 * (static_cast<double>(rng() >> 11) * 0x1p-53) - 1.0;
    const double nv = norm2(v0);
    for (double& x : v0) x /= nv;

    std::vector<std::vector<double>> basis;
    basis.push_back(std::move(v0));
    const int pmax = degree;
    std::vector<double> hess(static_cast<std::size_t>(pmax + 1) * pmax, 0.0); // (p+1) x p col-major
    auto h = [&](int i, int j) -> double& { return hess[static_cast<std::size_t>(j) * (pmax + 1) + i]; };

    int p_eff = 0;
    double scale = 1.0;
    std::vector<double> w(n_dof);
    for (int j = 0; j < pmax; ++j) {
        op(basis[j], w);
        if (j == 0) scale = std::max(1.0, norm2(w));
        for (int i = 0; i <= j; ++i) {
            const double hij = dot(basis[i], w);
            h(i, j) = hij;
            for (std::size_t t = 0; t < n_dof; ++t) w[t] -= hij * basis[i][t];
        }
        const double hn = norm2(w);
        h(j + 1, j) = hn;
        p_eff = j + 1;
        if (hn < 1e-14 * scale) break; // invariant subspace: lower degree suffices
        if (j + 1 < pmax) {
            std::vector<double> vn(n_dof);
            for (std::size_t t = 0; t < n_dof; ++t) vn[t] = w[t] / hn;
            basis.push_back(std::move(vn));
        }
    }

    const int p = p_eff;
    Eigen::MatrixXd hs(p, p);
    for (int j = 0; j < p; ++j) {
        for (int i = 0; i < p; ++i) hs(i, j) = h(i, j);
    }
    const double hp1 = (p < pmax) ? 0.0 : h(p, p - 1);
    if (hp1 != 0.0) {
        // Harmonic correction: add hp1^2 * (Hs^T)^-1 e_p to the last column.
        Eigen::VectorXd ep = Eigen::VectorXd::Zero(p);
        ep(p - 1) = 1.0;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(hs.transpose());
        if (lu.isInvertible()) {
            hs.col(p - 1) += hp1 * hp1 * lu.solve(ep);
        } else {
            std::fprintf(stderr,
                         "warning: singular Hessenberg block, using plain Ritz values\n");
        }
    }

    Eigen::EigenSolver<Eigen::MatrixXd> es(hs, /*computeEigenvectors=*/false);
    std::vector<std::complex<double>> vals;
    double max_abs = 0.0;
    for (int i = 0; i < p; ++i) {
        std::complex<double> t(es.eigenvalues()(i).real(), es.eigenvalues()(i).imag());
        if (std::abs(t.imag()) < 1e-12 * std::abs(t)) t = {t.real(), 0.0};
        vals.push_back(t);
        max_abs = std::max(max_abs, std::abs(t));
    }

    // Drop near-zero values (a 1/theta step would blow up) and rebuild exact
    // conjugate closure from the upper-half-plane representatives.
    std::vector<std::complex<double>> kept;
    for (const auto& t : vals) {
        if (std::abs(t) < 1e-12 * max_abs) {
            std::fprintf(stderr, "warning: dropping near-zero Ritz value (%g, %g)\n", t.real(),
                         t.imag());
            continue;
        }
        if (t.imag() < 0.0) continue;
        kept.push_back(t);
        if (t.imag() > 0.0) kept.emplace_back(t.real(), -t.imag());
    }
    return leja_order(kept);
}

std::vector<std::complex<double>> leja_order(const std::vector<std::complex<double>>& theta) {
    using C = std::complex<double>;
    // Candidates: real values and the positive-imaginary member of each
    // conjugate pair (the mate follows automatically).
    std::vector<C> cands;
    for (const auto& t : theta) {
        if (t.imag() >= 0.0) cands.push_back(t);
    }
    std::vector<C> out;
    std::vector<bool> used(cands.size(), false);
    const auto better = [](const C& a, double ma, const C& b, double mb) {
        if (ma != mb) return ma > mb;
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    };
    for (std::size_t step = 0; step < cands.size(); ++step) {
        int best = -1;
        double best_metric = 0.0;
        for (std::size_t c = 0; c < cands.size(); ++c) {
            if (used[c]) continue;
            double metric;
            if (out.empty()) {
                metric = std::abs(cands[c]);
            } else {
                metric = 0.0;
                for (const auto& chosen : out) metric += std::log(std::abs(cands[c] - chosen));
            }
            if (best < 0 || better(cands[c], metric, cands[best], best_metric)) {
                best = static_cast<int>(c);
                best_metric = metric;
            }
        }
        used[best] = true;
        out.push_back(cands[best]);
        if (cands[best].imag() > 0.0) out.push_back(std::conj(cands[best]));
    }
    return out;
}

TraceVector apply_poly(const Preconditioner& p, const LinearOp& base_apply,
                       const FaceBlockMatrix& k, const TraceVector& y, long* inner_ops) {
    const std::size_t n = y.size();
    std::vector<double> q(n), w(n, 0.0), t(n), s(n), kv(n);
    std::vector<double> scratch;
    base_apply(y, q);

    const auto op = [&](const std::vector<double>& in, std::vector<double>& out) {
        block_matvec(k, in, kv, scratch);
        base_apply(kv, out);
        if (inner_ops) ++*inner_ops;
    };

    std::size_t i = 0;
    while (i < p.ritz.size()) {
        const std::complex<double> th = p.ritz[i];
        if (th.imag() == 0.0) {
            const double inv = 1.0 / th.real();
            for (std::size_t j = 0; j < n; ++j) w[j] += inv * q[j];
            op(q, t);
            for (std::size_t j = 0; j < n; ++j) q[j] -= inv * t[j];
            i += 1;
        } else {
            // Conjugate pair a +/- ib applied in one real-arithmetic step:
            // the shared vector s = 2a q - (op q) feeds both the accumulator
            // and the next q, keeping the residual-polynomial product exact.
            const double a = th.real(), b = th.imag();
            const double inv = 1.0 / (a * a + b * b);
            op(q, t);
            for (std::size_t j = 0; j < n; ++j) s[j] = 2.0 * a * q[j] - t[j];
            for (std::size_t j = 0; j < n; ++j) w[j] += inv * s[j];
            op(s, t);
            for (std::size_t j = 0; j < n; ++j) q[j] -= inv * t[j];
            i += 2;
        }
    }
    return w;
}

LinearOp make_base_apply(const Preconditioner& p, const Mesh2D& mesh) {
    switch (p.kind) {
        case PrecondKind::Identity:
            return [](const std::vector<double>& y, std::vector<double>& z) { z = y; };
        case PrecondKind::BJ:
            return [&p](const std::vector<double>& y, std::vector<double>& z) {
                z.resize(y.size());
                gemv_strided_batch(p.bj_inv, y, z, false);
            };
        default:
            return [&p, &mesh](const std::vector<double>& y, std::vector<double>& z) {
                z = apply_asm(p, y, mesh);
            };
    }
}

LinearOp make_preconditioner_apply(const Preconditioner& p, const FaceBlockMatrix& k,
                                   const Mesh2D& mesh, long* inner_ops) {
    LinearOp base = make_base_apply(p, mesh);
    if (p.poly_degree == 0 || p.ritz.empty()) return base;
    return [&p, &k, base, inner_ops](const std::vector<double>& y, std::vector<double>& z) {
        z = apply_poly(p, base, k, y, inner_ops);
    };
}

} // namespace hdg
