#include "hdg/basis.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include "hdg/errors.hpp"

namespace hdg {

namespace {

// Legendre P_n(x) and P_n'(x) on [-1,1] by the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
    double p0 = 1.0, p1 = x;
    if (n == 0) {
        p = 1.0;
        dp = 0.0;
        return;
    }
    for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
    }
    p = p1;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
}

} // namespace

QuadratureRule gauss_rule(int q) {
    if (q < 1 || q > 30) throw UnsupportedOrder("gauss_rule supports 1..30 points, got " + std::to_string(q));
    std::vector<double> x(q), w(q);
    const int half = (q + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Newton from the Chebyshev-like estimate; converges in a few steps.
        double t = -std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
        double p, dp;
        for (int it = 0; it < 100; ++it) {
            legendre(q, t, p, dp);
            const double dt = p / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        legendre(q, t, p, dp);
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
        x[q - 1 - i] = -t;
        w[q - 1 - i] = w[i];
    }
    if (q % 2 == 1) x[q / 2] = 0.0;
    QuadratureRule r;
    r.points.resize(q);
    r.weights.resize(q);
    for (int i = 0; i < q; ++i) {
        r.points[i] = 0.5 * (x[i] + 1.0);
        r.weights[i] = 0.5 * w[i];
    }
    return r;
}

QuadratureRule2D tensor_rule(const QuadratureRule& r1d) {
    const int q = r1d.size();
    QuadratureRule2D r;
    r.points.resize(static_cast<std::size_t>(q) * q);
    r.weights.resize(static_cast<std::size_t>(q) * q);
    for (int gy = 0; gy < q; ++gy) {
        for (int gx = 0; gx < q; ++gx) {
            const int g = gy * q + gx;
            r.points[g] = {r1d.points[gx], r1d.points[gy]};
            r.weights[g] = r1d.weights[gx] * r1d.weights[gy];
        }
    }
    return r;
}

std::vector<double> lobatto_nodes(int n) {
    if (n < 2) throw UnsupportedOrder("lobatto_nodes needs at least 2 points");
    std::vector<double> x(n);
    x[0] = -1.0;
    x[n - 1] = 1.0;
    const int m = n - 1; // interior points are the roots of P'_m
    for (int i = 1; i < m; ++i) {
        double t = -std::cos(std::numbers::pi * i / m);
        for (int it = 0; it < 100; ++it) {
            double p, dp;
            legendre(m, t, p, dp);
            // P'' from the Legendre ODE: (1-x^2) P'' = 2x P' - m(m+1) P.
            const double ddp = (2.0 * t * dp - m * (m + 1.0) * p) / (1.0 - t * t);
            const double dt = dp / ddp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[i] = t;
    }
    // Symmetrize exactly about the midpoint.
    for (int i = 0; i < n / 2; ++i) x[n - 1 - i] = -x[i];
    if (n % 2 == 1) x[n / 2] = 0.0;
    std::vector<double> mapped(n);
    for (int i = 0; i < n; ++i) mapped[i] = 0.5 * (x[i] + 1.0);
    return mapped;
}

void lagrange_values(const std::vector<double>& nodes, double x, double* out) {
    const int n = static_cast<int>(nodes.size());
    for (int j = 0; j < n; ++j) {
        double v = 1.0;
        for (int m = 0; m < n; ++m) {
            if (m == j) continue;
            v *= (x - nodes[m]) / (nodes[j] - nodes[m]);
        }
        out[j] = v;
    }
}

void lagrange_derivs(const std::vector<double>& nodes, double x, double* out) {
    const int n = static_cast<int>(nodes.size());
    for (int j = 0; j < n; ++j) {
        double sum = 0.0;
        for (int l = 0; l < n; ++l) {
            if (l == j) continue;
            double prod = 1.0 / (nodes[j] - nodes[l]);
            for (int m = 0; m < n; ++m) {
                if (m == j || m == l) continue;
                prod *= (x - nodes[m]) / (nodes[j] - nodes[m]);
            }
            sum += prod;
        }
        out[j] = sum;
    }
}

std::array<double, 2> BasisTab::face_point(int lf, double s) {
    switch (lf) {
        case 0: return {s, 0.0}; // bottom
        case 1: return {1.0, s}; // right
        case 2: return {s, 1.0}; // top
        default: return {0.0, s}; // left
    }
}

BasisTab tabulate_basis(int k, const QuadratureRule& quad) {
    if (k < 1 || k > 6) throw UnsupportedDegree("tabulate_basis supports 1 <= k <= 6, got " + std::to_string(k));
    BasisTab b;
    b.degree = k;
    b.pf = k + 1;
    b.pe = b.pf * b.pf;
    b.rule1d = quad;
    b.rule2d = tensor_rule(quad);
    b.qf = quad.size();
    b.qe = b.rule2d.size();
    b.nodes1d = lobatto_nodes(k + 1);

    const int n1 = k + 1;
    std::vector<double> lx(n1), ly(n1), dlx(n1), dly(n1);

    b.phi.resize(static_cast<std::size_t>(b.pe) * b.qe);
    b.dphi_dxi.resize(b.phi.size());
    b.dphi_deta.resize(b.phi.size());
    for (int g = 0; g < b.qe; ++g) {
        const auto [xi, eta] = b.rule2d.points[g];
        lagrange_values(b.nodes1d, xi, lx.data());
        lagrange_values(b.nodes1d, eta, ly.data());
        lagrange_derivs(b.nodes1d, xi, dlx.data());
        lagrange_derivs(b.nodes1d, eta, dly.data());
        for (int bb = 0; bb < n1; ++bb) {
            for (int aa = 0; aa < n1; ++aa) {
                const int i = aa + n1 * bb;
                const std::size_t idx = static_cast<std::size_t>(i) + static_cast<std::size_t>(b.pe) * g;
                b.phi[idx] = lx[aa] * ly[bb];
                b.dphi_dxi[idx] = dlx[aa] * ly[bb];
                b.dphi_deta[idx] = lx[aa] * dly[bb];
            }
        }
    }

    b.psi.resize(static_cast<std::size_t>(b.pf) * b.qf);
    for (int g = 0; g < b.qf; ++g) {
        lagrange_values(b.nodes1d, quad.points[g], lx.data());
        for (int l = 0; l < b.pf; ++l) b.psi[static_cast<std::size_t>(l) + static_cast<std::size_t>(b.pf) * g] = lx[l];
    }

    for (int lf = 0; lf < 4; ++lf) {
        auto& tp = b.trace_phi[lf];
        tp.resize(static_cast<std::size_t>(b.pe) * b.qf);
        for (int g = 0; g < b.qf; ++g) {
            const auto [xi, eta] = BasisTab::face_point(lf, quad.points[g]);
            lagrange_values(b.nodes1d, xi, lx.data());
            lagrange_values(b.nodes1d, eta, ly.data());
            for (int bb = 0; bb < n1; ++bb) {
                for (int aa = 0; aa < n1; ++aa) {
                    tp[static_cast<std::size_t>(aa + n1 * bb) + static_cast<std::size_t>(b.pe) * g] =
                        lx[aa] * ly[bb];
                }
            }
        }
    }
    return b;
}

std::vector<double> eval_basis_at(const BasisTab& basis, const QuadratureRule2D& rule) {
    const int n1 = basis.degree + 1;
    std::vector<double> lx(n1), ly(n1);
    std::vector<double> out(static_cast<std::size_t>(basis.pe) * rule.size());
    for (int g = 0; g < rule.size(); ++g) {
        const auto [xi, eta] = rule.points[g];
        lagrange_values(basis.nodes1d, xi, lx.data());
        lagrange_values(basis.nodes1d, eta, ly.data());
        for (int bb = 0; bb < n1; ++bb) {
            for (int aa = 0; aa < n1; ++aa) {
                out[static_cast<std::size_t>(aa + n1 * bb) + static_cast<std::size_t>(basis.pe) * g] =
                    lx[aa] * ly[bb];
            }
        }
    }
    return out;
}

} // namespace hdg
