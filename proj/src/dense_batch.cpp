#include "hdg/dense_batch.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include "hdg/errors.hpp"
#include "hdg/parallel.hpp"

namespace hdg {

namespace {

// In-place LU with partial pivoting on a column-major n x n block, followed
// by column-wise solves against the permuted identity to form the inverse.
// Returns false when a pivot falls below tol (relative to the block's
// max-norm), leaving inv unspecified.
bool invert_block(const double* a, double* inv, double* lu, int* piv, int n) {
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    double amax = 0.0;
    for (std::size_t i = 0; i < nn; ++i) amax = std::max(amax, std::abs(a[i]));
    const double tol = 1e-14 * amax;
    std::copy(a, a + nn, lu);

    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::abs(lu[k * n + k]);
        for (int i = k + 1; i < n; ++i) {
            const double v = std::abs(lu[k * n + i]);
            if (v > best) {
                best = v;
                p = i;
            }
        }
        if (!(best > tol)) return false;
        piv[k] = p;
        if (p != k) {
            for (int c = 0; c < n; ++c) std::swap(lu[c * n + k], lu[c * n + p]);
        }
        const double d = 1.0 / lu[k * n + k];
        for (int i = k + 1; i < n; ++i) lu[k * n + i] *= d;
        for (int c = k + 1; c < n; ++c) {
            const double m = lu[c * n + k];
            if (m != 0.0) {
                for (int i = k + 1; i < n; ++i) lu[c * n + i] -= lu[k * n + i] * m;
            }
        }
    }

    // Solve A X = I column by column: apply P to the unit vector, then
    // forward/back substitution.
    for (int col = 0; col < n; ++col) {
        double* x = inv + static_cast<std::size_t>(col) * n;
        std::fill(x, x + n, 0.0);
        x[col] = 1.0;
        for (int k = 0; k < n; ++k) {
            if (piv[k] != k) std::swap(x[k], x[piv[k]]);
        }
        for (int k = 0; k < n; ++k) {
            const double xk = x[k];
            if (xk != 0.0) {
                for (int i = k + 1; i < n; ++i) x[i] -= lu[k * n + i] * xk;
            }
        }
        for (int k = n - 1; k >= 0; --k) {
            double xk = x[k];
            for (int i = k + 1; i < n; ++i) xk -= lu[i * n + k] * x[i];
            x[k] = xk / lu[k * n + k];
        }
    }
    return true;
}

} // namespace

DenseBatch lu_invert_batch(const DenseBatch& a) {
    if (a.rows != a.cols || a.rows < 1) {
        throw DimensionMismatch("lu_invert_batch requires square blocks, got " +
                                std::to_string(a.rows) + "x" + std::to_string(a.cols));
    }
    const int n = a.rows;
    DenseBatch out(n, n, a.batch);
    std::atomic<int> bad{-1};
    parallel_for(static_cast<std::size_t>(a.batch), [&](std::size_t b0, std::size_t b1) {
        std::vector<double> lu(static_cast<std::size_t>(n) * n);
        std::vector<int> piv(n);
        for (std::size_t b = b0; b < b1; ++b) {
            if (!invert_block(a.data.data() + b * a.block_size(),
                              out.data.data() + b * out.block_size(), lu.data(), piv.data(), n)) {
                int expected = -1;
                bad.compare_exchange_strong(expected, static_cast<int>(b));
                return;
            }
        }
    });
    if (bad.load() >= 0) throw SingularBlock(bad.load(), "lu_invert_batch");
    return out;
}

DenseBatch gemm_batch(const DenseBatch& a, const DenseBatch& b, bool transpose_a) {
    const int m = transpose_a ? a.cols : a.rows;
    const int k = transpose_a ? a.rows : a.cols;
    if (k != b.rows) {
        throw DimensionMismatch("gemm_batch inner dimensions " + std::to_string(k) + " vs " +
                                std::to_string(b.rows));
    }
    if (a.batch != b.batch && a.batch != 1 && b.batch != 1) {
        throw DimensionMismatch("gemm_batch batch counts " + std::to_string(a.batch) + " vs " +
                                std::to_string(b.batch));
    }
    const int nb = std::max(a.batch, b.batch);
    DenseBatch c(m, b.cols, nb);
    const int ncols = b.cols;
    parallel_for(static_cast<std::size_t>(nb), [&](std::size_t b0, std::size_t b1) {
        for (std::size_t blk = b0; blk < b1; ++blk) {
            const double* pa = a.data.data() + (a.batch == 1 ? 0 : blk) * a.block_size();
            const double* pb = b.data.data() + (b.batch == 1 ? 0 : blk) * b.block_size();
            double* pc = c.data.data() + blk * c.block_size();
            for (int j = 0; j < ncols; ++j) {
                const double* bj = pb + static_cast<std::size_t>(j) * b.rows;
                for (int i = 0; i < m; ++i) {
                    double acc = 0.0;
                    if (transpose_a) {
                        const double* ai = pa + static_cast<std::size_t>(i) * a.rows;
                        for (int p = 0; p < k; ++p) acc += ai[p] * bj[p];
                    } else {
                        for (int p = 0; p < k; ++p) acc += pa[static_cast<std::size_t>(p) * m + i] * bj[p];
                    }
                    pc[static_cast<std::size_t>(j) * m + i] = acc;
                }
            }
        }
    });
    return c;
}

void gemv_strided_batch(const DenseBatch& a, std::span<const double> x, std::span<double> y,
                        bool accumulate) {
    const std::size_t need_x = static_cast<std::size_t>(a.cols) * a.batch;
    const std::size_t need_y = static_cast<std::size_t>(a.rows) * a.batch;
    if (x.size() != need_x || y.size() != need_y) {
        throw DimensionMismatch("gemv_strided_batch expects x of " + std::to_string(need_x) +
                                " and y of " + std::to_string(need_y));
    }
    const int m = a.rows;
    const int k = a.cols;
    parallel_for(static_cast<std::size_t>(a.batch), [&](std::size_t b0, std::size_t b1) {
        for (std::size_t blk = b0; blk < b1; ++blk) {
            const double* pa = a.data.data() + blk * a.block_size();
            const double* px = x.data() + blk * k;
            double* py = y.data() + blk * m;
            for (int i = 0; i < m; ++i) {
                double acc = 0.0;
                for (int p = 0; p < k; ++p) acc += pa[static_cast<std::size_t>(p) * m + i] * px[p];
                py[i] = accumulate ? py[i] + acc : acc;
            }
        }
    });
}

} // namespace hdg
