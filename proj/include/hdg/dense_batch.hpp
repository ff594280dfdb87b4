#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hdg {

/// A batch of equally sized dense blocks. Each block is column-major and
/// blocks are stored consecutively (stride = rows*cols), so block b's entry
/// (r, c) lives at data[b*rows*cols + c*rows + r].
struct DenseBatch {
    int rows = 0;
    int cols = 0;
    int batch = 0;
    std::vector<double> data;

    DenseBatch() = default;
    DenseBatch(int rows, int cols, int batch)
        : rows(rows), cols(cols), batch(batch),
          data(static_cast<std::size_t>(rows) * cols * batch, 0.0) {}

    std::size_t block_size() const { return static_cast<std::size_t>(rows) * cols; }

    double& at(int r, int c, int b) {
        return data[static_cast<std::size_t>(b) * block_size() + static_cast<std::size_t>(c) * rows + r];
    }
    double at(int r, int c, int b) const {
        return data[static_cast<std::size_t>(b) * block_size() + static_cast<std::size_t>(c) * rows + r];
    }

    std::span<double> block(int b) { return {data.data() + b * block_size(), block_size()}; }
    std::span<const double> block(int b) const { return {data.data() + b * block_size(), block_size()}; }
};

/// Explicit inverses of a batch of square blocks via LU with partial
/// pivoting. Throws SingularBlock(b) when a pivot in block b falls below
/// 1e-14 times the block's max-norm.
DenseBatch lu_invert_batch(const DenseBatch& a);

/// Per-block product C_b = op(A_b) * B_b with op = transpose when
/// transpose_a is set. Either operand may broadcast with batch = 1.
/// Summation runs over the inner dimension in ascending order.
DenseBatch gemm_batch(const DenseBatch& a, const DenseBatch& b, bool transpose_a = false);

/// Strided batched matrix-vector product: y_b = A_b * x_b (or += with
/// accumulate). x is a contiguous array of batch slices of length cols,
/// y of length rows. Summation order matches gemm_batch, so the result is
/// bit-identical to gemm_batch with cols = 1.
void gemv_strided_batch(const DenseBatch& a, std::span<const double> x, std::span<double> y,
                        bool accumulate = false);

} // namespace hdg
