#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hdg/dense_batch.hpp"
#include "hdg/local_ops.hpp"
#include "hdg/mesh.hpp"

namespace hdg {

/// Trace-space vectors are stored face-major: m*pf values per face, nf
/// faces, contiguous.
using TraceVector = std::vector<double>;

inline constexpr std::int64_t kNoFace = -1;

/// The condensed global operator in face-block form: per face, one
/// (m*pf) x (m*pf) dense block per neighbor slot. Slot 0 is the face
/// itself; slots 1..n_lfe-1 are the remaining faces of the first adjacent
/// element in local-face order (skipping the face), slots
/// n_lfe..2*n_lfe-2 those of the second adjacent element. Absent neighbors
/// (boundary faces) carry kNoFace and zero blocks.
struct FaceBlockMatrix {
    int m = 1;
    int pf = 0;
    int n_lfe = 4;
    int nf = 0;

    /// rows = m*pf, cols = m*pf*nb, batch = nf; the nb slot blocks of a face
    /// sit side by side, so each batch entry is the face's full block row.
    DenseBatch blocks;
    std::vector<std::int64_t> neighbor; ///< nf x nb row-major

    int nb() const { return 2 * n_lfe - 1; }
    int block_dim() const { return m * pf; }
    std::size_t n_dof() const { return static_cast<std::size_t>(m) * pf * nf; }
    std::int64_t neighbor_at(int f, int slot) const {
        return neighbor[static_cast<std::size_t>(f) * nb() + slot];
    }
};

/// Accumulates the per-element condensed blocks into the face-block global
/// operator and right-hand side. Each face row is owned by the face: both
/// adjacent elements contribute to the self slot (lower element id first),
/// and each remaining slot receives exactly one element's sub-block.
std::pair<FaceBlockMatrix, TraceVector> assemble_global(const ElementOperators& ops,
                                                        const Mesh2D& mesh);

/// Concatenates, per face, the x slices of its neighbor slots (zeros for
/// absent neighbors): output is m*pf*nb values per face, contiguous.
std::vector<double> gather_extended(const TraceVector& x, const FaceBlockMatrix& k);

/// y_f = K_f x_f for every face, as one strided batched matrix-vector
/// product over the gathered input.
TraceVector block_matvec(const FaceBlockMatrix& k, const TraceVector& x);

/// As above, reusing caller-provided buffers (gathered input scratch).
void block_matvec(const FaceBlockMatrix& k, const TraceVector& x, TraceVector& y,
                  std::vector<double>& scratch);

/// Exact dense expansion (row-major n_dof x n_dof); guarded against
/// n_dof > 20000.
std::vector<double> to_dense(const FaceBlockMatrix& k);

/// Binary dump of (K, r): little-endian, magic "HDGK", format version 1,
/// u32 dims (m, pf, n_lfe, nf), i64 neighbor table (kNoFace = -1), f64
/// blocks in storage order, f64 residual. Round-trips bit-exactly.
void write_matrix(const std::string& path, const FaceBlockMatrix& k, const TraceVector& r);
std::pair<FaceBlockMatrix, TraceVector> read_matrix(const std::string& path);

} // namespace hdg
