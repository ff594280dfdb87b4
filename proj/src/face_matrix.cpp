#include "hdg/face_matrix.hpp"

#include <cstdio>
#include <cstring>

#include "hdg/errors.hpp"
#include "hdg/parallel.hpp"

namespace hdg {

std::pair<FaceBlockMatrix, TraceVector> assemble_global(const ElementOperators& ops,
                                                        const Mesh2D& mesh) {
    if (ops.ne != mesh.n_elements) {
        throw InconsistentDimensions("element operators built on a different mesh");
    }
    FaceBlockMatrix k;
    k.pf = ops.pf;
    k.nf = mesh.n_faces;
    const int mpf = k.block_dim();
    const int nb = k.nb();
    k.blocks = DenseBatch(mpf, mpf * nb, k.nf);
    k.neighbor.assign(static_cast<std::size_t>(k.nf) * nb, kNoFace);
    TraceVector r(static_cast<std::size_t>(mpf) * k.nf, 0.0);

    const int pf = ops.pf;
    parallel_for(static_cast<std::size_t>(k.nf), [&](std::size_t f0, std::size_t f1) {
        for (std::size_t f = f0; f < f1; ++f) {
            k.neighbor[f * nb] = static_cast<std::int64_t>(f);
            for (int side = 0; side < 2; ++side) {
                const int e = mesh.face_to_elements[f][side];
                if (e == kNoElement) continue;
                const int l = mesh.face_local_index[f][side];
                // Self slot: the element's (l, l) sub-block.
                for (int c = 0; c < pf; ++c) {
                    for (int rr = 0; rr < pf; ++rr) {
                        k.blocks.at(rr, c, static_cast<int>(f)) +=
                            ops.kbar.at(l * pf + rr, l * pf + c, e);
                    }
                }
                // Remaining local faces of this element, in local order.
                int idx = 0;
                for (int lo = 0; lo < 4; ++lo) {
                    if (lo == l) continue;
                    const int slot = (side == 0 ? 1 : 4) + idx;
                    ++idx;
                    k.neighbor[f * nb + slot] = mesh.element_to_face[e][lo];
                    for (int c = 0; c < pf; ++c) {
                        for (int rr = 0; rr < pf; ++rr) {
                            k.blocks.at(rr, slot * mpf + c, static_cast<int>(f)) +=
                                ops.kbar.at(l * pf + rr, lo * pf + c, e);
                        }
                    }
                }
                for (int rr = 0; rr < pf; ++rr) {
                    r[f * mpf + rr] += ops.rbar[static_cast<std::size_t>(e) * 4 * pf + l * pf + rr];
                }
            }
        }
    });
    return {std::move(k), std::move(r)};
}

std::vector<double> gather_extended(const TraceVector& x, const FaceBlockMatrix& k) {
    const int mpf = k.block_dim();
    const int nb = k.nb();
    std::vector<double> out(static_cast<std::size_t>(mpf) * nb * k.nf);
    parallel_for(static_cast<std::size_t>(k.nf), [&](std::size_t f0, std::size_t f1) {
        for (std::size_t f = f0; f < f1; ++f) {
            double* dst = out.data() + f * mpf * nb;
            for (int slot = 0; slot < nb; ++slot) {
                const std::int64_t g = k.neighbor[f * nb + slot];
                if (g == kNoFace) {
                    std::memset(dst + slot * mpf, 0, sizeof(double) * mpf);
                } else {
                    std::memcpy(dst + slot * mpf, x.data() + g * mpf, sizeof(double) * mpf);
                }
            }
        }
    });
    return out;
}

void block_matvec(const FaceBlockMatrix& k, const TraceVector& x, TraceVector& y,
                  std::vector<double>& scratch) {
    if (x.size() != k.n_dof()) {
        throw DimensionMismatch("block_matvec input of size " + std::to_string(x.size()) +
                                ", operator has " + std::to_string(k.n_dof()) + " dofs");
    }
    const int mpf = k.block_dim();
    const int nb = k.nb();
    scratch.resize(static_cast<std::size_t>(mpf) * nb * k.nf);
    parallel_for(static_cast<std::size_t>(k.nf), [&](std::size_t f0, std::size_t f1) {
        for (std::size_t f = f0; f < f1; ++f) {
            double* dst = scratch.data() + f * mpf * nb;
            for (int slot = 0; slot < nb; ++slot) {
                const std::int64_t g = k.neighbor[f * nb + slot];
                if (g == kNoFace) {
                    std::memset(dst + slot * mpf, 0, sizeof(double) * mpf);
                } else {
                    std::memcpy(dst + slot * mpf, x.data() + g * mpf, sizeof(double) * mpf);
                }
            }
        }
    });
    y.resize(k.n_dof());
    gemv_strided_batch(k.blocks, scratch, y, false);
}

TraceVector block_matvec(const FaceBlockMatrix& k, const TraceVector& x) {
    TraceVector y;
    std::vector<double> scratch;
    block_matvec(k, x, y, scratch);
    return y;
}

std::vector<double> to_dense(const FaceBlockMatrix& k) {
    const std::size_t n = k.n_dof();
    if (n > 20000) throw TooLargeForDense(n);
    const int mpf = k.block_dim();
    const int nb = k.nb();
    std::vector<double> dense(n * n, 0.0);
    for (int f = 0; f < k.nf; ++f) {
        for (int slot = 0; slot < nb; ++slot) {
            const std::int64_t g = k.neighbor[static_cast<std::size_t>(f) * nb + slot];
            if (g == kNoFace) continue;
            for (int rr = 0; rr < mpf; ++rr) {
                for (int c = 0; c < mpf; ++c) {
                    dense[(static_cast<std::size_t>(f) * mpf + rr) * n + g * mpf + c] +=
                        k.blocks.at(rr, slot * mpf + c, f);
                }
            }
        }
    }
    return dense;
}

namespace {

void write_raw(std::FILE* fp, const void* p, std::size_t bytes, const std::string& path) {
    if (std::fwrite(p, 1, bytes, fp) != bytes) throw IoError("short write to " + path);
}

void read_raw(std::FILE* fp, void* p, std::size_t bytes, const std::string& path) {
    if (std::fread(p, 1, bytes, fp) != bytes) throw IoError("short read from " + path);
}

} // namespace

void write_matrix(const std::string& path, const FaceBlockMatrix& k, const TraceVector& r) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw IoError("cannot open " + path + " for writing");
    try {
        write_raw(fp, "HDGK", 4, path);
        const std::uint32_t header[5] = {1u, static_cast<std::uint32_t>(k.m),
                                         static_cast<std::uint32_t>(k.pf),
                                         static_cast<std::uint32_t>(k.n_lfe),
                                         static_cast<std::uint32_t>(k.nf)};
        write_raw(fp, header, sizeof(header), path);
        write_raw(fp, k.neighbor.data(), k.neighbor.size() * sizeof(std::int64_t), path);
        write_raw(fp, k.blocks.data.data(), k.blocks.data.size() * sizeof(double), path);
        write_raw(fp, r.data(), r.size() * sizeof(double), path);
    } catch (...) {
        std::fclose(fp);
        throw;
    }
    std::fclose(fp);
}

std::pair<FaceBlockMatrix, TraceVector> read_matrix(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw IoError("cannot open " + path);
    FaceBlockMatrix k;
    TraceVector r;
    try {
        char magic[4];
        read_raw(fp, magic, 4, path);
        if (std::memcmp(magic, "HDGK", 4) != 0) throw IoError(path + " is not a matrix dump");
        std::uint32_t header[5];
        read_raw(fp, header, sizeof(header), path);
        if (header[0] != 1u) throw IoError(path + ": unsupported format version");
        k.m = static_cast<int>(header[1]);
        k.pf = static_cast<int>(header[2]);
        k.n_lfe = static_cast<int>(header[3]);
        k.nf = static_cast<int>(header[4]);
        k.neighbor.resize(static_cast<std::size_t>(k.nf) * k.nb());
        read_raw(fp, k.neighbor.data(), k.neighbor.size() * sizeof(std::int64_t), path);
        k.blocks = DenseBatch(k.block_dim(), k.block_dim() * k.nb(), k.nf);
        read_raw(fp, k.blocks.data.data(), k.blocks.data.size() * sizeof(double), path);
        r.resize(k.n_dof());
        read_raw(fp, r.data(), r.size() * sizeof(double), path);
    } catch (...) {
        std::fclose(fp);
        throw;
    }
    std::fclose(fp);
    return {std::move(k), std::move(r)};
}

} // namespace hdg
