#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "hdg/face_matrix.hpp"

namespace hdg {

enum class PrecondKind { Identity, BJ, ASM };

PrecondKind precond_kind_from_name(const std::string& name);
std::string precond_kind_name(PrecondKind k);

/// A built preconditioner: a base kind (identity, block-Jacobi, or additive
/// Schwarz) optionally wrapped by a degree-P polynomial on the
/// base-preconditioned operator, with Leja-ordered harmonic Ritz values as
/// interpolation nodes. Exactly the data for the active parts is populated.
struct Preconditioner {
    PrecondKind kind = PrecondKind::Identity;
    int poly_degree = 0; ///< 0 = no polynomial wrapper; otherwise >= 1
    DenseBatch bj_inv;   ///< (m*pf)^2 per face, BJ only
    DenseBatch asm_inv;  ///< (m*pf*n_lfe)^2 per element, ASM only
    std::vector<std::complex<double>> ritz; ///< Leja order, conjugate pairs adjacent
};

/// Extracts and inverts the diagonal face blocks of K. Throws
/// SingularBlock(face).
Preconditioner build_bj(const FaceBlockMatrix& k);

/// z_f = P_f^-1 y_f per face (no inter-face communication).
TraceVector apply_bj(const Preconditioner& p, const TraceVector& y);

/// Element-subdomain additive Schwarz: per-element trace blocks with the
/// diagonal sub-block of every interior face replaced by the sum of the two
/// adjacent elements' diagonal sub-blocks, then inverted in batch. Throws
/// SingularBlock(element).
Preconditioner build_asm(const ElementOperators& ops, const Mesh2D& mesh);

/// Restriction-solve-prolongation cycle: gather y per element over its
/// local faces, apply the stored inverses, scatter-accumulate (interior
/// faces sum two element contributions, in element-id order).
TraceVector apply_asm(const Preconditioner& p, const TraceVector& y, const Mesh2D& mesh);

using LinearOp = std::function<void(const std::vector<double>&, std::vector<double>&)>;

/// Harmonic Ritz values of a linear operator from one Arnoldi cycle of
/// dimension P (modified Gram-Schmidt, seeded random start): eigenvalues of
/// the rank-one-corrected Hessenberg block, conjugate pairing enforced,
/// near-zero values dropped, returned in Leja order. Breakdown before step
/// P truncates the list to the effective degree.
std::vector<std::complex<double>> compute_harmonic_ritz(const LinearOp& op, std::size_t n_dof,
                                                        int degree, std::uint64_t seed);

/// Greedy Leja ordering: start from the largest modulus, then repeatedly
/// pick the value maximizing the product of distances to everything chosen
/// so far; a complex value is immediately followed by its conjugate. Ties
/// break toward larger real part, then positive imaginary part.
std::vector<std::complex<double>> leja_order(const std::vector<std::complex<double>>& theta);

/// Applies the degree-P polynomial-preconditioner recurrence: q starts at
/// base_apply(y), every operator application is v -> base_apply(K v), real
/// Ritz values take one application and conjugate pairs two.
/// `inner_ops`, when given, counts the operator applications.
TraceVector apply_poly(const Preconditioner& p, const LinearOp& base_apply,
                       const FaceBlockMatrix& k, const TraceVector& y, long* inner_ops = nullptr);

/// The base preconditioner application (no polynomial wrapper) as a
/// reusable callable.
LinearOp make_base_apply(const Preconditioner& p, const Mesh2D& mesh);

/// The full preconditioner application, polynomial wrapper included.
LinearOp make_preconditioner_apply(const Preconditioner& p, const FaceBlockMatrix& k,
                                   const Mesh2D& mesh, long* inner_ops = nullptr);

} // namespace hdg
