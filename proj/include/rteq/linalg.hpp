#pragma once

#include "rteq/rng.hpp"
#include "rteq/tensor.hpp"

namespace rteq {

/// Symmetric 3x3 eigendecomposition result. Columns of basis are the
/// eigenvectors, so input == basis * diag(eigenvalues) * basis^T.
struct EigenResult {
  std::array<double, 3> eigenvalues;  // sorted descending
  Rotation basis;                     // det +1
  bool degenerate = false;            // eigen-gap below 1e-8 * ||input||_F
};

/// QR factorization result with q in SO(3).
struct QrResult {
  Rotation q;
  Mat3 u;                   // upper triangular; diagonal >= 0 except possibly
                            // the det-fix row on det-negative input
  bool degenerate = false;  // some |u[i][i]| below 1e-8 * ||input||_F
};

/// Jacobi eigendecomposition of a symmetric 3x3 matrix with a pinned,
/// repeat-stable convention:
///   - input is symmetrized internally before sweeping;
///   - eigenvalues sorted descending (stable under exact ties);
///   - each eigenvector's sign is fixed so its largest-magnitude component
///     is positive (ties broken by the first such component);
///   - if the resulting basis has det -1, the third column is negated.
/// Identical input bytes give identical output bytes.
EigenResult sym_eig3(const Mat3& a);

/// Householder QR of a 3x3 matrix, normalized so the diagonal of u is
/// non-negative (negating matching rows of u / columns of q). Exact zeros
/// on the diagonal are left with the produced signs and flag the result
/// degenerate. If det(q) is -1 after that, the column of q (and row of u)
/// with the smallest |u[i][i]| is negated; q is always a proper rotation.
/// Uniqueness (and the frame-invariance guarantees that lean on it) holds only for
/// full-rank input.
QrResult qr3(const Mat3& a);

/// Haar-uniform rotation via a unit quaternion built from 4 standard
/// normals. Deterministic given the rng state.
Rotation random_rotation(Rng& rng);

}  // namespace rteq
