#pragma once

#include <cstdint>

#include "rteq/linalg.hpp"
#include "rteq/tensor.hpp"

namespace rteq {

/// A tuple mapped to its rotation-invariant standard position, plus the
/// rotation that puts it back: original == rotate(xs, restore) per tensor.
struct StandardizedSample {
  TensorTuple xs;
  Rotation restore;
  bool degenerate = false;
};

/// Standard position of an even-order (>= 2) tensor: contract to order 2,
/// eigendecompose, rotate by the transposed eigenbasis. The contracted form
/// of xs is diagonal with descending diagonal.
///
/// The eigenbasis is only defined up to the four det+1 sign matrices; the
/// ambiguity is resolved by picking the sign assignment whose standardized
/// data is greatest in banded lexicographic order. That choice is a function
/// of the rotation orbit, which is what makes S(R(T)) == S(T) hold in
/// floating point. sym_eig3's own per-column sign rule is not orbit-stable.
StandardizedSample standardize_even(const DenseTensor& t);

/// Standard position of an odd-order (>= 3) tensor: contract to order 3,
/// take the three pair contractions V1 = C(2,3), V2 = C(1,3), V3 = C(1,2),
/// QR-factor [V1 V2 V3], rotate by the transposed Q. No sign completion is
/// needed here: the QR column signs are anchored to the co-rotating Vi.
StandardizedSample standardize_odd(const DenseTensor& t);

/// Standardize a whole tuple with one rotation derived from its anchor
/// tensor (even anchors are symmetrized first, only for deriving the
/// rotation). Every tensor is rotated by restore^T; scalars pass through.
/// The even-branch sign ambiguity is resolved against the full tuple data,
/// not just the anchor, so e.g. an antisymmetric part pins the frame.
StandardizedSample standardize_tuple(const TensorTuple& x);

/// Maps a standard-position label back to the observed frame.
DenseTensor restore_label(const DenseTensor& ys, const StandardizedSample& sample);

/// The four det+1 diagonal sign matrices {I, diag(1,-1,-1), ...} — the
/// subgroup that stabilizes any descending diagonal matrix.
const std::array<Mat3, 4>& sign_flips();

/// Applies a diagonal sign matrix to an order-k tensor: entry (i1..ik)
/// picks up the product of F[ia][ia]. Equals rotate(t, Rotation(f)) but
/// exact (pure sign changes, no arithmetic).
DenseTensor apply_sign_flip(const DenseTensor& t, const Mat3& f);

/// Mean of apply_sign_flip(y, flips[c]) over the given stabilizer indices.
/// Projects a prediction onto the subspace fixed by the standardized
/// input's stabilizer — on such inputs this is the only way a pointwise
/// kernel can restore exactly equivariantly.
DenseTensor stabilizer_average(const DenseTensor& y, const std::vector<int>& stabilizer);

/// Indices into sign_flips() of the flips that leave every tensor of the
/// standardized tuple unchanged (within 1e-9 * norm). Always contains 0.
/// Inputs with a nontrivial stabilizer (e.g. a diagonalized symmetric
/// anchor and nothing else) admit no orbit-stable frame, and predictions
/// on them must be averaged over this set to stay exactly equivariant.
std::vector<int> xs_stabilizer(const TensorTuple& xs);

/// Process-wide count of standardize_* invocations; lets tests assert that
/// the baseline arm never standardizes.
std::uint64_t standardize_invocations();

}  // namespace rteq
