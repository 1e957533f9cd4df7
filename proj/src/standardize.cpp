#include "rteq/standardize.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

namespace rteq {

namespace {

std::atomic<std::uint64_t> g_invocations{0};

constexpr double kLexBandRel = 1e-9;

Mat3 tensor_as_mat3(const DenseTensor& t) {
  Mat3 m{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = t[static_cast<std::size_t>(3 * i + j)];
  return m;
}

double tuple_norm(const TensorTuple& x) {
  double s = 0.0;
  for (const auto& [name, t] : x.tensors) {
    const double n = t.frobenius_norm();
    s += n * n;
  }
  return std::sqrt(s);
}

/// Banded lexicographic "a > b": entries closer than the band are treated
/// as equal and skipped. The band sits far above float noise and far below
/// generic entry gaps, so the comparison is stable along a rotation orbit.
bool lex_greater(const TensorTuple& a, const TensorTuple& b, double band) {
  for (std::size_t ti = 0; ti < a.tensors.size(); ++ti) {
    const auto& da = a.tensors[ti].second.data();
    const auto& db = b.tensors[ti].second.data();
    for (std::size_t i = 0; i < da.size(); ++i) {
      const double diff = da[i] - db[i];
      if (diff > band) return true;
      if (diff < -band) return false;
    }
  }
  return false;
}

/// Resolves the eigenbasis sign ambiguity: among the four det+1 sign
/// assignments of `basis`, pick the one whose standardized tuple data is
/// lexicographically greatest. The candidate set depends only on the
/// rotation orbit of `x`, so the selection commutes with rotations.
StandardizedSample select_even_frame(const TensorTuple& x, const Rotation& basis,
                                     bool degenerate) {
  const TensorTuple base = rotate_tuple(x, basis.transposed());
  const double band = kLexBandRel * tuple_norm(base);

  int best = 0;
  TensorTuple best_xs = base;
  const auto& flips = sign_flips();
  for (int c = 1; c < 4; ++c) {
    TensorTuple cand;
    cand.scalars = base.scalars;
    cand.anchor = base.anchor;
    cand.tensors.reserve(base.tensors.size());
    for (const auto& [name, t] : base.tensors)
      cand.tensors.emplace_back(name, apply_sign_flip(t, flips[c]));
    if (lex_greater(cand, best_xs, band)) {
      best = c;
      best_xs = std::move(cand);
    }
  }

  StandardizedSample out;
  out.xs = std::move(best_xs);
  out.restore = best == 0 ? basis : basis * Rotation(flips[best]);
  out.degenerate = degenerate;
  return out;
}

StandardizedSample standardize_even_tuple(const TensorTuple& x, const DenseTensor& anchor) {
  const DenseTensor t2 = contract_to_order(anchor, 2);
  const EigenResult eig = sym_eig3(tensor_as_mat3(t2));
  return select_even_frame(x, eig.basis, eig.degenerate);
}

StandardizedSample standardize_odd_tuple(const TensorTuple& x, const DenseTensor& anchor) {
  const DenseTensor t3 = contract_to_order(anchor, 3);
  const DenseTensor v1 = contract(t3, 2, 3);
  const DenseTensor v2 = contract(t3, 1, 3);
  const DenseTensor v3 = contract(t3, 1, 2);
  Mat3 m{};
  for (int i = 0; i < 3; ++i) {
    m[i][0] = v1[static_cast<std::size_t>(i)];
    m[i][1] = v2[static_cast<std::size_t>(i)];
    m[i][2] = v3[static_cast<std::size_t>(i)];
  }
  const QrResult qr = qr3(m);

  StandardizedSample out;
  out.xs = rotate_tuple(x, qr.q.transposed());
  out.restore = qr.q;
  out.degenerate = qr.degenerate;
  return out;
}

TensorTuple wrap_single(const DenseTensor& t) {
  TensorTuple x;
  x.tensors.emplace_back("t", t);
  x.anchor = "t";
  return x;
}

}  // namespace

DenseTensor apply_sign_flip(const DenseTensor& t, const Mat3& f) {
  const int k = t.order();
  DenseTensor out = t;
  if (k == 0) return out;
  for (std::size_t idx = 0; idx < t.size(); ++idx) {
    std::size_t rem = idx;
    double sign = 1.0;
    for (int d = 0; d < k; ++d) {
      sign *= f[rem % 3][rem % 3];
      rem /= 3;
    }
    out[idx] = sign * t[idx];
  }
  return out;
}

DenseTensor stabilizer_average(const DenseTensor& y, const std::vector<int>& stabilizer) {
  if (stabilizer.size() <= 1) return y;
  DenseTensor acc(y.order(), y.dim());
  const auto& flips = sign_flips();
  for (int c : stabilizer) {
    const DenseTensor flipped = apply_sign_flip(y, flips[static_cast<std::size_t>(c)]);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += flipped[i];
  }
  const double inv = 1.0 / static_cast<double>(stabilizer.size());
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] *= inv;
  return acc;
}

const std::array<Mat3, 4>& sign_flips() {
  static const std::array<Mat3, 4> flips = [] {
    std::array<Mat3, 4> f{};
    f[0] = mat3_identity();
    for (int c = 1; c < 4; ++c) {
      f[c] = mat3_identity();
      for (int i = 0; i < 3; ++i)
        if (i != c - 1) f[c][i][i] = -1.0;
    }
    return f;
  }();
  return flips;
}

StandardizedSample standardize_even(const DenseTensor& t) {
  g_invocations.fetch_add(1, std::memory_order_relaxed);
  if (t.order() % 2 != 0 || t.order() < 2)
    throw std::invalid_argument("standardize_even requires even order >= 2");
  return standardize_even_tuple(wrap_single(t), t);
}

StandardizedSample standardize_odd(const DenseTensor& t) {
  g_invocations.fetch_add(1, std::memory_order_relaxed);
  if (t.order() % 2 == 0 || t.order() < 3)
    throw std::invalid_argument("standardize_odd requires odd order >= 3");
  return standardize_odd_tuple(wrap_single(t), t);
}

StandardizedSample standardize_tuple(const TensorTuple& x) {
  g_invocations.fetch_add(1, std::memory_order_relaxed);
  const DenseTensor& anchor = x.tensor(x.anchor);
  if (anchor.order() < 2)
    throw std::invalid_argument("anchor tensor must have order >= 2");
  if (anchor.order() % 2 == 0) {
    // The eigen path needs a symmetric contraction; symmetrize commutes with
    // the rotation action, so this does not disturb invariance. Odd anchors
    // are used as-is: symmetrizing one would collapse its contraction
    // vectors onto each other and lose the frame.
    const DenseTensor sym_anchor = anchor.symmetric ? anchor : symmetrize(anchor);
    return standardize_even_tuple(x, sym_anchor);
  }
  return standardize_odd_tuple(x, anchor);
}

DenseTensor restore_label(const DenseTensor& ys, const StandardizedSample& sample) {
  return rotate(ys, sample.restore);
}

std::vector<int> xs_stabilizer(const TensorTuple& xs) {
  std::vector<int> stab = {0};
  const double tol = kLexBandRel * tuple_norm(xs);
  const auto& flips = sign_flips();
  for (int c = 1; c < 4; ++c) {
    bool fixes = true;
    for (const auto& [name, t] : xs.tensors) {
      const DenseTensor flipped = apply_sign_flip(t, flips[c]);
      double diff = 0.0;
      for (std::size_t i = 0; i < t.size(); ++i) {
        const double d = flipped[i] - t[i];
        diff += d * d;
      }
      if (std::sqrt(diff) > tol) {
        fixes = false;
        break;
      }
    }
    if (fixes) stab.push_back(c);
  }
  // The flips form a Klein four-group; averaging is a projection only over a
  // subgroup. If two non-identity flips fix xs, their product does as well
  // (its defect is bounded by the sum of theirs), so close the set.
  if (stab.size() == 3) return {0, 1, 2, 3};
  return stab;
}

std::uint64_t standardize_invocations() {
  return g_invocations.load(std::memory_order_relaxed);
}

}  // namespace rteq
