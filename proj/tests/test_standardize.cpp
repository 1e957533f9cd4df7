#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rteq/casestudies.hpp"
#include "rteq/standardize.hpp"
#include "test_util.hpp"

using namespace rteq;
using namespace rteq::testutil;

namespace {

double mat_diff(const Mat3& a, const Mat3& b) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double d = a[i][j] - b[i][j];
      s += d * d;
    }
  return std::sqrt(s);
}

DenseTensor diag_tensor(double a, double b, double c) {
  DenseTensor t(2, 3);
  t[0] = a;
  t[4] = b;
  t[8] = c;
  t.symmetric = true;
  return t;
}

const DenseTensor& xs_tensor(const StandardizedSample& s) {
  return s.xs.tensors.front().second;
}

/// Generic order-3 tensor with full-rank contraction matrix (random
/// unsymmetrized tensors have one almost surely).
DenseTensor random_odd_full_rank(Rng& rng) { return random_tensor(rng, 3); }

}  // namespace

TEST_CASE("standardize_even: standard-position input is a fixed point") {
  const DenseTensor d = diag_tensor(5.0, 2.0, 1.0);
  const StandardizedSample s = standardize_even(d);
  CHECK(frob_diff(xs_tensor(s), d) <= 1e-12 * d.frobenius_norm());
  CHECK(mat_diff(s.restore.matrix(), mat3_identity()) <= 1e-12);
  CHECK_FALSE(s.degenerate);
}

TEST_CASE("standardize_even: constructive order-2 oracle") {
  Rng rng(211);
  for (int trial = 0; trial < 25; ++trial) {
    const Rotation r0 = random_rotation(rng);
    const DenseTensor d = diag_tensor(5.0, 2.0, 1.0);
    const DenseTensor t = rotate(d, r0);
    const StandardizedSample s = standardize_even(t);

    CHECK(frob_diff(xs_tensor(s), d) <= 1e-10 * d.frobenius_norm());
    // restore equals r0 up to the sign convention: columns match up to sign.
    for (int c = 0; c < 3; ++c) {
      double dot = 0.0;
      for (int i = 0; i < 3; ++i) dot += s.restore.matrix()[i][c] * r0.matrix()[i][c];
      CHECK(std::abs(std::abs(dot) - 1.0) <= 1e-10);
    }
    // And it restores the original exactly.
    CHECK(frob_diff(rotate(xs_tensor(s), s.restore), t) <= 1e-10 * t.frobenius_norm());
  }
}

TEST_CASE("standardize_even: contracted form of xs is descending diagonal") {
  Rng rng(223);
  for (int trial = 0; trial < 20; ++trial) {
    const DenseTensor t = random_symmetric_tensor(rng, 4);
    const StandardizedSample s = standardize_even(t);
    const DenseTensor c2 = contract_to_order(xs_tensor(s), 2);
    const double tol = 1e-9 * t.frobenius_norm();
    CHECK(std::abs(c2[1]) <= tol);
    CHECK(std::abs(c2[2]) <= tol);
    CHECK(std::abs(c2[3]) <= tol);
    CHECK(std::abs(c2[5]) <= tol);
    CHECK(std::abs(c2[6]) <= tol);
    CHECK(std::abs(c2[7]) <= tol);
    CHECK(c2[0] >= c2[4] - tol);
    CHECK(c2[4] >= c2[8] - tol);
  }
}

TEST_CASE("standardize_even: rotation invariance at order 4") {
  Rng rng(227);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const DenseTensor t = random_symmetric_tensor(rng, 4);
    const StandardizedSample base = standardize_even(t);
    if (base.degenerate) continue;
    const Rotation p = random_rotation(rng);
    const StandardizedSample rotated = standardize_even(rotate(t, p));
    CHECK(frob_diff(xs_tensor(rotated), xs_tensor(base)) <= 1e-8 * t.frobenius_norm());
    // Cocycle: restore(P(T)) == P * restore(T).
    const Mat3 expect = mat3_mul(p.matrix(), base.restore.matrix());
    CHECK(mat_diff(rotated.restore.matrix(), expect) <= 1e-8);
    ++checked;
  }
  CHECK(checked >= 30);
}

TEST_CASE("standardize_even rejects odd order; standardize_odd rejects even") {
  CHECK_THROWS_AS(standardize_even(DenseTensor(3, 3)), std::invalid_argument);
  CHECK_THROWS_AS(standardize_even(DenseTensor(0, 3)), std::invalid_argument);
  CHECK_THROWS_AS(standardize_odd(DenseTensor(2, 3)), std::invalid_argument);
  CHECK_THROWS_AS(standardize_odd(DenseTensor(1, 3)), std::invalid_argument);
}

TEST_CASE("standardize_even: isotropic anchor flagged degenerate, no crash") {
  const DenseTensor iso = diag_tensor(2.0, 2.0, 2.0);
  const StandardizedSample s = standardize_even(iso);
  CHECK(s.degenerate);
  CHECK(frob_diff(rotate(xs_tensor(s), s.restore), iso) <= 1e-10 * iso.frobenius_norm());
}

TEST_CASE("standardize_odd: M == identity is a fixed point") {
  DenseTensor t(3, 3);
  t[static_cast<std::size_t>(9 * 0 + 3 * 1 + 1)] = 1.0;  // V1 = e1
  t[static_cast<std::size_t>(9 * 2 + 3 * 1 + 2)] = 1.0;  // V2 = e2
  t[static_cast<std::size_t>(9 * 1 + 3 * 1 + 2)] = 1.0;  // V3 = e3
  const StandardizedSample s = standardize_odd(t);
  CHECK(frob_diff(xs_tensor(s), t) <= 1e-12);
  CHECK(mat_diff(s.restore.matrix(), mat3_identity()) <= 1e-12);
}

TEST_CASE("standardize_odd: rotation invariance and cocycle at order 3 and 5") {
  Rng rng(229);
  for (int order : {3, 5}) {
    int checked = 0;
    for (int trial = 0; trial < 40; ++trial) {
      const DenseTensor t = random_tensor(rng, order);
      const StandardizedSample base = standardize_odd(t);
      if (base.degenerate) continue;
      const Rotation p = random_rotation(rng);
      const StandardizedSample rotated = standardize_odd(rotate(t, p));
      CHECK(frob_diff(xs_tensor(rotated), xs_tensor(base)) <= 1e-8 * t.frobenius_norm());
      const Mat3 expect = mat3_mul(p.matrix(), base.restore.matrix());
      CHECK(mat_diff(rotated.restore.matrix(), expect) <= 1e-8);
      ++checked;
    }
    CHECK(checked >= 30);
  }
}

TEST_CASE("standardize_odd: reversal-symmetric input (rank-2 M) stays equivariant") {
  Rng rng(233);
  for (int trial = 0; trial < 20; ++trial) {
    DenseTensor raw = random_tensor(rng, 3);
    DenseTensor t(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          t[static_cast<std::size_t>(9 * i + 3 * j + k)] =
              raw[static_cast<std::size_t>(9 * i + 3 * j + k)] +
              raw[static_cast<std::size_t>(9 * k + 3 * j + i)];

    const StandardizedSample base = standardize_odd(t);
    CHECK(base.degenerate);  // u33 ~ 0 by construction
    const Rotation p = random_rotation(rng);
    const StandardizedSample rotated = standardize_odd(rotate(t, p));
    CHECK(frob_diff(xs_tensor(rotated), xs_tensor(base)) <= 1e-8 * t.frobenius_norm());
    const Mat3 expect = mat3_mul(p.matrix(), base.restore.matrix());
    CHECK(mat_diff(rotated.restore.matrix(), expect) <= 1e-8);
  }
}

TEST_CASE("standardize_odd: fully symmetric tensor (rank-1 M) flagged, no crash") {
  Rng rng(239);
  Vec3 v = {rng.next_gaussian(), rng.next_gaussian(), rng.next_gaussian()};
  DenseTensor t(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        t[static_cast<std::size_t>(9 * i + 3 * j + k)] = v[i] * v[j] * v[k];
  const StandardizedSample s = standardize_odd(t);
  CHECK(s.degenerate);
  CHECK(frob_diff(rotate(xs_tensor(s), s.restore), t) <= 1e-10 * t.frobenius_norm());
}

TEST_CASE("idempotence: standardizing a standard position gives identity restore") {
  Rng rng(241);
  const DenseTensor t4 = random_symmetric_tensor(rng, 4);
  const StandardizedSample s4 = standardize_even(t4);
  if (!s4.degenerate) {
    const StandardizedSample again = standardize_even(xs_tensor(s4));
    CHECK(mat_diff(again.restore.matrix(), mat3_identity()) <= 1e-8);
  }
  const DenseTensor t3 = random_odd_full_rank(rng);
  const StandardizedSample s3 = standardize_odd(t3);
  if (!s3.degenerate) {
    const StandardizedSample again = standardize_odd(xs_tensor(s3));
    CHECK(mat_diff(again.restore.matrix(), mat3_identity()) <= 1e-8);
  }
  const DenseTensor t2 = rotate(diag_tensor(4.0, 2.5, -1.0), random_rotation(rng));
  const StandardizedSample s2 = standardize_even(t2);
  const StandardizedSample again2 = standardize_even(xs_tensor(s2));
  CHECK(mat_diff(again2.restore.matrix(), mat3_identity()) <= 1e-8);
}

TEST_CASE("standardize_tuple: Newtonian tuple diagonalizes S, keeps p") {
  Rng rng(251);
  CaseSample cs = draw_case_sample(Case::newtonian, rng);
  const StandardizedSample s = standardize_tuple(cs.x);
  CHECK(s.xs.scalars.front().second == cs.x.scalars.front().second);
  const DenseTensor& s_std = s.xs.tensor("S");
  const double tol = 1e-9 * s_std.frobenius_norm();
  CHECK(std::abs(s_std[1]) <= tol);
  CHECK(std::abs(s_std[2]) <= tol);
  CHECK(std::abs(s_std[5]) <= tol);
  CHECK(s_std[0] >= s_std[4] - tol);
  CHECK(s_std[4] >= s_std[8] - tol);
}

TEST_CASE("standardize_tuple: LES anchor is symmetrized only for the frame") {
  Rng rng(257);
  CaseSample cs = draw_case_sample(Case::les, rng);
  const StandardizedSample s = standardize_tuple(cs.x);
  // G itself is rotated; its antisymmetric part survives.
  const DenseTensor& g_std = s.xs.tensor("G");
  double antisym = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      antisym += std::abs(g_std[static_cast<std::size_t>(3 * i + j)] -
                          g_std[static_cast<std::size_t>(3 * j + i)]);
  CHECK(antisym > 1e-6);
  // The symmetric part is the diagonalized anchor.
  DenseTensor sym_part(2, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      sym_part[static_cast<std::size_t>(3 * i + j)] =
          0.5 * (g_std[static_cast<std::size_t>(3 * i + j)] +
                 g_std[static_cast<std::size_t>(3 * j + i)]);
  const double tol = 1e-9 * g_std.frobenius_norm();
  CHECK(std::abs(sym_part[1]) <= tol);
  CHECK(std::abs(sym_part[2]) <= tol);
  CHECK(std::abs(sym_part[5]) <= tol);
  // Restoring reproduces the original tuple.
  CHECK(frob_diff(rotate(g_std, s.restore), cs.x.tensor("G")) <=
        1e-10 * cs.x.tensor("G").frobenius_norm());
}

TEST_CASE("standardize_tuple: electrostriction rotates V and S with one frame") {
  Rng rng(263);
  CaseSample cs = draw_case_sample(Case::electrostriction, rng);
  const StandardizedSample s = standardize_tuple(cs.x);
  CHECK_FALSE(s.degenerate);
  for (const char* name : {"V", "S"}) {
    CHECK(frob_diff(rotate(s.xs.tensor(name), s.restore), cs.x.tensor(name)) <=
          1e-10 * cs.x.tensor(name).frobenius_norm());
  }
  // Orbit-invariance of the full tuple standard position.
  const Rotation p = random_rotation(rng);
  const StandardizedSample rotated = standardize_tuple(rotate_tuple(cs.x, p));
  CHECK(frob_diff(rotated.xs.tensor("V"), s.xs.tensor("V")) <=
        1e-8 * cs.x.tensor("V").frobenius_norm());
  CHECK(frob_diff(rotated.xs.tensor("S"), s.xs.tensor("S")) <=
        1e-8 * cs.x.tensor("S").frobenius_norm());
}

TEST_CASE("standardize_tuple rejects low-order anchors") {
  TensorTuple x;
  x.tensors.emplace_back("v", DenseTensor(1, 3));
  x.anchor = "v";
  CHECK_THROWS_AS(standardize_tuple(x), std::invalid_argument);
}

TEST_CASE("restore_label: identity and inverse-pair behavior") {
  Rng rng(269);
  StandardizedSample s;
  s.restore = Rotation::identity();
  const DenseTensor y = random_tensor(rng, 2);
  CHECK(frob_diff(restore_label(y, s), y) == 0.0);

  const Rotation r = random_rotation(rng);
  s.restore = r;
  const DenseTensor ys = rotate(y, r.transposed());
  CHECK(frob_diff(restore_label(ys, s), y) <= 1e-12 * y.frobenius_norm());
}

TEST_CASE("full analytic roundtrip on a Newtonian sample") {
  Rng rng(271);
  CaseSample cs = draw_case_sample(Case::newtonian, rng);
  const StandardizedSample s = standardize_tuple(cs.x);
  // The true standardized label, then back: must reproduce the true label.
  const DenseTensor ys = rotate(cs.y, s.restore.transposed());
  CHECK(frob_diff(restore_label(ys, s), cs.y) <= 1e-10 * cs.y.frobenius_norm());
}

TEST_CASE("xs_stabilizer: diagonal-only tuples keep all four flips") {
  Rng rng(277);
  CaseSample newt = draw_case_sample(Case::newtonian, rng);
  const StandardizedSample sn = standardize_tuple(newt.x);
  CHECK(xs_stabilizer(sn.xs).size() == 4);

  CaseSample les = draw_case_sample(Case::les, rng);
  const StandardizedSample sl = standardize_tuple(les.x);
  CHECK(xs_stabilizer(sl.xs).size() == 1);
}

TEST_CASE("stabilizer_average projects onto the flip-invariant subspace") {
  Rng rng(281);
  const DenseTensor y = random_tensor(rng, 2);
  const std::vector<int> full = {0, 1, 2, 3};
  const DenseTensor avg = stabilizer_average(y, full);
  // Off-diagonal entries die, diagonal survives.
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double v = avg[static_cast<std::size_t>(3 * i + j)];
      if (i == j)
        CHECK(v == y[static_cast<std::size_t>(3 * i + j)]);
      else
        CHECK(std::abs(v) <= 1e-15);
    }
}

TEST_CASE("standardize invocation counter moves") {
  const std::uint64_t before = standardize_invocations();
  Rng rng(283);
  standardize_even(random_symmetric_tensor(rng, 2));
  CHECK(standardize_invocations() == before + 1);
}
