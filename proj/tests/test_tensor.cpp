#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "rteq/linalg.hpp"
#include "rteq/tensor.hpp"
#include "test_util.hpp"

using namespace rteq;
using namespace rteq::testutil;

namespace {

// Independent rotation oracle: the literal k-fold sum
// T'_{i1..ik} = sum R_{i1 j1} ... R_{ik jk} T_{j1..jk}. Exponential cost,
// only usable for small orders, which is the point: it shares nothing with
// the mode-product implementation.
DenseTensor rotate_bruteforce(const DenseTensor& t, const Rotation& r) {
  const int k = t.order();
  const Mat3& m = r.matrix();
  DenseTensor out(k, 3);
  std::vector<int> oi(static_cast<std::size_t>(k)), ji(static_cast<std::size_t>(k));
  const std::size_t size = t.size();
  for (std::size_t o = 0; o < size; ++o) {
    std::size_t rem = o;
    for (int d = k - 1; d >= 0; --d) {
      oi[static_cast<std::size_t>(d)] = static_cast<int>(rem % 3);
      rem /= 3;
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < size; ++j) {
      std::size_t jr = j;
      for (int d = k - 1; d >= 0; --d) {
        ji[static_cast<std::size_t>(d)] = static_cast<int>(jr % 3);
        jr /= 3;
      }
      double coeff = 1.0;
      for (int d = 0; d < k; ++d)
        coeff *= m[oi[static_cast<std::size_t>(d)]][ji[static_cast<std::size_t>(d)]];
      acc += coeff * t[j];
    }
    out[o] = acc;
  }
  return out;
}

}  // namespace

TEST_CASE("tensor construction validates data length") {
  CHECK_THROWS_AS(DenseTensor(2, std::vector<double>(8, 0.0), 3), std::invalid_argument);
  CHECK_NOTHROW(DenseTensor(2, std::vector<double>(9, 0.0), 3));
  DenseTensor s = DenseTensor::scalar(4.5);
  CHECK(s.order() == 0);
  CHECK(s.size() == 1);
  CHECK(s[0] == 4.5);
}

TEST_CASE("rotation constructor enforces SO(3)") {
  Mat3 not_orth = mat3_identity();
  not_orth[0][1] = 0.5;
  CHECK_THROWS_AS(Rotation{not_orth}, std::invalid_argument);

  Mat3 reflection = mat3_identity();
  reflection[2][2] = -1.0;  // orthonormal but det -1
  CHECK_THROWS_AS(Rotation{reflection}, std::invalid_argument);
}

TEST_CASE("rotate by identity is exact; order 0 is untouched by any rotation") {
  Rng rng(7);
  const DenseTensor t = random_tensor(rng, 3);
  const DenseTensor rt = rotate(t, Rotation::identity());
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(rt[i] == t[i]);

  const DenseTensor s = DenseTensor::scalar(3.25);
  const DenseTensor rs = rotate(s, random_rotation(rng));
  CHECK(rs.order() == 0);
  CHECK(rs[0] == 3.25);
}

TEST_CASE("rotate requires dim 3") {
  DenseTensor t(2, std::vector<double>(16, 1.0), 4);
  CHECK_THROWS_AS(rotate(t, Rotation::identity()), std::invalid_argument);
}

TEST_CASE("order-2 rotation equals the matrix conjugation R T R^T") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Rotation r = random_rotation(rng);
    const DenseTensor t = random_tensor(rng, 2);
    const DenseTensor rt = rotate(t, r);

    const Mat3& m = r.matrix();
    Mat3 tm{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) tm[i][j] = t[static_cast<std::size_t>(3 * i + j)];
    const Mat3 expect = mat3_mul(mat3_mul(m, tm), mat3_transpose(m));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(std::abs(rt[static_cast<std::size_t>(3 * i + j)] - expect[i][j]) <=
              1e-14 * (1.0 + t.frobenius_norm()));
  }
}

TEST_CASE("order-1 rotation is the matrix-vector product") {
  Rng rng(12);
  const Rotation r = random_rotation(rng);
  const DenseTensor v = random_tensor(rng, 1);
  const DenseTensor rv = rotate(v, r);
  const Vec3 expect = r.apply({v[0], v[1], v[2]});
  for (int i = 0; i < 3; ++i) CHECK(rv[static_cast<std::size_t>(i)] == doctest::Approx(expect[i]).epsilon(1e-14));
}

TEST_CASE("mode-product rotation matches the brute-force k-fold sum") {
  Rng rng(13);
  for (int order : {2, 3, 4}) {
    const Rotation r = random_rotation(rng);
    const DenseTensor t = random_tensor(rng, order);
    const DenseTensor fast = rotate(t, r);
    const DenseTensor slow = rotate_bruteforce(t, r);
    CHECK(frob_diff(fast, slow) <= 1e-12 * t.frobenius_norm());
  }
}

TEST_CASE("order-4 inverse roundtrip within 1e-12") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Rotation r = random_rotation(rng);
    const DenseTensor t = random_symmetric_tensor(rng, 4);
    const DenseTensor back = rotate(rotate(t, r), r.transposed());
    CHECK(frob_diff(back, t) <= 1e-12 * t.frobenius_norm());
  }
}

TEST_CASE("rotation action is a group action and preserves norm") {
  Rng rng(19);
  for (int order : {1, 2, 3, 4, 5}) {
    const Rotation r1 = random_rotation(rng);
    const Rotation r2 = random_rotation(rng);
    const DenseTensor t = random_tensor(rng, order);
    const DenseTensor lhs = rotate(rotate(t, r1), r2);
    const DenseTensor rhs = rotate(t, r2 * r1);
    CHECK(frob_diff(lhs, rhs) <= 1e-12 * t.frobenius_norm());
    CHECK(std::abs(rotate(t, r1).frobenius_norm() - t.frobenius_norm()) <=
          1e-12 * t.frobenius_norm());
  }
}

TEST_CASE("contract of the 3x3 identity is the trace") {
  DenseTensor eye(2, 3);
  for (int i = 0; i < 3; ++i) eye[static_cast<std::size_t>(4 * i)] = 1.0;
  const DenseTensor tr = contract(eye, 1, 2);
  CHECK(tr.order() == 0);
  CHECK(tr[0] == 3.0);
}

TEST_CASE("contract of delta_ij v_k over (1,2) gives 3v") {
  Rng rng(23);
  DenseTensor v = random_tensor(rng, 1);
  DenseTensor t(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      t[static_cast<std::size_t>(9 * i + 3 * i + k)] = v[static_cast<std::size_t>(k)];
  const DenseTensor c = contract(t, 1, 2);
  CHECK(c.order() == 1);
  for (int k = 0; k < 3; ++k)
    CHECK(c[static_cast<std::size_t>(k)] ==
          doctest::Approx(3.0 * v[static_cast<std::size_t>(k)]).epsilon(1e-15));
}

TEST_CASE("contract works on the generic-dim fallback") {
  DenseTensor eye4(2, std::vector<double>(16, 0.0), 4);
  for (int i = 0; i < 4; ++i) eye4[static_cast<std::size_t>(5 * i)] = 1.0;
  const DenseTensor tr = contract(eye4, 1, 2);
  CHECK(tr.order() == 0);
  CHECK(tr[0] == 4.0);
}

TEST_CASE("contract argument validation") {
  DenseTensor t1(1, 3);
  CHECK_THROWS_AS(contract(t1, 1, 2), std::invalid_argument);
  DenseTensor t3(3, 3);
  CHECK_THROWS_AS(contract(t3, 2, 2), std::invalid_argument);
  CHECK_THROWS_AS(contract(t3, 0, 2), std::invalid_argument);
  CHECK_THROWS_AS(contract(t3, 1, 4), std::invalid_argument);
}

TEST_CASE("contraction commutes with rotation (Lemma property, sampled)") {
  Rng rng(29);
  for (int order : {3, 4, 5, 6}) {
    for (int trial = 0; trial < 10; ++trial) {
      const DenseTensor t = random_symmetric_tensor(rng, order);
      const Rotation r = random_rotation(rng);
      for (int a = 1; a <= order; ++a) {
        for (int b = a + 1; b <= order; ++b) {
          const DenseTensor lhs = contract(rotate(t, r), a, b);
          const DenseTensor rhs = rotate(contract(t, a, b), r);
          CHECK(frob_diff(lhs, rhs) <= 1e-12 * t.frobenius_norm());
        }
      }
    }
  }
}

TEST_CASE("contract_to_order") {
  Rng rng(31);
  const DenseTensor t2 = random_tensor(rng, 2);
  const DenseTensor same = contract_to_order(t2, 2);
  for (std::size_t i = 0; i < t2.size(); ++i) CHECK(same[i] == t2[i]);

  // Direct-sum oracle for one step on an order-4 tensor.
  const DenseTensor t4 = random_tensor(rng, 4);
  const DenseTensor c = contract_to_order(t4, 2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double expect = 0.0;
      for (int m = 0; m < 3; ++m)
        expect += t4[static_cast<std::size_t>(27 * m + 9 * m + 3 * i + j)];
      CHECK(c[static_cast<std::size_t>(3 * i + j)] == doctest::Approx(expect).epsilon(1e-15));
    }

  const DenseTensor t5 = random_tensor(rng, 5);
  const DenseTensor c5 = contract_to_order(t5, 3);
  CHECK(c5.order() == 3);
  const DenseTensor c5_manual = contract(t5, 1, 2);
  CHECK(frob_diff(c5, c5_manual) == 0.0);

  CHECK_THROWS_AS(contract_to_order(t5, 2), std::invalid_argument);
  CHECK_THROWS_AS(contract_to_order(t2, 4), std::invalid_argument);
}

TEST_CASE("symmetrize: fixed point, order-2 closed form, order-3 oracle") {
  Rng rng(37);
  const DenseTensor s = random_symmetric_tensor(rng, 3);
  CHECK(frob_diff(symmetrize(s), s) <= 1e-15 * s.frobenius_norm());

  const DenseTensor t2 = random_tensor(rng, 2);
  const DenseTensor s2 = symmetrize(t2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(s2[static_cast<std::size_t>(3 * i + j)] ==
            doctest::Approx(0.5 * (t2[static_cast<std::size_t>(3 * i + j)] +
                                   t2[static_cast<std::size_t>(3 * j + i)]))
                .epsilon(1e-15));

  // Explicit six-permutation average at order 3.
  const DenseTensor t3 = random_tensor(rng, 3);
  const DenseTensor s3 = symmetrize(t3);
  auto val = [&](int i, int j, int k) {
    return t3[static_cast<std::size_t>(9 * i + 3 * j + k)];
  };
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        const double expect = (val(i, j, k) + val(i, k, j) + val(j, i, k) + val(j, k, i) +
                               val(k, i, j) + val(k, j, i)) /
                              6.0;
        CHECK(s3[static_cast<std::size_t>(9 * i + 3 * j + k)] ==
              doctest::Approx(expect).epsilon(1e-14));
      }

  CHECK(s3.symmetric);
  CHECK(frob_diff(symmetrize(s3), s3) <= 1e-15 * s3.frobenius_norm());
  CHECK_THROWS_AS(symmetrize(DenseTensor(7, 3)), std::invalid_argument);
}

TEST_CASE("flatten layouts match the case-study dimensions") {
  Rng rng(41);
  TensorTuple newtonian;
  newtonian.scalars.emplace_back("p", 1.25);
  newtonian.tensors.emplace_back("S", random_tensor(rng, 2));
  newtonian.anchor = "S";
  CHECK(flatten(newtonian).size() == 10);

  TensorTuple electro;
  electro.tensors.emplace_back("V", random_tensor(rng, 4));
  electro.tensors.emplace_back("S", random_tensor(rng, 2));
  electro.anchor = "V";
  CHECK(flatten(electro).size() == 90);
}

TEST_CASE("unflatten is the exact inverse of flatten") {
  Rng rng(43);
  TensorTuple t;
  t.scalars.emplace_back("p", rng.next_gaussian());
  t.scalars.emplace_back("q", rng.next_gaussian());
  t.tensors.emplace_back("A", random_tensor(rng, 3));
  t.tensors.emplace_back("B", random_tensor(rng, 2));
  t.anchor = "B";

  const std::vector<double> flat = flatten(t);
  const TensorTuple back = unflatten(flat, shape_of(t));
  CHECK(back.anchor == "B");
  REQUIRE(back.scalars.size() == 2);
  CHECK(back.scalars[0].second == t.scalars[0].second);
  CHECK(back.scalars[1].second == t.scalars[1].second);
  REQUIRE(back.tensors.size() == 2);
  for (std::size_t ti = 0; ti < 2; ++ti)
    for (std::size_t i = 0; i < back.tensors[ti].second.size(); ++i)
      CHECK(back.tensors[ti].second[i] == t.tensors[ti].second[i]);

  std::vector<double> short_vec(flat.begin(), flat.end() - 1);
  CHECK_THROWS_AS(unflatten(short_vec, shape_of(t)), std::invalid_argument);
}
