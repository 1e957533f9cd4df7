#include "rteq/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rteq {

namespace {

constexpr double kDegenerateRel = 1e-8;

bool finite(const Mat3& a) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (!std::isfinite(a[i][j])) return false;
  return true;
}

/// Sign convention from the contract: largest-magnitude component positive,
/// first index winning ties.
void fix_column_sign(Mat3& m, int col) {
  int best = 0;
  double best_abs = std::abs(m[0][col]);
  for (int i = 1; i < 3; ++i) {
    double a = std::abs(m[i][col]);
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  if (m[best][col] < 0.0)
    for (int i = 0; i < 3; ++i) m[i][col] = -m[i][col];
}

}  // namespace

EigenResult sym_eig3(const Mat3& input) {
  if (!finite(input)) throw std::invalid_argument("sym_eig3: non-finite entry");

  // Work on the symmetrized copy; callers may carry ~1e-12 asymmetry.
  Mat3 a{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a[i][j] = 0.5 * (input[i][j] + input[j][i]);

  const double scale = mat3_frobenius(a);
  Mat3 v = mat3_identity();

  // Cyclic Jacobi sweeps (Golub & Van Loan, Matrix Computations, §8.5);
  // the fixed (p,q) order keeps the result bit-stable.
  for (int sweep = 0; sweep < 30; ++sweep) {
    double off = std::sqrt(a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2]);
    if (off <= 1e-15 * scale || off == 0.0) break;
    for (int p = 0; p < 3; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        const double apq = a[p][q];
        a[p][p] -= t * apq;
        a[q][q] += t * apq;
        a[p][q] = 0.0;
        a[q][p] = 0.0;
        for (int r = 0; r < 3; ++r) {
          if (r != p && r != q) {
            const double arp = a[r][p];
            const double arq = a[r][q];
            a[r][p] = arp - s * (arq + tau * arp);
            a[p][r] = a[r][p];
            a[r][q] = arq + s * (arp - tau * arq);
            a[q][r] = a[r][q];
          }
          const double vrp = v[r][p];
          const double vrq = v[r][q];
          v[r][p] = vrp - s * (vrq + tau * vrp);
          v[r][q] = vrq + s * (vrp - tau * vrq);
        }
      }
    }
  }

  std::array<double, 3> lam = {a[0][0], a[1][1], a[2][2]};
  std::array<int, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return lam[x] > lam[y]; });

  Mat3 basis{};
  std::array<double, 3> sorted{};
  for (int k = 0; k < 3; ++k) {
    sorted[k] = lam[order[k]];
    for (int i = 0; i < 3; ++i) basis[i][k] = v[i][order[k]];
  }

  for (int k = 0; k < 3; ++k) fix_column_sign(basis, k);
  if (mat3_det(basis) < 0.0)
    for (int i = 0; i < 3; ++i) basis[i][2] = -basis[i][2];

  EigenResult res;
  res.eigenvalues = sorted;
  res.basis = Rotation(basis);
  const double gap = std::min(sorted[0] - sorted[1], sorted[1] - sorted[2]);
  res.degenerate = gap <= kDegenerateRel * scale;
  return res;
}

QrResult qr3(const Mat3& input) {
  if (!finite(input)) throw std::invalid_argument("qr3: non-finite entry");

  const double scale = mat3_frobenius(input);
  Mat3 r = input;
  Mat3 q = mat3_identity();

  // Householder reflections on columns 0 and 1 (Trefethen & Bau, Numerical
  // Linear Algebra, Algorithm 10.1); q accumulates the product of
  // reflections, so q * r stays equal to the input throughout.
  for (int k = 0; k < 2; ++k) {
    double norm = 0.0;
    for (int i = k; i < 3; ++i) norm += r[i][k] * r[i][k];
    norm = std::sqrt(norm);
    if (norm <= 1e-300 || norm <= 1e-15 * scale) continue;

    Vec3 w = {0.0, 0.0, 0.0};
    for (int i = k; i < 3; ++i) w[i] = r[i][k];
    w[k] += (r[k][k] >= 0.0 ? norm : -norm);
    double wn = 0.0;
    for (int i = k; i < 3; ++i) wn += w[i] * w[i];
    if (wn == 0.0) continue;

    // r <- (I - 2 w w^T / w^T w) r ; q <- q (I - 2 w w^T / w^T w)
    for (int j = 0; j < 3; ++j) {
      double dot = 0.0;
      for (int i = k; i < 3; ++i) dot += w[i] * r[i][j];
      const double f = 2.0 * dot / wn;
      for (int i = k; i < 3; ++i) r[i][j] -= f * w[i];
    }
    for (int i = 0; i < 3; ++i) {
      double dot = 0.0;
      for (int j = k; j < 3; ++j) dot += q[i][j] * w[j];
      const double f = 2.0 * dot / wn;
      for (int j = k; j < 3; ++j) q[i][j] -= f * w[j];
    }
  }

  // Exact zeros below the diagonal.
  r[1][0] = 0.0;
  r[2][0] = 0.0;
  r[2][1] = 0.0;

  QrResult res;
  for (int i = 0; i < 3; ++i) {
    if (r[i][i] < 0.0) {
      for (int j = i; j < 3; ++j) r[i][j] = -r[i][j];
      for (int k = 0; k < 3; ++k) q[k][i] = -q[k][i];
    }
    if (std::abs(r[i][i]) <= kDegenerateRel * scale) res.degenerate = true;
  }

  if (mat3_det(q) < 0.0) {
    int flip = 0;
    double smallest = std::abs(r[0][0]);
    for (int i = 1; i < 3; ++i) {
      if (std::abs(r[i][i]) < smallest) {
        smallest = std::abs(r[i][i]);
        flip = i;
      }
    }
    for (int j = flip; j < 3; ++j) r[flip][j] = -r[flip][j];
    for (int k = 0; k < 3; ++k) q[k][flip] = -q[k][flip];
  }

  res.q = Rotation(q);
  res.u = r;
  return res;
}

Rotation random_rotation(Rng& rng) {
  double q0, q1, q2, q3, n2;
  do {
    q0 = rng.next_gaussian();
    q1 = rng.next_gaussian();
    q2 = rng.next_gaussian();
    q3 = rng.next_gaussian();
    n2 = q0 * q0 + q1 * q1 + q2 * q2 + q3 * q3;
  } while (n2 < 1e-24);
  const double inv = 1.0 / std::sqrt(n2);
  q0 *= inv;
  q1 *= inv;
  q2 *= inv;
  q3 *= inv;

  Mat3 m;
  m[0][0] = 1.0 - 2.0 * (q2 * q2 + q3 * q3);
  m[0][1] = 2.0 * (q1 * q2 - q0 * q3);
  m[0][2] = 2.0 * (q1 * q3 + q0 * q2);
  m[1][0] = 2.0 * (q1 * q2 + q0 * q3);
  m[1][1] = 1.0 - 2.0 * (q1 * q1 + q3 * q3);
  m[1][2] = 2.0 * (q2 * q3 - q0 * q1);
  m[2][0] = 2.0 * (q1 * q3 - q0 * q2);
  m[2][1] = 2.0 * (q2 * q3 + q0 * q1);
  m[2][2] = 1.0 - 2.0 * (q1 * q1 + q2 * q2);
  return Rotation(m);
}

}  // namespace rteq
