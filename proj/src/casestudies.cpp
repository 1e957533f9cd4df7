#include "rteq/casestudies.hpp"

#include <cmath>
#include <stdexcept>

#include "rteq/linalg.hpp"
#include "rteq/standardize.hpp"

namespace rteq {

namespace {

constexpr double kLesCs = 0.4;
constexpr double kLesDelta = 0.4;
constexpr double kLesC1 = 1.0;
constexpr double kLesC2 = 1.0;

DenseTensor mat_to_tensor(const Mat3& m, bool symmetric = false) {
  DenseTensor t(2, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t[static_cast<std::size_t>(3 * i + j)] = m[i][j];
  t.symmetric = symmetric;
  return t;
}

Mat3 tensor_to_mat(const DenseTensor& t) {
  Mat3 m{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = t[static_cast<std::size_t>(3 * i + j)];
  return m;
}

Mat3 random_mat3(Rng& rng) {
  Mat3 m{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = rng.next_gaussian();
  return m;
}

DenseTensor newtonian_sigma(double p, const DenseTensor& s, double mu) {
  DenseTensor sigma(2, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      sigma[static_cast<std::size_t>(3 * i + j)] =
          (i == j ? -p : 0.0) + mu * s[static_cast<std::size_t>(3 * i + j)];
  sigma.symmetric = true;
  return sigma;
}

DenseTensor les_tau(const DenseTensor& g_tensor) {
  const Mat3 g = tensor_to_mat(g_tensor);
  Mat3 s{}, omega{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      s[i][j] = 0.5 * (g[i][j] + g[j][i]);
      omega[i][j] = 0.5 * (g[i][j] - g[j][i]);
    }
  double smnsmn = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) smnsmn += s[i][j] * s[i][j];
  const double mag = 2.0 * std::sqrt(2.0 * smnsmn);
  const double coef = (kLesCs * kLesDelta) * (kLesCs * kLesDelta);

  Mat3 tau{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double ss = 0.0, so = 0.0, os = 0.0;
      for (int k = 0; k < 3; ++k) {
        ss += s[i][k] * s[k][j];
        so += s[i][k] * omega[k][j];
        os += omega[i][k] * s[k][j];
      }
      const double quad = kLesC1 * (ss - (i == j ? smnsmn / 3.0 : 0.0));
      tau[i][j] = -coef * (mag * s[i][j] + quad + kLesC2 * (so - os));
    }
  return mat_to_tensor(tau, true);
}

/// Index-reversal transpose at order 3: out[i,j,k] = in[k,j,i].
DenseTensor reverse_transpose3(const DenseTensor& t) {
  DenseTensor out(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        out[static_cast<std::size_t>(9 * i + 3 * j + k)] =
            t[static_cast<std::size_t>(9 * k + 3 * j + i)];
  return out;
}

DenseTensor electro_strain(const DenseTensor& v, const DenseTensor& s) {
  DenseTensor t(2, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          acc += v[static_cast<std::size_t>(27 * i + 9 * j + 3 * k + l)] *
                 s[static_cast<std::size_t>(3 * k + l)];
      t[static_cast<std::size_t>(3 * i + j)] = acc;
    }
  t.symmetric = true;
  return t;
}

}  // namespace

std::string case_name(Case c) {
  switch (c) {
    case Case::newtonian: return "newtonian";
    case Case::les: return "les";
    case Case::third_order: return "third_order";
    case Case::electrostriction: return "electrostriction";
  }
  throw std::logic_error("unreachable");
}

Case case_from_name(const std::string& s) {
  for (Case c : all_cases())
    if (case_name(c) == s) return c;
  throw std::invalid_argument("unknown case '" + s + "'");
}

const std::vector<Case>& all_cases() {
  static const std::vector<Case> cases = {Case::newtonian, Case::les, Case::third_order,
                                          Case::electrostriction};
  return cases;
}

DatasetMeta case_meta(Case c, double mu) {
  DatasetMeta m;
  m.case_name = case_name(c);
  m.mu = mu;
  switch (c) {
    case Case::newtonian:
      m.input_shape.scalar_names = {"p"};
      m.input_shape.tensor_orders = {{"S", 2}};
      m.input_shape.anchor = "S";
      m.label_name = "sigma";
      m.label_order = 2;
      break;
    case Case::les:
      m.input_shape.tensor_orders = {{"G", 2}};
      m.input_shape.anchor = "G";
      m.label_name = "tau";
      m.label_order = 2;
      break;
    case Case::third_order:
      m.input_shape.scalar_names = {"p"};
      m.input_shape.tensor_orders = {{"A", 3}};
      m.input_shape.anchor = "A";
      m.label_name = "sigma";
      m.label_order = 3;
      break;
    case Case::electrostriction:
      // Anchor on the generically well-conditioned order-4 coefficient; the
      // rank-1 polarization dyad S has a repeated zero eigenvalue, so its
      // eigenframe can never pin the standard position.
      m.input_shape.tensor_orders = {{"V", 4}, {"S", 2}};
      m.input_shape.anchor = "V";
      m.label_name = "T";
      m.label_order = 2;
      break;
  }
  return m;
}

DenseTensor case_label(Case c, const TensorTuple& x, double mu) {
  switch (c) {
    case Case::newtonian:
      return newtonian_sigma(x.scalars.at(0).second, x.tensor("S"), mu);
    case Case::les:
      return les_tau(x.tensor("G"));
    case Case::third_order: {
      DenseTensor sigma = x.tensor("A");
      for (std::size_t i = 0; i < sigma.size(); ++i) sigma[i] *= mu;
      return sigma;
    }
    case Case::electrostriction:
      return electro_strain(x.tensor("V"), x.tensor("S"));
  }
  throw std::logic_error("unreachable");
}

CaseSample draw_case_sample(Case c, Rng& rng, double mu) {
  CaseSample cs;
  switch (c) {
    case Case::newtonian: {
      const double p = rng.next_gaussian();
      const Mat3 grad_v = random_mat3(rng);
      Mat3 s{};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s[i][j] = grad_v[i][j] + grad_v[j][i];
      cs.x.scalars.emplace_back("p", p);
      cs.x.tensors.emplace_back("S", mat_to_tensor(s, true));
      cs.x.anchor = "S";
      break;
    }
    case Case::les: {
      Mat3 g = random_mat3(rng);
      const double tr = (g[0][0] + g[1][1] + g[2][2]) / 3.0;
      for (int i = 0; i < 3; ++i) g[i][i] -= tr;
      cs.x.tensors.emplace_back("G", mat_to_tensor(g));
      cs.x.anchor = "G";
      break;
    }
    case Case::third_order: {
      const double p = rng.next_gaussian();
      DenseTensor raw(3, 3);
      for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = rng.next_gaussian();
      const DenseTensor rev = reverse_transpose3(raw);
      DenseTensor a(3, 3);
      for (std::size_t i = 0; i < a.size(); ++i) a[i] = raw[i] + rev[i];
      cs.x.scalars.emplace_back("p", p);
      cs.x.tensors.emplace_back("A", a);
      cs.x.anchor = "A";
      break;
    }
    case Case::electrostriction: {
      Vec3 pol = {rng.next_gaussian(), rng.next_gaussian(), rng.next_gaussian()};
      DenseTensor v_raw(4, 3);
      for (std::size_t i = 0; i < v_raw.size(); ++i) v_raw[i] = rng.next_gaussian();
      DenseTensor v = symmetrize(v_raw);
      Mat3 s{};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s[i][j] = pol[i] * pol[j];
      cs.x.tensors.emplace_back("V", std::move(v));
      cs.x.tensors.emplace_back("S", mat_to_tensor(s, true));
      cs.x.anchor = "V";
      break;
    }
  }
  cs.y = case_label(c, cs.x, mu);
  return cs;
}

TensorTuple Dataset::sample_tuple(std::size_t i) const {
  return unflatten({features.data() + i * d_in, d_in}, meta.input_shape);
}

DenseTensor Dataset::sample_label(std::size_t i) const {
  std::vector<double> data(labels.begin() + static_cast<std::ptrdiff_t>(i * d_out),
                           labels.begin() + static_cast<std::ptrdiff_t>((i + 1) * d_out));
  return DenseTensor(meta.label_order, std::move(data), 3);
}

Dataset generate_case(Case c, std::size_t n, std::uint64_t seed, double mu) {
  if (n < 1) throw std::invalid_argument("dataset size must be >= 1");
  if (!std::isfinite(mu)) throw std::invalid_argument("mu must be finite");

  Dataset d;
  d.meta = case_meta(c, mu);
  d.n = n;
  d.seed = seed;
  d.d_in = d.meta.input_shape.flat_size();
  d.d_out = 1;
  for (int k = 0; k < d.meta.label_order; ++k) d.d_out *= 3;
  d.features.resize(n * d.d_in);
  d.labels.resize(n * d.d_out);

  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = Rng::substream(seed, i);
    const CaseSample cs = draw_case_sample(c, rng, mu);
    const std::vector<double> row = flatten(cs.x);
    std::copy(row.begin(), row.end(), d.features.begin() + static_cast<std::ptrdiff_t>(i * d.d_in));
    std::copy(cs.y.data().begin(), cs.y.data().end(),
              d.labels.begin() + static_cast<std::ptrdiff_t>(i * d.d_out));
  }

  const std::size_t n_train = static_cast<std::size_t>(std::llround(0.85 * static_cast<double>(n)));
  d.train_idx.resize(n_train);
  d.test_idx.resize(n - n_train);
  for (std::size_t i = 0; i < n_train; ++i) d.train_idx[i] = i;
  for (std::size_t i = n_train; i < n; ++i) d.test_idx[i - n_train] = i;
  return d;
}

Dataset generate_newtonian(std::size_t n, std::uint64_t seed, double mu) {
  return generate_case(Case::newtonian, n, seed, mu);
}
Dataset generate_les(std::size_t n, std::uint64_t seed) {
  return generate_case(Case::les, n, seed);
}
Dataset generate_third_order(std::size_t n, std::uint64_t seed, double mu) {
  return generate_case(Case::third_order, n, seed, mu);
}
Dataset generate_electrostriction(std::size_t n, std::uint64_t seed) {
  return generate_case(Case::electrostriction, n, seed);
}

RotationEvalSet build_rotation_eval(Case c, std::uint64_t seed, std::size_t count, double mu,
                                    bool require_nondegenerate) {
  if (count < 1) throw std::invalid_argument("rotation count must be >= 1");

  RotationEvalSet es;
  es.seed = seed;

  constexpr int kMaxAttempts = 64;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(attempt));
    CaseSample cs = draw_case_sample(c, rng, mu);
    es.base_degenerate = standardize_tuple(cs.x).degenerate;
    es.x0 = std::move(cs.x);
    es.y0 = std::move(cs.y);
    if (!require_nondegenerate || !es.base_degenerate) break;
  }

  Rng rot_rng = Rng::substream(seed, 0x0707070707070707ULL);
  es.rotations.reserve(count);
  for (std::size_t i = 0; i < count; ++i) es.rotations.push_back(random_rotation(rot_rng));
  return es;
}

}  // namespace rteq
