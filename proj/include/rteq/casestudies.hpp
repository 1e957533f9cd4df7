#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rteq/rng.hpp"
#include "rteq/tensor.hpp"

namespace rteq {

enum class Case { newtonian, les, third_order, electrostriction };

std::string case_name(Case c);
Case case_from_name(const std::string& s);
const std::vector<Case>& all_cases();

/// Everything needed to interpret a flat sample row of a given case.
struct DatasetMeta {
  std::string case_name;
  TupleShape input_shape;
  std::string label_name;
  int label_order = 2;
  double mu = 1.0;

  bool operator==(const DatasetMeta&) const = default;
};

DatasetMeta case_meta(Case c, double mu = 1.0);

/// Flattened feature/label matrix with shape metadata and an 85/15 split.
/// Samples are drawn from per-index substreams of `seed`, so the content of
/// row i never depends on how many rows exist or who generated them.
struct Dataset {
  DatasetMeta meta;
  std::size_t n = 0;
  std::size_t d_in = 0;
  std::size_t d_out = 0;
  std::vector<double> features;  // n x d_in, row-major
  std::vector<double> labels;    // n x d_out, row-major
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
  std::uint64_t seed = 0;

  TensorTuple sample_tuple(std::size_t i) const;
  DenseTensor sample_label(std::size_t i) const;
};

/// One input sample of a case, as a tuple plus its analytic label.
struct CaseSample {
  TensorTuple x;
  DenseTensor y;
};

/// Draws one sample from the case's input distribution.
CaseSample draw_case_sample(Case c, Rng& rng, double mu = 1.0);

/// The case's analytic law applied to an input tuple. Generators, the
/// rotation-eval checks and the self-consistency invariant all route
/// through this one implementation; tests carry their own.
DenseTensor case_label(Case c, const TensorTuple& x, double mu = 1.0);

Dataset generate_newtonian(std::size_t n, std::uint64_t seed, double mu = 1.0);
Dataset generate_les(std::size_t n, std::uint64_t seed);
Dataset generate_third_order(std::size_t n, std::uint64_t seed, double mu = 1.0);
Dataset generate_electrostriction(std::size_t n, std::uint64_t seed);
Dataset generate_case(Case c, std::size_t n, std::uint64_t seed, double mu = 1.0);

/// One fresh base sample plus `count` Haar rotations for the E_D / E_M
/// protocols. With require_nondegenerate the base is redrawn (bounded
/// attempts) until its standardization carries no degenerate flag; cases
/// whose every sample is flagged keep the last draw.
struct RotationEvalSet {
  TensorTuple x0;
  DenseTensor y0;
  std::vector<Rotation> rotations;
  std::uint64_t seed = 0;
  bool base_degenerate = false;
};

RotationEvalSet build_rotation_eval(Case c, std::uint64_t seed, std::size_t count = 10000,
                                    double mu = 1.0, bool require_nondegenerate = false);

}  // namespace rteq
