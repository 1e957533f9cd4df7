#pragma once

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>

#include "rteq/forest.hpp"
#include "rteq/mlp.hpp"

namespace rteq {

enum class ModelKind { mlp, forest };

std::string model_kind_name(ModelKind k);
ModelKind model_kind_from_name(const std::string& s);

/// Raised on malformed or truncated model files.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Trained kernel predictor behind one fit/predict surface, with a
/// versioned binary container:
///
///   bytes 0..3   magic "RTEQ"
///   u32          format version (1)
///   u32          kind (0 = mlp, 1 = forest)
///   u32          input_dim
///   u32          output_dim
///   payload      kind-specific, f64 fields little-endian
///
/// Integers and doubles are written in native little-endian byte order
/// (enforced at compile time).
class KernelModel {
 public:
  KernelModel() = default;
  explicit KernelModel(Mlp m) : impl_(std::move(m)) {}
  explicit KernelModel(Forest f) : impl_(std::move(f)) {}

  ModelKind kind() const;
  int input_dim() const;
  int output_dim() const;

  std::vector<double> predict(std::span<const double> x) const;

  const Mlp& mlp() const { return std::get<Mlp>(impl_); }
  const Forest& forest() const { return std::get<Forest>(impl_); }

  void save(const std::filesystem::path& path) const;
  static KernelModel load(const std::filesystem::path& path);

 private:
  std::variant<std::monostate, Mlp, Forest> impl_;
};

}  // namespace rteq
