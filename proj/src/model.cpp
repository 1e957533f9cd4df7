#include "rteq/model.hpp"

#include <bit>
#include <fstream>

static_assert(std::endian::native == std::endian::little,
              "model container assumes a little-endian host");

namespace rteq {

namespace {

constexpr char kMagic[4] = {'R', 'T', 'E', 'Q'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

std::string model_kind_name(ModelKind k) { return k == ModelKind::mlp ? "mlp" : "forest"; }

ModelKind model_kind_from_name(const std::string& s) {
  if (s == "mlp") return ModelKind::mlp;
  if (s == "forest") return ModelKind::forest;
  throw std::invalid_argument("unknown model kind '" + s + "'");
}

ModelKind KernelModel::kind() const {
  if (std::holds_alternative<Mlp>(impl_)) return ModelKind::mlp;
  if (std::holds_alternative<Forest>(impl_)) return ModelKind::forest;
  throw std::logic_error("empty model");
}

int KernelModel::input_dim() const {
  if (const Mlp* m = std::get_if<Mlp>(&impl_)) return m->input_dim();
  if (const Forest* f = std::get_if<Forest>(&impl_)) return f->input_dim();
  return 0;
}

int KernelModel::output_dim() const {
  if (const Mlp* m = std::get_if<Mlp>(&impl_)) return m->output_dim();
  if (const Forest* f = std::get_if<Forest>(&impl_)) return f->output_dim();
  return 0;
}

std::vector<double> KernelModel::predict(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(input_dim()))
    throw std::invalid_argument("predict: input length mismatch");
  if (const Mlp* m = std::get_if<Mlp>(&impl_)) return m->predict(x);
  return std::get<Forest>(impl_).predict(x);
}

void KernelModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");

  out.write(kMagic, 4);
  auto w32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof(v)); };
  w32(kVersion);
  w32(kind() == ModelKind::mlp ? 0u : 1u);
  w32(static_cast<std::uint32_t>(input_dim()));
  w32(static_cast<std::uint32_t>(output_dim()));

  if (kind() == ModelKind::mlp)
    std::get<Mlp>(impl_).serialize(out);
  else
    std::get<Forest>(impl_).serialize(out);
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

KernelModel KernelModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");

  char magic[4] = {};
  if (!in.read(magic, 4) || std::string_view(magic, 4) != std::string_view(kMagic, 4))
    throw FormatError("model file: bad magic");
  auto r32 = [&]() {
    std::uint32_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(v)))
      throw FormatError("model file: truncated header");
    return v;
  };
  const std::uint32_t version = r32();
  if (version != kVersion) throw FormatError("model file: unsupported version");
  const std::uint32_t kind = r32();
  const std::uint32_t in_dim = r32();
  const std::uint32_t out_dim = r32();

  try {
    KernelModel m;
    if (kind == 0)
      m.impl_ = Mlp::deserialize(in);
    else if (kind == 1)
      m.impl_ = Forest::deserialize(in);
    else
      throw FormatError("model file: unknown kind tag");
    if (m.input_dim() != static_cast<int>(in_dim) || m.output_dim() != static_cast<int>(out_dim))
      throw FormatError("model file: header dims disagree with payload");
    return m;
  } catch (const FormatError&) {
    throw;
  } catch (const std::runtime_error& e) {
    throw FormatError(e.what());
  }
}

}  // namespace rteq
