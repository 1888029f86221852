#include "csbss/checkpoint.hpp"

#include <fstream>

#include "csbss/binary_io.hpp"
#include "csbss/errors.hpp"

namespace csbss {

namespace {

constexpr std::string_view kMagic = "CSNN";
constexpr std::uint16_t kVersion = 1;

void write_descriptor(std::ostream& out, const DenseNetwork& net) {
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(net.layer_count()));
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(net.shapes()[l].in));
    io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(net.shapes()[l].out));
    io::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(net.activations()[l]));
  }
}

DenseNetwork read_descriptor(std::istream& in) {
  const auto layers = io::read_le<std::uint32_t>(in, "layer count");
  if (layers == 0 || layers > 64) throw ParseError("CSNN: implausible layer count " + std::to_string(layers));
  std::vector<LayerShape> shapes;
  std::vector<Activation> acts;
  for (std::uint32_t l = 0; l < layers; ++l) {
    const auto i = io::read_le<std::uint32_t>(in, "layer in");
    const auto o = io::read_le<std::uint32_t>(in, "layer out");
    const auto a = io::read_le<std::uint8_t>(in, "activation");
    if (a > static_cast<std::uint8_t>(Activation::relu)) throw ParseError("CSNN: unknown activation");
    shapes.push_back({i, o});
    acts.push_back(static_cast<Activation>(a));
  }
  try {
    return DenseNetwork(shapes, acts);
  } catch (const ParameterError& e) {
    throw ParseError(std::string("CSNN: ") + e.what());
  }
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const SeparatorModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot open " + path.string() + " for writing");
  io::write_magic(out, kMagic);
  io::write_le<std::uint16_t>(out, kVersion);
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.input_dim()));
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.latent_dim()));
  write_descriptor(out, model.encoder());
  write_descriptor(out, model.decoder(0));
  write_descriptor(out, model.decoder(1));
  const auto& st = model.standardizer();
  io::write_le<std::uint8_t>(out, st.empty() ? 0 : 1);
  if (!st.empty()) {
    for (auto v : st.mean) io::write_le<float>(out, v);
    for (auto v : st.inv_std) io::write_le<float>(out, v);
  }
  const Eigen::VectorXf flat = model.flat_parameters();
  io::write_le<std::uint64_t>(out, static_cast<std::uint64_t>(flat.size()));
  for (auto v : flat) io::write_le<float>(out, v);
  if (!out) throw ParameterError("write failed for " + path.string());
}

SeparatorModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  io::expect_magic(in, kMagic);
  const auto version = io::read_le<std::uint16_t>(in, "version");
  if (version != kVersion) throw ParseError("unsupported CSNN version " + std::to_string(version));
  const auto d = io::read_le<std::uint32_t>(in, "input_dim");
  const auto latent = io::read_le<std::uint32_t>(in, "latent_dim");
  DenseNetwork enc = read_descriptor(in);
  DenseNetwork dec1 = read_descriptor(in);
  DenseNetwork dec2 = read_descriptor(in);
  SeparatorModel model;
  try {
    model = SeparatorModel(std::move(enc), std::move(dec1), std::move(dec2));
  } catch (const DimensionError& e) {
    throw ParseError(std::string("CSNN: ") + e.what());
  }
  if (model.input_dim() != d || model.latent_dim() != latent) {
    throw ParseError("CSNN: architecture descriptor disagrees with header dimensions");
  }
  if (io::read_le<std::uint8_t>(in, "standardizer flag") != 0) {
    auto& st = model.standardizer();
    st.mean.resize(d);
    st.inv_std.resize(d);
    for (auto& v : st.mean) v = io::read_le<float>(in, "mean");
    for (auto& v : st.inv_std) v = io::read_le<float>(in, "inv_std");
  }
  const auto count = io::read_le<std::uint64_t>(in, "parameter count");
  if (count != model.parameter_count()) {
    throw ParseError("CSNN: payload has " + std::to_string(count) + " parameters, architecture needs " +
                     std::to_string(model.parameter_count()));
  }
  Eigen::VectorXf flat(static_cast<Eigen::Index>(count));
  for (auto& v : flat) v = io::read_le<float>(in, "parameter");
  model.set_flat_parameters(flat);
  return model;
}

}  // namespace csbss
