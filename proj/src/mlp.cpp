#include "fawcon/mlp.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace fawcon {

void DenseLayer::pack() {
  packed.resize(weights.size());
  for (std::size_t o = 0; o < outputs; ++o) {
    for (std::size_t i = 0; i < inputs; ++i) packed[i * outputs + o] = weights[o * inputs + i];
  }
}

void DenseLayer::forward(std::span<const double> in, std::span<double> out) const {
  if (packed.size() == weights.size() && !packed.empty()) {
    for (std::size_t o = 0; o < outputs; ++o) out[o] = bias[o];
    for (std::size_t i = 0; i < inputs; ++i) {
      const double x = in[i];
      const double* col = packed.data() + i * outputs;
      for (std::size_t o = 0; o < outputs; ++o) out[o] += col[o] * x;
    }
    return;
  }
  for (std::size_t o = 0; o < outputs; ++o) {
    const float* row = weights.data() + o * inputs;
    double acc = bias[o];
    for (std::size_t i = 0; i < inputs; ++i) acc += static_cast<double>(row[i]) * in[i];
    out[o] = acc;
  }
}

Mlp::Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw DimensionError("network needs at least one layer");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    if (layer.inputs == 0 || layer.outputs == 0) throw DimensionError("empty layer");
    if (layer.weights.size() != layer.inputs * layer.outputs ||
        layer.bias.size() != layer.outputs) {
      throw DimensionError("layer " + std::to_string(l) + " parameter count mismatch");
    }
    if (l > 0 && layers_[l - 1].outputs != layer.inputs) {
      throw DimensionError("layer " + std::to_string(l) + " input width mismatch");
    }
  }
  for (auto& layer : layers_) layer.pack();
}

Mlp Mlp::random(std::span<const std::size_t> sizes, std::uint64_t seed) {
  if (sizes.size() < 2) throw DimensionError("network needs at least one layer");
  std::mt19937_64 rng(seed);
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    DenseLayer layer;
    layer.inputs = sizes[l];
    layer.outputs = sizes[l + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(layer.inputs));
    std::uniform_real_distribution<double> dist(-bound, bound);
    layer.weights.resize(layer.inputs * layer.outputs);
    for (auto& w : layer.weights) w = static_cast<float>(dist(rng));
    layer.bias.assign(layer.outputs, 0.0f);
    layers.push_back(std::move(layer));
  }
  return Mlp(std::move(layers));
}

std::vector<std::size_t> Mlp::sizes() const {
  std::vector<std::size_t> out;
  if (layers_.empty()) return out;
  out.push_back(layers_.front().inputs);
  for (const auto& layer : layers_) out.push_back(layer.outputs);
  return out;
}

std::vector<double> Mlp::forward(std::span<const double> in) const {
  if (in.size() != input_dim()) {
    throw DimensionError("network input has dimension " + std::to_string(in.size()) +
                         ", expected " + std::to_string(input_dim()));
  }
  std::vector<double> cur(in.begin(), in.end());
  std::vector<double> next;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    next.assign(layers_[l].outputs, 0.0);
    layers_[l].forward(cur, next);
    if (l + 1 < layers_.size()) {
      for (auto& v : next) v = v > 0.0 ? v : 0.0;
    }
    cur.swap(next);
  }
  return cur;
}

namespace {

constexpr const char* kMagic = "FAWP1";

float load_le_float(const unsigned char* bytes) {
  std::uint32_t bits = std::uint32_t(bytes[0]) | (std::uint32_t(bytes[1]) << 8) |
                       (std::uint32_t(bytes[2]) << 16) | (std::uint32_t(bytes[3]) << 24);
  return std::bit_cast<float>(bits);
}

void store_le_float(float value, std::ostream& out) {
  const auto bits = std::bit_cast<std::uint32_t>(value);
  const char bytes[4] = {static_cast<char>(bits & 0xff), static_cast<char>((bits >> 8) & 0xff),
                         static_cast<char>((bits >> 16) & 0xff),
                         static_cast<char>((bits >> 24) & 0xff)};
  out.write(bytes, 4);
}

}  // namespace

Mlp read_parameter_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open parameter file " + path.string());

  std::string header;
  if (!std::getline(in, header)) throw ParseError(path.string() + ": missing header line");
  std::istringstream hs(header);
  std::string magic, size_list;
  hs >> magic >> size_list;
  if (magic != kMagic || size_list.empty()) {
    throw ParseError(path.string() + ": header must read 'FAWP1 <sizes>'");
  }
  std::vector<std::size_t> sizes;
  std::istringstream ls(size_list);
  for (std::string tok; std::getline(ls, tok, ',');) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(tok, &used);
      if (used != tok.size() || v <= 0) throw std::invalid_argument(tok);
      sizes.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw ParseError(path.string() + ": bad layer size '" + tok + "'");
    }
  }
  if (sizes.size() < 2) throw ParseError(path.string() + ": need at least two layer sizes");

  std::vector<DenseLayer> layers;
  std::vector<unsigned char> buf;
  auto read_floats = [&](std::vector<float>& dst, std::size_t count) {
    buf.resize(count * 4);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (static_cast<std::size_t>(in.gcount()) != buf.size()) {
      throw ParseError(path.string() + ": truncated parameter data");
    }
    dst.resize(count);
    for (std::size_t i = 0; i < count; ++i) dst[i] = load_le_float(buf.data() + 4 * i);
  };
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    DenseLayer layer;
    layer.inputs = sizes[l];
    layer.outputs = sizes[l + 1];
    read_floats(layer.weights, layer.inputs * layer.outputs);
    read_floats(layer.bias, layer.outputs);
    layers.push_back(std::move(layer));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw ParseError(path.string() + ": trailing bytes after parameter data");
  }
  return Mlp(std::move(layers));
}

void write_parameter_file(const std::filesystem::path& path, const Mlp& net) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write parameter file " + path.string());
  out << kMagic << ' ';
  const auto sizes = net.sizes();
  for (std::size_t i = 0; i < sizes.size(); ++i) out << (i ? "," : "") << sizes[i];
  out << '\n';
  for (const auto& layer : net.layers()) {
    for (float w : layer.weights) store_le_float(w, out);
    for (float b : layer.bias) store_le_float(b, out);
  }
  if (!out) throw IoError("failed writing parameter file " + path.string());
}

}  // namespace fawcon
