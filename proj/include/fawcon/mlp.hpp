#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "fawcon/types.hpp"

namespace fawcon {

/// Fully-connected layer; weights are row-major (one row per output unit).
struct DenseLayer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<float> weights;  // outputs x inputs, row-major
  std::vector<float> bias;

  /// Column-major double copy of `weights`, filled by pack(). Lets forward()
  /// run output-parallel without changing any per-output summation order.
  std::vector<double> packed;
  void pack();

  void forward(std::span<const double> in, std::span<double> out) const;
};

/// Stack of dense layers with a rectifier between layers and a linear output.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<DenseLayer> layers);

  /// He-uniform weights and zero bias drawn from a seeded generator.
  static Mlp random(std::span<const std::size_t> sizes, std::uint64_t seed);

  std::size_t input_dim() const noexcept { return layers_.empty() ? 0 : layers_.front().inputs; }
  std::size_t output_dim() const noexcept { return layers_.empty() ? 0 : layers_.back().outputs; }
  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  std::vector<std::size_t> sizes() const;

  std::vector<double> forward(std::span<const double> in) const;

 private:
  std::vector<DenseLayer> layers_;
};

// Parameter files: an ASCII header line "FAWP1 <n0>,<n1>,...,<nL>\n" followed,
// for each layer l, by n(l+1) x n(l) row-major weights and then n(l+1) biases,
// all little-endian IEEE-754 binary32.
Mlp read_parameter_file(const std::filesystem::path& path);
void write_parameter_file(const std::filesystem::path& path, const Mlp& net);

}  // namespace fawcon
