#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "fawcon/types.hpp"

namespace fawcon {

struct Observation {
  Vec3 position{};
  Feature feature;
  std::optional<int> label;
};

/// One time step of the stream.
struct Frame {
  std::int64_t index = 0;
  std::size_t input_dim = 0;
  bool has_labels = false;
  std::vector<Observation> observations;
};

// Frame text format:
//   FAWF1 <M> <D_in> <has_gt 0|1>
//   x y z f_1 ... f_D [gt_label]      (M lines)
// Lines starting with '#' are comments.
Frame parse_frame(std::istream& in, std::string_view source, std::int64_t index);
Frame read_frame(const std::filesystem::path& path, std::int64_t index);
void write_frame(std::ostream& out, const Frame& frame);
void write_frame(const std::filesystem::path& path, const Frame& frame);

/// Frame paths listed one per line; relative paths resolve against the
/// manifest's directory.
std::vector<std::filesystem::path> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path,
                    const std::vector<std::filesystem::path>& frames);

}  // namespace fawcon
