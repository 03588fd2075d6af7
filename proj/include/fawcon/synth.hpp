#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fawcon/frame_io.hpp"
#include "fawcon/fusion_conv.hpp"
#include "fawcon/types.hpp"

namespace fawcon::synth {

enum class SceneKind { Planes, Cylinder, Rooms };

SceneKind parse_scene_kind(std::string_view name);
std::string_view scene_kind_name(SceneKind kind);

struct GeneratorParams {
  SceneKind kind = SceneKind::Rooms;
  std::uint64_t seed = 1;
  int frames = 8;
  double spacing = 0.02;         // surface sampling pitch (meters)
  double sample_jitter = 0.25;   // in-surface jitter, as a fraction of spacing
  double normal_jitter = 0.0;    // off-surface jitter (meters)
  double noise = 0.6;            // std-dev of per-observation class-evidence noise
  double position_noise = 0.002; // per-axis uniform observation jitter (meters)
  double coverage = 0.6;         // fraction of the scene each frame sees (x-extent, or azimuth for rooms)

  double plane_size = 1.0;
  double gap = 0.2;

  double radius = 0.3;
  double height = 0.5;

  double room_width = 2.0;
  double room_depth = 2.0;
  double room_height = 1.0;
};

struct SurfaceSample {
  Vec3 position{};
  Vec3 normal{};
  int label = 0;
};

/// Closed-form geodesic model of an analytic scene.
struct GeodesicModel {
  enum class Kind { None, Planes, Cylinder } kind = Kind::None;
  std::vector<double> plane_heights;  // planes z = const, indexed by label
  double cx = 0.0, cy = 0.0, radius = 0.0;

  /// Surface distance between two points on the scene, or none when they
  /// lie on disconnected surfaces.
  std::optional<double> distance(const Vec3& a, const Vec3& b) const;
};

struct GeneratedScene {
  GeneratorParams params;
  std::size_t class_count = 0;
  std::size_t input_dim = 0;
  std::vector<SurfaceSample> samples;
  std::vector<Frame> frames;
  std::vector<std::vector<std::size_t>> frame_samples;  // sample index per observation
  GeodesicModel geodesic;
};

GeneratedScene generate_scene(const GeneratorParams& params);

/// Head whose trunk passes the input channels through and whose classifier
/// reads the class-evidence channels, with seeded perturbations on every weight.
ClassificationHead evidence_head(std::size_t input_dim, std::size_t classes, std::uint64_t seed);

/// Writes frame_NNN.fawf files, manifest.txt, head.fawp, scene.json and, for
/// analytic scenes, geodesic.json. Returns the manifest path.
std::filesystem::path write_scene(const GeneratedScene& scene, const std::filesystem::path& dir);

GeodesicModel read_geodesic_model(const std::filesystem::path& path);

}  // namespace fawcon::synth
