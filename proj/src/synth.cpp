#include "fawcon/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

#include "json.hpp"

namespace fawcon::synth {

using nlohmann::json;

SceneKind parse_scene_kind(std::string_view name) {
  if (name == "planes") return SceneKind::Planes;
  if (name == "cylinder") return SceneKind::Cylinder;
  if (name == "rooms") return SceneKind::Rooms;
  throw DomainError("unknown scene kind '" + std::string(name) + "' (planes|cylinder|rooms)");
}

std::string_view scene_kind_name(SceneKind kind) {
  switch (kind) {
    case SceneKind::Planes:
      return "planes";
    case SceneKind::Cylinder:
      return "cylinder";
    case SceneKind::Rooms:
      return "rooms";
  }
  return "rooms";
}

std::optional<double> GeodesicModel::distance(const Vec3& a, const Vec3& b) const {
  switch (kind) {
    case Kind::Planes: {
      // Each point belongs to the nearest plane; different planes never connect.
      auto nearest = [&](const Vec3& p) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < plane_heights.size(); ++i) {
          if (std::abs(p[2] - plane_heights[i]) < std::abs(p[2] - plane_heights[best])) best = i;
        }
        return best;
      };
      if (nearest(a) != nearest(b)) return std::nullopt;
      return std::hypot(a[0] - b[0], a[1] - b[1]);
    }
    case Kind::Cylinder: {
      const double ta = std::atan2(a[1] - cy, a[0] - cx);
      const double tb = std::atan2(b[1] - cy, b[0] - cx);
      double dt = std::abs(ta - tb);
      if (dt > std::numbers::pi) dt = 2.0 * std::numbers::pi - dt;
      return std::hypot(radius * dt, a[2] - b[2]);
    }
    case Kind::None:
      break;
  }
  return std::nullopt;
}

namespace {

class Sampler {
 public:
  Sampler(const GeneratorParams& params, std::mt19937_64& rng) : params_(params), rng_(rng) {}

  // Grid-samples the rectangle origin + u*[0,lu] + v*[0,lv].
  template <typename Keep>
  void rectangle(const Vec3& origin, const Vec3& u, double lu, const Vec3& v, double lv,
                 const Vec3& normal, int label, std::vector<SurfaceSample>& out, Keep keep) {
    const double s = params_.spacing;
    const auto nu = static_cast<int>(std::floor(lu / s + 1e-9)) + 1;
    const auto nv = static_cast<int>(std::floor(lv / s + 1e-9)) + 1;
    std::uniform_real_distribution<double> jitter(-params_.sample_jitter * s,
                                                  params_.sample_jitter * s);
    std::uniform_real_distribution<double> lift(-params_.normal_jitter, params_.normal_jitter);
    for (int i = 0; i < nu; ++i) {
      for (int j = 0; j < nv; ++j) {
        const double a = std::clamp(i * s + jitter(rng_), 0.0, lu);
        const double b = std::clamp(j * s + jitter(rng_), 0.0, lv);
        const double c = params_.normal_jitter > 0.0 ? lift(rng_) : 0.0;
        Vec3 p;
        for (int k = 0; k < 3; ++k) p[k] = origin[k] + a * u[k] + b * v[k] + c * normal[k];
        if (keep(p)) out.push_back({p, normal, label});
      }
    }
  }

 private:
  const GeneratorParams& params_;
  std::mt19937_64& rng_;
};

constexpr auto kKeepAll = [](const Vec3&) { return true; };

void sample_planes(const GeneratorParams& prm, std::mt19937_64& rng, GeneratedScene& scene) {
  Sampler sampler(prm, rng);
  const double L = prm.plane_size;
  sampler.rectangle({0, 0, 0}, {1, 0, 0}, L, {0, 1, 0}, L, {0, 0, 1}, 0, scene.samples, kKeepAll);
  sampler.rectangle({0, 0, prm.gap}, {1, 0, 0}, L, {0, 1, 0}, L, {0, 0, 1}, 1, scene.samples,
                    kKeepAll);
  scene.class_count = 2;
  scene.geodesic.kind = GeodesicModel::Kind::Planes;
  scene.geodesic.plane_heights = {0.0, prm.gap};
}

void sample_cylinder(const GeneratorParams& prm, std::mt19937_64& rng, GeneratedScene& scene) {
  const double s = prm.spacing;
  const auto n_theta =
      std::max(3, static_cast<int>(std::lround(2.0 * std::numbers::pi * prm.radius / s)));
  const auto n_z = static_cast<int>(std::floor(prm.height / s + 1e-9)) + 1;
  std::uniform_real_distribution<double> jitter(-prm.sample_jitter, prm.sample_jitter);
  std::uniform_real_distribution<double> lift(-prm.normal_jitter, prm.normal_jitter);
  for (int j = 0; j < n_z; ++j) {
    for (int i = 0; i < n_theta; ++i) {
      const double theta = 2.0 * std::numbers::pi * (i + jitter(rng)) / n_theta;
      const double z = std::clamp((j + jitter(rng)) * s, 0.0, prm.height);
      const double r = prm.radius + (prm.normal_jitter > 0.0 ? lift(rng) : 0.0);
      const Vec3 normal{std::cos(theta), std::sin(theta), 0.0};
      scene.samples.push_back(
          {{r * normal[0], r * normal[1], z}, normal, z < prm.height / 2.0 ? 0 : 1});
    }
  }
  scene.class_count = 2;
  scene.geodesic.kind = GeodesicModel::Kind::Cylinder;
  scene.geodesic.radius = prm.radius;
}

void sample_rooms(const GeneratorParams& prm, std::mt19937_64& rng, GeneratedScene& scene) {
  Sampler sampler(prm, rng);
  const double W = prm.room_width, D = prm.room_depth, H = prm.room_height, s = prm.spacing;
  // Furniture block standing on the floor.
  const double bx0 = 0.35 * W, bx1 = 0.65 * W, by0 = 0.35 * D, by1 = 0.6 * D;
  const double bh = std::min(0.45, 0.5 * H);
  auto outside_block = [&](const Vec3& p) {
    return !(p[0] > bx0 - 0.5 * s && p[0] < bx1 + 0.5 * s && p[1] > by0 - 0.5 * s &&
             p[1] < by1 + 0.5 * s);
  };
  enum { kFloor = 0, kWall = 1, kFurniture = 2 };
  auto& out = scene.samples;
  sampler.rectangle({0, 0, 0}, {1, 0, 0}, W, {0, 1, 0}, D, {0, 0, 1}, kFloor, out, outside_block);
  sampler.rectangle({0, 0, s}, {0, 1, 0}, D, {0, 0, 1}, H - s, {1, 0, 0}, kWall, out, kKeepAll);
  sampler.rectangle({W, 0, s}, {0, 1, 0}, D, {0, 0, 1}, H - s, {-1, 0, 0}, kWall, out, kKeepAll);
  sampler.rectangle({s, 0, s}, {1, 0, 0}, W - 2 * s, {0, 0, 1}, H - s, {0, 1, 0}, kWall, out,
                    kKeepAll);
  sampler.rectangle({s, D, s}, {1, 0, 0}, W - 2 * s, {0, 0, 1}, H - s, {0, -1, 0}, kWall, out,
                    kKeepAll);
  sampler.rectangle({bx0, by0, bh}, {1, 0, 0}, bx1 - bx0, {0, 1, 0}, by1 - by0, {0, 0, 1},
                    kFurniture, out, kKeepAll);
  const double side_h = bh - 2 * s;
  if (side_h > 0) {
    sampler.rectangle({bx0, by0, s}, {0, 1, 0}, by1 - by0, {0, 0, 1}, side_h, {-1, 0, 0},
                      kFurniture, out, kKeepAll);
    sampler.rectangle({bx1, by0, s}, {0, 1, 0}, by1 - by0, {0, 0, 1}, side_h, {1, 0, 0},
                      kFurniture, out, kKeepAll);
    sampler.rectangle({bx0 + s, by0, s}, {1, 0, 0}, bx1 - bx0 - 2 * s, {0, 0, 1}, side_h,
                      {0, -1, 0}, kFurniture, out, kKeepAll);
    sampler.rectangle({bx0 + s, by1, s}, {1, 0, 0}, bx1 - bx0 - 2 * s, {0, 0, 1}, side_h,
                      {0, 1, 0}, kFurniture, out, kKeepAll);
  }
  scene.class_count = 3;
}

void check_params(const GeneratorParams& p) {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive");
  };
  positive(p.spacing, "spacing");
  if (p.frames < 1) throw DomainError("frames must be >= 1");
  if (!(p.coverage > 0.0 && p.coverage <= 1.0)) throw DomainError("coverage must be in (0, 1]");
  if (!(p.noise >= 0.0)) throw DomainError("noise must be non-negative");
  if (!(p.position_noise >= 0.0)) throw DomainError("position noise must be non-negative");
  if (!(p.sample_jitter >= 0.0 && p.sample_jitter < 0.5)) {
    throw DomainError("sample jitter must be in [0, 0.5)");
  }
  if (!(p.normal_jitter >= 0.0)) throw DomainError("normal jitter must be non-negative");
  if (p.kind == SceneKind::Rooms && p.coverage * p.frames < 1.0) {
    throw DomainError("rooms need coverage * frames >= 1 so every wall is seen");
  }
  switch (p.kind) {
    case SceneKind::Planes:
      positive(p.plane_size, "plane size");
      positive(p.gap, "gap");
      break;
    case SceneKind::Cylinder:
      positive(p.radius, "radius");
      positive(p.height, "height");
      break;
    case SceneKind::Rooms:
      positive(p.room_width, "room width");
      positive(p.room_depth, "room depth");
      positive(p.room_height, "room height");
      break;
  }
}

}  // namespace

GeneratedScene generate_scene(const GeneratorParams& params) {
  check_params(params);
  GeneratedScene scene;
  scene.params = params;
  std::mt19937_64 rng(params.seed);
  switch (params.kind) {
    case SceneKind::Planes:
      sample_planes(params, rng, scene);
      break;
    case SceneKind::Cylinder:
      sample_cylinder(params, rng, scene);
      break;
    case SceneKind::Rooms:
      sample_rooms(params, rng, scene);
      break;
  }
  // Features: one evidence channel per class, then |n_x|, |n_y|, |n_z| and
  // normalized height.
  scene.input_dim = scene.class_count + 4;
  if (scene.samples.empty()) return scene;

  double xmin = scene.samples.front().position[0], xmax = xmin;
  double ymin = scene.samples.front().position[1], ymax = ymin;
  double zmin = scene.samples.front().position[2], zmax = zmin;
  for (const auto& s : scene.samples) {
    xmin = std::min(xmin, s.position[0]);
    xmax = std::max(xmax, s.position[0]);
    ymin = std::min(ymin, s.position[1]);
    ymax = std::max(ymax, s.position[1]);
    zmin = std::min(zmin, s.position[2]);
    zmax = std::max(zmax, s.position[2]);
  }
  const double zspan = zmax > zmin ? zmax - zmin : 1.0;
  const double width = params.coverage * (xmax - xmin);

  // Rooms are scanned by a camera turning in place at the room center: frame k
  // sees the azimuth wedge [k, k + coverage * frames) * 2pi / frames (wrapped).
  // Analytic scenes are swept along x.
  const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
  const double two_pi = 2.0 * std::numbers::pi;
  auto visible = [&](const Vec3& p, int k) {
    if (params.kind == SceneKind::Rooms) {
      double az = std::atan2(p[1] - cy, p[0] - cx);
      if (az < 0.0) az += two_pi;
      const double start = two_pi * k / params.frames;
      double rel = az - start;
      if (rel < 0.0) rel += two_pi;
      return rel <= params.coverage * two_pi;
    }
    const double t = params.frames > 1 ? static_cast<double>(k) / (params.frames - 1) : 0.0;
    const double lo = xmin + t * (xmax - xmin - width);
    const double hi = (k == params.frames - 1) ? xmax : lo + width;
    return p[0] >= lo && p[0] <= hi;
  };

  std::normal_distribution<double> evidence_noise(0.0, params.noise);
  std::uniform_real_distribution<double> shake(-params.position_noise, params.position_noise);
  for (int k = 0; k < params.frames; ++k) {
    Frame frame;
    frame.index = k;
    frame.input_dim = scene.input_dim;
    frame.has_labels = true;
    std::vector<std::size_t> picked;
    for (std::size_t i = 0; i < scene.samples.size(); ++i) {
      const auto& s = scene.samples[i];
      if (!visible(s.position, k)) continue;
      Observation obs;
      for (int a = 0; a < 3; ++a) {
        obs.position[a] = s.position[a] + (params.position_noise > 0.0 ? shake(rng) : 0.0);
      }
      obs.feature.resize(scene.input_dim);
      for (std::size_t c = 0; c < scene.class_count; ++c) {
        const double mean = static_cast<int>(c) == s.label ? 1.0 : 0.0;
        obs.feature[c] = static_cast<float>(std::max(0.0, mean + evidence_noise(rng)));
      }
      for (int a = 0; a < 3; ++a) {
        obs.feature[scene.class_count + a] = static_cast<float>(std::abs(s.normal[a]));
      }
      obs.feature[scene.class_count + 3] = static_cast<float>((s.position[2] - zmin) / zspan);
      obs.label = s.label;
      frame.observations.push_back(std::move(obs));
      picked.push_back(i);
    }
    scene.frames.push_back(std::move(frame));
    scene.frame_samples.push_back(std::move(picked));
  }
  return scene;
}

ClassificationHead evidence_head(std::size_t input_dim, std::size_t classes, std::uint64_t seed) {
  if (classes == 0 || classes > input_dim) {
    throw DimensionError("evidence head needs 1 <= classes <= input dimension");
  }
  constexpr std::size_t F = ClassificationHead::kFeatureDim;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> eps(-0.01, 0.01);
  auto layer = [&](std::size_t in, std::size_t out, std::size_t diag) {
    DenseLayer l;
    l.inputs = in;
    l.outputs = out;
    l.weights.resize(in * out);
    for (std::size_t o = 0; o < out; ++o) {
      for (std::size_t i = 0; i < in; ++i) {
        const double base = (o == i && o < diag) ? 1.0 : 0.0;
        l.weights[o * in + i] = static_cast<float>(base + eps(rng));
      }
    }
    l.bias.resize(out);
    for (auto& b : l.bias) b = static_cast<float>(eps(rng));
    return l;
  };
  Mlp trunk({layer(input_dim, F, input_dim), layer(F, F, F), layer(F, F, F)});
  return ClassificationHead(std::move(trunk), layer(F, classes, classes));
}

std::filesystem::path write_scene(const GeneratedScene& scene, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> names;
  for (const auto& frame : scene.frames) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%03lld.fawf", static_cast<long long>(frame.index));
    write_frame(dir / name, frame);
    names.emplace_back(name);
  }
  const auto manifest = dir / "manifest.txt";
  write_manifest(manifest, names);
  evidence_head(scene.input_dim, scene.class_count, scene.params.seed).save(dir / "head.fawp");

  const auto& p = scene.params;
  json meta = {{"kind", scene_kind_name(p.kind)},
               {"seed", p.seed},
               {"frames", p.frames},
               {"spacing", p.spacing},
               {"noise", p.noise},
               {"coverage", p.coverage},
               {"classes", scene.class_count},
               {"input_dim", scene.input_dim},
               {"points", scene.samples.size()}};
  std::ofstream(dir / "scene.json") << meta.dump(2) << '\n';

  if (scene.geodesic.kind != GeodesicModel::Kind::None) {
    json g;
    if (scene.geodesic.kind == GeodesicModel::Kind::Planes) {
      g = {{"kind", "planes"}, {"heights", scene.geodesic.plane_heights}};
    } else {
      g = {{"kind", "cylinder"},
           {"center", {scene.geodesic.cx, scene.geodesic.cy}},
           {"radius", scene.geodesic.radius}};
    }
    std::ofstream(dir / "geodesic.json") << g.dump(2) << '\n';
  }
  return manifest;
}

GeodesicModel read_geodesic_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open geodesic sidecar " + path.string());
  GeodesicModel model;
  try {
    const json g = json::parse(in);
    const auto kind = g.at("kind").get<std::string>();
    if (kind == "planes") {
      model.kind = GeodesicModel::Kind::Planes;
      model.plane_heights = g.at("heights").get<std::vector<double>>();
    } else if (kind == "cylinder") {
      model.kind = GeodesicModel::Kind::Cylinder;
      model.cx = g.at("center").at(0).get<double>();
      model.cy = g.at("center").at(1).get<double>();
      model.radius = g.at("radius").get<double>();
    } else {
      throw ParseError(path.string() + ": unknown geodesic kind '" + kind + "'");
    }
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return model;
}

}  // namespace fawcon::synth
