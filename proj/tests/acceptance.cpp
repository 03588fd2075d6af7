// Acceptance runner: one PASS/FAIL line per criterion. Exit status is
// nonzero when any hard criterion fails; throughput is reported as a soft gate.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fawcon/app.hpp"
#include "fawcon/oracle.hpp"
#include "fawcon/synth.hpp"
#include "support.hpp"

using namespace fawcon;

namespace {

// Tolerances and workload sizes.
constexpr std::size_t kAc1Points = 10'000;
constexpr std::size_t kAc1Probes = 1'000;
constexpr double kAc1Seconds = 10.0;

constexpr std::size_t kAc2Insertions = 100'000;
constexpr std::size_t kAc2ValidateEvery = 10'000;

constexpr int kAc3Clouds = 50;
constexpr std::size_t kAc3Points = 2'000;
constexpr std::size_t kAc3BatchEvery = 100;

constexpr std::size_t kAc4Triples = 1'000;
constexpr double kAc4RelTol = 1e-6;

constexpr double kAc5MedianTol = 0.15;
constexpr std::size_t kAc5Pairs = 200;

constexpr double kAc6Inversion = 0.01;  // one inversion of at most 1 pp
constexpr int kAc6Inversions = 1;

constexpr double kAc8Fps = 10.0;

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Outcome {
  bool pass = false;
  bool soft = false;
  std::string detail;
};

std::vector<std::size_t> as_indices(const std::vector<PointId>& ids) {
  std::vector<std::size_t> out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(index_of(id));
  return out;
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

Outcome ac1() {
  const auto start = Clock::now();
  const auto cloud = testing::uniform_cloud(kAc1Points, 101);
  GlobalIndex index;
  for (std::size_t i = 0; i < cloud.size(); ++i) index.insert(point_id(i), cloud[i]);

  // Half the probes are uniform, half sit within the merge distance of a
  // cloud point so correspondence hits get exercised too.
  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> u(0.0, 1.0), jitter(-0.005, 0.005);
  std::uniform_int_distribution<std::size_t> pick(0, cloud.size() - 1);
  std::size_t hood_mismatch = 0, corr_mismatch = 0, hits = 0;
  for (std::size_t k = 0; k < kAc1Probes; ++k) {
    Vec3 q{u(rng), u(rng), u(rng)};
    if (k % 2 == 1) {
      const auto& base = cloud[pick(rng)];
      q = {base[0] + jitter(rng), base[1] + jitter(rng), base[2] + jitter(rng)};
    }
    if (as_indices(index.neighborhood(q)) != oracle::brute_neighborhood(q, cloud, 0.04)) {
      ++hood_mismatch;
    }
    const auto got = index.correspond(q);
    const auto want = oracle::brute_correspond(q, cloud, 0.01);
    if (got.has_value() != want.has_value() || (got && index_of(*got) != *want)) ++corr_mismatch;
    hits += want ? 1 : 0;
  }
  const double elapsed = seconds_since(start);
  return {hood_mismatch == 0 && corr_mismatch == 0 && elapsed < kAc1Seconds, false,
          fmt("neighborhood mismatches %zu, correspond mismatches %zu (%zu hits), %.2f s < %.0f s",
              hood_mismatch, corr_mismatch, hits, elapsed, kAc1Seconds)};
}

Outcome ac2() {
  GlobalIndex index;
  std::mt19937_64 rng(201);
  std::uniform_real_distribution<double> wide(-40.0, 40.0), unit(0.0, 1.0);
  std::normal_distribution<double> blob(0.0, 0.3);
  std::vector<Vec3> centers;
  for (int c = 0; c < 16; ++c) centers.push_back({wide(rng), wide(rng), wide(rng)});

  std::size_t checks = 0;
  std::string failure;
  double worst_ratio = 0.0;
  auto validate = [&] {
    for (int a = 0; a < 3; ++a) {
      const auto& tree = index.tree(static_cast<Axis>(a));
      const auto report = oracle::validate_red_black(tree);
      const double bound = 2.0 * std::log2(static_cast<double>(tree.node_count()) + 1.0);
      worst_ratio = std::max(worst_ratio, static_cast<double>(tree.height()) / bound);
      if (failure.empty() && !report.ok) failure = "axis " + std::to_string(a) + ": " + report.reason;
      if (failure.empty() && static_cast<double>(tree.height()) > bound) {
        failure = "axis " + std::to_string(a) + " too tall";
      }
    }
    ++checks;
  };

  for (std::size_t i = 0; i < kAc2Insertions; ++i) {
    Vec3 p;
    switch (i % 4) {
      case 0: p = {wide(rng), wide(rng), wide(rng)}; break;  // uniform
      case 1: {                                             // clustered
        const auto& c = centers[i / 4 % centers.size()];
        p = {c[0] + blob(rng), c[1] + blob(rng), c[2] + blob(rng)};
        break;
      }
      case 2: {  // collinear, random position on one line
        const double t = wide(rng);
        p = {t, 0.5 * t + 1.0, -t};
        break;
      }
      default: {  // collinear and monotone, the classic unbalanced-BST input
        const double t = -60.0 + 0.0012 * static_cast<double>(i) + 0.001 * unit(rng);
        p = {t, -t, 2.0 * t};
      }
    }
    index.insert(point_id(i), p);
    if ((i + 1) % kAc2ValidateEvery == 0) validate();
  }
  std::size_t slabs = 0, height = 0;
  for (int a = 0; a < 3; ++a) {
    slabs = std::max(slabs, index.tree(static_cast<Axis>(a)).node_count());
    height = std::max(height, index.tree(static_cast<Axis>(a)).height());
  }
  return {failure.empty(), false,
          fmt("%zu validations, max slabs %zu, max height %zu, worst height/bound %.3f%s%s", checks,
              slabs, height, worst_ratio, failure.empty() ? "" : ", ", failure.c_str())};
}

using Children = std::array<std::optional<std::size_t>, 8>;

std::vector<Children> brute_children(const std::vector<Vec3>& cloud) {
  std::vector<Children> out;
  out.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    out.push_back(oracle::brute_octree_children(i, cloud, 0.04, 0.08));
  }
  return out;
}

bool same_children(const PointOctree& tree, const Children& brute) {
  for (int q = 0; q < 8; ++q) {
    if (tree.children[q].has_value() != brute[q].has_value()) return false;
    if (tree.children[q] && index_of(*tree.children[q]) != *brute[q]) return false;
  }
  return true;
}

Outcome ac3() {
  std::size_t child_mismatch = 0, batch_mismatch = 0, batch_checks = 0, populated = 0;
  for (int c = 0; c < kAc3Clouds; ++c) {
    // Extents from dense (about 8 neighbors within the child distance) to sparse.
    const double extent = 0.35 + 0.01 * c;
    const auto cloud = testing::uniform_cloud(kAc3Points, 300 + c, 0.0, extent);
    GlobalIndex index;
    OctreeForest forest;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      index.insert(point_id(i), cloud[i]);
      forest.rebuild_affected(point_id(i), index);
      if ((i + 1) % kAc3BatchEvery == 0) {
        OctreeForest batch;
        batch.rebuild_all(index);
        for (std::size_t j = 0; j <= i; ++j) {
          if (!(batch.at(point_id(j)) == forest.at(point_id(j)))) ++batch_mismatch;
        }
        ++batch_checks;
      }
    }
    const auto brute = brute_children(cloud);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (!same_children(forest.at(point_id(i)), brute[i])) ++child_mismatch;
      populated += forest.at(point_id(i)).child_count();
    }
  }
  const double mean_children =
      static_cast<double>(populated) / static_cast<double>(kAc3Clouds * kAc3Points);
  return {child_mismatch == 0 && batch_mismatch == 0, false,
          fmt("%d clouds, child mismatches %zu, %zu batch comparisons with %zu mismatches, "
              "mean children %.2f",
              kAc3Clouds, child_mismatch, batch_checks, batch_mismatch, mean_children)};
}

Outcome ac4() {
  constexpr std::size_t kPoints = 1500, kDim = 6;
  const auto cloud = testing::uniform_cloud(kPoints, 401, 0.0, 0.4);
  SceneStore store(SceneConfig{.input_dim = kDim, .class_count = 2, .best_dim = 4});
  GlobalIndex index;
  OctreeForest forest;
  std::mt19937_64 rng(402);
  for (const auto& p : cloud) {
    const PointId id = store.allocate_point(p, testing::random_feature(kDim, rng));
    index.insert(id, p);
    forest.rebuild_affected(id, index);
  }
  const auto brute = brute_children(cloud);

  const std::vector<std::size_t> sizes{3, 16, kDim};
  const Mlp net = Mlp::random(sizes, 403);
  const std::vector<std::pair<WeightFunction, oracle::NaiveKernel>> kernels{
      {WeightFunction::constant(), {oracle::NaiveKernel::Kind::Constant, 1.0, {}}},
      {WeightFunction::gaussian(0.05), {oracle::NaiveKernel::Kind::Gaussian, 0.05, {}}},
      {WeightFunction::learned(net), {oracle::NaiveKernel::Kind::Learned, 1.0, net.layers()}}};

  std::uniform_int_distribution<std::size_t> pick(0, kPoints - 1), variant(0, kernels.size() - 1);
  std::uniform_int_distribution<int> order(1, 3);
  double worst = 0.0;
  std::size_t failures = 0;
  for (std::size_t t = 0; t < kAc4Triples; ++t) {
    const std::size_t i = pick(rng);
    const int n = order(rng);
    const auto& [weight, kernel] = kernels[variant(rng)];
    std::vector<Vec3> pos;
    std::vector<Feature> feat;
    for (auto j : oracle::brute_ring(i, n, brute)) {
      pos.push_back(cloud[j]);
      feat.push_back(store.fused(point_id(j)));
    }
    const auto want = oracle::naive_convolution(cloud[i], pos, feat, kernel);
    const auto got = fpc(point_id(i), n, weight, store, forest);
    // Norm-wise relative error: a single channel can cancel to near zero.
    double diff = 0.0, norm = 0.0;
    for (std::size_t k = 0; k < want.size(); ++k) {
      diff = std::max(diff, std::abs(got[k] - want[k]));
      norm = std::max(norm, std::abs(want[k]));
    }
    const double rel = got.size() != want.size() ? 1.0 : diff / std::max(norm, 1e-300);
    worst = std::max(worst, rel);
    failures += rel <= kAc4RelTol ? 0 : 1;
  }
  return {failures == 0, false,
          fmt("%zu triples, %zu over tolerance, worst relative error %.3g <= %.0e", kAc4Triples,
              failures, worst, kAc4RelTol)};
}

struct Built {
  GlobalIndex index;
  OctreeForest forest;
};

Built build(const std::vector<Vec3>& cloud) {
  Built b;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    b.index.insert(point_id(i), cloud[i]);
    b.forest.rebuild_affected(point_id(i), b.index);
  }
  return b;
}

Outcome ac5() {
  // Planes with a gap.
  synth::GeneratorParams pp;
  pp.kind = synth::SceneKind::Planes;
  pp.spacing = 0.02;
  pp.gap = 0.2;
  const auto planes = synth::generate_scene(pp);
  std::vector<Vec3> pcloud;
  for (const auto& s : planes.samples) pcloud.push_back(s.position);
  auto pb = build(pcloud);
  const OctreeGraph pgraph(pb.forest, pb.index);
  std::size_t cross_edges = 0;
  for (std::size_t i = 0; i < pcloud.size(); ++i) {
    for (const auto& e : pgraph.edges(point_id(i))) {
      cross_edges += planes.samples[index_of(e.to)].label != planes.samples[i].label ? 1 : 0;
    }
  }
  std::mt19937_64 rng(501);
  std::uniform_int_distribution<std::size_t> ppick(0, pcloud.size() - 1);
  std::size_t cross_paths = 0, cross_tried = 0;
  while (cross_tried < 50) {
    const auto a = ppick(rng), b = ppick(rng);
    if (planes.samples[a].label == planes.samples[b].label) continue;
    ++cross_tried;
    cross_paths += pgraph.shortest_path(point_id(a), point_id(b)) ? 1 : 0;
  }

  // Cylinder: pairs roughly opposite each other, where the arc and the
  // chord differ the most.
  synth::GeneratorParams cp;
  cp.kind = synth::SceneKind::Cylinder;
  cp.spacing = 0.02;
  const auto cyl = synth::generate_scene(cp);
  std::vector<Vec3> ccloud;
  for (const auto& s : cyl.samples) ccloud.push_back(s.position);
  auto cb = build(ccloud);
  const OctreeGraph cgraph(cb.forest, cb.index);
  std::uniform_int_distribution<std::size_t> cpick(0, ccloud.size() - 1);
  std::vector<double> ratios;
  std::size_t below_chord = 0, disconnected = 0;
  while (ratios.size() + disconnected < kAc5Pairs) {
    const auto a = cpick(rng), b = cpick(rng);
    const auto& pa = ccloud[a];
    const auto& pb2 = ccloud[b];
    double dtheta = std::abs(std::atan2(pa[1] - cyl.geodesic.cy, pa[0] - cyl.geodesic.cx) -
                             std::atan2(pb2[1] - cyl.geodesic.cy, pb2[0] - cyl.geodesic.cx));
    dtheta = std::min(dtheta, 2 * std::numbers::pi - dtheta);
    if (dtheta < 0.8 * std::numbers::pi) continue;
    const auto path = cgraph.shortest_path(point_id(a), point_id(b));
    if (!path) {
      ++disconnected;
      continue;
    }
    const double geodesic = *cyl.geodesic.distance(pa, pb2);
    ratios.push_back(path->length / geodesic);
    below_chord += path->length < distance(pa, pb2) ? 1 : 0;
  }
  std::sort(ratios.begin(), ratios.end());
  const double median = ratios.empty() ? 0.0 : ratios[ratios.size() / 2];
  const bool pass = cross_edges == 0 && cross_paths == 0 && disconnected == 0 &&
                    below_chord == 0 && std::abs(median - 1.0) <= kAc5MedianTol;
  return {pass, false,
          fmt("planes: %zu cross edges, %zu/%zu cross paths; cylinder: median path/geodesic %.3f "
              "(tol %.2f), %zu below chord, %zu disconnected of %zu pairs",
              cross_edges, cross_paths, cross_tried, median, kAc5MedianTol, below_chord,
              disconnected, kAc5Pairs)};
}

app::ReplayResult replay_scene(const synth::GeneratorParams& params, const testing::TempDir& dir,
                               const std::string& tag, unsigned threads = 1) {
  const auto manifest = dir / (tag + "_scene") / "manifest.txt";
  if (!std::filesystem::exists(manifest)) app::run_gen(params, dir / (tag + "_scene"));
  app::RunConfig cfg;
  cfg.head = (dir / (tag + "_scene") / "head.fawp").string();
  cfg.pipeline.threads = threads;
  cfg.out = dir / (tag + "_out_t" + std::to_string(threads));
  return app::run_replay(manifest, cfg);
}

Outcome ac6(const testing::TempDir& dir) {
  bool pass = true;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    synth::GeneratorParams p;
    p.kind = synth::SceneKind::Rooms;
    p.seed = seed;
    p.frames = 8;
    p.spacing = 0.03;
    p.coverage = 0.5;
    p.noise = 2.0;
    const auto r = replay_scene(p, dir, "rooms" + std::to_string(seed));
    std::vector<double> acc;
    for (const auto& rep : r.reports) acc.push_back(rep.accuracy.value_or(0.0));
    int inversions = 0;
    double worst_drop = 0.0;
    for (std::size_t k = 1; k < acc.size(); ++k) {
      if (acc[k] < acc[k - 1]) {
        ++inversions;
        worst_drop = std::max(worst_drop, acc[k - 1] - acc[k]);
      }
    }
    const bool ok = acc.size() == 8 && acc.back() >= acc.front() &&
                    inversions <= kAc6Inversions && worst_drop <= kAc6Inversion;
    pass = pass && ok;
    detail += fmt("%sseed %llu: %.4f -> %.4f, %d inversions (worst %.2f pp)",
                  seed == 1 ? "" : "; ", static_cast<unsigned long long>(seed),
                  acc.empty() ? 0.0 : acc.front(), acc.empty() ? 0.0 : acc.back(), inversions,
                  100.0 * worst_drop);
  }
  return {pass, false, detail};
}

Outcome ac7(const testing::TempDir& dir) {
  // The criterion only binds where the matched Euclidean radius exceeds the
  // gap. With n = 1 the 1-ring lies inside the child distance (0.08), so its
  // matched radius cannot exceed a gap above that; such rows are reported as
  // vacuous rather than scored.
  constexpr double kGap = 0.1;
  bool pass = true;
  std::size_t binding = 0, vacuous = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    synth::GeneratorParams p;
    p.kind = synth::SceneKind::Planes;
    p.seed = seed;
    p.frames = 4;
    p.spacing = 0.065;
    p.gap = kGap;
    p.normal_jitter = 0.005;
    p.noise = 2.0;
    const auto sdir = dir / ("planes" + std::to_string(seed));
    const auto manifest = app::run_gen(p, sdir);
    app::RunConfig cfg;
    cfg.head = (sdir / "head.fawp").string();
    cfg.out = sdir / "compare";
    const auto rows = app::run_compare(manifest, cfg, {1, 2, 3});
    for (const auto& oct : rows) {
      if (oct.mode != NeighborhoodMode::Octree) continue;
      const auto euc = std::find_if(rows.begin(), rows.end(), [&](const app::CompareRow& r) {
        return r.n == oct.n && r.mode == NeighborhoodMode::Euclidean;
      });
      const bool binds = euc->radius > kGap;
      const bool ok = oct.accuracy >= euc->accuracy;
      if (binds) {
        ++binding;
        pass = pass && ok;
      } else {
        ++vacuous;
      }
      detail += fmt("%sseed %llu n=%d r=%.3f oct %.4f euc %.4f%s", detail.empty() ? "" : "; ",
                    static_cast<unsigned long long>(seed), oct.n, euc->radius, oct.accuracy,
                    euc->accuracy, binds ? (ok ? "" : " VIOLATION") : " (r <= gap, vacuous)");
    }
  }
  return {pass && binding > 0, false,
          fmt("%zu binding, %zu vacuous: ", binding, vacuous) + detail};
}

Outcome ac8(const testing::TempDir& dir) {
  synth::GeneratorParams p;
  p.kind = synth::SceneKind::Rooms;
  p.spacing = 0.03;
  const auto manifest = app::run_gen(p, dir / "bench_scene");
  app::RunConfig cfg;
  cfg.weight = "const";
  cfg.pipeline.ring_order = 2;
  cfg.pipeline.frame_cap = 4096;
  cfg.head = (dir / "bench_scene" / "head.fawp").string();
  cfg.out = dir / "bench_out";
  const auto r = app::run_bench(manifest, cfg);
  return {r.aggregate_fps >= kAc8Fps, true,
          fmt("%.2f FPS aggregate over %zu frames of 4096 observations (threshold %.0f)",
              r.aggregate_fps, r.rows.size(), kAc8Fps)};
}

Outcome ac9(const testing::TempDir& dir) {
  synth::GeneratorParams p;
  p.kind = synth::SceneKind::Rooms;
  p.spacing = 0.04;
  p.seed = 9;
  const auto a = replay_scene(p, dir, "det");
  const std::string first = testing::slurp(a.labels);
  // Second single-thread run into a separate directory.
  app::RunConfig cfg;
  cfg.head = (dir / "det_scene" / "head.fawp").string();
  cfg.out = dir / "det_again";
  const auto b = app::run_replay(dir / "det_scene" / "manifest.txt", cfg);
  const auto c = replay_scene(p, dir, "det", 3);
  const bool repeat = first == testing::slurp(b.labels);
  const bool threaded = first == testing::slurp(c.labels);
  return {repeat && threaded && !first.empty(), false,
          fmt("threads 1 rerun %s, threads 3 %s (%zu points)",
              repeat ? "byte-identical" : "DIFFERS", threaded ? "byte-identical" : "DIFFERS",
              a.points)};
}

}  // namespace

int main() {
  testing::TempDir dir("acceptance");
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"AC-1 global-tree query equivalence", ac1},
      {"AC-2 red-black validity", ac2},
      {"AC-3 octree oracle equivalence", ac3},
      {"AC-4 convolution equivalence", ac4},
      {"AC-5 geodesic properties", ac5},
      {"AC-6 accuracy over time", [&] { return ac6(dir); }},
      {"AC-7 neighborhood-mode separation", [&] { return ac7(dir); }},
      {"AC-8 throughput", [&] { return ac8(dir); }},
      {"AC-9 determinism", [&] { return ac9(dir); }},
  };
  int hard_failures = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, false, std::string("threw: ") + e.what()};
    }
    const char* verdict = o.pass ? "PASS" : (o.soft ? "FAIL (soft)" : "FAIL");
    std::printf("%s %s: %s [%.1f s]\n", verdict, name, o.detail.c_str(), seconds_since(start));
    std::fflush(stdout);
    if (!o.pass && !o.soft) ++hard_failures;
  }
  return hard_failures == 0 ? 0 : 1;
}
