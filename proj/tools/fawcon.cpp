// fawcon: replay, generate, benchmark and compare point-cloud streams.

#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fawcon/app.hpp"

namespace {

using namespace fawcon;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct Options {
  app::RunConfig run;
  std::string mode = "octree";
  std::string fusion = "head";
  std::string n_range = "1,2,3";
  synth::GeneratorParams gen;
  std::string kind = "rooms";
};

void add_run_flags(CLI::App& cmd, Options& o) {
  auto& p = o.run.pipeline;
  cmd.add_option("--half-interval", p.index.half_width, "slab half-width h (m)");
  cmd.add_option("--merge-dist", p.index.merge_distance, "correspondence distance delta (m)");
  cmd.add_option("--child-dist", p.octree.child_distance, "octree child distance (m)");
  cmd.add_flag("--early-finish", p.octree.early_finish, "enable octree early finish");
  cmd.add_option("--rings", p.ring_order, "ring order n");
  cmd.add_option("--weight", o.run.weight, "const | gauss:<sigma> | mlp:<path>");
  cmd.add_option("--head", o.run.head, "seed:<N> | <head parameter file>");
  cmd.add_option("--classes", o.run.classes, "class count for seeded heads");
  cmd.add_option("--cap", p.frame_cap, "max points re-evaluated per frame (0 = all)");
  cmd.add_option("--cap-seed", p.cap_seed, "seed for the per-frame cap sample");
  cmd.add_option("--threads", p.threads, "re-evaluation threads");
  cmd.add_option("--neighborhood", o.mode, "octree | euclidean")
      ->check(CLI::IsMember({"octree", "euclidean"}));
  cmd.add_option("--radius", p.euclidean_radius, "ball radius for euclidean mode (m)");
  cmd.add_option("--fusion-stage", o.fusion, "head | conv")
      ->check(CLI::IsMember({"head", "conv"}));
  cmd.add_option("--out", o.run.out, "output directory");
}

void finish_run_flags(Options& o) {
  o.run.pipeline.mode =
      o.mode == "euclidean" ? NeighborhoodMode::Euclidean : NeighborhoodMode::Octree;
  o.run.pipeline.fusion_stage =
      o.fusion == "conv" ? FusionStage::Convolved : FusionStage::HeadFeature;
}

std::vector<int> parse_n_range(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    try {
      if (dash != std::string::npos && dash > 0) {
        const int lo = std::stoi(item.substr(0, dash));
        const int hi = std::stoi(item.substr(dash + 1));
        for (int n = lo; n <= hi; ++n) out.push_back(n);
      } else {
        out.push_back(std::stoi(item));
      }
    } catch (const std::exception&) {
      throw app::UsageError("--n-range: cannot parse '" + item + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Streaming point-cloud segmentation with global-local trees"};
  cli.require_subcommand(1);
  Options o;
  std::string manifest;

  auto* replay = cli.add_subcommand("replay", "ingest a frame manifest; write labels.csv and reports.jsonl");
  replay->add_option("manifest", manifest, "manifest file")->required();
  add_run_flags(*replay, o);

  auto* bench = cli.add_subcommand("bench", "time every frame; write bench.csv");
  bench->add_option("manifest", manifest, "manifest file")->required();
  add_run_flags(*bench, o);

  auto* compare = cli.add_subcommand("compare", "octree rings vs matched euclidean balls; write compare.csv");
  compare->add_option("manifest", manifest, "manifest file")->required();
  compare->add_option("--n-range", o.n_range, "ring orders, e.g. 1,2,3 or 1-3");
  add_run_flags(*compare, o);

  auto* gen = cli.add_subcommand("gen", "write a synthetic scene (frames, manifest, head)");
  gen->add_option("kind", o.kind, "planes | cylinder | rooms")
      ->check(CLI::IsMember({"planes", "cylinder", "rooms"}));
  gen->add_option("--seed", o.gen.seed);
  gen->add_option("--frames", o.gen.frames);
  gen->add_option("--spacing", o.gen.spacing, "sampling pitch (m)");
  gen->add_option("--sample-jitter", o.gen.sample_jitter, "in-surface jitter (fraction of spacing)");
  gen->add_option("--normal-jitter", o.gen.normal_jitter, "off-surface jitter (m)");
  gen->add_option("--noise", o.gen.noise, "class-evidence noise std-dev");
  gen->add_option("--position-noise", o.gen.position_noise, "observation jitter (m)");
  gen->add_option("--coverage", o.gen.coverage, "fraction of the scene each frame sees");
  gen->add_option("--plane-size", o.gen.plane_size);
  gen->add_option("--gap", o.gen.gap);
  gen->add_option("--radius", o.gen.radius);
  gen->add_option("--height", o.gen.height);
  gen->add_option("--room-width", o.gen.room_width);
  gen->add_option("--room-depth", o.gen.room_depth);
  gen->add_option("--room-height", o.gen.room_height);
  gen->add_option("--out", o.run.out, "output directory");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen) {
      o.gen.kind = synth::parse_scene_kind(o.kind);
      const auto path = app::run_gen(o.gen, o.run.out);
      std::cout << path.string() << '\n';
      return 0;
    }
    finish_run_flags(o);
    if (*replay) {
      const auto r = app::run_replay(manifest, o.run);
      std::cout << r.reports.size() << " frames, " << r.points << " points";
      if (r.accuracy) std::cout << ", accuracy " << *r.accuracy;
      std::cout << "\nlabels: " << r.labels.string() << "\nreports: " << r.log.string() << '\n';
    } else if (*bench) {
      const auto r = app::run_bench(manifest, o.run);
      std::printf("aggregate fps %.2f over %zu frames\n", r.aggregate_fps, r.rows.size());
      std::cout << "csv: " << r.csv.string() << '\n';
    } else if (*compare) {
      const auto rows = app::run_compare(manifest, o.run, parse_n_range(o.n_range));
      for (const auto& r : rows) {
        std::printf("n=%d %-9s accuracy %.4f mean size %.2f radius %.4f\n", r.n,
                    r.mode == NeighborhoodMode::Octree ? "octree" : "euclidean", r.accuracy,
                    r.mean_size, r.radius);
      }
    }
    return 0;
  } catch (const app::UsageError& e) {
    app::log(app::LogLevel::Error, e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    app::log(app::LogLevel::Error, e.what());
    return kExitData;
  }
}
