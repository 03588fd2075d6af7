#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fawcon/stream.hpp"
#include "fawcon/synth.hpp"

namespace fawcon::app {

/// Bad flags or arguments (exit code 1).
struct UsageError : Error {
  using Error::Error;
};

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };
/// Threshold from FAWCON_LOG (error|warn|info|debug), default warn.
LogLevel log_threshold();
void log(LogLevel level, std::string_view message);

struct RunConfig {
  PipelineConfig pipeline;
  std::string weight = "const";  // const | gauss:<sigma> | mlp:<path>
  std::string head = "seed:0";   // seed:<N> | <parameter file>
  std::size_t classes = 2;       // class count for seeded heads
  std::filesystem::path out = ".";
};

/// Checks cross-field invariants (delta < h, n >= 1, ...); throws UsageError.
void validate(const RunConfig& config);

WeightFunction make_weight(const RunConfig& config);
ClassificationHead make_head(const RunConfig& config, std::size_t input_dim);

std::string report_json(const IngestReport& report);

struct ReplayResult {
  std::vector<IngestReport> reports;
  std::size_t points = 0;
  std::optional<double> accuracy;
  std::filesystem::path labels;
  std::filesystem::path log;
};
/// Ingests every frame of the manifest; writes labels.csv and reports.jsonl.
ReplayResult run_replay(const std::filesystem::path& manifest, const RunConfig& config);

std::filesystem::path run_gen(const synth::GeneratorParams& params,
                              const std::filesystem::path& out);

struct BenchRow {
  std::int64_t frame = 0;
  std::size_t points = 0;
  double insert_ms = 0.0;
  double rebuild_ms = 0.0;
  double conv_ms = 0.0;
  double fps = 0.0;
};
struct BenchResult {
  std::vector<BenchRow> rows;
  double aggregate_fps = 0.0;
  std::filesystem::path csv;
};
/// Times every frame; writes bench.csv (frame,points,insert_ms,rebuild_ms,conv_ms,fps).
BenchResult run_bench(const std::filesystem::path& manifest, const RunConfig& config);

struct CompareRow {
  int n = 1;
  NeighborhoodMode mode = NeighborhoodMode::Octree;
  double accuracy = 0.0;
  double mean_size = 0.0;  // mean convolution support size over the final scene
  double radius = 0.0;     // Euclidean radius (0 for octree rows)
};
/// Octree rings against Euclidean balls of matched mean cardinality; writes
/// compare.csv (n,mode,accuracy,mean_size,radius).
std::vector<CompareRow> run_compare(const std::filesystem::path& manifest, const RunConfig& config,
                                    const std::vector<int>& n_range);

/// Smallest radius whose mean ball size over the indexed points reaches `target`.
double matched_radius(const GlobalIndex& index, double target);

}  // namespace fawcon::app
