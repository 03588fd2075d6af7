// Python bindings. Point ids cross the boundary as plain ints.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "fawcon/app.hpp"

namespace py = pybind11;
using namespace fawcon;

namespace {

std::vector<std::size_t> ids(const std::vector<PointId>& v) {
  std::vector<std::size_t> out;
  out.reserve(v.size());
  for (auto p : v) out.push_back(index_of(p));
  return out;
}

Frame make_frame(const std::vector<Vec3>& positions, const std::vector<std::vector<float>>& features,
                 const std::optional<std::vector<int>>& labels, std::int64_t index) {
  if (positions.size() != features.size()) {
    throw DimensionError("positions and features differ in length");
  }
  if (labels && labels->size() != positions.size()) {
    throw DimensionError("labels and positions differ in length");
  }
  Frame f;
  f.index = index;
  f.input_dim = features.empty() ? 0 : features.front().size();
  f.has_labels = labels.has_value();
  for (std::size_t i = 0; i < positions.size(); ++i) {
    Observation o{positions[i], features[i], std::nullopt};
    if (labels) o.label = (*labels)[i];
    f.observations.push_back(std::move(o));
  }
  return f;
}

py::dict report_dict(const IngestReport& r) {
  py::dict d;
  d["frame"] = r.frame;
  d["observations"] = r.observations;
  d["inserted"] = r.inserted;
  d["merged"] = r.merged;
  d["rebuilt"] = r.rebuilt;
  d["reevaluated"] = r.reevaluated;
  d["points"] = r.scene_points;
  d["wall_ms"] = r.wall_ms;
  d["accuracy"] = r.accuracy;
  return d;
}

}  // namespace

PYBIND11_MODULE(_fawcon, m) {
  m.attr("__version__") = "0.1.0";

  auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<DimensionError>(m, "DimensionError", error.ptr());
  py::register_exception<NotFoundError>(m, "NotFoundError", error.ptr());
  py::register_exception<DomainError>(m, "DomainError", error.ptr());
  py::register_exception<AlreadyInsertedError>(m, "AlreadyInsertedError", error.ptr());
  py::register_exception<OrderingError>(m, "OrderingError", error.ptr());
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<IoError>(m, "IoError", error.ptr());
  py::register_exception<app::UsageError>(m, "UsageError", error.ptr());

  py::class_<GlobalIndex>(m, "GlobalIndex")
      .def(py::init([](double half_width, double merge_distance) {
             return GlobalIndex({half_width, merge_distance, false});
           }),
           py::arg("half_width") = 0.04, py::arg("merge_distance") = 0.01)
      .def("insert", [](GlobalIndex& g, std::size_t p, const Vec3& x) { g.insert(point_id(p), x); })
      .def("neighborhood", [](const GlobalIndex& g, const Vec3& q) { return ids(g.neighborhood(q)); })
      .def("extended_neighborhood",
           [](const GlobalIndex& g, const Vec3& q) { return ids(g.extended_neighborhood(q)); })
      .def("ball", [](const GlobalIndex& g, const Vec3& q, double r) { return ids(g.ball(q, r)); })
      .def("correspond",
           [](const GlobalIndex& g, const Vec3& q) -> std::optional<std::size_t> {
             const auto hit = g.correspond(q);
             if (!hit) return std::nullopt;
             return index_of(*hit);
           })
      .def("__len__", &GlobalIndex::size);

  py::class_<OctreeForest>(m, "OctreeForest")
      .def(py::init([](double child_distance) {
             OctreeConfig cfg;
             cfg.child_distance = child_distance;
             return OctreeForest(cfg);
           }),
           py::arg("child_distance") = 0.08)
      .def("rebuild_affected",
           [](OctreeForest& f, std::size_t q, const GlobalIndex& g) {
             return ids(f.rebuild_affected(point_id(q), g));
           })
      .def("rebuild_all", &OctreeForest::rebuild_all)
      .def("children",
           [](const OctreeForest& f, std::size_t p) {
             std::vector<std::optional<std::size_t>> out;
             for (const auto& c : f.at(point_id(p)).children) {
               out.push_back(c ? std::optional<std::size_t>(index_of(*c)) : std::nullopt);
             }
             return out;
           },
           "Child id per quadrant (bit a set when the offset along axis a is >= 0).")
      .def("ring", [](const OctreeForest& f, std::size_t p, int n) {
        return ids(f.ring(point_id(p), n).members);
      });

  m.def(
      "trace_path",
      [](const OctreeForest& f, const GlobalIndex& g, std::size_t p, std::size_t q)
          -> std::optional<std::pair<std::vector<std::size_t>, double>> {
        const auto path = trace_path(f, g, point_id(p), point_id(q));
        if (!path) return std::nullopt;
        return std::make_pair(ids(path->points), path->length);
      },
      "Shortest path over octree links as (ids, length), or None when disconnected.");

  py::class_<Pipeline>(m, "Pipeline")
      .def(py::init([](std::size_t input_dim, std::size_t classes, std::uint64_t seed,
                       int rings, const std::string& weight, unsigned threads) {
             app::RunConfig cfg;
             cfg.pipeline.ring_order = rings;
             cfg.pipeline.threads = threads;
             cfg.weight = weight;
             cfg.classes = classes;
             cfg.head = "seed:" + std::to_string(seed);
             app::validate(cfg);
             return Pipeline(cfg.pipeline, app::make_weight(cfg), app::make_head(cfg, input_dim));
           }),
           py::arg("input_dim"), py::arg("classes") = 2, py::arg("seed") = 0,
           py::arg("rings") = 2, py::arg("weight") = "const", py::arg("threads") = 1)
      .def(
          "ingest",
          [](Pipeline& p, const std::vector<Vec3>& positions,
             const std::vector<std::vector<float>>& features,
             const std::optional<std::vector<int>>& labels, std::int64_t index) {
            auto frame = make_frame(positions, features, labels, index);
            IngestReport report;
            {
              py::gil_scoped_release release;
              report = p.ingest(frame);
            }
            return report_dict(report);
          },
          py::arg("positions"), py::arg("features"), py::arg("labels") = py::none(),
          py::arg("index"))
      .def("__len__", [](const Pipeline& p) { return p.scene().size(); })
      .def("label",
           [](const Pipeline& p, std::size_t id) {
             const auto& rec = p.scene().at(point_id(id));
             return std::make_pair(rec.predicted_label(), rec.label_distribution);
           },
           "(predicted label, class distribution) of a point.")
      .def("accuracy", &Pipeline::accuracy)
      .def("export_labels", &Pipeline::export_labels);

  m.def(
      "generate",
      [](const std::string& kind, const std::filesystem::path& out, std::uint64_t seed, int frames,
         double spacing) {
        synth::GeneratorParams p;
        p.kind = synth::parse_scene_kind(kind);
        p.seed = seed;
        p.frames = frames;
        p.spacing = spacing;
        return app::run_gen(p, out);
      },
      py::arg("kind"), py::arg("out"), py::arg("seed") = 1, py::arg("frames") = 8,
      py::arg("spacing") = 0.02, "Writes a synthetic scene; returns its manifest path.");

  m.def(
      "replay",
      [](const std::filesystem::path& manifest, const std::filesystem::path& out,
         const std::string& head, int rings, unsigned threads) {
        app::RunConfig cfg;
        cfg.head = head;
        cfg.pipeline.ring_order = rings;
        cfg.pipeline.threads = threads;
        cfg.out = out;
        const auto r = app::run_replay(manifest, cfg);
        py::list reports;
        for (const auto& rep : r.reports) reports.append(report_dict(rep));
        return reports;
      },
      py::arg("manifest"), py::arg("out"), py::arg("head") = "seed:0", py::arg("rings") = 2,
      py::arg("threads") = 1, "Replays a manifest; writes labels.csv and reports.jsonl.");
}
