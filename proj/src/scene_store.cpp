#include "fawcon/scene_store.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace fawcon {

namespace {

void check_finite(std::span<const float> values, const char* what) {
  for (float v : values) {
    if (!std::isfinite(v)) throw DomainError(std::string(what) + " contains a non-finite entry");
  }
}

}  // namespace

int PointRecord::predicted_label() const {
  if (label_distribution.empty()) return -1;
  // max_element returns the first maximum, which is the smaller class id.
  auto it = std::max_element(label_distribution.begin(), label_distribution.end());
  return static_cast<int>(it - label_distribution.begin());
}

SceneStore::SceneStore(SceneConfig config) : config_(config) {
  if (config_.input_dim == 0) throw DimensionError("input dimension must be positive");
  if (config_.class_count == 0) throw DimensionError("class count must be positive");
  if (config_.best_dim == 0) throw DimensionError("best-feature dimension must be positive");
}

void SceneStore::check_input_dim(std::span<const float> feature) const {
  if (feature.size() != config_.input_dim) {
    throw DimensionError("input feature has dimension " + std::to_string(feature.size()) +
                         ", expected " + std::to_string(config_.input_dim));
  }
}

PointId SceneStore::allocate_point(const Vec3& position, std::span<const float> feature) {
  check_input_dim(feature);
  if (!is_finite(position)) throw DomainError("point position must be finite");
  check_finite(feature, "input feature");

  PointRecord record;
  record.position = position;
  record.fused.assign(feature.begin(), feature.end());
  record.observation_count = 1;
  records_.push_back(std::move(record));
  return point_id(records_.size() - 1);
}

const Feature& SceneStore::merge_observation(PointId p, std::span<const float> feature) {
  PointRecord& record = mutable_at(p);
  check_input_dim(feature);
  check_finite(feature, "input feature");
  for (std::size_t i = 0; i < feature.size(); ++i) {
    record.fused[i] = std::max(record.fused[i], feature[i]);
  }
  ++record.observation_count;
  return record.fused;
}

bool SceneStore::record_best(PointId p, std::span<const float> feature, double uncertainty) {
  if (!(uncertainty >= 0.0 && uncertainty <= 1.0)) {
    throw DomainError("uncertainty " + std::to_string(uncertainty) + " outside [0, 1]");
  }
  if (feature.size() != config_.best_dim) {
    throw DimensionError("best feature has dimension " + std::to_string(feature.size()) +
                         ", expected " + std::to_string(config_.best_dim));
  }
  PointRecord& record = mutable_at(p);
  // Ties keep the older record.
  if (record.best_uncertainty && !(uncertainty < *record.best_uncertainty)) return false;
  record.best_feature = Feature(feature.begin(), feature.end());
  record.best_uncertainty = uncertainty;
  return true;
}

void SceneStore::set_label_distribution(PointId p, std::vector<double> distribution) {
  if (distribution.size() != config_.class_count) {
    throw DimensionError("label distribution has " + std::to_string(distribution.size()) +
                         " entries, expected " + std::to_string(config_.class_count));
  }
  double sum = 0.0;
  for (double v : distribution) {
    if (!(v >= 0.0)) throw DomainError("label distribution entries must be non-negative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-6) throw DomainError("label distribution must sum to 1");
  mutable_at(p).label_distribution = std::move(distribution);
}

void SceneStore::touch(PointId p, std::int64_t frame) { mutable_at(p).last_frame = frame; }

const PointRecord& SceneStore::at(PointId p) const {
  if (!contains(p)) throw NotFoundError("unknown point id " + std::to_string(index_of(p)));
  return records_[index_of(p)];
}

PointRecord& SceneStore::mutable_at(PointId p) {
  if (!contains(p)) throw NotFoundError("unknown point id " + std::to_string(index_of(p)));
  return records_[index_of(p)];
}

}  // namespace fawcon
