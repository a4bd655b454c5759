#include "hyperion/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hyperion {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

FrameMeta::FrameMeta(std::int64_t frame_id, int grid_rows, int grid_cols, int patch_size_px,
                     std::int64_t original_size_bytes, double capture_timestamp_ms)
    : frame_id(frame_id),
      grid_rows(grid_rows),
      grid_cols(grid_cols),
      patch_size_px(patch_size_px),
      original_size_bytes(original_size_bytes),
      capture_timestamp_ms(capture_timestamp_ms) {
  require(grid_rows >= 1 && grid_cols >= 1, "FrameMeta: grid dimensions must be >= 1");
  require(patch_size_px >= 1, "FrameMeta: patch_size_px must be >= 1");
  require(original_size_bytes > 0, "FrameMeta: original_size_bytes must be > 0");
  require(std::isfinite(capture_timestamp_ms), "FrameMeta: capture_timestamp_ms must be finite");
}

std::string to_string(DetectionSource source) {
  switch (source) {
    case DetectionSource::edge: return "edge";
    case DetectionSource::cloud: return "cloud";
    case DetectionSource::fused: return "fused";
    case DetectionSource::ground_truth: return "ground_truth";
  }
  return "unknown";
}

DetectionSource detection_source_from_string(const std::string& name) {
  if (name == "edge") return DetectionSource::edge;
  if (name == "cloud") return DetectionSource::cloud;
  if (name == "fused") return DetectionSource::fused;
  if (name == "ground_truth") return DetectionSource::ground_truth;
  throw std::invalid_argument("unknown detection source: " + name);
}

Detection::Detection(double x1, double y1, double x2, double y2, double conf,
                     DetectionSource source)
    : x1(x1), y1(y1), x2(x2), y2(y2), conf(conf), source(source) {
  require(std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) && std::isfinite(y2),
          "Detection: coordinates must be finite");
  require(x1 <= x2 && y1 <= y2, "Detection: requires x1 <= x2 and y1 <= y2");
  require(conf >= 0.0 && conf <= 1.0, "Detection: conf must lie in [0, 1]");
}

double iou(const Detection& a, const Detection& b) {
  double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  double inter = std::max(0.0, iw) * std::max(0.0, ih);
  double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

AttentionTensor::AttentionTensor(int layers, int heads, int n, std::vector<float> values)
    : layers(layers), heads(heads), n(n), values(std::move(values)) {
  require(layers >= 1 && heads >= 1 && n >= 1, "AttentionTensor: layers, heads, n must be >= 1");
  std::size_t expected = static_cast<std::size_t>(layers) * heads * n * static_cast<std::size_t>(n);
  require(this->values.size() == expected,
          "AttentionTensor: value count does not match layers*heads*n*n");
  for (int l = 0; l < layers; ++l) {
    for (int h = 0; h < heads; ++h) {
      for (int from = 0; from < n; ++from) {
        double row_sum = 0.0;
        for (int to = 0; to < n; ++to) {
          float v = at(l, h, from, to);
          require(v >= 0.0f, "AttentionTensor: values must be non-negative");
          row_sum += v;
        }
        require(std::abs(row_sum - 1.0) <= 1e-6,
                "AttentionTensor: softmax row does not sum to 1 within 1e-6");
      }
    }
  }
}

PatchClassification::PatchClassification(std::vector<double> scores_in, std::vector<int> classes_in,
                                         int k_in, int effective_k_in)
    : scores(std::move(scores_in)), classes(std::move(classes_in)), k(k_in),
      effective_k(effective_k_in < 0 ? k_in : effective_k_in) {
  require(k >= 1, "PatchClassification: k must be >= 1");
  require(effective_k >= 1 && effective_k <= k, "PatchClassification: effective_k must be in [1, k]");
  require(!scores.empty(), "PatchClassification: scores must be non-empty");
  require(scores.size() == classes.size(),
          "PatchClassification: scores and classes must have equal length");
  proportions.assign(static_cast<std::size_t>(k), 0.0);
  for (int c : classes) {
    require(c >= 0 && c < k, "PatchClassification: class label out of range");
    proportions[static_cast<std::size_t>(c)] += 1.0;
  }
  double n = static_cast<double>(classes.size());
  for (double& p : proportions) p /= n;
}

QualityPalette::QualityPalette(std::vector<int> levels_in) : levels(std::move(levels_in)) {
  require(!levels.empty(), "QualityPalette: must be non-empty");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    require(levels[i] > 0, "QualityPalette: levels must be positive");
    if (i > 0) require(levels[i] > levels[i - 1], "QualityPalette: levels must strictly increase");
  }
}

bool QualityPalette::contains(int q) const {
  return std::binary_search(levels.begin(), levels.end(), q);
}

void validate_plan(const QualityPlan& plan, const QualityPalette& palette) {
  if (!plan.feasible) return;
  for (int q : plan.per_class_quality) {
    if (!palette.contains(q)) {
      throw std::invalid_argument("QualityPlan: quality " + std::to_string(q) +
                                  " is not a palette member");
    }
  }
}

}  // namespace hyperion
