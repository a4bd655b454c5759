#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Unit conventions, used everywhere: bandwidth in megabits/second, sizes in
// bytes, time in milliseconds. 1 mbps sustained for 1 ms moves 125 bytes.
namespace hyperion {

inline double transmission_latency_ms(double size_bytes, double bandwidth_mbps) {
  return size_bytes * 8.0 / (bandwidth_mbps * 1000.0);
}

constexpr double kBytesPerMbpsMs = 125.0;

/// Per-frame geometry and bookkeeping. Coordinates are reals in full-frame
/// pixel space, never normalized.
struct FrameMeta {
  std::int64_t frame_id = 0;
  int grid_rows = 0;
  int grid_cols = 0;
  int patch_size_px = 0;
  std::int64_t original_size_bytes = 0;
  double capture_timestamp_ms = 0.0;

  FrameMeta(std::int64_t frame_id, int grid_rows, int grid_cols, int patch_size_px,
            std::int64_t original_size_bytes, double capture_timestamp_ms);

  int patch_count() const { return grid_rows * grid_cols; }
  double frame_width_px() const { return static_cast<double>(grid_cols) * patch_size_px; }
  double frame_height_px() const { return static_cast<double>(grid_rows) * patch_size_px; }
};

enum class DetectionSource { edge, cloud, fused, ground_truth };

std::string to_string(DetectionSource source);
DetectionSource detection_source_from_string(const std::string& name);

/// Axis-aligned box with confidence. (x1,y1) top-left, (x2,y2) bottom-right.
struct Detection {
  double x1, y1, x2, y2;
  double conf;
  DetectionSource source;

  Detection(double x1, double y1, double x2, double y2, double conf, DetectionSource source);

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
};

/// Intersection over union. Zero-area unions return 0 by convention.
double iou(const Detection& a, const Detection& b);

/// Dense per-frame attention values indexed (layer, head, from_patch,
/// to_patch). Each (layer, head, from_patch) row is a softmax distribution
/// over to_patch and must sum to 1 within 1e-6.
struct AttentionTensor {
  int layers = 0;
  int heads = 0;
  int n = 0;
  std::vector<float> values;  // row-major (layer, head, from, to)

  AttentionTensor(int layers, int heads, int n, std::vector<float> values);

  float at(int layer, int head, int from, int to) const {
    return values[((static_cast<std::size_t>(layer) * heads + head) * n + from) * n + to];
  }
};

/// Per-patch importance scores and class labels in {0..k-1}, higher class =
/// higher score range. Proportions are recomputed from the labels at
/// construction so they always equal count_c / n exactly.
struct PatchClassification {
  std::vector<double> scores;
  std::vector<int> classes;
  int k = 0;
  int effective_k = 0;  // < k when the data had fewer distinct values than k
  std::vector<double> proportions;

  PatchClassification(std::vector<double> scores, std::vector<int> classes, int k,
                      int effective_k = -1);
};

/// The quality levels transmission may choose from, strictly increasing.
struct QualityPalette {
  std::vector<int> levels;

  QualityPalette() : QualityPalette(std::vector<int>{15, 30, 45, 60, 75}) {}
  explicit QualityPalette(std::vector<int> levels);

  int min_level() const { return levels.front(); }
  int max_level() const { return levels.back(); }
  bool contains(int q) const;
};

/// One quality per class. feasible == false means no plan met the latency
/// budget and the frame falls back to device-only results.
struct QualityPlan {
  std::vector<int> per_class_quality;
  bool feasible = false;

  QualityPlan() = default;
  explicit QualityPlan(std::vector<int> qualities)
      : per_class_quality(std::move(qualities)), feasible(true) {}

  bool operator==(const QualityPlan& other) const = default;
};

/// Throws unless every entry of a feasible plan is a palette member.
void validate_plan(const QualityPlan& plan, const QualityPalette& palette);

}  // namespace hyperion
