#pragma once

#include <cstdint>
#include <vector>

#include "hyperion/core.hpp"

namespace hyperion {

/// Everything the simulator records about one processed frame.
struct FrameOutcome {
  std::int64_t frame_id = 0;
  std::vector<Detection> detections;
  double measured_latency_ms = 0.0;
  std::int64_t offloaded_bytes = 0;
  bool used_fallback = false;
  bool used_stale = false;
  QualityPlan plan;
};

/// Single-class average precision at IoU 0.5: predictions ranked by
/// confidence across frames, greedily matched to unused ground-truth boxes
/// (highest IoU first), area under the precision-recall curve with
/// all-points interpolation. Frames align by index. Throws when the ground
/// truth is empty overall.
double ap50(const std::vector<std::vector<Detection>>& predictions,
            const std::vector<std::vector<Detection>>& ground_truth);

/// max(0, (measured - required) / required).
double latency_deviation_rate(double measured_ms, double required_ms);

/// Replaces every latency-violating frame's detections with the most recent
/// non-violating frame's detections (empty for a violating first frame) and
/// sets used_stale. Idempotent.
std::vector<FrameOutcome> substitute_stale(std::vector<FrameOutcome> outcomes,
                                           double required_latency_ms);

struct Summary {
  double ap50 = 0.0;
  double mean_fps = 0.0;
  double mean_latency_ms = 0.0;
  double total_offload_mb = 0.0;
  double mean_deviation = 0.0;
  double fallback_ratio = 0.0;
};

/// Aggregates the run metrics. AP is computed after stale-result
/// substitution, matching how violating frames are scored.
Summary summarize(const std::vector<FrameOutcome>& outcomes,
                  const std::vector<std::vector<Detection>>& ground_truth,
                  double required_latency_ms);

}  // namespace hyperion
