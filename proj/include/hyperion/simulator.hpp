#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "hyperion/core.hpp"
#include "hyperion/evaluator.hpp"
#include "hyperion/profiler.hpp"
#include "hyperion/scorer.hpp"

namespace hyperion {

/// One input frame: geometry, either a dense attention tensor or a
/// precomputed importance-score vector, and the three detection lists.
struct FrameRecord {
  FrameMeta meta;
  std::variant<AttentionTensor, std::vector<double>> attention;
  std::vector<Detection> edge_detections;
  std::vector<Detection> ground_truth;
  std::vector<Detection> cloud_reference;  // cloud model output at full quality
};

struct TracePoint {
  double timestamp_ms = 0.0;
  double bandwidth_mbps = 0.0;
};

/// Cloud fidelity stand-in: each reference detection survives with
/// probability p_base + gamma * q/q_max and surviving corners jitter by
/// delta * (1 - q/q_max) * box diagonal, where q is the plan quality of the
/// detection's dominant patch class.
struct DegradeCoefficients {
  double p_base = 0.3;
  double gamma = 0.7;
  double delta = 0.05;
};

/// True linear size model of a scenario; the simulator draws actual
/// transmitted sizes from it, independently of the fitted profiler.
struct SizeTruth {
  double alpha = 0.01;
  double alpha_s = 0.05;
  double sigma = 0.0;
};

struct SimConfig {
  double latency_budget_ms = 400.0;
  double device_latency_ms = 150.0;
  double cloud_latency_ms = 100.0;
  double scheduling_overhead_ms = 2.5;
  double return_latency_ms = 0.0;
  std::size_t bandwidth_window = 5;
  double bootstrap_bandwidth_mbps = 50.0;
  std::int64_t dp_scale = 1000;
  ScorerConfig scorer;
  double match_iou_threshold = 0.5;
  double nms_iou_threshold = 0.25;
  DegradeCoefficients degrade_coeffs;
  SizeTruth size_truth;
  QualityPalette palette;
  std::uint64_t rng_seed = 42;
  bool force_device_only = false;

  void validate() const;
};

/// Bandwidth at time t: most recent trace point at or before t (last
/// observation carried forward). Throws when t falls outside the trace.
double sample_trace(const std::vector<TracePoint>& trace, double t_ms);

std::vector<Detection> degrade(const std::vector<Detection>& reference, const QualityPlan& plan,
                               const PatchClassification& classes, const FrameMeta& meta,
                               const QualityPalette& palette, const DegradeCoefficients& coeffs,
                               std::uint64_t seed);

/// Runs the per-frame pipeline over a trace: score, classify, refine,
/// schedule against the harmonic bandwidth estimate, simulate transmission
/// and cloud inference, ensemble, record. The scheduler only ever sees
/// window history and profiler predictions, never the current frame's trace
/// bandwidth or actual compressed size.
std::vector<FrameOutcome> run(const std::vector<FrameRecord>& frames,
                              const std::vector<TracePoint>& trace, const SimConfig& cfg,
                              const ProfilerModel& model);

}  // namespace hyperion
