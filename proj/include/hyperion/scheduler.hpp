#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "hyperion/core.hpp"
#include "hyperion/profiler.hpp"

namespace hyperion {

/// Sliding-window harmonic-mean throughput predictor. The window only ever
/// holds positive samples; an empty window yields no estimate and callers
/// must bootstrap from configuration.
class BandwidthEstimator {
 public:
  explicit BandwidthEstimator(std::size_t window_capacity);

  /// Pushes one observed throughput sample (mbps), evicting the oldest
  /// beyond capacity. Throws on non-positive or non-finite samples.
  void observe(double sample_mbps);

  std::optional<double> estimate() const;
  std::size_t sample_count() const { return window_.size(); }

 private:
  std::deque<double> window_;
  std::size_t capacity_;
};

/// Everything one schedule() call needs: the latency budget split, the
/// predicted bandwidth, frame size, class proportions, the quality palette
/// and the fitted profiler model.
struct ScheduleContext {
  double latency_budget_ms = 400.0;
  double device_latency_ms = 150.0;
  double cloud_latency_ms = 100.0;
  double bandwidth_mbps = 0.0;
  double original_size_bytes = 0.0;
  std::vector<double> proportions;
  QualityPalette palette;
  ProfilerModel model;
  std::int64_t dp_scale = 1000;

  void validate() const;
};

/// The DP size budget in scaled quality-mass units:
/// floor(dp_scale * (B * (L - L_d - L_c) / S_O - alpha_s)) with bandwidth
/// converted to bytes/ms. nullopt when no transmission time remains.
/// Requires alpha > 0.
std::optional<std::int64_t> max_frame_size(const ScheduleContext& ctx);

/// Modeled end-to-end latency of a plan under the context's predicted
/// bandwidth, using the unclamped linear size model.
double predicted_latency_ms(const ScheduleContext& ctx, const QualityPlan& plan);

/// Exactly optimal multiple-choice knapsack over |Q|^K quality assignments:
/// maximizes sum_c betas[c] * q_c + beta_a subject to the latency budget.
/// Ties break by smaller total scaled size, then lexicographically smaller
/// quality vector. Returns feasible == false when nothing fits.
QualityPlan schedule(const ScheduleContext& ctx);

}  // namespace hyperion
