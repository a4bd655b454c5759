#include "hyperion/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hyperion/ensembler.hpp"
#include "hyperion/log.hpp"
#include "hyperion/rng.hpp"
#include "hyperion/scheduler.hpp"

namespace hyperion {

namespace {

constexpr std::uint64_t kStreamJenks = 0x4a454e4b53ull;
constexpr std::uint64_t kStreamSize = 0x53495a45ull;
constexpr std::uint64_t kStreamDegrade = 0x44454752ull;

}  // namespace

void SimConfig::validate() const {
  if (latency_budget_ms <= 0.0) throw std::invalid_argument("SimConfig: latency budget must be > 0");
  if (device_latency_ms < 0.0 || cloud_latency_ms < 0.0 || scheduling_overhead_ms < 0.0 ||
      return_latency_ms < 0.0) {
    throw std::invalid_argument("SimConfig: latencies must be >= 0");
  }
  if (bandwidth_window < 1) throw std::invalid_argument("SimConfig: bandwidth_window must be >= 1");
  if (!(bootstrap_bandwidth_mbps > 0.0)) {
    throw std::invalid_argument("SimConfig: bootstrap bandwidth must be > 0");
  }
  if (dp_scale < 1) throw std::invalid_argument("SimConfig: dp_scale must be >= 1");
  scorer.validate();
  if (!(match_iou_threshold > 0.0 && match_iou_threshold <= 1.0) ||
      !(nms_iou_threshold > 0.0 && nms_iou_threshold <= 1.0)) {
    throw std::invalid_argument("SimConfig: IoU thresholds must lie in (0, 1]");
  }
  if (degrade_coeffs.delta < 0.0) throw std::invalid_argument("SimConfig: delta must be >= 0");
  if (size_truth.sigma < 0.0) throw std::invalid_argument("SimConfig: size sigma must be >= 0");
}

double sample_trace(const std::vector<TracePoint>& trace, double t_ms) {
  if (trace.empty()) throw std::runtime_error("sample_trace: trace is empty");
  if (t_ms < trace.front().timestamp_ms) {
    throw std::runtime_error("sample_trace: no trace point at or before t=" + std::to_string(t_ms));
  }
  if (t_ms > trace.back().timestamp_ms) {
    throw std::runtime_error("sample_trace: trace exhausted at t=" + std::to_string(t_ms));
  }
  auto it = std::upper_bound(trace.begin(), trace.end(), t_ms,
                             [](double t, const TracePoint& p) { return t < p.timestamp_ms; });
  return std::prev(it)->bandwidth_mbps;
}

namespace {

// Modal class (by patch count) among grid patches overlapping the box;
// ties go to the higher class. Boxes overlapping no patch map to class 0.
int dominant_class(const Detection& det, const PatchClassification& classes,
                   const FrameMeta& meta) {
  double p = static_cast<double>(meta.patch_size_px);
  double x1 = std::clamp(det.x1, 0.0, meta.frame_width_px());
  double y1 = std::clamp(det.y1, 0.0, meta.frame_height_px());
  double x2 = std::clamp(det.x2, 0.0, meta.frame_width_px());
  double y2 = std::clamp(det.y2, 0.0, meta.frame_height_px());
  if (!(x2 > x1) || !(y2 > y1)) return 0;

  int col0 = std::clamp(static_cast<int>(std::floor(x1 / p)), 0, meta.grid_cols - 1);
  int col1 = std::clamp(static_cast<int>(std::ceil(x2 / p)) - 1, 0, meta.grid_cols - 1);
  int row0 = std::clamp(static_cast<int>(std::floor(y1 / p)), 0, meta.grid_rows - 1);
  int row1 = std::clamp(static_cast<int>(std::ceil(y2 / p)) - 1, 0, meta.grid_rows - 1);

  std::vector<int> counts(static_cast<std::size_t>(classes.k), 0);
  for (int r = row0; r <= row1; ++r) {
    for (int c = col0; c <= col1; ++c) {
      int patch = r * meta.grid_cols + c;
      counts[static_cast<std::size_t>(classes.classes[static_cast<std::size_t>(patch)])] += 1;
    }
  }
  int best = 0;
  for (int c = 1; c < classes.k; ++c) {
    if (counts[static_cast<std::size_t>(c)] >= counts[static_cast<std::size_t>(best)]) best = c;
  }
  return best;
}

}  // namespace

std::vector<Detection> degrade(const std::vector<Detection>& reference, const QualityPlan& plan,
                               const PatchClassification& classes, const FrameMeta& meta,
                               const QualityPalette& palette, const DegradeCoefficients& coeffs,
                               std::uint64_t seed) {
  if (!plan.feasible) throw std::invalid_argument("degrade: plan must be feasible");
  Rng rng(seed);
  double q_max = static_cast<double>(palette.max_level());
  std::vector<Detection> survivors;
  for (const Detection& det : reference) {
    int cls = dominant_class(det, classes, meta);
    double q = static_cast<double>(plan.per_class_quality[static_cast<std::size_t>(cls)]);
    double r = q / q_max;
    double p_survive = std::clamp(coeffs.p_base + coeffs.gamma * r, 0.0, 1.0);
    if (!(rng.uniform01() < p_survive)) continue;

    double diag = std::sqrt(det.width() * det.width() + det.height() * det.height());
    double magnitude = coeffs.delta * (1.0 - r) * diag;
    double x1 = det.x1 + rng.uniform(-magnitude, magnitude);
    double y1 = det.y1 + rng.uniform(-magnitude, magnitude);
    double x2 = det.x2 + rng.uniform(-magnitude, magnitude);
    double y2 = det.y2 + rng.uniform(-magnitude, magnitude);
    if (x1 > x2) std::swap(x1, x2);
    if (y1 > y2) std::swap(y1, y2);
    x1 = std::clamp(x1, 0.0, meta.frame_width_px());
    x2 = std::clamp(x2, 0.0, meta.frame_width_px());
    y1 = std::clamp(y1, 0.0, meta.frame_height_px());
    y2 = std::clamp(y2, 0.0, meta.frame_height_px());
    survivors.emplace_back(x1, y1, x2, y2, det.conf, det.source);
  }
  return survivors;
}

std::vector<FrameOutcome> run(const std::vector<FrameRecord>& frames,
                              const std::vector<TracePoint>& trace, const SimConfig& cfg,
                              const ProfilerModel& model) {
  cfg.validate();
  if (model.betas.size() != static_cast<std::size_t>(cfg.scorer.k)) {
    throw std::invalid_argument("run: model class count does not match scorer k");
  }

  BandwidthEstimator estimator(cfg.bandwidth_window);
  std::vector<FrameOutcome> outcomes;
  outcomes.reserve(frames.size());
  bool first = true;
  std::int64_t prev_id = 0;

  for (const FrameRecord& frame : frames) {
    const FrameMeta& meta = frame.meta;
    if (!first && meta.frame_id <= prev_id) {
      throw std::invalid_argument("run: frame_id must strictly increase (frame " +
                                  std::to_string(meta.frame_id) + ")");
    }
    first = false;
    prev_id = meta.frame_id;

    std::vector<double> scores;
    if (std::holds_alternative<AttentionTensor>(frame.attention)) {
      const auto& tensor = std::get<AttentionTensor>(frame.attention);
      if (tensor.n != meta.patch_count()) {
        throw std::invalid_argument("run: attention tensor n does not match frame grid");
      }
      scores = aggregate_importance(tensor);
    } else {
      scores = std::get<std::vector<double>>(frame.attention);
      if (scores.size() != static_cast<std::size_t>(meta.patch_count())) {
        throw std::invalid_argument("run: score vector length does not match frame grid");
      }
    }

    std::uint64_t frame_seed = mix_seed(cfg.rng_seed, static_cast<std::uint64_t>(meta.frame_id));
    std::uint64_t jenks_seed =
        mix_seed(mix_seed(frame_seed, cfg.scorer.rng_seed), kStreamJenks);
    JenksResult jenks =
        jenks_classify(scores, cfg.scorer.k, cfg.scorer.jenks_sample_size, jenks_seed);
    PatchClassification classes =
        refine_classes(jenks.classification, frame.edge_detections, meta, cfg.scorer, jenks.breaks);

    double predicted_bw = estimator.estimate().value_or(cfg.bootstrap_bandwidth_mbps);

    ScheduleContext ctx;
    ctx.latency_budget_ms = cfg.latency_budget_ms;
    // Scheduling overhead counts against the device side of the budget, the
    // result return path against the cloud side.
    ctx.device_latency_ms = cfg.device_latency_ms + cfg.scheduling_overhead_ms;
    ctx.cloud_latency_ms = cfg.cloud_latency_ms + cfg.return_latency_ms;
    ctx.bandwidth_mbps = predicted_bw;
    ctx.original_size_bytes = static_cast<double>(meta.original_size_bytes);
    ctx.proportions = classes.proportions;
    ctx.palette = cfg.palette;
    ctx.model = model;
    ctx.dp_scale = cfg.dp_scale;

    QualityPlan plan = cfg.force_device_only ? QualityPlan{} : schedule(ctx);

    double send_time_ms =
        meta.capture_timestamp_ms + cfg.device_latency_ms + cfg.scheduling_overhead_ms;
    double actual_bw = sample_trace(trace, send_time_ms);

    FrameOutcome outcome;
    outcome.frame_id = meta.frame_id;
    outcome.plan = plan;

    if (!plan.feasible) {
      outcome.detections = ensemble(frame.edge_detections, {}, cfg.match_iou_threshold,
                                    cfg.nms_iou_threshold);
      outcome.measured_latency_ms = cfg.device_latency_ms + cfg.scheduling_overhead_ms;
      outcome.offloaded_bytes = 0;
      outcome.used_fallback = true;
      log_debug("frame " + std::to_string(meta.frame_id) + ": device-only fallback");
    } else {
      double qbar = weighted_average_quality(classes.proportions, plan.per_class_quality);
      double ratio = cfg.size_truth.alpha * qbar + cfg.size_truth.alpha_s;
      if (cfg.size_truth.sigma > 0.0) {
        Rng size_rng(mix_seed(frame_seed, kStreamSize));
        ratio += size_rng.normal(0.0, cfg.size_truth.sigma);
      }
      double raw_bytes = std::clamp(ratio, 0.0, 1.0) * static_cast<double>(meta.original_size_bytes);
      std::int64_t actual_bytes = static_cast<std::int64_t>(std::floor(raw_bytes));

      double transmit_ms = transmission_latency_ms(static_cast<double>(actual_bytes), actual_bw);
      outcome.measured_latency_ms = cfg.device_latency_ms + cfg.scheduling_overhead_ms +
                                    transmit_ms + cfg.cloud_latency_ms + cfg.return_latency_ms;
      outcome.offloaded_bytes = actual_bytes;

      std::vector<Detection> cloud_dets =
          degrade(frame.cloud_reference, plan, classes, meta, cfg.palette, cfg.degrade_coeffs,
                  mix_seed(frame_seed, kStreamDegrade));
      outcome.detections = ensemble(frame.edge_detections, cloud_dets, cfg.match_iou_threshold,
                                    cfg.nms_iou_threshold);
    }

    // The channel rate at send time is observable every frame (heartbeat
    // probing); without it a long fallback streak could never recover.
    estimator.observe(actual_bw);
    outcomes.push_back(std::move(outcome));
  }
  return outcomes;
}

}  // namespace hyperion
