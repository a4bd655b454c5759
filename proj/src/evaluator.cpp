#include "hyperion/evaluator.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace hyperion {

double ap50(const std::vector<std::vector<Detection>>& predictions,
            const std::vector<std::vector<Detection>>& ground_truth) {
  if (predictions.size() != ground_truth.size()) {
    throw std::invalid_argument("ap50: prediction and ground-truth frame counts differ");
  }
  std::size_t total_gt = 0;
  for (const auto& g : ground_truth) total_gt += g.size();
  if (total_gt == 0) {
    throw std::invalid_argument("ap50: undefined, ground truth is empty overall");
  }

  struct Ranked {
    double conf;
    std::size_t frame;
    std::size_t index;
  };
  std::vector<Ranked> ranked;
  for (std::size_t f = 0; f < predictions.size(); ++f) {
    for (std::size_t i = 0; i < predictions[f].size(); ++i) {
      ranked.push_back({predictions[f][i].conf, f, i});
    }
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    return std::tie(b.conf, a.frame, a.index) < std::tie(a.conf, b.frame, b.index);
  });

  std::vector<std::vector<bool>> gt_used(ground_truth.size());
  for (std::size_t f = 0; f < ground_truth.size(); ++f) {
    gt_used[f].assign(ground_truth[f].size(), false);
  }

  std::size_t tp = 0;
  std::vector<double> precision(ranked.size()), recall(ranked.size());
  std::vector<bool> is_tp(ranked.size(), false);
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    const Ranked& entry = ranked[r];
    const Detection& pred = predictions[entry.frame][entry.index];
    double best_iou = 0.0;
    std::size_t best_gt = 0;
    bool matched = false;
    for (std::size_t g = 0; g < ground_truth[entry.frame].size(); ++g) {
      if (gt_used[entry.frame][g]) continue;
      double overlap = iou(pred, ground_truth[entry.frame][g]);
      if (overlap >= 0.5 && (!matched || overlap > best_iou)) {
        matched = true;
        best_iou = overlap;
        best_gt = g;
      }
    }
    if (matched) {
      gt_used[entry.frame][best_gt] = true;
      is_tp[r] = true;
      ++tp;
    }
    precision[r] = static_cast<double>(tp) / static_cast<double>(r + 1);
    recall[r] = static_cast<double>(tp) / static_cast<double>(total_gt);
  }

  // All-points interpolation: precision envelope from the right, integrated
  // over recall steps.
  double envelope = 0.0;
  std::vector<double> interp(ranked.size());
  for (std::size_t r = ranked.size(); r-- > 0;) {
    envelope = std::max(envelope, precision[r]);
    interp[r] = envelope;
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    if (!is_tp[r]) continue;
    ap += (recall[r] - prev_recall) * interp[r];
    prev_recall = recall[r];
  }
  return ap;
}

double latency_deviation_rate(double measured_ms, double required_ms) {
  if (!(required_ms > 0.0)) {
    throw std::invalid_argument("latency_deviation_rate: required latency must be > 0");
  }
  return std::max(0.0, (measured_ms - required_ms) / required_ms);
}

std::vector<FrameOutcome> substitute_stale(std::vector<FrameOutcome> outcomes,
                                           double required_latency_ms) {
  std::vector<Detection> last_valid;
  bool has_valid = false;
  for (FrameOutcome& outcome : outcomes) {
    if (outcome.measured_latency_ms > required_latency_ms) {
      outcome.detections = has_valid ? last_valid : std::vector<Detection>{};
      outcome.used_stale = true;
    } else {
      outcome.used_stale = false;
      last_valid = outcome.detections;
      has_valid = true;
    }
  }
  return outcomes;
}

Summary summarize(const std::vector<FrameOutcome>& outcomes,
                  const std::vector<std::vector<Detection>>& ground_truth,
                  double required_latency_ms) {
  if (outcomes.empty()) throw std::invalid_argument("summarize: no outcomes");
  if (outcomes.size() != ground_truth.size()) {
    throw std::invalid_argument("summarize: outcome and ground-truth frame counts differ");
  }
  std::vector<FrameOutcome> substituted = substitute_stale(outcomes, required_latency_ms);

  Summary s;
  double n = static_cast<double>(outcomes.size());
  std::int64_t total_bytes = 0;
  std::size_t fallbacks = 0;
  for (const FrameOutcome& o : substituted) {
    s.mean_latency_ms += o.measured_latency_ms;
    s.mean_deviation += latency_deviation_rate(o.measured_latency_ms, required_latency_ms);
    total_bytes += o.offloaded_bytes;
    if (o.used_fallback) ++fallbacks;
  }
  s.mean_latency_ms /= n;
  s.mean_deviation /= n;
  s.mean_fps = 1000.0 / s.mean_latency_ms;
  s.total_offload_mb = static_cast<double>(total_bytes) / 1e6;
  s.fallback_ratio = static_cast<double>(fallbacks) / n;

  std::vector<std::vector<Detection>> predictions;
  predictions.reserve(substituted.size());
  for (const FrameOutcome& o : substituted) predictions.push_back(o.detections);
  s.ap50 = ap50(predictions, ground_truth);
  return s;
}

}  // namespace hyperion
