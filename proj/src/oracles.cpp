#include "hyperion/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace hyperion::oracles {

namespace {

// Mirrors the scheduler's latency expression term for term: both sides must
// agree on razor-edge feasibility, so the arithmetic is written identically.
bool meets_latency(const ScheduleContext& ctx, double mass) {
  double transmit = (ctx.model.alpha * mass + ctx.model.alpha_s) * ctx.original_size_bytes * 8.0 /
                    (ctx.bandwidth_mbps * 1000.0);
  return transmit + ctx.device_latency_ms + ctx.cloud_latency_ms <= ctx.latency_budget_ms;
}

std::int64_t total_scaled_size(const ScheduleContext& ctx, const std::vector<int>& qualities) {
  std::int64_t total = 0;
  for (std::size_t c = 0; c < qualities.size(); ++c) {
    total += static_cast<std::int64_t>(std::floor(static_cast<double>(ctx.dp_scale) *
                                                  ctx.model.alpha * ctx.proportions[c] *
                                                  static_cast<double>(qualities[c])));
  }
  return total;
}

}  // namespace

double plan_objective(const ScheduleContext& ctx, const QualityPlan& plan) {
  double objective = ctx.model.beta_a;
  for (std::size_t c = 0; c < plan.per_class_quality.size(); ++c) {
    objective += ctx.model.betas[c] * static_cast<double>(plan.per_class_quality[c]);
  }
  return objective;
}

QualityPlan brute_force_schedule(const ScheduleContext& ctx) {
  ctx.validate();
  std::size_t k = ctx.proportions.size();
  if (ctx.latency_budget_ms - ctx.device_latency_ms - ctx.cloud_latency_ms <= 0.0) {
    return QualityPlan{};
  }
  if (!(ctx.bandwidth_mbps > 0.0)) return QualityPlan{};

  std::vector<int> current(k, 0);
  std::vector<int> best;
  double best_objective = -std::numeric_limits<double>::infinity();
  std::int64_t best_size = 0;

  // Odometer over palette indices, lexicographic in the quality vector.
  std::vector<std::size_t> idx(k, 0);
  while (true) {
    for (std::size_t c = 0; c < k; ++c) current[c] = ctx.palette.levels[idx[c]];
    double mass = 0.0;
    for (std::size_t c = 0; c < k; ++c) mass += ctx.proportions[c] * static_cast<double>(current[c]);
    if (meets_latency(ctx, mass)) {
      double objective = ctx.model.beta_a;
      for (std::size_t c = 0; c < k; ++c) {
        objective += ctx.model.betas[c] * static_cast<double>(current[c]);
      }
      std::int64_t size = total_scaled_size(ctx, current);
      bool improves = false;
      if (best.empty()) {
        improves = true;
      } else if (objective != best_objective) {
        improves = objective > best_objective;
      } else if (size != best_size) {
        improves = size < best_size;
      } else {
        improves = current < best;
      }
      if (improves) {
        best = current;
        best_objective = objective;
        best_size = size;
      }
    }
    std::size_t c = k;
    while (c > 0) {
      --c;
      if (++idx[c] < ctx.palette.levels.size()) break;
      idx[c] = 0;
      if (c == 0) {
        if (best.empty()) return QualityPlan{};
        return QualityPlan(best);
      }
    }
  }
}

double sdcm_of_assignment(const std::vector<double>& scores, const std::vector<int>& classes,
                          int k) {
  std::vector<double> sum(static_cast<std::size_t>(k), 0.0);
  std::vector<int> count(static_cast<std::size_t>(k), 0);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    sum[static_cast<std::size_t>(classes[i])] += scores[i];
    count[static_cast<std::size_t>(classes[i])] += 1;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    std::size_t c = static_cast<std::size_t>(classes[i]);
    double mean = sum[c] / static_cast<double>(count[c]);
    total += (scores[i] - mean) * (scores[i] - mean);
  }
  return total;
}

std::vector<int> assign_by_breaks(const std::vector<double>& scores,
                                  const std::vector<double>& breaks) {
  std::vector<int> classes(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    auto it = std::lower_bound(breaks.begin(), breaks.end(), scores[i]);
    classes[i] = static_cast<int>(it - breaks.begin());
  }
  return classes;
}

JenksOracleResult brute_force_jenks(const std::vector<double>& scores, int k) {
  if (scores.size() > 14) throw std::invalid_argument("brute_force_jenks: n must be <= 14");
  if (scores.empty()) throw std::invalid_argument("brute_force_jenks: scores must be non-empty");
  if (k < 1 || k > static_cast<int>(scores.size())) {
    throw std::invalid_argument("brute_force_jenks: k out of range");
  }
  std::vector<double> sorted = scores;
  std::sort(sorted.begin(), sorted.end());
  int n = static_cast<int>(sorted.size());

  auto sse = [&](int a, int b) {  // inclusive
    double mean = 0.0;
    for (int i = a; i <= b; ++i) mean += sorted[i];
    mean /= static_cast<double>(b - a + 1);
    double total = 0.0;
    for (int i = a; i <= b; ++i) total += (sorted[i] - mean) * (sorted[i] - mean);
    return total;
  };

  // cuts[c] is the first index of class c+1; k-1 strictly increasing cuts.
  std::vector<int> cuts(static_cast<std::size_t>(k - 1));
  for (int c = 0; c < k - 1; ++c) cuts[static_cast<std::size_t>(c)] = c + 1;
  JenksOracleResult best{{}, std::numeric_limits<double>::infinity()};

  auto evaluate = [&]() {
    double total = 0.0;
    int start = 0;
    for (int c = 0; c < k; ++c) {
      int end = (c == k - 1) ? n - 1 : cuts[static_cast<std::size_t>(c)] - 1;
      total += sse(start, end);
      start = end + 1;
    }
    if (total < best.sdcm) {
      best.sdcm = total;
      best.breaks.clear();
      for (int cut : cuts) best.breaks.push_back(sorted[cut - 1]);
    }
  };

  if (k == 1) {
    best.sdcm = sse(0, n - 1);
    return best;
  }
  while (true) {
    evaluate();
    int c = k - 2;
    while (c >= 0) {
      int limit = (c == k - 2) ? n - 1 : cuts[static_cast<std::size_t>(c + 1)] - 1;
      if (cuts[static_cast<std::size_t>(c)] < limit) {
        cuts[static_cast<std::size_t>(c)] += 1;
        for (int c2 = c + 1; c2 < k - 1; ++c2) {
          cuts[static_cast<std::size_t>(c2)] = cuts[static_cast<std::size_t>(c2 - 1)] + 1;
        }
        break;
      }
      --c;
    }
    if (c < 0) break;
  }
  return best;
}

double naive_ap50(const std::vector<std::vector<Detection>>& predictions,
                  const std::vector<std::vector<Detection>>& ground_truth) {
  if (predictions.size() != ground_truth.size()) {
    throw std::invalid_argument("naive_ap50: frame count mismatch");
  }
  std::size_t total_gt = 0;
  for (const auto& g : ground_truth) total_gt += g.size();
  if (total_gt == 0) throw std::invalid_argument("naive_ap50: no ground truth boxes");

  struct Entry {
    double conf;
    std::size_t frame;
    std::size_t index;
  };
  std::vector<Entry> entries;
  for (std::size_t f = 0; f < predictions.size(); ++f) {
    for (std::size_t i = 0; i < predictions[f].size(); ++i) {
      entries.push_back({predictions[f][i].conf, f, i});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::tie(b.conf, a.frame, a.index) < std::tie(a.conf, b.frame, b.index);
  });

  std::vector<std::vector<bool>> used(ground_truth.size());
  for (std::size_t f = 0; f < ground_truth.size(); ++f) used[f].assign(ground_truth[f].size(), false);

  double ap = 0.0;
  double prev_recall = 0.0;
  std::size_t tp = 0;
  std::vector<double> precision(entries.size()), recall(entries.size());
  std::vector<bool> is_tp(entries.size(), false);
  for (std::size_t r = 0; r < entries.size(); ++r) {
    const Entry& e = entries[r];
    double best_iou = 0.0;
    std::size_t best_gt = 0;
    bool found = false;
    for (std::size_t g = 0; g < ground_truth[e.frame].size(); ++g) {
      if (used[e.frame][g]) continue;
      double overlap = iou(predictions[e.frame][e.index], ground_truth[e.frame][g]);
      if (overlap >= 0.5 && (!found || overlap > best_iou)) {
        found = true;
        best_iou = overlap;
        best_gt = g;
      }
    }
    if (found) {
      used[e.frame][best_gt] = true;
      is_tp[r] = true;
      ++tp;
    }
    precision[r] = static_cast<double>(tp) / static_cast<double>(r + 1);
    recall[r] = static_cast<double>(tp) / static_cast<double>(total_gt);
  }
  // All-points interpolation: integrate max precision to the right.
  double running_max = 0.0;
  std::vector<double> interp(entries.size());
  for (std::size_t r = entries.size(); r-- > 0;) {
    running_max = std::max(running_max, precision[r]);
    interp[r] = running_max;
  }
  for (std::size_t r = 0; r < entries.size(); ++r) {
    if (!is_tp[r]) continue;
    ap += (recall[r] - prev_recall) * interp[r];
    prev_recall = recall[r];
  }
  return ap;
}

}  // namespace hyperion::oracles
