#include "hyperion/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hyperion {

BandwidthEstimator::BandwidthEstimator(std::size_t window_capacity) : capacity_(window_capacity) {
  if (capacity_ < 1) throw std::invalid_argument("BandwidthEstimator: capacity must be >= 1");
}

void BandwidthEstimator::observe(double sample_mbps) {
  if (!(sample_mbps > 0.0) || !std::isfinite(sample_mbps)) {
    throw std::invalid_argument("BandwidthEstimator: sample must be positive and finite");
  }
  window_.push_back(sample_mbps);
  if (window_.size() > capacity_) window_.pop_front();
}

std::optional<double> BandwidthEstimator::estimate() const {
  if (window_.empty()) return std::nullopt;
  double reciprocal_sum = 0.0;
  for (double s : window_) reciprocal_sum += 1.0 / s;
  return static_cast<double>(window_.size()) / reciprocal_sum;
}

void ScheduleContext::validate() const {
  if (latency_budget_ms < 0.0 || device_latency_ms < 0.0 || cloud_latency_ms < 0.0) {
    throw std::invalid_argument("ScheduleContext: latencies must be >= 0");
  }
  if (dp_scale < 1) throw std::invalid_argument("ScheduleContext: dp_scale must be >= 1");
  if (!(original_size_bytes > 0.0)) {
    throw std::invalid_argument("ScheduleContext: original_size_bytes must be > 0");
  }
  if (proportions.empty() || proportions.size() != model.betas.size()) {
    throw std::invalid_argument("ScheduleContext: proportions must match model class count");
  }
  double sum = 0.0;
  for (double w : proportions) {
    if (w < 0.0) throw std::invalid_argument("ScheduleContext: proportions must be >= 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw std::invalid_argument("ScheduleContext: proportions must sum to 1");
  }
}

namespace {

// Latency-constraint check shared by every admission below. The oracle
// mirrors this expression term for term so both sides agree bit for bit.
bool meets_latency(const ScheduleContext& ctx, double mass) {
  double transmit = (ctx.model.alpha * mass + ctx.model.alpha_s) * ctx.original_size_bytes * 8.0 /
                    (ctx.bandwidth_mbps * 1000.0);
  return transmit + ctx.device_latency_ms + ctx.cloud_latency_ms <= ctx.latency_budget_ms;
}

std::int64_t scaled_item_cost(const ScheduleContext& ctx, std::size_t c, int q) {
  return static_cast<std::int64_t>(std::floor(static_cast<double>(ctx.dp_scale) *
                                              ctx.model.alpha * ctx.proportions[c] *
                                              static_cast<double>(q)));
}

struct Candidate {
  double objective;           // beta_a + accumulated beta_c * q_c
  double mass;                // accumulated w_c * q_c, class order
  std::int64_t scaled_size;   // accumulated floor(dp_scale * alpha * w_c * q_c)
  std::vector<int> qualities; // chosen so far, one per completed class
};

// True when `a` is at least as good as `b` in every respect the final
// selection can see; keeping only `a` is then safe.
bool dominates(const Candidate& a, const Candidate& b) {
  return a.objective >= b.objective && a.mass <= b.mass && a.qualities <= b.qualities;
}

bool better_final(const Candidate& a, const Candidate& b) {
  if (a.objective != b.objective) return a.objective > b.objective;
  if (a.scaled_size != b.scaled_size) return a.scaled_size < b.scaled_size;
  return a.qualities < b.qualities;
}

// Bypass route used when alpha <= 0 and the size model cannot be inverted:
// prefer the all-max plan, fall back to all-min, else infeasible.
QualityPlan schedule_degenerate_alpha(const ScheduleContext& ctx) {
  std::size_t k = ctx.proportions.size();
  for (int q : {ctx.palette.max_level(), ctx.palette.min_level()}) {
    double mass = 0.0;
    for (std::size_t c = 0; c < k; ++c) mass += ctx.proportions[c] * static_cast<double>(q);
    if (meets_latency(ctx, mass)) return QualityPlan(std::vector<int>(k, q));
  }
  return QualityPlan{};
}

}  // namespace

std::optional<std::int64_t> max_frame_size(const ScheduleContext& ctx) {
  if (!(ctx.model.alpha > 0.0)) {
    throw std::invalid_argument("max_frame_size: requires alpha > 0");
  }
  double transmit_budget_ms =
      ctx.latency_budget_ms - ctx.device_latency_ms - ctx.cloud_latency_ms;
  if (transmit_budget_ms <= 0.0) return std::nullopt;
  double max_bytes = ctx.bandwidth_mbps * kBytesPerMbpsMs * transmit_budget_ms;
  double max_ratio = max_bytes / ctx.original_size_bytes;
  return static_cast<std::int64_t>(
      std::floor(static_cast<double>(ctx.dp_scale) * (max_ratio - ctx.model.alpha_s)));
}

double predicted_latency_ms(const ScheduleContext& ctx, const QualityPlan& plan) {
  if (!plan.feasible) throw std::invalid_argument("predicted_latency_ms: plan must be feasible");
  if (plan.per_class_quality.size() != ctx.proportions.size()) {
    throw std::invalid_argument("predicted_latency_ms: plan class count mismatch");
  }
  double mass = weighted_average_quality(ctx.proportions, plan.per_class_quality);
  double transmit = (ctx.model.alpha * mass + ctx.model.alpha_s) * ctx.original_size_bytes * 8.0 /
                    (ctx.bandwidth_mbps * 1000.0);
  return transmit + ctx.device_latency_ms + ctx.cloud_latency_ms;
}

QualityPlan schedule(const ScheduleContext& ctx) {
  ctx.validate();
  std::size_t k = ctx.proportions.size();

  if (ctx.latency_budget_ms - ctx.device_latency_ms - ctx.cloud_latency_ms <= 0.0) {
    return QualityPlan{};
  }
  if (!(ctx.bandwidth_mbps > 0.0)) return QualityPlan{};
  if (!(ctx.model.alpha > 0.0)) return schedule_degenerate_alpha(ctx);

  std::int64_t budget = max_frame_size(ctx).value();
  // No bucket beyond the all-max plan's cost is reachable, which bounds the
  // table under slack bandwidth. Floor superadditivity can land a feasible
  // plan up to k-1 slots past the nominal budget, hence the slack slots; the
  // exact latency check governs admission either way.
  std::int64_t all_max_cost = 0;
  for (std::size_t c = 0; c < k; ++c) {
    all_max_cost += scaled_item_cost(ctx, c, ctx.palette.max_level());
  }
  std::int64_t extent = std::min(std::max<std::int64_t>(budget, 0), all_max_cost) +
                        static_cast<std::int64_t>(k) + 1;

  // One row per accumulated scaled size, as in the Path-matrix formulation,
  // except each row keeps the small frontier of (objective, mass)
  // non-dominated partial plans so exact-arithmetic feasibility stays
  // decidable per transition.
  std::vector<std::vector<Candidate>> table(static_cast<std::size_t>(extent));
  table[0].push_back(Candidate{ctx.model.beta_a, 0.0, 0, {}});

  for (std::size_t c = 0; c < k; ++c) {
    std::vector<std::vector<Candidate>> next(static_cast<std::size_t>(extent));
    for (std::int64_t s = 0; s < extent; ++s) {
      for (const Candidate& cand : table[static_cast<std::size_t>(s)]) {
        for (int q : ctx.palette.levels) {
          double mass = cand.mass + ctx.proportions[c] * static_cast<double>(q);
          if (!meets_latency(ctx, mass)) continue;
          std::int64_t s2 = cand.scaled_size + scaled_item_cost(ctx, c, q);
          if (s2 < 0 || s2 >= extent) continue;
          Candidate grown{cand.objective + ctx.model.betas[c] * static_cast<double>(q), mass, s2,
                          cand.qualities};
          grown.qualities.push_back(q);
          auto& row = next[static_cast<std::size_t>(s2)];
          bool kept = true;
          for (const Candidate& existing : row) {
            if (dominates(existing, grown)) {
              kept = false;
              break;
            }
          }
          if (!kept) continue;
          std::erase_if(row, [&](const Candidate& existing) { return dominates(grown, existing); });
          row.push_back(std::move(grown));
        }
      }
    }
    table = std::move(next);
  }

  const Candidate* best = nullptr;
  for (const auto& row : table) {
    for (const Candidate& cand : row) {
      if (best == nullptr || better_final(cand, *best)) best = &cand;
    }
  }
  if (best == nullptr) return QualityPlan{};
  return QualityPlan(best->qualities);
}

}  // namespace hyperion
