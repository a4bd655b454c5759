#include <doctest.h>

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "hyperion/oracles.hpp"
#include "hyperion/scheduler.hpp"
#include "test_support.hpp"

using namespace hyperion;
using hyperion::testing::make_random_context;

TEST_SUITE("scheduler") {

TEST_CASE("harmonic estimator: constant, mixed, eviction") {
  BandwidthEstimator est(5);
  CHECK(!est.estimate().has_value());
  for (int i = 0; i < 4; ++i) est.observe(50.0);
  CHECK(est.estimate().value() == doctest::Approx(50.0));

  BandwidthEstimator two(5);
  two.observe(10.0);
  two.observe(30.0);
  CHECK(two.estimate().value() == doctest::Approx(15.0));  // 2 / (1/10 + 1/30)

  BandwidthEstimator ring(2);
  ring.observe(100.0);
  ring.observe(10.0);
  ring.observe(30.0);
  CHECK(ring.sample_count() == 2);
  CHECK(ring.estimate().value() == doctest::Approx(15.0));
}

TEST_CASE("estimator rejects non-positive samples") {
  BandwidthEstimator est(3);
  CHECK_THROWS_AS(est.observe(0.0), std::invalid_argument);
  CHECK_THROWS_AS(est.observe(-5.0), std::invalid_argument);
}

namespace {

ScheduleContext worked_context() {
  ScheduleContext ctx;
  ctx.latency_budget_ms = 400.0;
  ctx.device_latency_ms = 150.0;
  ctx.cloud_latency_ms = 100.0;
  ctx.bandwidth_mbps = 50.0;
  ctx.original_size_bytes = 1e6;
  ctx.proportions = {0.7, 0.2, 0.1};
  ctx.model.alpha = 0.01;
  ctx.model.alpha_s = 0.05;
  ctx.model.betas = {0.001, 0.004, 0.01};
  ctx.model.beta_a = 0.02;
  ctx.dp_scale = 1000;
  return ctx;
}

}  // namespace

TEST_CASE("max_frame_size: worked budget example") {
  // 150 ms of transmit at 50 mbps = 937500 bytes, ratio cap 0.9375,
  // floor(1000 * (0.9375 - 0.05)) = 887
  CHECK(max_frame_size(worked_context()).value() == 887);
}

TEST_CASE("max_frame_size: zero transmit budget is infeasible, alpha <= 0 throws") {
  ScheduleContext ctx = worked_context();
  ctx.latency_budget_ms = 250.0;  // == L_d + L_c
  CHECK(!max_frame_size(ctx).has_value());

  ScheduleContext degenerate = worked_context();
  degenerate.model.alpha = 0.0;
  CHECK_THROWS_AS(max_frame_size(degenerate), std::invalid_argument);
}

TEST_CASE("max_frame_size: slack bandwidth covers the all-max plan") {
  ScheduleContext ctx = worked_context();
  ctx.bandwidth_mbps = 10000.0;
  std::int64_t budget = max_frame_size(ctx).value();
  std::int64_t all_max_cost = 0;
  for (double w : ctx.proportions) {
    all_max_cost += static_cast<std::int64_t>(
        std::floor(static_cast<double>(ctx.dp_scale) * ctx.model.alpha * w * 75.0));
  }
  CHECK(budget >= all_max_cost);
}

TEST_CASE("schedule: unconstrained maximization picks q_max everywhere") {
  ScheduleContext ctx = worked_context();
  ctx.bandwidth_mbps = 10000.0;
  QualityPlan plan = schedule(ctx);
  REQUIRE(plan.feasible);
  CHECK(plan.per_class_quality == std::vector<int>{75, 75, 75});
}

TEST_CASE("schedule: budget below the all-min plan is infeasible") {
  ScheduleContext ctx = worked_context();
  ctx.bandwidth_mbps = 0.5;  // ratio cap ~ 0.009 < alpha*15 + alpha_s
  QualityPlan plan = schedule(ctx);
  CHECK(!plan.feasible);
  CHECK(schedule(ctx) == oracles::brute_force_schedule(ctx));
}

TEST_CASE("schedule: zero transmit window is infeasible immediately") {
  ScheduleContext ctx = worked_context();
  ctx.latency_budget_ms = 249.0;
  CHECK(!schedule(ctx).feasible);
}

TEST_CASE("schedule: alpha <= 0 bypass prefers all-max, then all-min") {
  ScheduleContext ctx = worked_context();
  ctx.model.alpha = 0.0;
  ctx.model.alpha_s = 0.5;  // any plan costs 0.5 * S_O
  QualityPlan plan = schedule(ctx);
  REQUIRE(plan.feasible);
  CHECK(plan.per_class_quality == std::vector<int>{75, 75, 75});

  // negative alpha: all-max shrinks the frame below the cap, all-min not
  ScheduleContext neg = worked_context();
  neg.model.alpha = -0.01;
  neg.model.alpha_s = 1.5;
  // mass(all-max) = 75 -> ratio 0.75 fits; mass(all-min) = 15 -> 1.35 too big
  QualityPlan neg_plan = schedule(neg);
  REQUIRE(neg_plan.feasible);
  CHECK(neg_plan.per_class_quality == std::vector<int>{75, 75, 75});

  ScheduleContext worse = neg;
  worse.model.alpha_s = 5.0;
  CHECK(!schedule(worse).feasible);
}

TEST_CASE("schedule matches brute force over 50 seeded contexts") {
  Rng rng(1234);
  int feasible_count = 0;
  for (int trial = 0; trial < 50; ++trial) {
    ScheduleContext ctx = make_random_context(rng);
    QualityPlan dp = schedule(ctx);
    QualityPlan oracle = oracles::brute_force_schedule(ctx);
    REQUIRE(dp == oracle);
    if (dp.feasible) {
      ++feasible_count;
      CHECK(oracles::plan_objective(ctx, dp) == oracles::plan_objective(ctx, oracle));
      CHECK(predicted_latency_ms(ctx, dp) <= ctx.latency_budget_ms);
    }
  }
  CHECK(feasible_count > 5);  // the draw spans both regimes
}

TEST_CASE("schedule is deterministic") {
  Rng rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    ScheduleContext ctx = make_random_context(rng);
    CHECK(schedule(ctx) == schedule(ctx));
  }
}

TEST_CASE("objective is monotone in the latency budget") {
  Rng rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    ScheduleContext ctx = make_random_context(rng);
    QualityPlan before = schedule(ctx);
    ScheduleContext wider = ctx;
    wider.latency_budget_ms += rng.uniform(1.0, 300.0);
    QualityPlan after = schedule(wider);
    if (before.feasible) {
      REQUIRE(after.feasible);
      CHECK(oracles::plan_objective(wider, after) >= oracles::plan_objective(ctx, before));
    }
  }
}

TEST_CASE("negative betas are handled natively") {
  ScheduleContext ctx = worked_context();
  ctx.model.betas = {-0.004, -0.002, -0.001};
  ctx.bandwidth_mbps = 10000.0;
  QualityPlan plan = schedule(ctx);
  REQUIRE(plan.feasible);
  // maximizing with negative coefficients picks the minimum quality
  CHECK(plan.per_class_quality == std::vector<int>{15, 15, 15});
  CHECK(plan == oracles::brute_force_schedule(ctx));
}

TEST_CASE("schedule wall time stays in budget") {
  ScheduleContext ctx = worked_context();
  auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 100; ++i) {
    ctx.bandwidth_mbps = 20.0 + i;
    (void)schedule(ctx);
  }
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                  .count();
  CHECK(ms / 100.0 < 10.0);
}

}  // TEST_SUITE
