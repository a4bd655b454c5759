#include <doctest.h>

#include <stdexcept>

#include "hyperion/evaluator.hpp"
#include "hyperion/oracles.hpp"
#include "test_support.hpp"

using namespace hyperion;

namespace {

Detection gt(double x1, double y1, double x2, double y2) {
  return Detection(x1, y1, x2, y2, 1.0, DetectionSource::ground_truth);
}

Detection pred(double x1, double y1, double x2, double y2, double conf) {
  return Detection(x1, y1, x2, y2, conf, DetectionSource::fused);
}

}  // namespace

TEST_SUITE("evaluator") {

TEST_CASE("ap50: exact predictions give 1.0") {
  std::vector<std::vector<Detection>> truth{{gt(0, 0, 10, 10), gt(20, 20, 40, 40)},
                                            {gt(5, 5, 15, 15)}};
  std::vector<std::vector<Detection>> preds{
      {pred(0, 0, 10, 10, 1.0), pred(20, 20, 40, 40, 1.0)}, {pred(5, 5, 15, 15, 1.0)}};
  CHECK(ap50(preds, truth) == doctest::Approx(1.0));
}

TEST_CASE("ap50: no predictions give 0.0") {
  std::vector<std::vector<Detection>> truth{{gt(0, 0, 10, 10)}};
  std::vector<std::vector<Detection>> preds{{}};
  CHECK(ap50(preds, truth) == 0.0);
}

TEST_CASE("ap50: true positive ranked above a spurious box still gives 1.0") {
  std::vector<std::vector<Detection>> truth{{gt(0, 0, 10, 10)}};
  std::vector<std::vector<Detection>> preds{
      {pred(0, 0, 10, 10, 0.9), pred(50, 50, 60, 60, 0.8)}};
  CHECK(ap50(preds, truth) == doctest::Approx(1.0));
}

TEST_CASE("ap50: empty ground truth overall is an error") {
  std::vector<std::vector<Detection>> truth{{}, {}};
  std::vector<std::vector<Detection>> preds{{pred(0, 0, 1, 1, 0.5)}, {}};
  CHECK_THROWS_AS(ap50(preds, truth), std::invalid_argument);
}

TEST_CASE("ap50: invariant under rank-preserving confidence rescaling") {
  Rng rng(61);
  std::vector<std::vector<Detection>> truth(4), preds(4), rescaled(4);
  for (std::size_t f = 0; f < 4; ++f) {
    for (int i = 0; i < 5; ++i) {
      truth[f].push_back(hyperion::testing::random_box(rng, 60.0, DetectionSource::ground_truth));
    }
    for (int i = 0; i < 6; ++i) {
      Detection p = hyperion::testing::random_box(rng, 60.0, DetectionSource::fused, 0.02);
      preds[f].push_back(p);
      // halving preserves ranking
      rescaled[f].push_back(Detection(p.x1, p.y1, p.x2, p.y2, p.conf / 2.0, p.source));
    }
  }
  CHECK(ap50(preds, truth) == doctest::Approx(ap50(rescaled, truth)).epsilon(1e-12));
}

TEST_CASE("ap50: dropping a false positive never lowers AP") {
  Rng rng(67);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<Detection>> truth(2), preds(2);
    for (std::size_t f = 0; f < 2; ++f) {
      for (int i = 0; i < 3; ++i) {
        Detection g =
            hyperion::testing::random_box(rng, 60.0, DetectionSource::ground_truth);
        truth[f].push_back(g);
        preds[f].push_back(pred(g.x1, g.y1, g.x2, g.y2, rng.uniform(0.3, 1.0)));
      }
    }
    // a far-away spurious detection, guaranteed to match nothing
    std::vector<std::vector<Detection>> with_fp = preds;
    with_fp[0].push_back(pred(500, 500, 510, 510, rng.uniform(0.0, 1.0)));
    CHECK(ap50(preds, truth) >= ap50(with_fp, truth) - 1e-12);
  }
}

TEST_CASE("ap50 agrees with the naive reference on random scenes") {
  Rng rng(71);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<Detection>> truth(3), preds(3);
    for (std::size_t f = 0; f < 3; ++f) {
      for (int i = 0; i < 4; ++i) {
        truth[f].push_back(
            hyperion::testing::random_box(rng, 50.0, DetectionSource::ground_truth));
      }
      for (int i = 0; i < 5; ++i) {
        preds[f].push_back(hyperion::testing::random_box(rng, 50.0, DetectionSource::fused, 0.01));
      }
    }
    CHECK(ap50(preds, truth) == doctest::Approx(oracles::naive_ap50(preds, truth)).epsilon(1e-12));
  }
}

TEST_CASE("latency deviation rate") {
  CHECK(latency_deviation_rate(400, 400) == 0.0);
  CHECK(latency_deviation_rate(500, 400) == doctest::Approx(0.25));
  CHECK(latency_deviation_rate(300, 400) == 0.0);
  CHECK_THROWS_AS(latency_deviation_rate(100, 0), std::invalid_argument);
}

namespace {

FrameOutcome outcome(std::int64_t id, double latency, std::vector<Detection> dets) {
  FrameOutcome o;
  o.frame_id = id;
  o.measured_latency_ms = latency;
  o.detections = std::move(dets);
  return o;
}

}  // namespace

TEST_CASE("substitute_stale: identity without violations") {
  std::vector<FrameOutcome> frames{outcome(0, 300, {pred(0, 0, 1, 1, 0.5)}),
                                   outcome(1, 350, {pred(1, 1, 2, 2, 0.6)})};
  std::vector<FrameOutcome> out = substitute_stale(frames, 400);
  CHECK(!out[0].used_stale);
  CHECK(!out[1].used_stale);
  CHECK(out[1].detections[0].x1 == 1.0);
}

TEST_CASE("substitute_stale: violation takes the most recent valid result") {
  std::vector<FrameOutcome> frames{outcome(0, 300, {pred(0, 0, 1, 1, 0.5)}),
                                   outcome(1, 900, {pred(9, 9, 10, 10, 0.9)}),
                                   outcome(2, 300, {pred(2, 2, 3, 3, 0.7)})};
  std::vector<FrameOutcome> out = substitute_stale(frames, 400);
  CHECK(out[1].used_stale);
  REQUIRE(out[1].detections.size() == 1);
  CHECK(out[1].detections[0].x1 == 0.0);
  CHECK(!out[2].used_stale);
}

TEST_CASE("substitute_stale: consecutive violations chain to the last valid frame") {
  std::vector<FrameOutcome> frames{outcome(0, 300, {pred(0, 0, 1, 1, 0.5)}),
                                   outcome(1, 900, {pred(9, 9, 10, 10, 0.9)}),
                                   outcome(2, 900, {pred(8, 8, 9, 9, 0.8)})};
  std::vector<FrameOutcome> out = substitute_stale(frames, 400);
  CHECK(out[1].detections[0].x1 == 0.0);
  CHECK(out[2].detections[0].x1 == 0.0);

  // violating first frame gets an empty list
  std::vector<FrameOutcome> head{outcome(0, 900, {pred(0, 0, 1, 1, 0.5)}),
                                 outcome(1, 300, {pred(1, 1, 2, 2, 0.6)})};
  std::vector<FrameOutcome> out2 = substitute_stale(head, 400);
  CHECK(out2[0].used_stale);
  CHECK(out2[0].detections.empty());
}

TEST_CASE("substitute_stale is idempotent") {
  std::vector<FrameOutcome> frames{outcome(0, 300, {pred(0, 0, 1, 1, 0.5)}),
                                   outcome(1, 900, {pred(9, 9, 10, 10, 0.9)}),
                                   outcome(2, 500, {pred(8, 8, 9, 9, 0.8)})};
  std::vector<FrameOutcome> once = substitute_stale(frames, 400);
  std::vector<FrameOutcome> twice = substitute_stale(once, 400);
  for (std::size_t i = 0; i < once.size(); ++i) {
    CHECK(once[i].used_stale == twice[i].used_stale);
    CHECK(once[i].detections.size() == twice[i].detections.size());
  }
}

TEST_CASE("summarize: totals equal per-frame sums") {
  std::vector<std::vector<Detection>> truth{{gt(0, 0, 10, 10)}, {gt(0, 0, 10, 10)}};
  FrameOutcome a = outcome(0, 300, {pred(0, 0, 10, 10, 0.9)});
  a.offloaded_bytes = 120000;
  FrameOutcome b = outcome(1, 500, {pred(0, 0, 10, 10, 0.8)});
  b.offloaded_bytes = 80000;
  b.used_fallback = false;
  Summary s = summarize({a, b}, truth, 400);
  CHECK(s.mean_latency_ms == doctest::Approx(400.0));
  CHECK(s.mean_fps == doctest::Approx(1000.0 / 400.0));
  CHECK(s.total_offload_mb == doctest::Approx(0.2));
  CHECK(s.mean_deviation == doctest::Approx(0.125));  // (0 + 0.25) / 2
  CHECK(s.fallback_ratio == 0.0);
  // frame 1 violated, so its detections are frame 0's; both match the truth
  CHECK(s.ap50 == doctest::Approx(1.0));
}

}  // TEST_SUITE
