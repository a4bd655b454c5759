#include <doctest.h>

#include <stdexcept>

#include "hyperion/core.hpp"
#include "hyperion/rng.hpp"
#include "test_support.hpp"

using namespace hyperion;

TEST_SUITE("core") {

TEST_CASE("iou identity, disjoint, and hand-computed overlap") {
  Detection a(0, 0, 10, 10, 1.0, DetectionSource::ground_truth);
  CHECK(iou(a, a) == doctest::Approx(1.0));

  Detection far(20, 20, 30, 30, 1.0, DetectionSource::ground_truth);
  CHECK(iou(a, far) == 0.0);

  // inter 5x10 = 50, union 100 + 100 - 50 = 150
  Detection shifted(5, 0, 15, 10, 1.0, DetectionSource::ground_truth);
  CHECK(iou(a, shifted) == doctest::Approx(50.0 / 150.0));
}

TEST_CASE("iou degenerate zero-area boxes") {
  Detection point(5, 5, 5, 5, 1.0, DetectionSource::ground_truth);
  Detection other(0, 0, 10, 10, 1.0, DetectionSource::ground_truth);
  CHECK(iou(point, other) == 0.0);
  CHECK(iou(point, point) == 0.0);  // union 0 -> 0 by convention
}

TEST_CASE("iou is symmetric and bounded over random boxes") {
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    Detection a = hyperion::testing::random_box(rng, 100.0, DetectionSource::edge);
    Detection b = hyperion::testing::random_box(rng, 100.0, DetectionSource::cloud);
    double ab = iou(a, b);
    CHECK(ab == iou(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
  }
}

TEST_CASE("type invariants fail loudly") {
  CHECK_THROWS_AS(Detection(5, 0, 0, 10, 0.5, DetectionSource::edge), std::invalid_argument);
  CHECK_THROWS_AS(Detection(0, 0, 1, 1, 1.5, DetectionSource::edge), std::invalid_argument);
  CHECK_THROWS_AS(FrameMeta(0, 0, 4, 16, 1000, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(FrameMeta(0, 4, 4, 16, 0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(QualityPalette(std::vector<int>{}), std::invalid_argument);
  CHECK_THROWS_AS(QualityPalette({15, 15}), std::invalid_argument);
  CHECK_THROWS_AS(QualityPalette({-5, 10}), std::invalid_argument);

  // row sums must be 1
  CHECK_THROWS_AS(AttentionTensor(1, 1, 2, {0.5f, 0.4f, 0.5f, 0.5f}), std::invalid_argument);
  // negative values rejected
  CHECK_THROWS_AS(AttentionTensor(1, 1, 2, {1.5f, -0.5f, 0.5f, 0.5f}), std::invalid_argument);
  // wrong extent
  CHECK_THROWS_AS(AttentionTensor(1, 1, 2, {1.0f}), std::invalid_argument);
}

TEST_CASE("patch classification recomputes proportions exactly") {
  PatchClassification pc({0.1, 0.2, 0.3, 0.9}, {0, 0, 1, 2}, 3);
  CHECK(pc.proportions[0] == 0.5);
  CHECK(pc.proportions[1] == 0.25);
  CHECK(pc.proportions[2] == 0.25);
  CHECK(pc.effective_k == 3);

  CHECK_THROWS_AS(PatchClassification({0.1}, {3}, 3), std::invalid_argument);
  CHECK_THROWS_AS(PatchClassification({0.1, 0.2}, {0}, 3), std::invalid_argument);
}

TEST_CASE("plan validation against palette") {
  QualityPalette palette;
  QualityPlan plan(std::vector<int>{15, 45, 75});
  CHECK_NOTHROW(validate_plan(plan, palette));
  QualityPlan bad(std::vector<int>{15, 44, 75});
  CHECK_THROWS_AS(validate_plan(bad, palette), std::invalid_argument);
  CHECK_NOTHROW(validate_plan(QualityPlan{}, palette));  // infeasible plans carry no qualities
}

TEST_CASE("unit conventions: transmission latency") {
  // 1 MB at 50 mbps: 8e6 bits / 5e4 bits-per-ms = 160 ms
  CHECK(transmission_latency_ms(1e6, 50.0) == doctest::Approx(160.0));
}

}  // TEST_SUITE
