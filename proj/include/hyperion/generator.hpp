#pragma once

#include <cstdint>
#include <vector>

#include "hyperion/core.hpp"
#include "hyperion/profiler.hpp"
#include "hyperion/simulator.hpp"

namespace hyperion {

struct TracePhase {
  double duration_ms = 0.0;
  double bandwidth_mbps = 0.0;
};

/// True linear accuracy model behind generated profiling records.
struct AccuracyTruth {
  std::vector<double> betas{0.001, 0.002, 0.004};
  double beta_a = 0.1;
  double sigma = 0.0;
};

/// Parameters of the synthetic scenario generator. Defaults give a
/// desk-scale scene: 1024x1024 frames on a 16x16 patch grid with a handful
/// of planted objects per frame.
struct GeneratorSpec {
  int n_frames = 48;
  int grid_rows = 16;
  int grid_cols = 16;
  int patch_size_px = 64;
  int layers = 2;
  int heads = 2;
  bool emit_tensor = false;  // false: precomputed score vectors
  int objects_per_frame = 6;
  double frame_interval_ms = 500.0;
  std::int64_t original_size_bytes = 1'000'000;
  double attention_noise = 0.0;    // 0 keeps planted score levels exact
  double edge_miss_small = 0.45;   // edge-model miss probability, small objects
  double edge_miss_large = 0.05;
  double edge_false_positive_rate = 0.1;  // expected spurious edge boxes per frame
  double cloud_miss = 0.03;
  std::vector<TracePhase> trace_phases{{60'000.0, 50.0}};
  double trace_interval_ms = 250.0;
  SizeTruth size_truth{0.01, 0.05, 0.0};
  AccuracyTruth acc_truth;
  QualityPalette palette;
  std::uint64_t seed = 42;

  void validate() const;
};

struct Scenario {
  std::vector<FrameRecord> frames;
  std::vector<TracePoint> trace;
  SizeTruth size_truth;
  AccuracyTruth acc_truth;
};

/// Synthesizes frames with planted objects (attention mass concentrated on
/// object patches), edge detections as noisy ground truth with confidence
/// correlated to object size, cloud reference detections as lightly noised
/// ground truth, and a phase-wise bandwidth trace padded to cover the frame
/// timeline. Deterministic under the spec seed.
Scenario generate_scenario(const GeneratorSpec& spec);

/// Profiling records over the full |Q|^k quality grid, drawn from the
/// spec's true size and accuracy models plus their noise terms.
std::vector<ProfilingRecord> generate_profiling_records(const GeneratorSpec& spec, int k);

}  // namespace hyperion
