#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include "hyperion/generator.hpp"
#include "hyperion/io.hpp"

using namespace hyperion;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("hyperion_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("trace: parse, comments, and errors") {
  TempDir dir;
  fs::path good = dir.path / "good.trace";
  write_file(good, "0,50.0\n1000,45.0\n");
  std::vector<TracePoint> trace = io::load_trace(good.string());
  REQUIRE(trace.size() == 2);
  CHECK(trace[0].timestamp_ms == 0.0);
  CHECK(trace[1].bandwidth_mbps == 45.0);

  fs::path bad_order = dir.path / "bad_order.trace";
  write_file(bad_order, "1000,45\n0,50\n");
  CHECK_THROWS_WITH_AS(io::load_trace(bad_order.string()), doctest::Contains("non-increasing"),
                       std::runtime_error);

  fs::path malformed = dir.path / "malformed.trace";
  write_file(malformed, "0,50\nnot a line\n");
  CHECK_THROWS_WITH_AS(io::load_trace(malformed.string()), doctest::Contains(":2"),
                       std::runtime_error);
}

TEST_CASE("trace: committed fixture with comment header") {
  fs::path fixture = fs::path(HYPERION_DATA_DIR) / "traces" / "fixture_small.trace";
  std::vector<TracePoint> trace = io::load_trace(fixture.string());
  CHECK(trace.size() == 3);
  CHECK(trace[0].bandwidth_mbps == doctest::Approx(47.9));
}

TEST_CASE("trace round-trip") {
  TempDir dir;
  std::vector<TracePoint> trace{{0.0, 35.5}, {250.0, 36.25}, {500.0, 20.125}};
  fs::path p = dir.path / "rt.trace";
  io::save_trace(trace, p.string());
  std::vector<TracePoint> loaded = io::load_trace(p.string());
  REQUIRE(loaded.size() == trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    CHECK(loaded[i].timestamp_ms == trace[i].timestamp_ms);
    CHECK(loaded[i].bandwidth_mbps == trace[i].bandwidth_mbps);
  }
}

TEST_CASE("frames round-trip with score vectors") {
  TempDir dir;
  GeneratorSpec spec;
  spec.n_frames = 4;
  spec.grid_rows = 6;
  spec.grid_cols = 6;
  spec.patch_size_px = 16;
  spec.attention_noise = 0.03;
  spec.seed = 11;
  Scenario scenario = generate_scenario(spec);

  fs::path p = dir.path / "frames.jsonl";
  io::save_frames(scenario.frames, p.string());
  std::vector<FrameRecord> loaded = io::load_frames(p.string());
  REQUIRE(loaded.size() == scenario.frames.size());
  for (std::size_t f = 0; f < loaded.size(); ++f) {
    CHECK(loaded[f].meta.frame_id == scenario.frames[f].meta.frame_id);
    CHECK(loaded[f].meta.original_size_bytes == scenario.frames[f].meta.original_size_bytes);
    CHECK(loaded[f].meta.capture_timestamp_ms == scenario.frames[f].meta.capture_timestamp_ms);
    CHECK(std::get<std::vector<double>>(loaded[f].attention) ==
          std::get<std::vector<double>>(scenario.frames[f].attention));
    REQUIRE(loaded[f].edge_detections.size() == scenario.frames[f].edge_detections.size());
    for (std::size_t i = 0; i < loaded[f].edge_detections.size(); ++i) {
      CHECK(loaded[f].edge_detections[i].x1 == scenario.frames[f].edge_detections[i].x1);
      CHECK(loaded[f].edge_detections[i].conf == scenario.frames[f].edge_detections[i].conf);
      CHECK(loaded[f].edge_detections[i].source == DetectionSource::edge);
    }
    CHECK(loaded[f].ground_truth.size() == scenario.frames[f].ground_truth.size());
    CHECK(loaded[f].cloud_reference.size() == scenario.frames[f].cloud_reference.size());
  }
}

TEST_CASE("frames round-trip with attention tensor sidecars") {
  TempDir dir;
  GeneratorSpec spec;
  spec.n_frames = 2;
  spec.grid_rows = 5;
  spec.grid_cols = 5;
  spec.patch_size_px = 16;
  spec.emit_tensor = true;
  spec.layers = 2;
  spec.heads = 2;
  spec.seed = 13;
  Scenario scenario = generate_scenario(spec);

  fs::path p = dir.path / "frames.jsonl";
  io::save_frames(scenario.frames, p.string());
  CHECK(fs::exists(dir.path / "frames_frame_0.attn"));
  std::vector<FrameRecord> loaded = io::load_frames(p.string());
  REQUIRE(loaded.size() == 2);
  for (std::size_t f = 0; f < loaded.size(); ++f) {
    const auto& original = std::get<AttentionTensor>(scenario.frames[f].attention);
    const auto& restored = std::get<AttentionTensor>(loaded[f].attention);
    CHECK(restored.layers == original.layers);
    CHECK(restored.heads == original.heads);
    CHECK(restored.n == original.n);
    CHECK(restored.values == original.values);
  }
}

TEST_CASE("frames: errors name the line and field") {
  TempDir dir;
  fs::path p = dir.path / "frames.jsonl";
  // conf out of range in edge_detections
  write_file(p, R"({"frame_id":0,"grid_rows":2,"grid_cols":2,"patch_size_px":8,)"
                R"("original_size_bytes":100,"capture_timestamp_ms":0.0,)"
                R"("scores":[0.25,0.25,0.25,0.25],"edge_detections":[[0,0,5,5,1.7]],)"
                R"("ground_truth":[],"cloud_reference":[]})"
                "\n");
  CHECK_THROWS_WITH_AS(io::load_frames(p.string()), doctest::Contains("edge_detections[0]"),
                       std::runtime_error);

  // non-increasing frame ids
  std::string frame =
      R"({"frame_id":0,"grid_rows":2,"grid_cols":2,"patch_size_px":8,)"
      R"("original_size_bytes":100,"capture_timestamp_ms":0.0,"scores":[0.25,0.25,0.25,0.25],)"
      R"("edge_detections":[],"ground_truth":[],"cloud_reference":[]})";
  write_file(p, frame + "\n" + frame + "\n");
  CHECK_THROWS_WITH_AS(io::load_frames(p.string()), doctest::Contains("strictly increase"),
                       std::runtime_error);

  // missing attention payload
  write_file(p, R"({"frame_id":0,"grid_rows":2,"grid_cols":2,"patch_size_px":8,)"
                R"("original_size_bytes":100,"capture_timestamp_ms":0.0,)"
                R"("edge_detections":[],"ground_truth":[],"cloud_reference":[]})"
                "\n");
  CHECK_THROWS_WITH_AS(io::load_frames(p.string()), doctest::Contains("scores"),
                       std::runtime_error);
}

TEST_CASE("frames: boxes are clamped to frame bounds on load") {
  TempDir dir;
  fs::path p = dir.path / "frames.jsonl";
  write_file(p, R"({"frame_id":0,"grid_rows":2,"grid_cols":2,"patch_size_px":8,)"
                R"("original_size_bytes":100,"capture_timestamp_ms":0.0,)"
                R"("scores":[0.25,0.25,0.25,0.25],"edge_detections":[[-5,-5,99,99,0.5]],)"
                R"("ground_truth":[],"cloud_reference":[]})"
                "\n");
  std::vector<FrameRecord> frames = io::load_frames(p.string());
  REQUIRE(frames[0].edge_detections.size() == 1);
  CHECK(frames[0].edge_detections[0].x1 == 0.0);
  CHECK(frames[0].edge_detections[0].x2 == 16.0);
}

TEST_CASE("profiling records and model round-trip") {
  TempDir dir;
  GeneratorSpec spec;
  spec.size_truth.sigma = 0.002;
  spec.acc_truth.sigma = 0.004;
  std::vector<ProfilingRecord> records = generate_profiling_records(spec, 3);
  fs::path rp = dir.path / "profiling.jsonl";
  io::save_profiling_records(records, rp.string());
  std::vector<ProfilingRecord> loaded = io::load_profiling_records(rp.string());
  REQUIRE(loaded.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(loaded[i].per_class_quality == records[i].per_class_quality);
    CHECK(loaded[i].per_class_proportion == records[i].per_class_proportion);
    CHECK(loaded[i].observed_compression_ratio == records[i].observed_compression_ratio);
    CHECK(loaded[i].observed_accuracy == records[i].observed_accuracy);
  }

  ProfilerModel model = fit(records, 3);
  fs::path mp = dir.path / "model.json";
  io::save_model(model, mp.string());
  ProfilerModel restored = io::load_model(mp.string());
  CHECK(restored.alpha == model.alpha);
  CHECK(restored.alpha_s == model.alpha_s);
  CHECK(restored.betas == model.betas);
  CHECK(restored.beta_a == model.beta_a);
}

TEST_CASE("sim config round-trip") {
  TempDir dir;
  SimConfig cfg;
  cfg.latency_budget_ms = 500;
  cfg.scorer.k = 4;
  cfg.scorer.importance_threshold = ImportanceThreshold::explicit_value(0.01);
  cfg.palette = QualityPalette({10, 20, 30});
  cfg.rng_seed = 99;
  fs::path p = dir.path / "config.json";
  io::save_sim_config(cfg, p.string());
  SimConfig loaded = io::load_sim_config(p.string());
  CHECK(loaded.latency_budget_ms == 500);
  CHECK(loaded.scorer.k == 4);
  CHECK(loaded.scorer.importance_threshold.mode == ImportanceThreshold::Mode::explicit_value);
  CHECK(loaded.scorer.importance_threshold.value == 0.01);
  CHECK(loaded.palette.levels == std::vector<int>{10, 20, 30});
  CHECK(loaded.rng_seed == 99);
}

TEST_CASE("outcome csv: fixed column order") {
  FrameOutcome o;
  o.frame_id = 3;
  o.measured_latency_ms = 500.0;
  o.offloaded_bytes = 1234;
  o.plan = QualityPlan(std::vector<int>{15, 45, 75});
  o.used_stale = true;
  std::ostringstream out;
  io::write_outcomes_csv({o}, 3, 400.0, out);
  CHECK(out.str() ==
        "frame_id,latency_ms,deviation,offload_bytes,feasible,stale,q0,q1,q2\n"
        "3,500.000000,0.250000,1234,1,1,15,45,75\n");

  FrameOutcome fallback;
  fallback.frame_id = 4;
  fallback.measured_latency_ms = 152.5;
  fallback.used_fallback = true;
  std::ostringstream out2;
  io::write_outcomes_csv({fallback}, 3, 400.0, out2);
  CHECK(out2.str() ==
        "frame_id,latency_ms,deviation,offload_bytes,feasible,stale,q0,q1,q2\n"
        "4,152.500000,0.000000,0,0,0,0,0,0\n");
}

TEST_CASE("detections file round-trip") {
  TempDir dir;
  std::map<std::int64_t, std::vector<Detection>> by_frame;
  by_frame[0] = {Detection(1, 2, 3, 4, 0.5, DetectionSource::fused)};
  by_frame[2] = {Detection(5, 6, 7, 8, 0.25, DetectionSource::cloud)};
  fs::path p = dir.path / "dets.jsonl";
  io::save_detections(by_frame, p.string());
  auto loaded = io::load_detections(p.string());
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0][0].x1 == 1.0);
  CHECK(loaded[0][0].source == DetectionSource::fused);
  CHECK(loaded[2][0].conf == 0.25);
  CHECK(loaded[2][0].source == DetectionSource::cloud);
}

}  // TEST_SUITE
