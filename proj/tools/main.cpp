#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hyperion/evaluator.hpp"
#include "hyperion/generator.hpp"
#include "hyperion/io.hpp"
#include "hyperion/log.hpp"
#include "hyperion/profiler.hpp"
#include "hyperion/scheduler.hpp"
#include "hyperion/simulator.hpp"

namespace fs = std::filesystem;
using namespace hyperion;

namespace {

struct CommonOverrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> latency_budget_ms;
  std::optional<double> bootstrap_bandwidth_mbps;
};

void add_common(CLI::App* cmd, CommonOverrides& common) {
  cmd->add_option("--config", common.config_path, "sim config JSON; flags override file values");
  cmd->add_option("--seed", common.seed, "rng seed");
  cmd->add_option("--latency", common.latency_budget_ms, "latency budget in ms");
  cmd->add_option("--bootstrap-bandwidth", common.bootstrap_bandwidth_mbps,
                  "estimator bootstrap in mbps");
}

SimConfig resolve_config(const CommonOverrides& common) {
  SimConfig cfg;
  if (!common.config_path.empty()) cfg = io::load_sim_config(common.config_path);
  if (common.seed) cfg.rng_seed = *common.seed;
  if (common.latency_budget_ms) cfg.latency_budget_ms = *common.latency_budget_ms;
  if (common.bootstrap_bandwidth_mbps) {
    cfg.bootstrap_bandwidth_mbps = *common.bootstrap_bandwidth_mbps;
  }
  return cfg;
}

std::vector<std::vector<Detection>> aligned_ground_truth(
    const std::vector<FrameRecord>& frames) {
  std::vector<std::vector<Detection>> gt;
  gt.reserve(frames.size());
  for (const FrameRecord& f : frames) gt.push_back(f.ground_truth);
  return gt;
}

int cmd_generate(const std::string& spec_path, const std::string& out_dir, bool tensor,
                 std::optional<std::uint64_t> seed) {
  GeneratorSpec spec;
  if (!spec_path.empty()) spec = io::load_generator_spec(spec_path);
  if (seed) spec.seed = *seed;
  if (tensor) spec.emit_tensor = true;
  fs::create_directories(out_dir);

  Scenario scenario = generate_scenario(spec);
  std::vector<ProfilingRecord> records = generate_profiling_records(spec, spec.acc_truth.betas.size());

  fs::path dir(out_dir);
  io::save_frames(scenario.frames, (dir / "frames.jsonl").string());
  io::save_trace(scenario.trace, (dir / "trace.trace").string());
  io::save_profiling_records(records, (dir / "profiling.jsonl").string());

  SimConfig cfg;
  cfg.size_truth = scenario.size_truth;
  cfg.palette = spec.palette;
  cfg.scorer.k = static_cast<int>(spec.acc_truth.betas.size());
  cfg.rng_seed = spec.seed;
  io::save_sim_config(cfg, (dir / "sim_config.json").string());
  io::save_generator_spec(spec, (dir / "generator_spec.json").string());

  std::cout << "wrote " << scenario.frames.size() << " frames, " << scenario.trace.size()
            << " trace points, " << records.size() << " profiling records to " << out_dir << "\n";
  return 0;
}

int cmd_profile_fit(const std::string& records_path, int k, const std::string& out_path) {
  std::vector<ProfilingRecord> records = io::load_profiling_records(records_path);
  ProfilerModel model = fit(records, k);
  if (!out_path.empty()) io::save_model(model, out_path);
  std::printf("alpha    %12.8f\nalpha_s  %12.8f\n", model.alpha, model.alpha_s);
  for (std::size_t c = 0; c < model.betas.size(); ++c) {
    std::printf("beta_%zu   %12.8f\n", c, model.betas[c]);
  }
  std::printf("beta_a   %12.8f\nsize_r2  %12.8f\nacc_r2   %12.8f\n", model.beta_a, model.size_r2,
              model.acc_r2);
  return 0;
}

int cmd_simulate(const std::string& frames_path, const std::string& trace_path,
                 const std::string& model_path, const CommonOverrides& common,
                 const std::string& out_path, const std::string& summary_json_path,
                 const std::string& predictions_path, bool device_only) {
  SimConfig cfg = resolve_config(common);
  cfg.force_device_only = device_only;
  std::vector<FrameRecord> frames = io::load_frames(frames_path);
  std::vector<TracePoint> trace = io::load_trace(trace_path);
  ProfilerModel model = io::load_model(model_path);

  std::vector<FrameOutcome> outcomes = run(frames, trace, cfg, model);
  std::vector<FrameOutcome> substituted = substitute_stale(outcomes, cfg.latency_budget_ms);
  if (!out_path.empty()) {
    io::save_outcomes_csv(substituted, cfg.scorer.k, cfg.latency_budget_ms, out_path);
  }
  if (!predictions_path.empty()) {
    std::map<std::int64_t, std::vector<Detection>> by_frame;
    for (const FrameOutcome& o : substituted) by_frame[o.frame_id] = o.detections;
    io::save_detections(by_frame, predictions_path);
  }

  Summary summary = summarize(outcomes, aligned_ground_truth(frames), cfg.latency_budget_ms);
  std::cout << io::format_summary_table(summary, outcomes.size());
  if (!summary_json_path.empty()) {
    std::ofstream out(summary_json_path);
    out << io::summary_to_json(summary) << "\n";
  }
  return 0;
}

int cmd_schedule(const std::string& model_path, const CommonOverrides& common, double bandwidth,
                 const std::string& proportions_csv, std::optional<double> size_bytes) {
  SimConfig cfg = resolve_config(common);
  ProfilerModel model = io::load_model(model_path);

  ScheduleContext ctx;
  ctx.latency_budget_ms = cfg.latency_budget_ms;
  ctx.device_latency_ms = cfg.device_latency_ms + cfg.scheduling_overhead_ms;
  ctx.cloud_latency_ms = cfg.cloud_latency_ms + cfg.return_latency_ms;
  ctx.bandwidth_mbps = bandwidth;
  ctx.original_size_bytes = size_bytes.value_or(1e6);
  ctx.palette = cfg.palette;
  ctx.model = model;
  ctx.dp_scale = cfg.dp_scale;

  std::stringstream ss(proportions_csv);
  std::string token;
  while (std::getline(ss, token, ',')) ctx.proportions.push_back(std::stod(token));

  QualityPlan plan = schedule(ctx);
  if (!plan.feasible) {
    std::cout << "{\"feasible\": false}\n";
    return 0;
  }
  std::cout << "{\"feasible\": true, \"qualities\": [";
  for (std::size_t c = 0; c < plan.per_class_quality.size(); ++c) {
    std::cout << (c ? ", " : "") << plan.per_class_quality[c];
  }
  std::printf("], \"predicted_accuracy\": %.6f, \"predicted_latency_ms\": %.3f}\n",
              predict_accuracy(model, plan), predicted_latency_ms(ctx, plan));
  return 0;
}

int cmd_evaluate(const std::string& predictions_path, const std::string& gt_path) {
  auto pred_map = io::load_detections(predictions_path);
  auto gt_map = io::load_detections(gt_path);
  // Union of frame ids: predictions on frames without ground truth still
  // count as false positives.
  std::set<std::int64_t> frame_ids;
  for (const auto& [frame_id, boxes] : gt_map) frame_ids.insert(frame_id);
  for (const auto& [frame_id, boxes] : pred_map) frame_ids.insert(frame_id);
  std::vector<std::vector<Detection>> preds, gt;
  for (std::int64_t frame_id : frame_ids) {
    auto git = gt_map.find(frame_id);
    gt.push_back(git == gt_map.end() ? std::vector<Detection>{} : git->second);
    auto pit = pred_map.find(frame_id);
    preds.push_back(pit == pred_map.end() ? std::vector<Detection>{} : pit->second);
  }
  std::printf("{\"ap50\": %.6f, \"frames\": %zu}\n", ap50(preds, gt), gt.size());
  return 0;
}

int cmd_sweep(const std::string& frames_path, const std::string& trace_path,
              const std::string& model_path, const CommonOverrides& common,
              const std::string& vary, const std::string& values_csv,
              const std::string& out_path) {
  SimConfig base = resolve_config(common);
  std::vector<FrameRecord> frames = io::load_frames(frames_path);
  std::vector<TracePoint> trace = io::load_trace(trace_path);
  ProfilerModel model = io::load_model(model_path);

  std::vector<double> values;
  std::stringstream ss(values_csv);
  std::string token;
  while (std::getline(ss, token, ',')) values.push_back(std::stod(token));
  if (values.empty()) throw std::runtime_error("sweep: --values is empty");

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << "value,ap50,mean_fps,mean_latency_ms,total_offload_mb,mean_deviation,fallback_ratio\n";
  char buf[256];
  for (double v : values) {
    SimConfig cfg = base;
    std::vector<TracePoint> scaled = trace;
    if (vary == "latency") {
      cfg.latency_budget_ms = v;
    } else if (vary == "bandwidth-scale") {
      for (TracePoint& p : scaled) p.bandwidth_mbps *= v;
    } else {
      throw std::runtime_error("sweep: --vary must be 'latency' or 'bandwidth-scale'");
    }
    std::vector<FrameOutcome> outcomes = run(frames, scaled, cfg, model);
    Summary s = summarize(outcomes, aligned_ground_truth(frames), cfg.latency_budget_ms);
    std::snprintf(buf, sizeof(buf), "%.3f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", v, s.ap50, s.mean_fps,
                  s.mean_latency_ms, s.total_offload_mb, s.mean_deviation, s.fallback_ratio);
    out << buf;
  }
  std::cout << "wrote sweep of " << values.size() << " runs to " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hyperion: patch-level edge-cloud inference scheduling simulator"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate", "synthesize a scenario: frames, trace, profiling");
  std::string gen_spec, gen_out = "scenario";
  bool gen_tensor = false;
  std::optional<std::uint64_t> gen_seed;
  generate->add_option("--spec", gen_spec, "generator spec JSON");
  generate->add_option("--out-dir", gen_out, "output directory")->required();
  generate->add_flag("--tensor", gen_tensor, "emit dense attention tensors instead of scores");
  generate->add_option("--seed", gen_seed, "rng seed");

  // profile-fit
  auto* profile_fit = app.add_subcommand("profile-fit", "fit size/accuracy models from records");
  std::string fit_records, fit_out;
  int fit_k = 3;
  profile_fit->add_option("--records", fit_records, "profiling records JSONL")->required();
  profile_fit->add_option("--k", fit_k, "class count");
  profile_fit->add_option("--out", fit_out, "model JSON output");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run the pipeline over frames and a trace");
  std::string sim_frames, sim_trace, sim_model, sim_out, sim_summary, sim_preds;
  bool sim_device_only = false;
  CommonOverrides sim_common;
  simulate->add_option("--frames", sim_frames, "frames JSONL")->required();
  simulate->add_option("--trace", sim_trace, "bandwidth trace")->required();
  simulate->add_option("--model", sim_model, "profiler model JSON")->required();
  simulate->add_option("--out", sim_out, "outcomes CSV path");
  simulate->add_option("--summary-json", sim_summary, "summary JSON path");
  simulate->add_option("--predictions-out", sim_preds, "final detections JSONL path");
  simulate->add_flag("--device-only", sim_device_only, "force device-only fallback on every frame");
  add_common(simulate, sim_common);

  // schedule
  auto* sched = app.add_subcommand("schedule", "one-shot quality plan for a given context");
  std::string sch_model, sch_props = "0.75,0.15,0.1";
  double sch_bandwidth = 50.0;
  std::optional<double> sch_size;
  CommonOverrides sch_common;
  sched->add_option("--model", sch_model, "profiler model JSON")->required();
  sched->add_option("--bandwidth", sch_bandwidth, "predicted bandwidth mbps");
  sched->add_option("--proportions", sch_props, "comma-separated class proportions");
  sched->add_option("--size-bytes", sch_size, "original frame size in bytes");
  add_common(sched, sch_common);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "ap50 of predictions against ground truth");
  std::string eval_preds, eval_gt;
  evaluate->add_option("--predictions", eval_preds, "detections JSONL")->required();
  evaluate->add_option("--ground-truth", eval_gt, "detections or frames JSONL")->required();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "vary latency budget or bandwidth scale, emit CSV");
  std::string sw_frames, sw_trace, sw_model, sw_vary = "latency", sw_values, sw_out;
  CommonOverrides sw_common;
  sweep->add_option("--frames", sw_frames, "frames JSONL")->required();
  sweep->add_option("--trace", sw_trace, "bandwidth trace")->required();
  sweep->add_option("--model", sw_model, "profiler model JSON")->required();
  sweep->add_option("--vary", sw_vary, "latency | bandwidth-scale");
  sweep->add_option("--values", sw_values, "comma-separated sweep values")->required();
  sweep->add_option("--out", sw_out, "sweep CSV path")->required();
  add_common(sweep, sw_common);

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return cmd_generate(gen_spec, gen_out, gen_tensor, gen_seed);
    if (profile_fit->parsed()) return cmd_profile_fit(fit_records, fit_k, fit_out);
    if (simulate->parsed()) {
      return cmd_simulate(sim_frames, sim_trace, sim_model, sim_common, sim_out, sim_summary,
                          sim_preds, sim_device_only);
    }
    if (sched->parsed()) {
      return cmd_schedule(sch_model, sch_common, sch_bandwidth, sch_props, sch_size);
    }
    if (evaluate->parsed()) return cmd_evaluate(eval_preds, eval_gt);
    if (sweep->parsed()) {
      return cmd_sweep(sw_frames, sw_trace, sw_model, sw_common, sw_vary, sw_values, sw_out);
    }
  } catch (const std::exception& e) {
    log_error(e.what());
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
