#include "hyperion/io.hpp"

#include <bit>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace hyperion::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

void append_u32_le(std::string& buf, std::uint32_t v) {
  buf.push_back(static_cast<char>(v & 0xff));
  buf.push_back(static_cast<char>((v >> 8) & 0xff));
  buf.push_back(static_cast<char>((v >> 16) & 0xff));
  buf.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t read_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

std::vector<TracePoint> load_trace(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<TracePoint> trace;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    double t = 0.0, bw = 0.0;
    char extra = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf %c", &t, &bw, &extra) != 2) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed trace line '" +
                               line + "'");
    }
    if (!trace.empty() && t <= trace.back().timestamp_ms) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": non-increasing timestamp " + std::to_string(t));
    }
    trace.push_back({t, bw});
  }
  return trace;
}

void save_trace(const std::vector<TracePoint>& trace, const std::string& path) {
  std::ofstream out = open_output(path);
  out << "# timestamp_ms,bandwidth_mbps\n";
  char buf[64];
  for (const TracePoint& p : trace) {
    std::snprintf(buf, sizeof(buf), "%.3f,%.6f\n", p.timestamp_ms, p.bandwidth_mbps);
    out << buf;
  }
}

void save_attention(const AttentionTensor& tensor, const std::string& path) {
  std::string buf;
  buf.reserve(32 + tensor.values.size() * 4);
  append_u32_le(buf, kAttentionMagic);
  append_u32_le(buf, kAttentionVersion);
  append_u32_le(buf, static_cast<std::uint32_t>(tensor.layers));
  append_u32_le(buf, static_cast<std::uint32_t>(tensor.heads));
  append_u32_le(buf, static_cast<std::uint32_t>(tensor.n));
  append_u32_le(buf, 0);
  append_u32_le(buf, 0);
  append_u32_le(buf, 0);
  for (float v : tensor.values) append_u32_le(buf, std::bit_cast<std::uint32_t>(v));
  std::ofstream out = open_output(path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

AttentionTensor load_attention(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (raw.size() < 32) throw std::runtime_error(path + ": truncated attention header");
  const unsigned char* p = reinterpret_cast<const unsigned char*>(raw.data());
  if (read_u32_le(p) != kAttentionMagic) throw std::runtime_error(path + ": bad attention magic");
  if (read_u32_le(p + 4) != kAttentionVersion) {
    throw std::runtime_error(path + ": unsupported attention version");
  }
  std::uint32_t layers = read_u32_le(p + 8);
  std::uint32_t heads = read_u32_le(p + 12);
  std::uint32_t n = read_u32_le(p + 16);
  std::size_t count = static_cast<std::size_t>(layers) * heads * n * n;
  if (raw.size() != 32 + count * 4) {
    throw std::runtime_error(path + ": attention payload size mismatch");
  }
  std::vector<float> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    values[i] = std::bit_cast<float>(read_u32_le(p + 32 + i * 4));
  }
  return AttentionTensor(static_cast<int>(layers), static_cast<int>(heads), static_cast<int>(n),
                         std::move(values));
}

namespace {

json detection_to_json(const Detection& d) {
  return json::array({d.x1, d.y1, d.x2, d.y2, d.conf});
}

Detection detection_from_json(const json& j, DetectionSource source, const FrameMeta& meta,
                              const std::string& field, std::size_t index) {
  if (!j.is_array() || j.size() != 5) {
    throw std::runtime_error(field + "[" + std::to_string(index) + "]: expected 5-element array");
  }
  double x1 = j[0].get<double>(), y1 = j[1].get<double>();
  double x2 = j[2].get<double>(), y2 = j[3].get<double>();
  double conf = j[4].get<double>();
  if (source == DetectionSource::ground_truth && conf != 1.0) {
    throw std::runtime_error(field + "[" + std::to_string(index) +
                             "]: ground-truth conf must be 1.0");
  }
  // Boxes are clamped to frame bounds on load.
  double w = meta.frame_width_px(), h = meta.frame_height_px();
  x1 = std::clamp(x1, 0.0, w);
  x2 = std::clamp(x2, 0.0, w);
  y1 = std::clamp(y1, 0.0, h);
  y2 = std::clamp(y2, 0.0, h);
  try {
    return Detection(x1, y1, x2, y2, conf, source);
  } catch (const std::exception& e) {
    throw std::runtime_error(field + "[" + std::to_string(index) + "]: " + e.what());
  }
}

std::vector<Detection> detections_from_json(const json& j, DetectionSource source,
                                            const FrameMeta& meta, const std::string& field) {
  std::vector<Detection> dets;
  for (std::size_t i = 0; i < j.size(); ++i) {
    dets.push_back(detection_from_json(j[i], source, meta, field, i));
  }
  return dets;
}

}  // namespace

std::vector<FrameRecord> load_frames(const std::string& path) {
  std::ifstream in = open_input(path);
  fs::path dir = fs::path(path).parent_path();
  std::vector<FrameRecord> frames;
  std::string line;
  std::size_t line_no = 0;
  bool have_prev = false;
  std::int64_t prev_id = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::int64_t current_id = -1;
    try {
      json j = json::parse(line);
      current_id = j.value("frame_id", std::int64_t{-1});
      FrameMeta meta(j.at("frame_id").get<std::int64_t>(), j.at("grid_rows").get<int>(),
                     j.at("grid_cols").get<int>(), j.at("patch_size_px").get<int>(),
                     j.at("original_size_bytes").get<std::int64_t>(),
                     j.at("capture_timestamp_ms").get<double>());
      if (have_prev && meta.frame_id <= prev_id) {
        throw std::runtime_error("frame_id does not strictly increase");
      }
      have_prev = true;
      prev_id = meta.frame_id;

      std::variant<AttentionTensor, std::vector<double>> attention = std::vector<double>{};
      if (j.contains("scores")) {
        auto scores = j.at("scores").get<std::vector<double>>();
        if (scores.size() != static_cast<std::size_t>(meta.patch_count())) {
          throw std::runtime_error("scores: length does not match grid_rows*grid_cols");
        }
        attention = std::move(scores);
      } else if (j.contains("attention_file")) {
        fs::path sidecar = dir / j.at("attention_file").get<std::string>();
        AttentionTensor tensor = load_attention(sidecar.string());
        if (tensor.n != meta.patch_count()) {
          throw std::runtime_error("attention_file: n does not match grid_rows*grid_cols");
        }
        attention = std::move(tensor);
      } else {
        throw std::runtime_error("record needs either 'scores' or 'attention_file'");
      }

      FrameRecord record{
          meta, std::move(attention),
          detections_from_json(j.value("edge_detections", json::array()), DetectionSource::edge,
                               meta, "edge_detections"),
          detections_from_json(j.value("ground_truth", json::array()),
                               DetectionSource::ground_truth, meta, "ground_truth"),
          detections_from_json(j.value("cloud_reference", json::array()), DetectionSource::cloud,
                               meta, "cloud_reference")};
      frames.push_back(std::move(record));
    } catch (const std::exception& e) {
      std::string frame_tag =
          current_id >= 0 ? " (frame " + std::to_string(current_id) + ")" : "";
      throw std::runtime_error(path + ":" + std::to_string(line_no) + frame_tag + ": " + e.what());
    }
  }
  return frames;
}

void save_frames(const std::vector<FrameRecord>& frames, const std::string& path) {
  std::ofstream out = open_output(path);
  fs::path p(path);
  fs::path dir = p.parent_path();
  std::string stem = p.stem().string();
  for (const FrameRecord& frame : frames) {
    json j;
    j["frame_id"] = frame.meta.frame_id;
    j["grid_rows"] = frame.meta.grid_rows;
    j["grid_cols"] = frame.meta.grid_cols;
    j["patch_size_px"] = frame.meta.patch_size_px;
    j["original_size_bytes"] = frame.meta.original_size_bytes;
    j["capture_timestamp_ms"] = frame.meta.capture_timestamp_ms;
    if (std::holds_alternative<std::vector<double>>(frame.attention)) {
      j["scores"] = std::get<std::vector<double>>(frame.attention);
    } else {
      std::string sidecar = stem + "_frame_" + std::to_string(frame.meta.frame_id) + ".attn";
      save_attention(std::get<AttentionTensor>(frame.attention), (dir / sidecar).string());
      j["attention_file"] = sidecar;
    }
    json edge = json::array(), gt = json::array(), cloud = json::array();
    for (const Detection& d : frame.edge_detections) edge.push_back(detection_to_json(d));
    for (const Detection& d : frame.ground_truth) gt.push_back(detection_to_json(d));
    for (const Detection& d : frame.cloud_reference) cloud.push_back(detection_to_json(d));
    j["edge_detections"] = std::move(edge);
    j["ground_truth"] = std::move(gt);
    j["cloud_reference"] = std::move(cloud);
    out << j.dump() << "\n";
  }
}

std::vector<ProfilingRecord> load_profiling_records(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<ProfilingRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      records.emplace_back(j.at("quality").get<std::vector<int>>(),
                           j.at("proportions").get<std::vector<double>>(),
                           j.at("ratio").get<double>(), j.at("accuracy").get<double>());
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

void save_profiling_records(const std::vector<ProfilingRecord>& records, const std::string& path) {
  std::ofstream out = open_output(path);
  for (const ProfilingRecord& r : records) {
    json j;
    j["quality"] = r.per_class_quality;
    j["proportions"] = r.per_class_proportion;
    j["ratio"] = r.observed_compression_ratio;
    j["accuracy"] = r.observed_accuracy;
    out << j.dump() << "\n";
  }
}

ProfilerModel load_model(const std::string& path) {
  std::ifstream in = open_input(path);
  json j = json::parse(in);
  ProfilerModel m;
  m.alpha = j.at("alpha").get<double>();
  m.alpha_s = j.at("alpha_s").get<double>();
  m.betas = j.at("betas").get<std::vector<double>>();
  m.beta_a = j.at("beta_a").get<double>();
  m.size_r2 = j.value("size_r2", 0.0);
  m.acc_r2 = j.value("acc_r2", 0.0);
  return m;
}

void save_model(const ProfilerModel& m, const std::string& path) {
  json j;
  j["alpha"] = m.alpha;
  j["alpha_s"] = m.alpha_s;
  j["betas"] = m.betas;
  j["beta_a"] = m.beta_a;
  j["size_r2"] = m.size_r2;
  j["acc_r2"] = m.acc_r2;
  std::ofstream out = open_output(path);
  out << j.dump(2) << "\n";
}

namespace {

void scorer_from_json(const json& j, ScorerConfig& scorer) {
  scorer.k = j.value("k", scorer.k);
  scorer.conf_threshold = j.value("conf_threshold", scorer.conf_threshold);
  scorer.jenks_sample_size = j.value("jenks_sample_size", scorer.jenks_sample_size);
  scorer.rng_seed = j.value("rng_seed", scorer.rng_seed);
  if (j.contains("importance_threshold")) {
    const json& t = j.at("importance_threshold");
    if (t.is_string() && t.get<std::string>() == "class_boundary") {
      scorer.importance_threshold = ImportanceThreshold::class_boundary();
    } else if (t.is_number()) {
      scorer.importance_threshold = ImportanceThreshold::explicit_value(t.get<double>());
    } else {
      throw std::runtime_error("scorer.importance_threshold: expected 'class_boundary' or number");
    }
  }
}

json scorer_to_json(const ScorerConfig& scorer) {
  json j;
  j["k"] = scorer.k;
  j["conf_threshold"] = scorer.conf_threshold;
  j["jenks_sample_size"] = scorer.jenks_sample_size;
  j["rng_seed"] = scorer.rng_seed;
  if (scorer.importance_threshold.mode == ImportanceThreshold::Mode::class_boundary) {
    j["importance_threshold"] = "class_boundary";
  } else {
    j["importance_threshold"] = scorer.importance_threshold.value;
  }
  return j;
}

SimConfig sim_config_from_json(const json& j) {
  SimConfig cfg;
  cfg.latency_budget_ms = j.value("latency_budget_ms", cfg.latency_budget_ms);
  cfg.device_latency_ms = j.value("device_latency_ms", cfg.device_latency_ms);
  cfg.cloud_latency_ms = j.value("cloud_latency_ms", cfg.cloud_latency_ms);
  cfg.scheduling_overhead_ms = j.value("scheduling_overhead_ms", cfg.scheduling_overhead_ms);
  cfg.return_latency_ms = j.value("return_latency_ms", cfg.return_latency_ms);
  cfg.bandwidth_window = j.value("bandwidth_window", cfg.bandwidth_window);
  cfg.bootstrap_bandwidth_mbps = j.value("bootstrap_bandwidth_mbps", cfg.bootstrap_bandwidth_mbps);
  cfg.dp_scale = j.value("dp_scale", cfg.dp_scale);
  if (j.contains("scorer")) scorer_from_json(j.at("scorer"), cfg.scorer);
  cfg.match_iou_threshold = j.value("match_iou_threshold", cfg.match_iou_threshold);
  cfg.nms_iou_threshold = j.value("nms_iou_threshold", cfg.nms_iou_threshold);
  if (j.contains("degrade")) {
    const json& d = j.at("degrade");
    cfg.degrade_coeffs.p_base = d.value("p_base", cfg.degrade_coeffs.p_base);
    cfg.degrade_coeffs.gamma = d.value("gamma", cfg.degrade_coeffs.gamma);
    cfg.degrade_coeffs.delta = d.value("delta", cfg.degrade_coeffs.delta);
  }
  if (j.contains("size_truth")) {
    const json& s = j.at("size_truth");
    cfg.size_truth.alpha = s.value("alpha", cfg.size_truth.alpha);
    cfg.size_truth.alpha_s = s.value("alpha_s", cfg.size_truth.alpha_s);
    cfg.size_truth.sigma = s.value("sigma", cfg.size_truth.sigma);
  }
  if (j.contains("palette")) cfg.palette = QualityPalette(j.at("palette").get<std::vector<int>>());
  cfg.rng_seed = j.value("seed", cfg.rng_seed);
  return cfg;
}

json sim_config_to_json(const SimConfig& cfg) {
  json j;
  j["latency_budget_ms"] = cfg.latency_budget_ms;
  j["device_latency_ms"] = cfg.device_latency_ms;
  j["cloud_latency_ms"] = cfg.cloud_latency_ms;
  j["scheduling_overhead_ms"] = cfg.scheduling_overhead_ms;
  j["return_latency_ms"] = cfg.return_latency_ms;
  j["bandwidth_window"] = cfg.bandwidth_window;
  j["bootstrap_bandwidth_mbps"] = cfg.bootstrap_bandwidth_mbps;
  j["dp_scale"] = cfg.dp_scale;
  j["scorer"] = scorer_to_json(cfg.scorer);
  j["match_iou_threshold"] = cfg.match_iou_threshold;
  j["nms_iou_threshold"] = cfg.nms_iou_threshold;
  j["degrade"] = {{"p_base", cfg.degrade_coeffs.p_base},
                  {"gamma", cfg.degrade_coeffs.gamma},
                  {"delta", cfg.degrade_coeffs.delta}};
  j["size_truth"] = {{"alpha", cfg.size_truth.alpha},
                     {"alpha_s", cfg.size_truth.alpha_s},
                     {"sigma", cfg.size_truth.sigma}};
  j["palette"] = cfg.palette.levels;
  j["seed"] = cfg.rng_seed;
  return j;
}

}  // namespace

SimConfig load_sim_config(const std::string& path) {
  std::ifstream in = open_input(path);
  try {
    return sim_config_from_json(json::parse(in));
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void save_sim_config(const SimConfig& cfg, const std::string& path) {
  std::ofstream out = open_output(path);
  out << sim_config_to_json(cfg).dump(2) << "\n";
}

GeneratorSpec load_generator_spec(const std::string& path) {
  std::ifstream in = open_input(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  GeneratorSpec spec;
  spec.n_frames = j.value("n_frames", spec.n_frames);
  spec.grid_rows = j.value("grid_rows", spec.grid_rows);
  spec.grid_cols = j.value("grid_cols", spec.grid_cols);
  spec.patch_size_px = j.value("patch_size_px", spec.patch_size_px);
  spec.layers = j.value("layers", spec.layers);
  spec.heads = j.value("heads", spec.heads);
  spec.emit_tensor = j.value("emit_tensor", spec.emit_tensor);
  spec.objects_per_frame = j.value("objects_per_frame", spec.objects_per_frame);
  spec.frame_interval_ms = j.value("frame_interval_ms", spec.frame_interval_ms);
  spec.original_size_bytes = j.value("original_size_bytes", spec.original_size_bytes);
  spec.attention_noise = j.value("attention_noise", spec.attention_noise);
  spec.edge_miss_small = j.value("edge_miss_small", spec.edge_miss_small);
  spec.edge_miss_large = j.value("edge_miss_large", spec.edge_miss_large);
  spec.edge_false_positive_rate = j.value("edge_false_positive_rate", spec.edge_false_positive_rate);
  spec.cloud_miss = j.value("cloud_miss", spec.cloud_miss);
  if (j.contains("trace_phases")) {
    spec.trace_phases.clear();
    for (const json& p : j.at("trace_phases")) {
      spec.trace_phases.push_back(
          {p.at("duration_ms").get<double>(), p.at("bandwidth_mbps").get<double>()});
    }
  }
  spec.trace_interval_ms = j.value("trace_interval_ms", spec.trace_interval_ms);
  if (j.contains("size_truth")) {
    const json& s = j.at("size_truth");
    spec.size_truth.alpha = s.value("alpha", spec.size_truth.alpha);
    spec.size_truth.alpha_s = s.value("alpha_s", spec.size_truth.alpha_s);
    spec.size_truth.sigma = s.value("sigma", spec.size_truth.sigma);
  }
  if (j.contains("acc_truth")) {
    const json& a = j.at("acc_truth");
    spec.acc_truth.betas = a.value("betas", spec.acc_truth.betas);
    spec.acc_truth.beta_a = a.value("beta_a", spec.acc_truth.beta_a);
    spec.acc_truth.sigma = a.value("sigma", spec.acc_truth.sigma);
  }
  if (j.contains("palette")) spec.palette = QualityPalette(j.at("palette").get<std::vector<int>>());
  spec.seed = j.value("seed", spec.seed);
  return spec;
}

void save_generator_spec(const GeneratorSpec& spec, const std::string& path) {
  json j;
  j["n_frames"] = spec.n_frames;
  j["grid_rows"] = spec.grid_rows;
  j["grid_cols"] = spec.grid_cols;
  j["patch_size_px"] = spec.patch_size_px;
  j["layers"] = spec.layers;
  j["heads"] = spec.heads;
  j["emit_tensor"] = spec.emit_tensor;
  j["objects_per_frame"] = spec.objects_per_frame;
  j["frame_interval_ms"] = spec.frame_interval_ms;
  j["original_size_bytes"] = spec.original_size_bytes;
  j["attention_noise"] = spec.attention_noise;
  j["edge_miss_small"] = spec.edge_miss_small;
  j["edge_miss_large"] = spec.edge_miss_large;
  j["edge_false_positive_rate"] = spec.edge_false_positive_rate;
  j["cloud_miss"] = spec.cloud_miss;
  json phases = json::array();
  for (const TracePhase& p : spec.trace_phases) {
    phases.push_back({{"duration_ms", p.duration_ms}, {"bandwidth_mbps", p.bandwidth_mbps}});
  }
  j["trace_phases"] = std::move(phases);
  j["trace_interval_ms"] = spec.trace_interval_ms;
  j["size_truth"] = {{"alpha", spec.size_truth.alpha},
                     {"alpha_s", spec.size_truth.alpha_s},
                     {"sigma", spec.size_truth.sigma}};
  j["acc_truth"] = {{"betas", spec.acc_truth.betas},
                    {"beta_a", spec.acc_truth.beta_a},
                    {"sigma", spec.acc_truth.sigma}};
  j["palette"] = spec.palette.levels;
  j["seed"] = spec.seed;
  std::ofstream out = open_output(path);
  out << j.dump(2) << "\n";
}

std::map<std::int64_t, std::vector<Detection>> load_detections(const std::string& path) {
  std::ifstream in = open_input(path);
  std::map<std::int64_t, std::vector<Detection>> by_frame;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      std::int64_t frame_id = j.at("frame_id").get<std::int64_t>();
      std::vector<Detection>& dets = by_frame[frame_id];
      if (j.contains("detections")) {
        for (const json& d : j.at("detections")) {
          DetectionSource source = d.size() >= 6
                                       ? detection_source_from_string(d[5].get<std::string>())
                                       : DetectionSource::fused;
          dets.emplace_back(d[0].get<double>(), d[1].get<double>(), d[2].get<double>(),
                            d[3].get<double>(), d[4].get<double>(), source);
        }
      } else if (j.contains("ground_truth")) {
        // Frames file: take its ground-truth lists.
        for (const json& d : j.at("ground_truth")) {
          dets.emplace_back(d[0].get<double>(), d[1].get<double>(), d[2].get<double>(),
                            d[3].get<double>(), d[4].get<double>(), DetectionSource::ground_truth);
        }
      } else {
        throw std::runtime_error("record needs 'detections' or 'ground_truth'");
      }
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return by_frame;
}

void save_detections(const std::map<std::int64_t, std::vector<Detection>>& by_frame,
                     const std::string& path) {
  std::ofstream out = open_output(path);
  for (const auto& [frame_id, dets] : by_frame) {
    json j;
    j["frame_id"] = frame_id;
    json arr = json::array();
    for (const Detection& d : dets) {
      arr.push_back(json::array({d.x1, d.y1, d.x2, d.y2, d.conf, to_string(d.source)}));
    }
    j["detections"] = std::move(arr);
    out << j.dump() << "\n";
  }
}

void write_outcomes_csv(const std::vector<FrameOutcome>& outcomes, int k,
                        double required_latency_ms, std::ostream& out) {
  out << "frame_id,latency_ms,deviation,offload_bytes,feasible,stale";
  for (int c = 0; c < k; ++c) out << ",q" << c;
  out << "\n";
  char buf[160];
  for (const FrameOutcome& o : outcomes) {
    double deviation = latency_deviation_rate(o.measured_latency_ms, required_latency_ms);
    std::snprintf(buf, sizeof(buf), "%lld,%.6f,%.6f,%lld,%d,%d",
                  static_cast<long long>(o.frame_id), o.measured_latency_ms, deviation,
                  static_cast<long long>(o.offloaded_bytes), o.plan.feasible ? 1 : 0,
                  o.used_stale ? 1 : 0);
    out << buf;
    for (int c = 0; c < k; ++c) {
      int q = o.plan.feasible ? o.plan.per_class_quality[static_cast<std::size_t>(c)] : 0;
      out << "," << q;
    }
    out << "\n";
  }
}

void save_outcomes_csv(const std::vector<FrameOutcome>& outcomes, int k,
                       double required_latency_ms, const std::string& path) {
  std::ofstream out = open_output(path);
  write_outcomes_csv(outcomes, k, required_latency_ms, out);
}

std::string summary_to_json(const Summary& s) {
  json j;
  j["ap50"] = s.ap50;
  j["mean_fps"] = s.mean_fps;
  j["mean_latency_ms"] = s.mean_latency_ms;
  j["total_offload_mb"] = s.total_offload_mb;
  j["mean_deviation"] = s.mean_deviation;
  j["fallback_ratio"] = s.fallback_ratio;
  return j.dump(2);
}

std::string format_summary_table(const Summary& s, std::size_t frame_count) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "frames            %10zu\n"
                "ap50              %10.4f\n"
                "mean fps          %10.3f\n"
                "mean latency ms   %10.3f\n"
                "total offload MB  %10.3f\n"
                "mean deviation    %10.4f\n"
                "fallback ratio    %10.4f\n",
                frame_count, s.ap50, s.mean_fps, s.mean_latency_ms, s.total_offload_mb,
                s.mean_deviation, s.fallback_ratio);
  return buf;
}

}  // namespace hyperion::io
