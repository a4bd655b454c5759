#include "hyperion/generator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hyperion/rng.hpp"

namespace hyperion {

namespace {

constexpr std::uint64_t kStreamObjects = 0x4f424a53ull;
constexpr std::uint64_t kStreamAttention = 0x41545441ull;
constexpr std::uint64_t kStreamEdge = 0x45444745ull;
constexpr std::uint64_t kStreamCloud = 0x434c4f55ull;
constexpr std::uint64_t kStreamProfile = 0x50524f46ull;

// Planted per-patch importance levels, before normalization.
constexpr double kBackgroundLevel = 1.0;
constexpr double kObjectLevel = 5.0;
constexpr double kCoreLevel = 9.0;

struct PlantedObject {
  double x1, y1, x2, y2;
  bool small;
};

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

void GeneratorSpec::validate() const {
  if (n_frames < 1) throw std::invalid_argument("GeneratorSpec: n_frames must be >= 1");
  if (grid_rows < 4 || grid_cols < 4) {
    throw std::invalid_argument("GeneratorSpec: grid must be at least 4x4");
  }
  if (patch_size_px < 1) throw std::invalid_argument("GeneratorSpec: patch_size_px must be >= 1");
  if (layers < 1 || heads < 1) throw std::invalid_argument("GeneratorSpec: layers/heads must be >= 1");
  if (objects_per_frame < 1) {
    throw std::invalid_argument("GeneratorSpec: objects_per_frame must be >= 1");
  }
  if (frame_interval_ms <= 0.0 || trace_interval_ms <= 0.0) {
    throw std::invalid_argument("GeneratorSpec: intervals must be > 0");
  }
  if (original_size_bytes <= 0) {
    throw std::invalid_argument("GeneratorSpec: original_size_bytes must be > 0");
  }
  if (trace_phases.empty()) throw std::invalid_argument("GeneratorSpec: need at least one phase");
  for (const TracePhase& p : trace_phases) {
    if (p.duration_ms <= 0.0 || p.bandwidth_mbps <= 0.0) {
      throw std::invalid_argument("GeneratorSpec: phases need positive duration and bandwidth");
    }
  }
}

namespace {

std::vector<PlantedObject> plant_objects(const GeneratorSpec& spec, Rng& rng) {
  double w = static_cast<double>(spec.grid_cols) * spec.patch_size_px;
  double h = static_cast<double>(spec.grid_rows) * spec.patch_size_px;
  double p = static_cast<double>(spec.patch_size_px);
  std::vector<PlantedObject> objects;
  for (int i = 0; i < spec.objects_per_frame; ++i) {
    bool small = rng.uniform01() < 0.5;
    double half_w = small ? rng.uniform(0.35, 0.8) * p : rng.uniform(1.2, 2.6) * p;
    double half_h = small ? rng.uniform(0.35, 0.8) * p : rng.uniform(1.2, 2.6) * p;
    // Small grids cannot host the largest objects; shrink so the center
    // draw below stays a valid range and boxes stay inside the frame.
    half_w = std::min(half_w, 0.45 * w);
    half_h = std::min(half_h, 0.45 * h);
    double cx = rng.uniform(half_w, w - half_w);
    double cy = rng.uniform(half_h, h - half_h);
    objects.push_back({cx - half_w, cy - half_h, cx + half_w, cy + half_h, small});
  }
  return objects;
}

// Three planted levels: background, object-covered, and object-center
// patches. Returned unnormalized.
std::vector<double> planted_levels(const GeneratorSpec& spec,
                                   const std::vector<PlantedObject>& objects) {
  int n = spec.grid_rows * spec.grid_cols;
  double p = static_cast<double>(spec.patch_size_px);
  std::vector<double> level(static_cast<std::size_t>(n), kBackgroundLevel);
  for (const PlantedObject& obj : objects) {
    int col0 = std::clamp(static_cast<int>(std::floor(obj.x1 / p)), 0, spec.grid_cols - 1);
    int col1 = std::clamp(static_cast<int>(std::ceil(obj.x2 / p)) - 1, 0, spec.grid_cols - 1);
    int row0 = std::clamp(static_cast<int>(std::floor(obj.y1 / p)), 0, spec.grid_rows - 1);
    int row1 = std::clamp(static_cast<int>(std::ceil(obj.y2 / p)) - 1, 0, spec.grid_rows - 1);
    for (int r = row0; r <= row1; ++r) {
      for (int c = col0; c <= col1; ++c) {
        std::size_t idx = static_cast<std::size_t>(r * spec.grid_cols + c);
        level[idx] = std::max(level[idx], kObjectLevel);
      }
    }
    int ccol = std::clamp(static_cast<int>((obj.x1 + obj.x2) / 2.0 / p), 0, spec.grid_cols - 1);
    int crow = std::clamp(static_cast<int>((obj.y1 + obj.y2) / 2.0 / p), 0, spec.grid_rows - 1);
    level[static_cast<std::size_t>(crow * spec.grid_cols + ccol)] = kCoreLevel;
  }
  return level;
}

std::vector<double> normalized_scores(const std::vector<double>& level) {
  double total = 0.0;
  for (double v : level) total += v;
  std::vector<double> scores(level.size());
  for (std::size_t i = 0; i < level.size(); ++i) scores[i] = level[i] / total;
  return scores;
}

// Every (layer, head, from) row is the normalized level vector, optionally
// jittered per row, so column-aggregated importance reproduces the planted
// levels.
AttentionTensor build_tensor(const GeneratorSpec& spec, const std::vector<double>& level,
                             Rng& rng) {
  int n = spec.grid_rows * spec.grid_cols;
  std::size_t nn = static_cast<std::size_t>(n);
  std::vector<float> values(static_cast<std::size_t>(spec.layers) * spec.heads * nn * nn);
  std::vector<double> row(nn);
  std::size_t offset = 0;
  for (int l = 0; l < spec.layers; ++l) {
    for (int h = 0; h < spec.heads; ++h) {
      for (int from = 0; from < n; ++from) {
        double total = 0.0;
        for (std::size_t to = 0; to < nn; ++to) {
          double v = level[to];
          if (spec.attention_noise > 0.0) {
            v = std::max(1e-9, v * (1.0 + rng.uniform(-spec.attention_noise, spec.attention_noise)));
          }
          row[to] = v;
          total += v;
        }
        for (std::size_t to = 0; to < nn; ++to) {
          values[offset + to] = static_cast<float>(row[to] / total);
        }
        offset += nn;
      }
    }
  }
  return AttentionTensor(spec.layers, spec.heads, n, std::move(values));
}

std::vector<double> scores_with_noise(const GeneratorSpec& spec, const std::vector<double>& level,
                                      Rng& rng) {
  if (spec.attention_noise <= 0.0) return normalized_scores(level);
  std::vector<double> noisy(level.size());
  for (std::size_t i = 0; i < level.size(); ++i) {
    noisy[i] = std::max(1e-9, level[i] * (1.0 + rng.uniform(-spec.attention_noise,
                                                            spec.attention_noise)));
  }
  return normalized_scores(noisy);
}

}  // namespace

Scenario generate_scenario(const GeneratorSpec& spec) {
  spec.validate();
  Scenario scenario;
  scenario.size_truth = spec.size_truth;
  scenario.acc_truth = spec.acc_truth;

  double frame_w = static_cast<double>(spec.grid_cols) * spec.patch_size_px;
  double frame_h = static_cast<double>(spec.grid_rows) * spec.patch_size_px;

  for (int f = 0; f < spec.n_frames; ++f) {
    std::uint64_t frame_seed = mix_seed(spec.seed, static_cast<std::uint64_t>(f));
    Rng obj_rng(mix_seed(frame_seed, kStreamObjects));
    Rng att_rng(mix_seed(frame_seed, kStreamAttention));
    Rng edge_rng(mix_seed(frame_seed, kStreamEdge));
    Rng cloud_rng(mix_seed(frame_seed, kStreamCloud));

    std::vector<PlantedObject> objects = plant_objects(spec, obj_rng);
    std::vector<double> level = planted_levels(spec, objects);

    FrameMeta meta(f, spec.grid_rows, spec.grid_cols, spec.patch_size_px,
                   spec.original_size_bytes, static_cast<double>(f) * spec.frame_interval_ms);

    std::vector<Detection> ground_truth, edge_dets, cloud_dets;
    // Confidence saturates around a 3.5-patch-square object; large objects
    // come out confidently detected, small ones stay uncertain.
    double max_area = 12.25 * spec.patch_size_px * spec.patch_size_px;
    for (const PlantedObject& obj : objects) {
      ground_truth.emplace_back(obj.x1, obj.y1, obj.x2, obj.y2, 1.0,
                                DetectionSource::ground_truth);

      double miss = obj.small ? spec.edge_miss_small : spec.edge_miss_large;
      if (edge_rng.uniform01() >= miss) {
        double area = (obj.x2 - obj.x1) * (obj.y2 - obj.y1);
        double size_frac = std::min(1.0, area / max_area);
        double conf = std::clamp(0.5 + 0.45 * std::sqrt(size_frac) + edge_rng.normal(0.0, 0.07),
                                 0.05, 0.99);
        double jitter = 0.04 * std::sqrt(area);
        double x1 = std::clamp(obj.x1 + edge_rng.normal(0.0, jitter), 0.0, frame_w);
        double y1 = std::clamp(obj.y1 + edge_rng.normal(0.0, jitter), 0.0, frame_h);
        double x2 = std::clamp(obj.x2 + edge_rng.normal(0.0, jitter), 0.0, frame_w);
        double y2 = std::clamp(obj.y2 + edge_rng.normal(0.0, jitter), 0.0, frame_h);
        if (x1 > x2) std::swap(x1, x2);
        if (y1 > y2) std::swap(y1, y2);
        edge_dets.emplace_back(x1, y1, x2, y2, conf, DetectionSource::edge);
      }

      if (cloud_rng.uniform01() >= spec.cloud_miss) {
        double area = (obj.x2 - obj.x1) * (obj.y2 - obj.y1);
        double jitter = 0.01 * std::sqrt(area);
        double x1 = std::clamp(obj.x1 + cloud_rng.normal(0.0, jitter), 0.0, frame_w);
        double y1 = std::clamp(obj.y1 + cloud_rng.normal(0.0, jitter), 0.0, frame_h);
        double x2 = std::clamp(obj.x2 + cloud_rng.normal(0.0, jitter), 0.0, frame_w);
        double y2 = std::clamp(obj.y2 + cloud_rng.normal(0.0, jitter), 0.0, frame_h);
        if (x1 > x2) std::swap(x1, x2);
        if (y1 > y2) std::swap(y1, y2);
        double conf = std::clamp(cloud_rng.normal(0.9, 0.04), 0.5, 0.99);
        cloud_dets.emplace_back(x1, y1, x2, y2, conf, DetectionSource::cloud);
      }
    }
    if (edge_rng.uniform01() < spec.edge_false_positive_rate) {
      double p = static_cast<double>(spec.patch_size_px);
      double bw = edge_rng.uniform(0.5, 1.5) * p;
      double bh = edge_rng.uniform(0.5, 1.5) * p;
      double x1 = edge_rng.uniform(0.0, frame_w - bw);
      double y1 = edge_rng.uniform(0.0, frame_h - bh);
      edge_dets.emplace_back(x1, y1, x1 + bw, y1 + bh, edge_rng.uniform(0.1, 0.4),
                             DetectionSource::edge);
    }

    FrameRecord record{meta,
                       spec.emit_tensor
                           ? std::variant<AttentionTensor, std::vector<double>>(
                                 build_tensor(spec, normalized_scores(level), att_rng))
                           : std::variant<AttentionTensor, std::vector<double>>(
                                 scores_with_noise(spec, level, att_rng)),
                       std::move(edge_dets), std::move(ground_truth), std::move(cloud_dets)};
    scenario.frames.push_back(std::move(record));
  }

  // Phase-wise constant trace. The last phase is extended so the trace
  // always covers every frame's transmission start.
  double needed = static_cast<double>(spec.n_frames) * spec.frame_interval_ms + 60'000.0;
  double t = 0.0;
  double covered = 0.0;
  for (std::size_t i = 0; i < spec.trace_phases.size(); ++i) {
    const TracePhase& phase = spec.trace_phases[i];
    double end = covered + phase.duration_ms;
    if (i + 1 == spec.trace_phases.size()) end = std::max(end, needed);
    while (t < end) {
      scenario.trace.push_back({t, phase.bandwidth_mbps});
      t += spec.trace_interval_ms;
    }
    covered = end;
  }
  scenario.trace.push_back({t, spec.trace_phases.back().bandwidth_mbps});
  return scenario;
}

std::vector<ProfilingRecord> generate_profiling_records(const GeneratorSpec& spec, int k) {
  spec.validate();
  if (k < 1) throw std::invalid_argument("generate_profiling_records: k must be >= 1");
  if (spec.acc_truth.betas.size() != static_cast<std::size_t>(k)) {
    throw std::invalid_argument("generate_profiling_records: acc_truth betas must have k entries");
  }
  Rng rng(mix_seed(spec.seed, kStreamProfile));
  std::vector<ProfilingRecord> records;

  std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
  while (true) {
    std::vector<int> quality(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) {
      quality[static_cast<std::size_t>(c)] = spec.palette.levels[idx[static_cast<std::size_t>(c)]];
    }
    // Background-heavy proportions, the typical wide-view distribution.
    std::vector<double> w(static_cast<std::size_t>(k));
    double rest = 1.0;
    for (int c = 0; c + 1 < k; ++c) {
      double share = c == 0 ? rng.uniform(0.55, 0.85) : rng.uniform(0.2, 0.7);
      w[static_cast<std::size_t>(c)] = rest * share;
      rest -= w[static_cast<std::size_t>(c)];
    }
    w[static_cast<std::size_t>(k - 1)] = rest;

    double qbar = weighted_average_quality(w, quality);
    double ratio = spec.size_truth.alpha * qbar + spec.size_truth.alpha_s;
    if (spec.size_truth.sigma > 0.0) ratio += rng.normal(0.0, spec.size_truth.sigma);
    ratio = std::clamp(ratio, 1e-6, 1.0);

    double acc = spec.acc_truth.beta_a;
    for (int c = 0; c < k; ++c) {
      acc += spec.acc_truth.betas[static_cast<std::size_t>(c)] *
             static_cast<double>(quality[static_cast<std::size_t>(c)]);
    }
    if (spec.acc_truth.sigma > 0.0) acc += rng.normal(0.0, spec.acc_truth.sigma);
    acc = clamp01(acc);

    records.emplace_back(std::move(quality), std::move(w), ratio, acc);

    std::size_t c = static_cast<std::size_t>(k);
    bool done = false;
    while (c > 0) {
      --c;
      if (++idx[c] < spec.palette.levels.size()) break;
      idx[c] = 0;
      if (c == 0) done = true;
    }
    if (done) break;
  }
  return records;
}

}  // namespace hyperion
