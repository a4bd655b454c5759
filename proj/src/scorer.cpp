#include "hyperion/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "hyperion/rng.hpp"

namespace hyperion {

void ScorerConfig::validate() const {
  if (k < 2) throw std::invalid_argument("ScorerConfig: k must be >= 2");
  if (!(conf_threshold > 0.0 && conf_threshold <= 1.0)) {
    throw std::invalid_argument("ScorerConfig: conf_threshold must lie in (0, 1]");
  }
  if (jenks_sample_size < static_cast<std::size_t>(k)) {
    throw std::invalid_argument("ScorerConfig: jenks_sample_size must be >= k");
  }
}

std::vector<double> aggregate_importance(const AttentionTensor& att) {
  std::size_t n = static_cast<std::size_t>(att.n);
  std::vector<double> scores(n, 0.0);
  // Column sums: attention received by each patch, accumulated over every
  // (layer, head, from) row.
  for (int l = 0; l < att.layers; ++l) {
    for (int h = 0; h < att.heads; ++h) {
      for (int from = 0; from < att.n; ++from) {
        const float* row = &att.values[((static_cast<std::size_t>(l) * att.heads + h) * n +
                                        static_cast<std::size_t>(from)) * n];
        for (std::size_t to = 0; to < n; ++to) scores[to] += row[to];
      }
    }
  }
  double denom = static_cast<double>(att.layers) * att.heads * att.n;
  for (double& s : scores) s /= denom;
  return scores;
}

namespace {

// Exact Fisher-Jenks dynamic program on sorted values: partition into k
// contiguous classes minimizing the within-class sum of squared deviations.
// Returns the upper value of classes 0..k-2.
std::vector<double> fit_breaks(const std::vector<double>& sorted, int k) {
  int m = static_cast<int>(sorted.size());
  std::vector<double> s1(m + 1, 0.0), s2(m + 1, 0.0);
  for (int i = 0; i < m; ++i) {
    s1[i + 1] = s1[i] + sorted[i];
    s2[i + 1] = s2[i] + sorted[i] * sorted[i];
  }
  auto sse = [&](int a, int b) {  // inclusive range [a, b]
    double sum = s1[b + 1] - s1[a];
    double sq = s2[b + 1] - s2[a];
    double cnt = static_cast<double>(b - a + 1);
    return sq - sum * sum / cnt;
  };

  const double inf = std::numeric_limits<double>::infinity();
  // cost[c][j]: minimal SSE splitting sorted[0..j] into c+1 classes.
  std::vector<std::vector<double>> cost(k, std::vector<double>(m, inf));
  std::vector<std::vector<int>> split(k, std::vector<int>(m, 0));
  for (int j = 0; j < m; ++j) cost[0][j] = sse(0, j);
  for (int c = 1; c < k; ++c) {
    for (int j = c; j < m; ++j) {
      for (int i = c; i <= j; ++i) {  // class c spans sorted[i..j]
        double candidate = cost[c - 1][i - 1] + sse(i, j);
        if (candidate < cost[c][j]) {
          cost[c][j] = candidate;
          split[c][j] = i;
        }
      }
    }
  }

  std::vector<double> breaks(static_cast<std::size_t>(k - 1));
  int j = m - 1;
  for (int c = k - 1; c >= 1; --c) {
    int i = split[c][j];
    breaks[static_cast<std::size_t>(c - 1)] = sorted[i - 1];
    j = i - 1;
  }
  return breaks;
}

std::vector<double> draw_sample(const std::vector<double>& scores, std::size_t sample_size,
                                std::uint64_t seed) {
  if (scores.size() <= sample_size) return scores;
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(mix_seed(seed, 0x4a454e4bull));  // "JENK"
  std::vector<double> sample(sample_size);
  for (std::size_t i = 0; i < sample_size; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.bounded(idx.size() - i));
    std::swap(idx[i], idx[j]);
    sample[i] = scores[idx[i]];
  }
  return sample;
}

}  // namespace

JenksResult jenks_classify(const std::vector<double>& scores, int k, std::size_t sample_size,
                           std::uint64_t seed) {
  if (scores.empty()) throw std::invalid_argument("jenks_classify: scores must be non-empty");
  if (k < 1) throw std::invalid_argument("jenks_classify: k must be >= 1");
  if (sample_size < static_cast<std::size_t>(k)) {
    throw std::invalid_argument("jenks_classify: sample_size must be >= k");
  }

  std::vector<double> sample = draw_sample(scores, sample_size, seed);
  std::sort(sample.begin(), sample.end());
  int distinct = 1;
  for (std::size_t i = 1; i < sample.size(); ++i) {
    if (sample[i] != sample[i - 1]) ++distinct;
  }
  int effective_k = std::min(k, distinct);
  std::vector<double> breaks = fit_breaks(sample, effective_k);

  std::vector<int> classes(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    // First break >= score; equality joins the lower class.
    auto it = std::lower_bound(breaks.begin(), breaks.end(), scores[i]);
    classes[i] = static_cast<int>(it - breaks.begin());
  }
  return JenksResult{PatchClassification(scores, std::move(classes), k, effective_k),
                     std::move(breaks)};
}

namespace {

double resolve_importance_threshold(const ScorerConfig& cfg, const std::vector<double>& breaks) {
  if (cfg.importance_threshold.mode == ImportanceThreshold::Mode::explicit_value) {
    return cfg.importance_threshold.value;
  }
  if (breaks.empty()) return std::numeric_limits<double>::infinity();
  return breaks.front();  // boundary between class 0 and class 1
}

}  // namespace

PatchClassification refine_classes(const PatchClassification& pc,
                                   const std::vector<Detection>& edge_dets, const FrameMeta& meta,
                                   const ScorerConfig& cfg, const std::vector<double>& breaks) {
  cfg.validate();
  if (pc.scores.size() != static_cast<std::size_t>(meta.patch_count())) {
    throw std::invalid_argument("refine_classes: classification size does not match frame grid");
  }
  double t_i = resolve_importance_threshold(cfg, breaks);
  double w = meta.frame_width_px();
  double h = meta.frame_height_px();
  double p = static_cast<double>(meta.patch_size_px);

  // Confident edge detections, clamped to frame bounds.
  std::vector<Detection> boxes;
  for (const Detection& d : edge_dets) {
    if (d.conf < cfg.conf_threshold) continue;
    double bx1 = std::clamp(d.x1, 0.0, w);
    double by1 = std::clamp(d.y1, 0.0, h);
    double bx2 = std::clamp(d.x2, 0.0, w);
    double by2 = std::clamp(d.y2, 0.0, h);
    if (bx2 > bx1 && by2 > by1) boxes.emplace_back(bx1, by1, bx2, by2, d.conf, d.source);
  }

  std::vector<int> classes = pc.classes;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i] == 0) continue;
    if (pc.scores[i] < t_i) continue;
    int row = static_cast<int>(i) / meta.grid_cols;
    int col = static_cast<int>(i) % meta.grid_cols;
    double px1 = col * p, py1 = row * p, px2 = px1 + p, py2 = py1 + p;
    for (const Detection& b : boxes) {
      bool overlaps = std::min(px2, b.x2) > std::max(px1, b.x1) &&
                      std::min(py2, b.y2) > std::max(py1, b.y1);
      if (overlaps) {
        classes[i] = 0;
        break;
      }
    }
  }
  return PatchClassification(pc.scores, std::move(classes), pc.k, pc.effective_k);
}

}  // namespace hyperion
