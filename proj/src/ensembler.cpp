#include "hyperion/ensembler.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace hyperion {

namespace {

void check_threshold(double t, const char* where) {
  if (!(t > 0.0 && t <= 1.0)) {
    throw std::invalid_argument(std::string(where) + ": threshold must lie in (0, 1]");
  }
}

}  // namespace

MatchResult match_pairs(const std::vector<Detection>& edge, const std::vector<Detection>& cloud,
                        double iou_thresh) {
  check_threshold(iou_thresh, "match_pairs");
  struct Scored {
    double overlap;
    std::size_t e, c;
  };
  std::vector<Scored> scored;
  for (std::size_t e = 0; e < edge.size(); ++e) {
    for (std::size_t c = 0; c < cloud.size(); ++c) {
      double overlap = iou(edge[e], cloud[c]);
      if (overlap >= iou_thresh) scored.push_back({overlap, e, c});
    }
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    return std::tie(b.overlap, a.e, a.c) < std::tie(a.overlap, b.e, b.c);
  });

  MatchResult result;
  std::vector<bool> edge_used(edge.size(), false), cloud_used(cloud.size(), false);
  for (const Scored& s : scored) {
    if (edge_used[s.e] || cloud_used[s.c]) continue;
    edge_used[s.e] = true;
    cloud_used[s.c] = true;
    result.pairs.emplace_back(s.e, s.c);
  }
  for (std::size_t e = 0; e < edge.size(); ++e) {
    if (!edge_used[e]) result.unmatched_edge.push_back(e);
  }
  for (std::size_t c = 0; c < cloud.size(); ++c) {
    if (!cloud_used[c]) result.unmatched_cloud.push_back(c);
  }
  return result;
}

Detection fuse(const Detection& e, const Detection& c) {
  if (e.source != DetectionSource::edge || c.source != DetectionSource::cloud) {
    throw std::invalid_argument("fuse: expects an edge detection and a cloud detection");
  }
  double w_e = e.conf, w_c = c.conf;
  double w = w_e + w_c;
  if (!(w > 0.0)) throw std::invalid_argument("fuse: both confidences are zero");
  return Detection((e.x1 * w_e + c.x1 * w_c) / w, (e.y1 * w_e + c.y1 * w_c) / w,
                   (e.x2 * w_e + c.x2 * w_c) / w, (e.y2 * w_e + c.y2 * w_c) / w, w / 2.0,
                   DetectionSource::fused);
}

std::vector<Detection> nms(const std::vector<Detection>& dets, double iou_thresh) {
  check_threshold(iou_thresh, "nms");
  std::vector<std::size_t> order(dets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (dets[a].conf != dets[b].conf) return dets[a].conf > dets[b].conf;
    return a < b;
  });

  std::vector<Detection> kept;
  std::vector<bool> suppressed(dets.size(), false);
  for (std::size_t i : order) {
    if (suppressed[i]) continue;
    kept.push_back(dets[i]);
    for (std::size_t j : order) {
      if (j == i || suppressed[j]) continue;
      if (iou(dets[i], dets[j]) >= iou_thresh) suppressed[j] = true;
    }
  }
  return kept;
}

std::vector<Detection> ensemble(const std::vector<Detection>& edge,
                                const std::vector<Detection>& cloud, double match_thresh,
                                double nms_thresh) {
  MatchResult match = match_pairs(edge, cloud, match_thresh);
  std::vector<Detection> merged;
  merged.reserve(match.pairs.size() + match.unmatched_edge.size() + match.unmatched_cloud.size());
  for (const auto& [e, c] : match.pairs) merged.push_back(fuse(edge[e], cloud[c]));
  for (std::size_t e : match.unmatched_edge) merged.push_back(edge[e]);
  for (std::size_t c : match.unmatched_cloud) merged.push_back(cloud[c]);
  return nms(merged, nms_thresh);
}

}  // namespace hyperion
