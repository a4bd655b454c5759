#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "hyperion/core.hpp"

namespace hyperion {

struct MatchResult {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (edge_idx, cloud_idx)
  std::vector<std::size_t> unmatched_edge;
  std::vector<std::size_t> unmatched_cloud;
};

/// Greedy one-to-one matching in descending pair-IoU order; pairs require
/// IoU >= iou_thresh. Ties break by (edge_idx, cloud_idx).
MatchResult match_pairs(const std::vector<Detection>& edge, const std::vector<Detection>& cloud,
                        double iou_thresh);

/// Confidence-weighted corner average of an edge/cloud pair; fused
/// confidence is the mean of the two weights.
Detection fuse(const Detection& e, const Detection& c);

/// Classic greedy non-maximum suppression: sort by confidence descending
/// (ties by smaller index), keep, drop everything overlapping a kept box at
/// IoU >= iou_thresh.
std::vector<Detection> nms(const std::vector<Detection>& dets, double iou_thresh);

/// Full pipeline: match, fuse pairs, pass unmatched detections through
/// unchanged, then merge with nms. Absent cloud results degrade to
/// nms(edge).
std::vector<Detection> ensemble(const std::vector<Detection>& edge,
                                const std::vector<Detection>& cloud, double match_thresh,
                                double nms_thresh);

}  // namespace hyperion
