#pragma once

#include <cstdint>
#include <vector>

#include "hyperion/core.hpp"

namespace hyperion {

/// How the importance threshold used by class refinement is obtained: either
/// the fitted Jenks boundary between class 0 and class 1, or a fixed value.
struct ImportanceThreshold {
  enum class Mode { class_boundary, explicit_value };
  Mode mode = Mode::class_boundary;
  double value = 0.0;  // only read in explicit_value mode

  static ImportanceThreshold class_boundary() { return {Mode::class_boundary, 0.0}; }
  static ImportanceThreshold explicit_value(double v) { return {Mode::explicit_value, v}; }
};

struct ScorerConfig {
  int k = 3;
  double conf_threshold = 0.90;
  ImportanceThreshold importance_threshold;
  std::size_t jenks_sample_size = 1024;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

/// Averages attention mass received by each patch over layers, heads and
/// source patches. Output is non-negative and sums to 1 (softmax rows each
/// carry unit mass).
std::vector<double> aggregate_importance(const AttentionTensor& att);

/// Classification plus the fitted break values (upper score bound of classes
/// 0..effective_k-2 on the fitted sample). A score exactly equal to a break
/// joins the lower class.
struct JenksResult {
  PatchClassification classification;
  std::vector<double> breaks;
};

/// Fits Jenks Natural Breaks on a seeded uniform subsample of at most
/// sample_size scores (exact Fisher dynamic program, minimal within-class
/// squared deviation), then assigns every patch by boundary comparison.
/// Fewer distinct values than k degrades to effective_k classes.
JenksResult jenks_classify(const std::vector<double>& scores, int k, std::size_t sample_size,
                           std::uint64_t seed);

/// Reassigns to class 0 every patch whose score passes the importance
/// threshold and whose pixel rectangle overlaps an edge detection with
/// conf >= conf_threshold. Breaks come from the jenks fit and are only read
/// in class_boundary mode.
PatchClassification refine_classes(const PatchClassification& pc,
                                   const std::vector<Detection>& edge_dets, const FrameMeta& meta,
                                   const ScorerConfig& cfg, const std::vector<double>& breaks);

}  // namespace hyperion
