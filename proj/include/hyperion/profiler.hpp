#pragma once

#include <vector>

#include "hyperion/core.hpp"

namespace hyperion {

/// One offline profiling observation: a quality assignment per class, the
/// class proportions of the profiled frame, and the measured outcomes.
struct ProfilingRecord {
  std::vector<int> per_class_quality;
  std::vector<double> per_class_proportion;
  double observed_compression_ratio;  // (0, 1]
  double observed_accuracy;           // [0, 1]

  ProfilingRecord(std::vector<int> quality, std::vector<double> proportion, double ratio,
                  double accuracy);
};

/// Fitted coefficients. Size model: ratio = alpha * weighted_avg_quality +
/// alpha_s. Accuracy model: acc = sum_c betas[c] * q_c + beta_a.
struct ProfilerModel {
  double alpha = 0.0;
  double alpha_s = 0.0;
  std::vector<double> betas;
  double beta_a = 0.0;
  double size_r2 = 0.0;
  double acc_r2 = 0.0;
};

/// Sum_c proportions[c] * qualities[c], accumulated in class order.
double weighted_average_quality(const std::vector<double>& proportions,
                                const std::vector<int>& qualities);

/// Ordinary least squares via normal equations for both models. Throws on a
/// rank-deficient design, naming the deficient regressor.
ProfilerModel fit(const std::vector<ProfilingRecord>& records, int k);

/// Modeled compressed size in bytes, clamped to [0, s_o].
double predict_size(const ProfilerModel& m, const QualityPlan& plan,
                    const std::vector<double>& proportions, double s_o);

/// Modeled accuracy, clamped to [0, 1].
double predict_accuracy(const ProfilerModel& m, const QualityPlan& plan);

}  // namespace hyperion
