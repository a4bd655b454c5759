#pragma once

#include <vector>

#include "hyperion/core.hpp"
#include "hyperion/scheduler.hpp"

// Deliberately simple and slow reference implementations, used only by
// tests to certify the production algorithms. They share core types with
// the main modules and nothing else.
namespace hyperion::oracles {

/// Enumerates every |Q|^K quality assignment, filters by the latency
/// constraint in plain floating-point arithmetic, and returns the objective
/// argmax under the scheduler's declared tie-break.
QualityPlan brute_force_schedule(const ScheduleContext& ctx);

/// Objective value of a feasible plan (beta_a + sum betas[c] * q_c).
double plan_objective(const ScheduleContext& ctx, const QualityPlan& plan);

struct JenksOracleResult {
  std::vector<double> breaks;  // upper value of classes 0..k-2
  double sdcm;                 // minimal within-class sum of squared deviations
};

/// Tries all C(n-1, k-1) break placements on the sorted scores. Guarded to
/// n <= 14.
JenksOracleResult brute_force_jenks(const std::vector<double>& scores, int k);

/// Within-class sum of squared deviations of an assignment, computed from
/// per-class means the straightforward way.
double sdcm_of_assignment(const std::vector<double>& scores, const std::vector<int>& classes,
                          int k);

/// Class labels induced by break values: first break >= score, equality
/// joining the lower class.
std::vector<int> assign_by_breaks(const std::vector<double>& scores,
                                  const std::vector<double>& breaks);

/// Naive average-precision reference: O(n^2) matching per frame, explicit
/// precision-recall walk.
double naive_ap50(const std::vector<std::vector<Detection>>& predictions,
                  const std::vector<std::vector<Detection>>& ground_truth);

}  // namespace hyperion::oracles
