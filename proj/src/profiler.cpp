#include "hyperion/profiler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hyperion/log.hpp"

namespace hyperion {

ProfilingRecord::ProfilingRecord(std::vector<int> quality, std::vector<double> proportion,
                                 double ratio, double accuracy)
    : per_class_quality(std::move(quality)),
      per_class_proportion(std::move(proportion)),
      observed_compression_ratio(ratio),
      observed_accuracy(accuracy) {
  if (per_class_quality.empty() || per_class_quality.size() != per_class_proportion.size()) {
    throw std::invalid_argument("ProfilingRecord: quality and proportion lengths must match");
  }
  double sum = 0.0;
  for (double w : per_class_proportion) {
    if (w < 0.0) throw std::invalid_argument("ProfilingRecord: proportions must be >= 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("ProfilingRecord: proportions must sum to 1 within 1e-9");
  }
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw std::invalid_argument("ProfilingRecord: compression ratio must lie in (0, 1]");
  }
  if (!(accuracy >= 0.0 && accuracy <= 1.0)) {
    throw std::invalid_argument("ProfilingRecord: accuracy must lie in [0, 1]");
  }
}

double weighted_average_quality(const std::vector<double>& proportions,
                                const std::vector<int>& qualities) {
  if (proportions.size() != qualities.size()) {
    throw std::invalid_argument("weighted_average_quality: length mismatch");
  }
  double mass = 0.0;
  for (std::size_t c = 0; c < proportions.size(); ++c) {
    mass += proportions[c] * static_cast<double>(qualities[c]);
  }
  return mass;
}

namespace {

// Solves A x = b by Gaussian elimination with partial pivoting. A zero pivot
// reports the offending column through `column_name`.
std::vector<double> solve_linear(std::vector<std::vector<double>> a, std::vector<double> b,
                                 const std::vector<std::string>& column_names) {
  std::size_t n = b.size();
  double scale = 0.0;
  for (const auto& row : a) {
    for (double v : row) scale = std::max(scale, std::abs(v));
  }
  double tol = std::max(scale, 1.0) * 1e-12;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) <= tol) {
      throw std::runtime_error("fit: rank-deficient design matrix, regressor '" +
                               column_names[col] + "' carries no independent variation");
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c2 = col; c2 < n; ++c2) a[r][c2] -= f * a[col][c2];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

double r_squared(const std::vector<double>& y, const std::vector<double>& fitted) {
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss_tot = 0.0, ss_res = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss_tot += (y[i] - mean) * (y[i] - mean);
    ss_res += (y[i] - fitted[i]) * (y[i] - fitted[i]);
  }
  if (ss_tot <= 1e-300) return ss_res <= 1e-300 ? 1.0 : 0.0;
  return std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
}

// Normal-equation OLS of y on the given columns plus an implicit intercept
// (last coefficient). One iterative refinement pass keeps the residuals
// orthogonal to the regressors to near machine precision.
std::vector<double> ols(const std::vector<std::vector<double>>& columns,
                        const std::vector<double>& y,
                        const std::vector<std::string>& column_names) {
  std::size_t p = columns.size() + 1;
  std::size_t n = y.size();

  // A constant regressor duplicates the intercept; name it up front instead
  // of letting the elimination blame whichever column pivots last.
  for (std::size_t j = 0; j + 1 < p; ++j) {
    double mean = 0.0;
    for (double v : columns[j]) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : columns[j]) var += (v - mean) * (v - mean);
    if (var <= 1e-18 * static_cast<double>(n) * std::max(1.0, mean * mean)) {
      throw std::runtime_error("fit: rank-deficient design matrix, regressor '" +
                               column_names[j] + "' carries no independent variation");
    }
  }
  auto col = [&](std::size_t j, std::size_t i) {
    return j + 1 < p ? columns[j][i] : 1.0;
  };
  std::vector<std::vector<double>> xtx(p, std::vector<double>(p, 0.0));
  std::vector<double> xty(p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      xty[j] += col(j, i) * y[i];
      for (std::size_t j2 = 0; j2 <= j; ++j2) xtx[j][j2] += col(j, i) * col(j2, i);
    }
  }
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t j2 = j + 1; j2 < p; ++j2) xtx[j][j2] = xtx[j2][j];
  }
  std::vector<double> beta = solve_linear(xtx, xty, column_names);
  std::vector<double> correction(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    double r = xty[j];
    for (std::size_t j2 = 0; j2 < p; ++j2) r -= xtx[j][j2] * beta[j2];
    correction[j] = r;
  }
  std::vector<double> delta = solve_linear(xtx, correction, column_names);
  for (std::size_t j = 0; j < p; ++j) beta[j] += delta[j];
  return beta;
}

}  // namespace

ProfilerModel fit(const std::vector<ProfilingRecord>& records, int k) {
  if (k < 1) throw std::invalid_argument("fit: k must be >= 1");
  if (records.size() < 2) throw std::invalid_argument("fit: need at least 2 records");
  if (records.size() < static_cast<std::size_t>(k) + 1) {
    throw std::invalid_argument("fit: accuracy model needs at least k+1 records");
  }
  for (const ProfilingRecord& r : records) {
    if (r.per_class_quality.size() != static_cast<std::size_t>(k)) {
      throw std::invalid_argument("fit: record class count does not match k");
    }
  }

  std::size_t n = records.size();
  std::vector<double> qbar(n), ratio(n), acc(n);
  std::vector<std::vector<double>> qcols(static_cast<std::size_t>(k), std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    qbar[i] = weighted_average_quality(records[i].per_class_proportion,
                                       records[i].per_class_quality);
    ratio[i] = records[i].observed_compression_ratio;
    acc[i] = records[i].observed_accuracy;
    for (int c = 0; c < k; ++c) {
      qcols[static_cast<std::size_t>(c)][i] =
          static_cast<double>(records[i].per_class_quality[static_cast<std::size_t>(c)]);
    }
  }

  ProfilerModel model;
  std::vector<double> size_beta =
      ols({qbar}, ratio, {"weighted_average_quality", "size_intercept"});
  model.alpha = size_beta[0];
  model.alpha_s = size_beta[1];

  std::vector<std::string> acc_names;
  for (int c = 0; c < k; ++c) acc_names.push_back("q_" + std::to_string(c));
  acc_names.push_back("accuracy_intercept");
  std::vector<double> acc_beta = ols(qcols, acc, acc_names);
  model.betas.assign(acc_beta.begin(), acc_beta.end() - 1);
  model.beta_a = acc_beta.back();

  std::vector<double> size_fit(n), acc_fit(n);
  for (std::size_t i = 0; i < n; ++i) {
    size_fit[i] = model.alpha * qbar[i] + model.alpha_s;
    double a = model.beta_a;
    for (int c = 0; c < k; ++c) a += model.betas[static_cast<std::size_t>(c)] * qcols[c][i];
    acc_fit[i] = a;
  }
  model.size_r2 = r_squared(ratio, size_fit);
  model.acc_r2 = r_squared(acc, acc_fit);

  for (int c = 0; c < k; ++c) {
    if (model.betas[static_cast<std::size_t>(c)] < 0.0) {
      log_warn("fit: negative accuracy coefficient beta_" + std::to_string(c) + " = " +
               std::to_string(model.betas[static_cast<std::size_t>(c)]));
    }
  }
  return model;
}

double predict_size(const ProfilerModel& m, const QualityPlan& plan,
                    const std::vector<double>& proportions, double s_o) {
  if (!plan.feasible) throw std::invalid_argument("predict_size: plan must be feasible");
  double ratio = m.alpha * weighted_average_quality(proportions, plan.per_class_quality) + m.alpha_s;
  return std::clamp(ratio * s_o, 0.0, s_o);
}

double predict_accuracy(const ProfilerModel& m, const QualityPlan& plan) {
  if (!plan.feasible) throw std::invalid_argument("predict_accuracy: plan must be feasible");
  if (plan.per_class_quality.size() != m.betas.size()) {
    throw std::invalid_argument("predict_accuracy: plan class count does not match model");
  }
  double a = m.beta_a;
  for (std::size_t c = 0; c < m.betas.size(); ++c) {
    a += m.betas[c] * static_cast<double>(plan.per_class_quality[c]);
  }
  return std::clamp(a, 0.0, 1.0);
}

}  // namespace hyperion
