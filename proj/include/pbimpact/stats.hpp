#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pbimpact/rational.hpp"

namespace pbimpact::stats {

struct TestResult {
  double statistic = 0;
  double p_value = 1;
  double df = 1;
  std::size_t n = 0;
  bool operator==(const TestResult&) const = default;
};

struct OlsFit {
  std::vector<double> coefficients;  // intercept first
  std::vector<double> std_errors;
  std::vector<double> p_values;
  /// Signed coefficient / Σ|coefficients| over the predictors (intercept: 0).
  std::vector<double> relative_importance;
  double r_squared = 0;
  double df_residual = 0;
  std::size_t n = 0;
  bool operator==(const OlsFit&) const = default;
};

struct LossSummary {
  Rational pct_positive = 0;
  double mean = 0;
  std::optional<double> mean_positive;
  std::optional<double> mean_negative;
  std::size_t n = 0;
  bool operator==(const LossSummary&) const = default;
};

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

/// Student-t CDF with `df` degrees of freedom.
double student_t_cdf(double t, double df);

/// Two-sided p-value P(|T| >= |t|).
double student_t_two_sided(double t, double df);

/// Throws LengthMismatch, TooFewPoints (n < 3), ZeroVariance.
TestResult pearson(std::span<const double> x, std::span<const double> y);

/// Throws LengthMismatch, TooFewPoints (n < 2), ZeroVarianceDifferences.
TestResult paired_t_test(std::span<const double> x, std::span<const double> y);

/// Row-major n×k predictor matrix (no intercept column; one is added).
/// Throws TooFewRows (n <= k + 1), RankDeficient, LengthMismatch.
OlsFit ols_fit(const std::vector<std::vector<double>>& predictors, std::span<const double> y);

/// Throws EmptyInput.
LossSummary summarize_losses(std::span<const double> values);

}  // namespace pbimpact::stats
