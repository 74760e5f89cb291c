#include "pbimpact/stats.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pbimpact/errors.hpp"

namespace pbimpact::stats {

namespace {

// Modified Lentz evaluation of the incomplete-beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return h;
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided(double t, double df) {
  if (std::isinf(t)) return 0.0;
  if (t == 0.0) return 1.0;
  return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

double student_t_cdf(double t, double df) {
  if (t == 0.0) return 0.5;
  const double tail = 0.5 * student_t_two_sided(t, df);
  return t > 0 ? 1.0 - tail : tail;
}

TestResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "pearson needs equal-length inputs");
  const std::size_t n = x.size();
  if (n < 3) throw Error(ErrorCode::TooFewPoints, "pearson needs at least 3 points");

  const double mx = mean_of(x), my = mean_of(y);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0) throw Error(ErrorCode::ZeroVariance, "pearson input has zero variance");

  const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  TestResult out;
  out.statistic = r;
  out.n = n;
  out.df = static_cast<double>(n - 2);
  if (std::fabs(r) >= 1.0) {
    out.p_value = 0.0;
  } else {
    const double t = r * std::sqrt(out.df) / std::sqrt(1.0 - r * r);
    out.p_value = student_t_two_sided(t, out.df);
  }
  return out;
}

TestResult paired_t_test(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "paired t-test needs equal-length inputs");
  const std::size_t n = x.size();
  if (n < 2) throw Error(ErrorCode::TooFewPoints, "paired t-test needs at least 2 pairs");

  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = x[i] - y[i];
  const double md = mean_of(d);
  double ss = 0;
  for (double v : d) ss += (v - md) * (v - md);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd == 0) throw Error(ErrorCode::ZeroVarianceDifferences, "paired differences have zero variance");

  TestResult out;
  out.n = n;
  out.df = static_cast<double>(n - 1);
  out.statistic = md / (sd / std::sqrt(static_cast<double>(n)));
  out.p_value = student_t_two_sided(out.statistic, out.df);
  return out;
}

OlsFit ols_fit(const std::vector<std::vector<double>>& predictors, std::span<const double> y) {
  const std::size_t n = predictors.size();
  if (n != y.size()) throw Error(ErrorCode::LengthMismatch, "predictor rows and responses differ in length");
  const std::size_t k = n == 0 ? 0 : predictors.front().size();
  if (n <= k + 1) throw Error(ErrorCode::TooFewRows, "need more rows than predictors + 1");

  Eigen::MatrixXd X(n, k + 1);
  Eigen::VectorXd Y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (predictors[i].size() != k) throw Error(ErrorCode::LengthMismatch, "ragged predictor matrix");
    X(i, 0) = 1.0;
    for (std::size_t j = 0; j < k; ++j) X(i, j + 1) = predictors[i][j];
    Y(i) = y[i];
  }

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < static_cast<Eigen::Index>(k + 1))
    throw Error(ErrorCode::RankDeficient, "design matrix is rank deficient");

  const Eigen::VectorXd beta = qr.solve(Y);
  const Eigen::VectorXd residual = Y - X * beta;
  const double sse = residual.squaredNorm();
  const double sst = (Y.array() - Y.mean()).matrix().squaredNorm();

  OlsFit fit;
  fit.n = n;
  fit.df_residual = static_cast<double>(n - k - 1);
  fit.r_squared = sst > 0 ? std::clamp(1.0 - sse / sst, 0.0, 1.0) : 1.0;

  // (X'X)^-1 = P R^-1 R^-T P'
  const auto p = static_cast<Eigen::Index>(k + 1);
  const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv = R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd perm = qr.colsPermutation();
  const Eigen::MatrixXd xtx_inv = perm * (r_inv * r_inv.transpose()) * perm.transpose();
  const double sigma2 = sse / fit.df_residual;

  double abs_sum = 0;
  for (Eigen::Index j = 1; j < p; ++j) abs_sum += std::fabs(beta(j));
  for (Eigen::Index j = 0; j < p; ++j) {
    const double se = std::sqrt(std::max(0.0, sigma2 * xtx_inv(j, j)));
    fit.coefficients.push_back(beta(j));
    fit.std_errors.push_back(se);
    if (se == 0) {
      fit.p_values.push_back(beta(j) == 0 ? 1.0 : 0.0);
    } else {
      fit.p_values.push_back(student_t_two_sided(beta(j) / se, fit.df_residual));
    }
    fit.relative_importance.push_back(j == 0 || abs_sum == 0 ? 0.0 : beta(j) / abs_sum);
  }
  return fit;
}

LossSummary summarize_losses(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "no loss values to summarize");
  LossSummary s;
  s.n = values.size();
  double sum = 0, sum_pos = 0, sum_neg = 0;
  unsigned long pos = 0, neg = 0;
  for (double v : values) {
    sum += v;
    if (v > 0) {
      ++pos;
      sum_pos += v;
    } else if (v < 0) {
      ++neg;
      sum_neg += v;
    }
  }
  s.pct_positive = Rational(pos, static_cast<unsigned long>(values.size()));
  s.pct_positive.canonicalize();
  s.mean = sum / static_cast<double>(values.size());
  if (pos) s.mean_positive = sum_pos / static_cast<double>(pos);
  if (neg) s.mean_negative = sum_neg / static_cast<double>(neg);
  return s;
}

}  // namespace pbimpact::stats
