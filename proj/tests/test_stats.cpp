#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <random>

#include "doctest.h"
#include "pbimpact/errors.hpp"
#include "pbimpact/stats.hpp"

using namespace pbimpact;
using namespace pbimpact::stats;
using doctest::Approx;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::UsageError;
}

}  // namespace

TEST_CASE("incomplete beta against boost") {
  for (double a : {0.5, 1.0, 2.5, 10.0, 40.0})
    for (double b : {0.5, 1.0, 3.0, 25.0})
      for (double x : {0.0, 0.01, 0.2, 0.5, 0.77, 0.999, 1.0}) {
        CAPTURE(a);
        CAPTURE(b);
        CAPTURE(x);
        CHECK(incomplete_beta(a, b, x) == Approx(boost::math::ibeta(a, b, x)).epsilon(1e-10));
      }
}

TEST_CASE("student t against boost") {
  for (double df : {1.0, 2.0, 3.5, 10.0, 120.0, 5000.0}) {
    const boost::math::students_t dist(df);
    for (double t : {-30.0, -4.0, -1.0, -0.1, 0.0, 0.3, 2.0, 8.0}) {
      CAPTURE(df);
      CAPTURE(t);
      CHECK(student_t_cdf(t, df) == Approx(boost::math::cdf(dist, t)).epsilon(1e-9));
      CHECK(student_t_two_sided(t, df) ==
            Approx(2 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)))).epsilon(1e-9));
    }
  }
}

TEST_CASE("pearson closed form") {
  const double x[] = {1, 2, 3}, y[] = {3, 1, 2};
  const auto r = pearson(x, y);
  CHECK(r.statistic == Approx(-0.5).epsilon(1e-12));
  CHECK(r.p_value == Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(r.df == 1);
  CHECK(r.n == 3);

  const double line[] = {2, 4, 6};
  CHECK(pearson(x, line).statistic == Approx(1.0));
  CHECK(pearson(x, line).p_value == 0);

  const double flat[] = {1, 1, 1};
  CHECK(code_of([&] { pearson(x, flat); }) == ErrorCode::ZeroVariance);
  CHECK(code_of([&] { pearson(std::span(x, 2), std::span(y, 2)); }) == ErrorCode::TooFewPoints);
  CHECK(code_of([&] { pearson(x, std::span(y, 2)); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("paired t closed form") {
  const double x[] = {1, 2, 3}, y[] = {2, 4, 6};
  const auto t = paired_t_test(x, y);
  CHECK(t.statistic == Approx(-2 * std::sqrt(3.0)).epsilon(1e-12));
  CHECK(t.p_value == Approx(1 - 2 * std::sqrt(3.0) / std::sqrt(14.0)).epsilon(1e-9));
  CHECK(t.df == 2);
  const double z[] = {2, 3, 4};
  CHECK(code_of([&] { paired_t_test(x, z); }) == ErrorCode::ZeroVarianceDifferences);
}

TEST_CASE("ols simple regression") {
  const std::vector<std::vector<double>> xs = {{0}, {1}, {2}, {3}};
  const double ys[] = {1, 2, 2, 3};
  const auto fit = ols_fit(xs, ys);
  CHECK(fit.coefficients[0] == Approx(1.1).epsilon(1e-12));
  CHECK(fit.coefficients[1] == Approx(0.6).epsilon(1e-12));
  CHECK(fit.r_squared == Approx(0.9).epsilon(1e-12));
  CHECK(fit.std_errors[1] == Approx(std::sqrt(0.1 / 5)).epsilon(1e-10));
  CHECK(fit.std_errors[0] == Approx(std::sqrt(0.07)).epsilon(1e-10));
  const boost::math::students_t dist(2);
  const double t1 = 0.6 / std::sqrt(0.02);
  CHECK(fit.p_values[1] == Approx(2 * boost::math::cdf(boost::math::complement(dist, t1))).epsilon(1e-9));
  CHECK(fit.relative_importance == std::vector<double>{0.0, 1.0});
  CHECK(fit.df_residual == 2);
}

TEST_CASE("ols agrees with the normal equations") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0, 0.5);
  std::bernoulli_distribution coin(0.5);
  const int n = 40, k = 4;
  std::vector<std::vector<double>> xs(n, std::vector<double>(k));
  std::vector<double> ys(n);
  Eigen::MatrixXd X(n, k + 1);
  Eigen::VectorXd Y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = 1;
    double y = 0.3;
    for (int j = 0; j < k; ++j) {
      xs[i][j] = coin(rng) ? 1 : 0;
      X(i, j + 1) = xs[i][j];
      y += (j + 1) * 0.1 * xs[i][j];
    }
    ys[i] = y + noise(rng);
    Y(i) = ys[i];
  }
  const auto fit = ols_fit(xs, ys);
  const Eigen::MatrixXd xtx = X.transpose() * X;
  const Eigen::VectorXd beta = xtx.ldlt().solve(X.transpose() * Y);
  const Eigen::MatrixXd inv = xtx.inverse();
  const double sigma2 = (Y - X * beta).squaredNorm() / (n - k - 1);
  for (int j = 0; j <= k; ++j) {
    CHECK(fit.coefficients[j] == Approx(beta(j)).epsilon(1e-9));
    CHECK(fit.std_errors[j] == Approx(std::sqrt(sigma2 * inv(j, j))).epsilon(1e-9));
  }
  double abs_sum = 0;
  for (int j = 1; j <= k; ++j) abs_sum += std::fabs(fit.coefficients[j]);
  CHECK(fit.relative_importance[2] == Approx(fit.coefficients[2] / abs_sum));
}

TEST_CASE("ols errors") {
  const double ys[] = {1, 2, 3};
  CHECK(code_of([&] { ols_fit({{1}, {2}}, std::span(ys, 2)); }) == ErrorCode::TooFewRows);
  CHECK(code_of([&] { ols_fit({{1, 2}, {2, 4}, {3, 6}, {4, 8}}, std::vector<double>{1, 2, 3, 5}); }) ==
        ErrorCode::RankDeficient);
  CHECK(code_of([&] { ols_fit({{1}, {2}, {3}}, std::span(ys, 2)); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("loss summaries") {
  const double v[] = {0.2, -0.1, 0.0, 0.4};
  const auto s = summarize_losses(v);
  CHECK(s.pct_positive == Rational(1, 2));
  CHECK(s.mean == Approx(0.125));
  CHECK(*s.mean_positive == Approx(0.3));
  CHECK(*s.mean_negative == Approx(-0.1));
  const double zeros[] = {0, 0};
  CHECK_FALSE(summarize_losses(zeros).mean_positive);
  CHECK(code_of([] { summarize_losses({}); }) == ErrorCode::EmptyInput);
}

TEST_CASE("more closed forms") {
  const double x[] = {1, 2, 3};
  CHECK(code_of([&] { paired_t_test(x, x); }) == ErrorCode::ZeroVarianceDifferences);
  const double a[] = {5, 6}, b[] = {1, 2};
  CHECK(code_of([&] { paired_t_test(a, b); }) == ErrorCode::ZeroVarianceDifferences);

  const auto exact = ols_fit({{0}, {1}, {2}, {3}}, std::vector<double>{0, 2, 4, 6});
  CHECK(exact.coefficients[0] == Approx(0.0).epsilon(1e-12));
  CHECK(exact.coefficients[1] == Approx(2.0));
  CHECK(exact.r_squared == Approx(1.0));

  const double losses[] = {-1, 2, 3};
  const auto s = summarize_losses(losses);
  CHECK(s.pct_positive == Rational(2, 3));
  CHECK(s.mean == Approx(4.0 / 3.0));
  CHECK(*s.mean_positive == Approx(2.5));
  CHECK(*s.mean_negative == Approx(-1.0));
  const double one[] = {0.07};
  const auto t = summarize_losses(one);
  CHECK(t.pct_positive == 1);
  CHECK(*t.mean_positive == Approx(0.07));
  CHECK_FALSE(t.mean_negative);
}
