#include "swapsim/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>

#include "swapsim/error.hpp"

namespace swapsim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Parameters: (B, V, offset[, P]).
struct Residuals {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  const std::vector<std::pair<double, double>>* pts;
  std::vector<double> sigma;
  bool fix_period;

  int inputs() const { return fix_period ? 3 : 4; }
  int values() const { return static_cast<int>(pts->size()); }

  double period(const Eigen::VectorXd& x) const { return fix_period ? kTwoPi : x(3); }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    for (std::size_t i = 0; i < pts->size(); ++i) {
      const auto [d, n] = (*pts)[i];
      const double m = x(0) * (1.0 + x(1) * std::cos(kTwoPi * d / period(x) - x(2)));
      f(static_cast<Eigen::Index>(i)) = (m - n) / sigma[i];
    }
    return 0;
  }

  int df(const Eigen::VectorXd& x, Eigen::MatrixXd& j) const {
    const double p = period(x);
    for (std::size_t i = 0; i < pts->size(); ++i) {
      const double d = (*pts)[i].first;
      const double arg = kTwoPi * d / p - x(2);
      const double c = std::cos(arg), s = std::sin(arg);
      const auto r = static_cast<Eigen::Index>(i);
      j(r, 0) = (1.0 + x(1) * c) / sigma[i];
      j(r, 1) = x(0) * c / sigma[i];
      j(r, 2) = x(0) * x(1) * s / sigma[i];
      if (!fix_period) j(r, 3) = x(0) * x(1) * s * kTwoPi * d / (p * p) / sigma[i];
    }
    return 0;
  }
};

double wrap(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0.0 ? a + kTwoPi : a;
}

}  // namespace

double VisibilityFit::model(double delta) const {
  return baseline * (1.0 + visibility * std::cos(delta / period - offset));
}

VisibilityFit fit_visibility(const std::vector<std::pair<double, double>>& points, bool fix_period) {
  if (points.size() < 5) throw std::invalid_argument("fit_visibility: need at least 5 points");
  double lo = points.front().first, hi = lo;
  for (const auto& [d, n] : points) {
    if (!std::isfinite(d) || !std::isfinite(n) || n < 0.0) {
      throw std::invalid_argument("fit_visibility: points must be finite with nonnegative counts");
    }
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  if (hi - lo < std::numbers::pi) throw std::invalid_argument("fit_visibility: degenerate span (< half a period)");

  Residuals fn{&points, {}, fix_period};
  fn.sigma.reserve(points.size());
  for (const auto& [d, n] : points) fn.sigma.push_back(std::sqrt(std::max(n, 1.0)));

  // Grid over the offset; B and BV follow from a weighted linear solve.
  double best_cost = std::numeric_limits<double>::infinity();
  Eigen::VectorXd x0(fix_period ? 3 : 4);
  for (int k = 0; k < 72; ++k) {
    const double o = kTwoPi * k / 72.0;
    Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
    Eigen::Vector2d b = Eigen::Vector2d::Zero();
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double w = 1.0 / (fn.sigma[i] * fn.sigma[i]);
      const Eigen::Vector2d row(1.0, std::cos(points[i].first - o));
      a += w * row * row.transpose();
      b += w * row * points[i].second;
    }
    const Eigen::Vector2d sol = a.ldlt().solve(b);
    double cost = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double r = (sol(0) + sol(1) * std::cos(points[i].first - o) - points[i].second) / fn.sigma[i];
      cost += r * r;
    }
    if (cost < best_cost && sol(0) > 0.0) {
      best_cost = cost;
      x0(0) = sol(0);
      x0(1) = sol(1) / sol(0);
      x0(2) = o;
    }
  }
  if (!std::isfinite(best_cost)) throw NumericalError("fit_visibility: no positive-baseline start found");
  if (!fix_period) x0(3) = kTwoPi;

  // Start with σ² = observed counts, then refit with σ² = model until the
  // weights settle (Pearson weighting, unbiased at low counts).
  for (int pass = 0; pass < 8; ++pass) {
    Eigen::LevenbergMarquardt<Residuals> lm(fn);
    lm.parameters.xtol = 1e-15;
    lm.parameters.ftol = 1e-15;
    lm.parameters.maxfev = 20000;
    lm.minimize(x0);
    double change = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double m = x0(0) * (1.0 + x0(1) * std::cos(kTwoPi * points[i].first / fn.period(x0) - x0(2)));
      const double s = std::sqrt(std::max(m, 0.5));
      change = std::max(change, std::abs(s - fn.sigma[i]) / s);
      fn.sigma[i] = s;
    }
    if (change < 1e-10) break;
  }

  Eigen::VectorXd f(fn.values());
  fn(x0, f);
  Eigen::MatrixXd j(fn.values(), fn.inputs());
  fn.df(x0, j);
  const Eigen::MatrixXd cov = (j.transpose() * j).inverse();

  VisibilityFit out;
  out.baseline = x0(0);
  out.visibility = x0(1);
  out.offset = x0(2);
  if (out.visibility < 0.0) {
    out.visibility = -out.visibility;
    out.offset += std::numbers::pi;
  }
  out.offset = wrap(out.offset);
  const double p = fix_period ? kTwoPi : x0(3);
  out.period = p / kTwoPi;
  out.baseline_err = std::sqrt(cov(0, 0));
  out.visibility_err = std::sqrt(cov(1, 1));
  out.offset_err = std::sqrt(cov(2, 2));
  out.period_err = fix_period ? 0.0 : std::sqrt(cov(3, 3)) / kTwoPi;
  out.chi2 = f.squaredNorm();
  out.dof = fn.values() - fn.inputs();
  out.residuals.reserve(points.size());
  for (const auto& [d, n] : points) out.residuals.push_back(n - out.model(d));
  return out;
}

}  // namespace swapsim
