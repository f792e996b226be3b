#pragma once

#include <utility>
#include <vector>

namespace swapsim {

/// N(Δ) = B · (1 + V cos(2πΔ/P − offset)), Δ and P in radians.
struct VisibilityFit {
  double visibility = 0.0;
  double visibility_err = 0.0;
  double offset = 0.0;  // in [0, 2π)
  double offset_err = 0.0;
  /// Period in units of 2π.
  double period = 1.0;
  double period_err = 0.0;
  double baseline = 0.0;
  double baseline_err = 0.0;
  double chi2 = 0.0;
  int dof = 0;
  std::vector<double> residuals;

  double model(double delta) const;
};

/// Poisson-weighted least squares (Levenberg–Marquardt) seeded from a grid
/// over the offset. Needs ≥ 5 points spanning at least π.
VisibilityFit fit_visibility(const std::vector<std::pair<double, double>>& points, bool fix_period = true);

}  // namespace swapsim
