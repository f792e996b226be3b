#include "swapsim/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

#include "swapsim/error.hpp"

namespace swapsim {

namespace {

constexpr int kParams = 16;
using Vec = Eigen::Matrix<double, kParams, 1>;
using Mat = Eigen::Matrix<double, kParams, kParams>;

/// Lower-triangular positions (i > j) in parameter order.
constexpr std::array<std::pair<int, int>, 6> kOffDiag = {{{1, 0}, {2, 0}, {2, 1}, {3, 0}, {3, 1}, {3, 2}}};

CMatrix t_matrix(const Vec& x) {
  CMatrix t = CMatrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) t(i, i) = x(i);
  for (std::size_t k = 0; k < kOffDiag.size(); ++k) {
    const auto [i, j] = kOffDiag[k];
    t(i, j) = Complex(x(4 + 2 * static_cast<int>(k)), x(5 + 2 * static_cast<int>(k)));
  }
  return t;
}

double phase_sides(const Projector& a, const Projector& d) {
  return (a.basis() == Projector::Basis::Phase ? 1.0 : 0.0) + (d.basis() == Projector::Basis::Phase ? 1.0 : 0.0);
}

AnalyzerSetting analyzer_for(const Projector& p) {
  return p.basis() == Projector::Basis::Z ? AnalyzerSetting::z() : AnalyzerSetting::phase(p.phi());
}

/// Likelihood in terms of M = T†T (unnormalised).
class Objective {
 public:
  explicit Objective(const std::vector<TomographySetting>& data) {
    w_ = CMatrix::Zero(4, 4);
    for (const auto& s : data) {
      const CMatrix p = s.joint_projector();
      w_ += s.exposure * p;
      if (s.counts > 0) {
        proj_.push_back(p);
        n_.push_back(static_cast<double>(s.counts));
        total_ += static_cast<double>(s.counts);
      }
    }
  }

  double total() const { return total_; }

  /// −L/N; +inf outside the support.
  double value(const Vec& x) const {
    const CMatrix t = t_matrix(x);
    const CMatrix m = t.adjoint() * t;
    const double tw = (m * w_).trace().real();
    if (!(tw > 0.0)) return std::numeric_limits<double>::infinity();
    double l = -total_ * std::log(tw);
    for (std::size_t j = 0; j < proj_.size(); ++j) {
      const double pj = (m * proj_[j]).trace().real();
      if (!(pj > 0.0)) return std::numeric_limits<double>::infinity();
      l += n_[j] * std::log(pj);
    }
    return -l / total_;
  }

  Vec gradient(const Vec& x) const {
    const CMatrix t = t_matrix(x);
    const CMatrix m = t.adjoint() * t;
    CMatrix q = -(total_ / (m * w_).trace().real()) * w_;
    for (std::size_t j = 0; j < proj_.size(); ++j) q += (n_[j] / (m * proj_[j]).trace().real()) * proj_[j];
    const CMatrix g = q * t.adjoint();
    Vec out;
    for (int i = 0; i < 4; ++i) out(i) = 2.0 * g(i, i).real();
    for (std::size_t k = 0; k < kOffDiag.size(); ++k) {
      const auto [i, j] = kOffDiag[k];
      out(4 + 2 * static_cast<int>(k)) = 2.0 * g(j, i).real();
      out(5 + 2 * static_cast<int>(k)) = -2.0 * g(j, i).imag();
    }
    return -out / total_;
  }

 private:
  CMatrix w_;
  std::vector<CMatrix> proj_;
  std::vector<double> n_;
  double total_ = 0.0;
};

struct LocalResult {
  Vec x;
  double f;
  int iterations;
  bool converged;
};

LocalResult bfgs(const Objective& obj, Vec x, const MleOptions& opts) {
  double f = obj.value(x);
  Vec g = obj.gradient(x);
  Mat h = Mat::Identity();
  bool fresh = true;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    Vec p = -h * g;
    double slope = g.dot(p);
    if (!(slope < 0.0)) {
      h.setIdentity();
      fresh = true;
      p = -g;
      slope = g.dot(p);
      if (!(slope < 0.0)) return {x, f, it, true};
    }
    double alpha = 1.0;
    double f_new = obj.value(x + alpha * p);
    while (!(f_new <= f + 1e-4 * alpha * slope) && alpha > 1e-20) {
      alpha *= 0.5;
      f_new = obj.value(x + alpha * p);
    }
    if (!(f_new <= f + 1e-4 * alpha * slope)) {
      if (fresh) return {x, f, it, true};
      h.setIdentity();
      fresh = true;
      continue;
    }
    const Vec s = alpha * p;
    const Vec x_new = x + s;
    const Vec g_new = obj.gradient(x_new);
    const Vec y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-18) {
      const double rho = 1.0 / sy;
      const Mat i_rsy = Mat::Identity() - rho * s * y.transpose();
      h = i_rsy * h * i_rsy.transpose() + rho * s * s.transpose();
      fresh = false;
    }
    const double improvement = f - f_new;
    x = x_new;
    f = f_new;
    g = g_new;
    if (improvement < opts.tolerance) return {x, f, it + 1, true};
  }
  return {x, f, it, false};
}

Vec start_point(int k) {
  Vec x = Vec::Zero();
  x.head<4>().setOnes();
  if (k == 0) return x;
  for (int m = 0; m < kParams; ++m) x(m) += 0.25 * std::sin(1.3 * k * (m + 1) + 0.7 * m);
  return x;
}

DensityMatrix rho_from(const Vec& x) {
  const CMatrix t = t_matrix(x);
  CMatrix m = t.adjoint() * t;
  m /= m.trace().real();
  return DensityMatrix(0.5 * (m + m.adjoint()));
}

double percentile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

CMatrix TomographySetting::joint_projector() const { return kron(a.matrix(), d.matrix()); }

std::vector<Projector> standard_projectors() {
  constexpr double pi = std::numbers::pi;
  return {Projector::z(TimeBin::Early), Projector::z(TimeBin::Late), Projector::phase(0.0),
          Projector::phase(pi),         Projector::phase(pi / 2),    Projector::phase(3 * pi / 2)};
}

std::vector<TomographySetting> standard_settings() {
  std::vector<TomographySetting> out;
  const auto p = standard_projectors();
  for (const auto& a : p) {
    for (const auto& d : p) out.push_back({a, d, 0, 1.0});
  }
  return out;
}

std::vector<SwapSetting> tomography_swap_settings() {
  std::vector<SwapSetting> out;
  for (const auto& s : standard_settings()) out.push_back({analyzer_for(s.a), analyzer_for(s.d)});
  return out;
}

std::vector<TomographySetting> tomography_dataset(const std::vector<CoincidenceRecord>& records) {
  auto rows = standard_settings();
  if (records.size() != rows.size()) {
    throw std::invalid_argument("tomography_dataset: expected one record per standard setting");
  }
  auto outcome = [](const Projector& p) { return p.basis() == Projector::Basis::Z ? static_cast<int>(p.bin()) : 0; };
  for (std::size_t j = 0; j < rows.size(); ++j) {
    auto& r = rows[j];
    r.counts = records[j].fourfold(outcome(r.a), outcome(r.d));
    r.exposure = static_cast<double>(records[j].pulses) * std::pow(0.5, phase_sides(r.a, r.d));
  }
  return rows;
}

std::vector<TomographySetting> expected_dataset(const DensityMatrix& rho, double total, bool phase_exposure_half) {
  auto rows = standard_settings();
  std::vector<double> weight(rows.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    rows[j].exposure = phase_exposure_half ? std::pow(0.5, phase_sides(rows[j].a, rows[j].d)) : 1.0;
    weight[j] = rows[j].exposure * std::max(0.0, expectation(rho, rows[j].joint_projector()));
    sum += weight[j];
  }
  for (std::size_t j = 0; j < rows.size(); ++j) {
    rows[j].counts = static_cast<std::uint64_t>(std::llround(total * weight[j] / sum));
  }
  return rows;
}

double log_likelihood(const std::vector<TomographySetting>& data, const DensityMatrix& rho) {
  double norm = 0.0;
  for (const auto& s : data) norm += s.exposure * expectation(rho, s.joint_projector());
  double l = 0.0;
  for (const auto& s : data) {
    if (s.counts == 0) continue;
    const double p = s.exposure * expectation(rho, s.joint_projector()) / norm;
    if (!(p > 0.0)) return -std::numeric_limits<double>::infinity();
    l += static_cast<double>(s.counts) * std::log(p);
  }
  return l;
}

MleResult mle_reconstruct(const std::vector<TomographySetting>& data, const MleOptions& opts) {
  if (data.empty()) throw std::invalid_argument("mle_reconstruct: no settings given");
  for (const auto& s : data) {
    if (!(s.exposure > 0.0)) throw std::invalid_argument("mle_reconstruct: exposures must be positive");
  }
  const Objective obj(data);
  if (obj.total() == 0.0) throw std::invalid_argument("mle_reconstruct: all counts are zero");
  if (opts.starts < 1) throw std::invalid_argument("mle_reconstruct: need at least one start");

  LocalResult best{Vec::Zero(), std::numeric_limits<double>::infinity(), 0, false};
  int best_start = 0;
  int total_iterations = 0;
  for (int k = 0; k < opts.starts; ++k) {
    const LocalResult r = bfgs(obj, start_point(k), opts);
    total_iterations += r.iterations;
    if (r.f < best.f) {
      best = r;
      best_start = k;
    }
  }
  if (!std::isfinite(best.f)) throw NumericalError("mle_reconstruct: no start reached a finite likelihood");

  MleResult out;
  out.rho = rho_from(best.x);
  out.log_likelihood = log_likelihood(data, out.rho);
  out.iterations = total_iterations;
  out.converged = best.converged;
  out.best_start = best_start;
  return out;
}

Statistic concurrence_statistic() {
  return [](const DensityMatrix& rho) { return concurrence(rho); };
}

Statistic fidelity_statistic(const Ket& psi) {
  return [psi](const DensityMatrix& rho) { return fidelity(rho, psi); };
}

Statistic werner_v_statistic() {
  return [](const DensityMatrix& rho) { return nearest_werner(rho).v; };
}

Statistic werner_fidelity_statistic() {
  return [](const DensityMatrix& rho) { return nearest_werner(rho).fidelity; };
}

std::vector<BootstrapResult> bootstrap_joint(const std::vector<TomographySetting>& data, std::size_t n_resamples,
                                             std::uint64_t seed, const JointStatistic& stat, std::size_t n_stats,
                                             unsigned workers, const MleOptions& opts) {
  if (n_resamples < 100) throw std::invalid_argument("bootstrap: need at least 100 resamples");
  if (n_stats == 0) throw std::invalid_argument("bootstrap: no statistic given");
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<double>> values(n_stats, std::vector<double>(n_resamples, nan));

  auto run = [&](std::size_t r) {
    Rng rng(derive_seed(seed, r));
    auto resampled = data;
    for (auto& s : resampled) {
      if (s.counts == 0) continue;
      std::poisson_distribution<std::uint64_t> pois(static_cast<double>(s.counts));
      s.counts = pois(rng);
    }
    try {
      const auto fit = mle_reconstruct(resampled, opts);
      const auto vals = stat(fit.rho);
      for (std::size_t k = 0; k < std::min(n_stats, vals.size()); ++k) values[k][r] = vals[k];
    } catch (const std::exception&) {
      // Left as NaN and reported as dropped.
    }
  };

  const unsigned w = std::max(1u, workers);
  if (w == 1) {
    for (std::size_t r = 0; r < n_resamples; ++r) run(r);
  } else {
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < w; ++t) {
      threads.emplace_back([&, t] {
        for (std::size_t r = t; r < n_resamples; r += w) run(r);
      });
    }
    for (auto& th : threads) th.join();
  }

  std::vector<BootstrapResult> out;
  for (auto& v : values) {
    BootstrapResult b;
    b.resamples = n_resamples;
    std::vector<double> ok;
    for (double x : v) {
      if (std::isnan(x)) {
        ++b.dropped;
      } else {
        ok.push_back(x);
      }
    }
    if (!ok.empty()) {
      double sum = 0.0;
      for (double x : ok) sum += x;
      b.mean = sum / static_cast<double>(ok.size());
      double ss = 0.0;
      for (double x : ok) ss += (x - b.mean) * (x - b.mean);
      b.stddev = ok.size() > 1 ? std::sqrt(ss / static_cast<double>(ok.size() - 1)) : 0.0;
      std::sort(ok.begin(), ok.end());
      b.lo = percentile(ok, 0.025);
      b.hi = percentile(ok, 0.975);
    } else {
      b.mean = b.stddev = b.lo = b.hi = nan;
    }
    b.values = std::move(v);
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<BootstrapResult> bootstrap_many(const std::vector<TomographySetting>& data, std::size_t n_resamples,
                                            std::uint64_t seed, const std::vector<Statistic>& stats,
                                            unsigned workers, const MleOptions& opts) {
  if (stats.empty()) throw std::invalid_argument("bootstrap: no statistic given");
  auto joint = [&stats](const DensityMatrix& rho) {
    std::vector<double> out;
    out.reserve(stats.size());
    for (const auto& s : stats) out.push_back(s(rho));
    return out;
  };
  return bootstrap_joint(data, n_resamples, seed, joint, stats.size(), workers, opts);
}

BootstrapResult bootstrap(const std::vector<TomographySetting>& data, std::size_t n_resamples, std::uint64_t seed,
                          const Statistic& stat, unsigned workers, const MleOptions& opts) {
  return bootstrap_many(data, n_resamples, seed, {stat}, workers, opts).front();
}

}  // namespace swapsim
