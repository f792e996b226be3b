#include "swapsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "swapsim/error.hpp"

namespace swapsim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kVMin = -1.0 / 3.0;
constexpr double kVMax = 1.0;

// Grid resolution for the maximally entangled family: θ over [0, π] inclusive,
// φ and λ over [0, 2π) exclusive.
constexpr int kThetaSteps = 16;
constexpr int kPhaseSteps = 16;
constexpr int kRefineCandidates = 6;
constexpr double kFinalStep = 1e-5;
constexpr double kTieTol = 1e-9;
// Coarse v search per grid point; refinement takes it the rest of the way.
constexpr double kGridVTol = 1e-2;

using Mat4 = Eigen::Matrix4cd;

void require_two_qubit(const DensityMatrix& rho, const char* where) {
  if (rho.dim() != 4) throw DimensionError(std::string(where) + ": expected a two-qubit state");
}

double sum_sqrt_eigs(const Mat4& m) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (int i = 0; i < 4; ++i) s += std::sqrt(std::max(0.0, es.eigenvalues()(i)));
  return s;
}

double werner_fidelity_fast(const Mat4& rho, double v, const Eigen::Vector4cd& psi) {
  const double a = std::max(0.0, (1.0 + 3.0 * v) / 4.0);
  const double b = std::max(0.0, (1.0 - v) / 4.0);
  const Mat4 proj = psi * psi.adjoint();
  const Mat4 root = std::sqrt(b) * Mat4::Identity() + (std::sqrt(a) - std::sqrt(b)) * proj;
  const double s = sum_sqrt_eigs(root * rho * root);
  return s * s;
}

Eigen::Vector4cd ket4(const MaxEntParams& p) {
  const double c = std::cos(p.theta / 2.0);
  const double s = std::sin(p.theta / 2.0);
  const Complex u00 = c;
  const Complex u01 = -std::polar(1.0, p.lambda) * s;
  const Complex u10 = std::polar(1.0, p.phi) * s;
  const Complex u11 = std::polar(1.0, p.phi + p.lambda) * c;
  Eigen::Vector4cd v;
  // (𝟙⊗U)(|ee⟩ + |ℓℓ⟩)/√2 in (ee, eℓ, ℓe, ℓℓ) order.
  v << u00, u10, u01, u11;
  return v / std::sqrt(2.0);
}

double bell_distance(const Eigen::Vector4cd& psi) {
  double best = 0.0;
  for (BellKind k : {BellKind::PhiPlus, BellKind::PhiMinus, BellKind::PsiPlus, BellKind::PsiMinus}) {
    best = std::max(best, std::norm(bell_state(k).amplitudes().dot(psi)));
  }
  return 1.0 - best;
}

struct Candidate {
  std::array<double, 4> x{};  // θ, φ, λ, v
  double value = -1.0;
};

// Coordinate descent with step halving. `dims` selects how many of the
// coordinates in Candidate::x are free.
Candidate refine(Candidate c, int dims, std::array<double, 4> step,
                 const std::function<double(const std::array<double, 4>&)>& f) {
  auto clamp = [](std::array<double, 4>& x) {
    x[0] = std::clamp(x[0], 0.0, kPi);
    x[3] = std::clamp(x[3], kVMin, kVMax);
  };
  while (*std::max_element(step.begin(), step.begin() + dims) >= kFinalStep) {
    bool improved = false;
    for (int d = 0; d < dims; ++d) {
      for (double sign : {1.0, -1.0}) {
        auto trial = c.x;
        trial[d] += sign * step[d];
        clamp(trial);
        const double val = f(trial);
        if (val > c.value + 1e-15) {
          c.x = trial;
          c.value = val;
          improved = true;
          break;
        }
      }
    }
    if (!improved) {
      for (int d = 0; d < dims; ++d) step[d] *= 0.5;
    }
  }
  return c;
}

double golden_max(const std::function<double(double)>& f, double lo, double hi, double tol,
                  double* arg) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    }
  }
  // Endpoints matter: pure states sit at v = 1.
  double best_x = 0.5 * (a + b);
  double best = f(best_x);
  for (double e : {lo, hi}) {
    const double fe = f(e);
    if (fe > best) {
      best = fe;
      best_x = e;
    }
  }
  *arg = best_x;
  return best;
}

std::vector<MaxEntParams> grid_points() {
  std::vector<MaxEntParams> pts;
  pts.reserve(static_cast<std::size_t>(kThetaSteps * kPhaseSteps * kPhaseSteps) + 4);
  for (BellKind k : {BellKind::PhiPlus, BellKind::PhiMinus, BellKind::PsiPlus, BellKind::PsiMinus}) {
    pts.push_back(canonical_params(k));
  }
  for (int i = 0; i < kThetaSteps; ++i) {
    const double theta = kPi * i / (kThetaSteps - 1);
    for (int j = 0; j < kPhaseSteps; ++j) {
      for (int l = 0; l < kPhaseSteps; ++l) {
        pts.push_back({theta, 2.0 * kPi * j / kPhaseSteps, 2.0 * kPi * l / kPhaseSteps});
      }
    }
  }
  return pts;
}

// Shared driver: grid, refine the best few, tie-break toward canonical Bell
// states, detect degeneracy.
Candidate optimise_family(int dims, const std::function<double(const std::array<double, 4>&)>& f,
                          const std::function<double(const MaxEntParams&, double*)>& grid_eval,
                          bool* degenerate) {
  const auto pts = grid_points();
  std::vector<Candidate> scored;
  scored.reserve(pts.size());
  for (const auto& p : pts) {
    double v = 0.0;
    const double val = grid_eval(p, &v);
    scored.push_back({{p.theta, p.phi, p.lambda, v}, val});
  }
  // Canonical points first in `pts`, so a stable sort keeps them ahead on ties.
  std::stable_sort(scored.begin(), scored.end(),
                   [](const Candidate& a, const Candidate& b) { return a.value > b.value; });

  const std::array<double, 4> step0{kPi / (kThetaSteps - 1) / 2.0, kPi / kPhaseSteps,
                                    kPi / kPhaseSteps, 0.05};
  std::vector<Candidate> refined;
  const std::size_t n = std::min<std::size_t>(kRefineCandidates, scored.size());
  for (std::size_t i = 0; i < n; ++i) refined.push_back(refine(scored[i], dims, step0, f));
  // Always refine the canonical Bell seeds too; they anchor the tie-break.
  for (std::size_t i = 0; i < scored.size(); ++i) {
    const auto& c = scored[i];
    for (BellKind k : {BellKind::PhiPlus, BellKind::PhiMinus, BellKind::PsiPlus, BellKind::PsiMinus}) {
      const auto cp = canonical_params(k);
      if (c.x[0] == cp.theta && c.x[1] == cp.phi && c.x[2] == cp.lambda && i >= n) {
        refined.push_back(refine(c, dims, step0, f));
      }
    }
  }

  double best_val = -1.0;
  for (const auto& c : refined) best_val = std::max(best_val, c.value);

  const Candidate* chosen = nullptr;
  double chosen_dist = 2.0;
  for (const auto& c : refined) {
    if (c.value < best_val - kTieTol) continue;
    const double d = bell_distance(ket4({c.x[0], c.x[1], c.x[2]}));
    if (d < chosen_dist - 1e-12) {
      chosen = &c;
      chosen_dist = d;
    }
  }

  *degenerate = false;
  const auto chosen_ket = ket4({chosen->x[0], chosen->x[1], chosen->x[2]});
  for (const auto& c : refined) {
    if (c.value < best_val - kTieTol) continue;
    const double overlap = std::norm(chosen_ket.dot(ket4({c.x[0], c.x[1], c.x[2]})));
    const bool same_v = dims < 4 || std::abs(c.x[3] - chosen->x[3]) < 1e-3;
    if (overlap < 1.0 - 1e-6 || !same_v) *degenerate = true;
  }
  return *chosen;
}

}  // namespace

Ket max_entangled_ket(const MaxEntParams& p) { return Ket(CVector(ket4(p))); }

MaxEntParams canonical_params(BellKind kind) {
  switch (kind) {
    case BellKind::PhiPlus:
      return {0.0, 0.0, 0.0};
    case BellKind::PhiMinus:
      return {0.0, 0.0, kPi};
    case BellKind::PsiPlus:
      return {kPi, 0.0, kPi};
    case BellKind::PsiMinus:
      return {kPi, 0.0, 0.0};
  }
  return {};
}

bool matches_bell(const Ket& psi, BellKind kind, double tol) {
  if (psi.dim() != 4) return false;
  return std::norm(bell_state(kind).inner(psi)) > 1.0 - tol;
}

double concurrence(const DensityMatrix& rho) {
  require_two_qubit(rho, "concurrence");
  Mat4 yy = Mat4::Zero();
  // σy⊗σy in (ee, eℓ, ℓe, ℓℓ) order.
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  const Mat4 r = rho.matrix();
  const Mat4 tilde = yy * r.conjugate() * yy;
  const Mat4 root = psd_sqrt(r);
  Eigen::SelfAdjointEigenSolver<Mat4> es(Mat4(root * tilde * root), Eigen::EigenvaluesOnly);
  std::array<double, 4> lam{};
  for (int i = 0; i < 4; ++i) lam[static_cast<std::size_t>(i)] = std::sqrt(std::max(0.0, es.eigenvalues()(i)));
  std::sort(lam.begin(), lam.end(), std::greater<>());
  return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw DimensionError("fidelity: dimension mismatch");
  const CMatrix root = psd_sqrt(sigma.matrix());
  const CMatrix inner = root * rho.matrix() * root;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (inner + inner.adjoint()), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    s += std::sqrt(std::max(0.0, es.eigenvalues()(i)));
  }
  return std::clamp(s * s, 0.0, 1.0);
}

double fidelity(const DensityMatrix& rho, const Ket& psi) {
  if (rho.dim() != psi.dim()) throw DimensionError("fidelity: dimension mismatch");
  return std::clamp(psi.amplitudes().dot(rho.matrix() * psi.amplitudes()).real(), 0.0, 1.0);
}

double werner_fidelity(const DensityMatrix& rho, double v, const Ket& psi) {
  require_two_qubit(rho, "werner_fidelity");
  if (psi.dim() != 4) throw DimensionError("werner_fidelity: psi must be a two-qubit ket");
  return std::clamp(werner_fidelity_fast(rho.matrix(), v, psi.amplitudes()), 0.0, 1.0);
}

MaxEntFit nearest_max_entangled(const DensityMatrix& rho) {
  require_two_qubit(rho, "nearest_max_entangled");
  const Mat4 r = rho.matrix();
  auto f = [&](const std::array<double, 4>& x) {
    const auto k = ket4({x[0], x[1], x[2]});
    return k.dot(r * k).real();
  };
  auto grid_eval = [&](const MaxEntParams& p, double*) { return f({p.theta, p.phi, p.lambda, 0.0}); };
  bool degenerate = false;
  const Candidate best = optimise_family(3, f, grid_eval, &degenerate);
  MaxEntFit fit;
  fit.params = {best.x[0], best.x[1], best.x[2]};
  fit.psi = max_entangled_ket(fit.params);
  fit.fidelity = std::clamp(best.value, 0.0, 1.0);
  fit.degenerate = degenerate;
  return fit;
}

WernerFit nearest_werner(const DensityMatrix& rho) {
  require_two_qubit(rho, "nearest_werner");
  const Mat4 r = rho.matrix();
  auto f = [&](const std::array<double, 4>& x) {
    return werner_fidelity_fast(r, x[3], ket4({x[0], x[1], x[2]}));
  };
  auto grid_eval = [&](const MaxEntParams& p, double* v_out) {
    const auto k = ket4(p);
    return golden_max([&](double v) { return werner_fidelity_fast(r, v, k); }, kVMin, kVMax, kGridVTol,
                      v_out);
  };
  bool degenerate = false;
  Candidate best = optimise_family(4, f, grid_eval, &degenerate);
  // Final polish of v alone at the chosen ψ.
  const auto k = ket4({best.x[0], best.x[1], best.x[2]});
  double v = best.x[3];
  const double val = golden_max([&](double vv) { return werner_fidelity_fast(r, vv, k); },
                                std::max(kVMin, v - 1e-3), std::min(kVMax, v + 1e-3), 1e-9, &v);
  if (val >= best.value) {
    best.x[3] = v;
    best.value = val;
  }

  WernerFit fit;
  fit.params = {best.x[0], best.x[1], best.x[2]};
  fit.psi = max_entangled_ket(fit.params);
  fit.v = best.x[3];
  fit.fidelity = std::clamp(best.value, 0.0, 1.0);
  fit.degenerate = degenerate;
  return fit;
}

double phase_scan_visibility(const DensityMatrix& rho) {
  require_two_qubit(rho, "phase_scan_visibility");
  // P(α) = c0 + Re(c1 e^{iα}); sample evenly and project onto the harmonics.
  const Projector ref = Projector::phase(0.0);
  constexpr int kSamples = 8;
  double c0 = 0.0;
  Complex c1 = 0.0;
  for (int s = 0; s < kSamples; ++s) {
    const double alpha = 2.0 * kPi * s / kSamples;
    const double p = expectation(rho, kron(Projector::phase(alpha).matrix(), ref.matrix()));
    c0 += p / kSamples;
    c1 += 2.0 * p * std::polar(1.0, -alpha) / static_cast<double>(kSamples);
  }
  if (c0 <= 0.0) return 0.0;
  return std::abs(c1) / c0;
}

}  // namespace swapsim
