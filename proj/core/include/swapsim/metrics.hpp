#pragma once

#include <array>

#include "swapsim/qstate.hpp"

namespace swapsim {

/// Angles (θ, φ, λ) of the single-qubit unitary
///   U = [[cos θ/2, −e^{iλ} sin θ/2], [e^{iφ} sin θ/2, e^{i(φ+λ)} cos θ/2]]
/// that generates the maximally entangled state (𝟙⊗U)|Φ+⟩.
struct MaxEntParams {
  double theta = 0.0;
  double phi = 0.0;
  double lambda = 0.0;
};

Ket max_entangled_ket(const MaxEntParams& p);

/// Parameters of the four Bell kets inside the maximally entangled family.
MaxEntParams canonical_params(BellKind kind);

struct MaxEntFit {
  Ket psi = bell_state(BellKind::PhiPlus);
  MaxEntParams params;
  double fidelity = 0.0;
  /// Several inequivalent ψ reach the optimum within 1e-9.
  bool degenerate = false;
};

struct WernerFit {
  double v = 0.0;
  Ket psi = bell_state(BellKind::PhiPlus);
  MaxEntParams params;
  double fidelity = 0.0;
  bool degenerate = false;
};

/// Wootters concurrence of a two-qubit state.
double concurrence(const DensityMatrix& rho);

/// Uhlmann fidelity (tr√(√σ ρ √σ))².
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// ⟨ψ|ρ|ψ⟩, the fidelity against a pure state.
double fidelity(const DensityMatrix& rho, const Ket& psi);

/// Fidelity of ρ with the Werner state v|ψ⟩⟨ψ| + (1−v)𝟙/4.
double werner_fidelity(const DensityMatrix& rho, double v, const Ket& psi);

MaxEntFit nearest_max_entangled(const DensityMatrix& rho);
WernerFit nearest_werner(const DensityMatrix& rho);

/// Largest two-photon phase-scan visibility reachable by a separable Werner state.
constexpr double separable_visibility_bound() { return 1.0 / 3.0; }

/// Visibility of P(α) = tr(ρ Π_α⊗Π_0) as α sweeps a full period; exact via the
/// first Fourier harmonic since P is a degree-1 trigonometric polynomial.
double phase_scan_visibility(const DensityMatrix& rho);

/// Which Bell state (if any) a ket equals up to global phase within `tol`.
bool matches_bell(const Ket& psi, BellKind kind, double tol = 1e-6);

}  // namespace swapsim
