#pragma once

// Dense two-level / few-qubit state primitives. Every two-qubit object in the
// toolkit uses the basis ordering (ee, eℓ, ℓe, ℓℓ), i.e. the first qubit is the
// most significant index.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace swapsim {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-9;
inline constexpr double kTraceTol = 1e-9;
inline constexpr double kPsdClamp = 1e-8;

/// Time-bin basis index: early = 0, late = 1.
enum class TimeBin : int { Early = 0, Late = 1 };

enum class BellKind { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

const char* to_string(BellKind kind);

/// Normalised pure state.
class Ket {
 public:
  /// Normalises `amplitudes`; throws InvalidStateError on a zero vector.
  explicit Ket(CVector amplitudes);

  static Ket basis(std::size_t dim, std::size_t index);

  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  const CVector& amplitudes() const { return amps_; }
  Complex operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }

  Complex inner(const Ket& other) const;
  /// |ψ⟩⟨ψ|
  CMatrix projector() const;

 private:
  CVector amps_;
};

/// Hermitian, PSD, unit-trace matrix. Construction validates all three.
class DensityMatrix {
 public:
  /// Validates Hermiticity (1e-9), unit trace (1e-9) and min eigenvalue ≥ −1e-8.
  explicit DensityMatrix(CMatrix m);

  static DensityMatrix from_ket(const Ket& psi);
  static DensityMatrix maximally_mixed(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  Complex operator()(std::size_t r, std::size_t c) const {
    return m_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }

  double purity() const;

 private:
  CMatrix m_;
};

/// Rank-1 time-bin projector: either a Z-basis bin or the phase-basis state
/// (|e⟩ + e^{iφ}|ℓ⟩)/√2.
class Projector {
 public:
  enum class Basis { Z, Phase };

  static Projector z(TimeBin bin);
  /// φ must lie in [0, 2π).
  static Projector phase(double phi);

  Basis basis() const { return basis_; }
  TimeBin bin() const { return bin_; }
  double phi() const { return phi_; }
  const Ket& ket() const { return ket_; }
  const CMatrix& matrix() const { return matrix_; }

 private:
  Projector(Basis basis, TimeBin bin, double phi, Ket ket);

  Basis basis_;
  TimeBin bin_ = TimeBin::Early;
  double phi_ = 0.0;
  Ket ket_;
  CMatrix matrix_;
};

Ket bell_state(BellKind kind);

Ket tensor(const Ket& a, const Ket& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Reduced state over the subsystems listed in `keep` (ascending order kept).
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep);

/// tr(ρP); the imaginary part is discarded when below 1e-9, otherwise throws.
double expectation(const DensityMatrix& rho, const CMatrix& op);
double expectation(const DensityMatrix& rho, const Projector& p);

/// Principal square root of a Hermitian PSD matrix by eigendecomposition.
/// Eigenvalues in [−1e-8, 0) are clamped to zero; anything lower throws.
CMatrix psd_sqrt(const CMatrix& m);

bool is_hermitian(const CMatrix& m, double tol = kHermitianTol);

/// v|ψ⟩⟨ψ| + (1−v)𝟙/4 for a two-qubit maximally entangled ψ.
DensityMatrix werner_state(double v, const Ket& psi);

/// Trace distance ½‖ρ−σ‖₁.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

}  // namespace swapsim
