#pragma once

// Truncated multimode Fock states for linear-optics simulation.
//
// A FockState is stored as a polynomial in creation operators acting on the
// vacuum, Σ_k c_k Π_m (a_m†)^{n_{k,m}} |0⟩. Linear optics acts on creation
// operators, so beam splitters, interferometers and mode relabelling are all a
// substitution a_m† → Σ_o U_{o,m} a_o† followed by re-collection of terms. The
// physical amplitude of |n⟩ is c_n · √(Π_m n_m!).

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "swapsim/qstate.hpp"

namespace swapsim {

enum class Wavelength { Nm795, Nm1533 };

enum class Spatial {
  A,
  B,
  C,
  D,
  BsmOut1,
  BsmOut2,
  APlus,
  AMinus,
  DPlus,
  DMinus,
  Environment,
};

/// Spectral slot used to express partial distinguishability of the two
/// 1533 nm photons: a shared slot plus one private slot per source.
enum class OverlapSlot { Common, DistinctB, DistinctC };

struct ModeLabel {
  Wavelength wavelength = Wavelength::Nm795;
  Spatial spatial = Spatial::A;
  /// 0 = early, 1 = late; analyzer outputs also use 2 for the third bin.
  int temporal = 0;
  OverlapSlot slot = OverlapSlot::Common;

  auto operator<=>(const ModeLabel&) const = default;
  std::string to_string() const;
};

using ModeIndex = std::uint8_t;
inline constexpr std::size_t kMaxPhotons = 16;
inline constexpr std::size_t kMaxModes = 250;

/// Sorted multiset of mode indices: one product of creation operators.
class Monomial {
 public:
  Monomial() = default;
  static Monomial from_modes(std::span<const ModeIndex> modes);

  std::size_t size() const { return n_; }
  ModeIndex operator[](std::size_t i) const { return m_[i]; }
  int count(ModeIndex mode) const;

  Monomial times(const Monomial& other) const;
  Monomial times(ModeIndex mode) const;
  /// Drops every photon in `mode`.
  Monomial without(ModeIndex mode) const;

  /// Π_m n_m!
  double factorial_weight() const;
  std::vector<int> occupation(std::size_t mode_count) const;

  bool operator==(const Monomial& o) const;

 private:
  std::array<ModeIndex, kMaxPhotons> m_{};
  std::uint8_t n_ = 0;
  friend struct MonomialHash;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const noexcept;
};

/// Per-input-mode images under a linear optical network. `images[i]` lists the
/// (output mode, coefficient) pairs that a_i† maps onto.
struct LinearMap {
  std::vector<ModeLabel> outputs;
  std::vector<std::vector<std::pair<std::size_t, Complex>>> images;

  static LinearMap identity(const std::vector<ModeLabel>& modes);
};

class FockState {
 public:
  /// Vacuum over the given modes.
  explicit FockState(std::vector<ModeLabel> modes);

  /// Build from creation-polynomial terms: each term is a list of mode indices
  /// (one per created photon, repeats allowed) and its coefficient.
  static FockState from_creation_terms(
      std::vector<ModeLabel> modes,
      const std::vector<std::pair<std::vector<ModeIndex>, Complex>>& terms);

  /// A single occupation-number basis state |n⟩.
  static FockState basis(std::vector<ModeLabel> modes, std::span<const int> occupation);

  std::size_t mode_count() const { return modes_.size(); }
  const std::vector<ModeLabel>& modes() const { return modes_; }
  std::size_t term_count() const { return coeffs_.size(); }
  std::size_t max_photons() const;

  Complex amplitude(std::span<const int> occupation) const;
  double norm_squared() const;
  double mean_photons(std::size_t mode) const;
  /// P(n photons in `mode`), indexed by n.
  std::vector<double> photon_number_distribution(std::size_t mode) const;

  FockState apply_linear(const LinearMap& map) const;
  /// Product of creation polynomials over the same mode set. For two states
  /// prepared by independent sources this is their joint state.
  FockState product(const FockState& other) const;
  FockState scaled(Complex factor) const;

  /// Visit every nonzero term as (occupied monomial, physical amplitude).
  template <class F>
  void for_each_amplitude(F&& f) const {
    for (const auto& [mono, c] : coeffs_) f(mono, c * std::sqrt(mono.factorial_weight()));
  }

 private:
  using Poly = std::unordered_map<Monomial, Complex, MonomialHash>;
  FockState(std::vector<ModeLabel> modes, Poly coeffs);

  std::vector<ModeLabel> modes_;
  Poly coeffs_;
};

/// Sub-normalised pure branches of a mixed state; branch weights are their
/// squared norms.
struct FockMixture {
  std::vector<FockState> branches;

  double total_weight() const;
  double mean_photons(std::size_t mode) const;
  std::vector<double> photon_number_distribution(std::size_t mode) const;
};

/// Lossless beam splitter on modes a, b (same wavelength, time bin and slot):
/// a† → √(1−r) a† + √r b†, b† → √r a† − √(1−r) b†. At r = 1/2 this is
/// a → (a+b)/√2, b → (a−b)/√2.
FockState beam_splitter(const FockState& state, std::size_t mode_a, std::size_t mode_b,
                        double reflectivity = 0.5);

/// Loss on one mode: beam splitter onto a vacuum environment mode that is then
/// traced out. Branch k holds the part of the state in which k photons were lost.
FockMixture apply_loss(const FockState& state, std::size_t mode, double transmission);
FockMixture apply_loss(const FockMixture& state, std::size_t mode, double transmission);

}  // namespace swapsim
