#include "swapsim/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "swapsim/error.hpp"

namespace swapsim {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

}  // namespace

const char* to_string(BellKind kind) {
  switch (kind) {
    case BellKind::PhiPlus:
      return "PhiPlus";
    case BellKind::PhiMinus:
      return "PhiMinus";
    case BellKind::PsiPlus:
      return "PsiPlus";
    case BellKind::PsiMinus:
      return "PsiMinus";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Ket

Ket::Ket(CVector amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() == 0) throw InvalidStateError("Ket: dimension must be at least 1");
  const double n = amps_.norm();
  if (!(n > 1e-300)) throw InvalidStateError("Ket: cannot normalise a zero vector");
  amps_ /= n;
}

Ket Ket::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) throw DimensionError("Ket::basis: index out of range");
  CVector v = CVector::Zero(idx(dim));
  v(idx(index)) = 1.0;
  return Ket(std::move(v));
}

Complex Ket::inner(const Ket& other) const {
  if (other.dim() != dim()) throw DimensionError("Ket::inner: dimension mismatch");
  return amps_.dot(other.amps_);
}

CMatrix Ket::projector() const { return amps_ * amps_.adjoint(); }

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(CMatrix m) : m_(std::move(m)) {
  if (m_.rows() == 0 || m_.rows() != m_.cols()) {
    throw DimensionError("DensityMatrix: matrix must be square and non-empty");
  }
  if (!is_hermitian(m_)) throw InvalidStateError("DensityMatrix: matrix is not Hermitian");
  const Complex tr = m_.trace();
  if (std::abs(tr.real() - 1.0) > kTraceTol || std::abs(tr.imag()) > kTraceTol) {
    std::ostringstream os;
    os << "DensityMatrix: trace " << tr.real() << " is not 1";
    throw InvalidStateError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPsdClamp) {
    std::ostringstream os;
    os << "DensityMatrix: negative eigenvalue " << es.eigenvalues().minCoeff();
    throw InvalidStateError(os.str());
  }
}

DensityMatrix DensityMatrix::from_ket(const Ket& psi) { return DensityMatrix(psi.projector()); }

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  if (dim == 0) throw DimensionError("maximally_mixed: dim must be positive");
  return DensityMatrix(CMatrix::Identity(idx(dim), idx(dim)) / static_cast<double>(dim));
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

// ---------------------------------------------------------------------------
// Projector

Projector::Projector(Basis basis, TimeBin bin, double phi, Ket ket)
    : basis_(basis), bin_(bin), phi_(phi), ket_(std::move(ket)), matrix_(ket_.projector()) {}

Projector Projector::z(TimeBin bin) {
  return Projector(Basis::Z, bin, 0.0, Ket::basis(2, static_cast<std::size_t>(bin)));
}

Projector Projector::phase(double phi) {
  if (!(phi >= 0.0 && phi < 2.0 * std::numbers::pi)) {
    throw std::invalid_argument("Projector::phase: phi must lie in [0, 2π)");
  }
  CVector v(2);
  v << 1.0, std::polar(1.0, phi);
  return Projector(Basis::Phase, TimeBin::Early, phi, Ket(v));
}

// ---------------------------------------------------------------------------
// Free functions

Ket bell_state(BellKind kind) {
  CVector v = CVector::Zero(4);
  switch (kind) {
    case BellKind::PhiPlus:
      v << 1, 0, 0, 1;
      break;
    case BellKind::PhiMinus:
      v << 1, 0, 0, -1;
      break;
    case BellKind::PsiPlus:
      v << 0, 1, 1, 0;
      break;
    case BellKind::PsiMinus:
      v << 0, 1, -1, 0;
      break;
  }
  return Ket(v);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Ket tensor(const Ket& a, const Ket& b) {
  return Ket(kron(a.amplitudes(), b.amplitudes()));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(kron(a.matrix(), b.matrix()));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep) {
  const std::size_t total =
      std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
  if (dims.empty() || total != rho.dim()) {
    throw DimensionError("partial_trace: product of subsystem dims does not match rho");
  }
  std::vector<bool> kept(dims.size(), false);
  for (std::size_t k : keep) {
    if (k >= dims.size()) throw DimensionError("partial_trace: keep index out of range");
    kept[k] = true;
  }

  std::size_t kept_dim = 1;
  for (std::size_t s = 0; s < dims.size(); ++s) {
    if (kept[s]) kept_dim *= dims[s];
  }

  // Row-major digit decomposition of a flat index.
  auto split = [&](std::size_t flat, std::vector<std::size_t>& digits) {
    for (std::size_t s = dims.size(); s-- > 0;) {
      digits[s] = flat % dims[s];
      flat /= dims[s];
    }
  };
  auto kept_index = [&](const std::vector<std::size_t>& digits) {
    std::size_t out = 0;
    for (std::size_t s = 0; s < dims.size(); ++s) {
      if (kept[s]) out = out * dims[s] + digits[s];
    }
    return out;
  };

  CMatrix out = CMatrix::Zero(idx(kept_dim), idx(kept_dim));
  std::vector<std::size_t> dr(dims.size()), dc(dims.size());
  const CMatrix& m = rho.matrix();
  for (std::size_t r = 0; r < total; ++r) {
    split(r, dr);
    for (std::size_t c = 0; c < total; ++c) {
      split(c, dc);
      bool traced_match = true;
      for (std::size_t s = 0; s < dims.size() && traced_match; ++s) {
        if (!kept[s] && dr[s] != dc[s]) traced_match = false;
      }
      if (!traced_match) continue;
      out(idx(kept_index(dr)), idx(kept_index(dc))) += m(idx(r), idx(c));
    }
  }
  return DensityMatrix(out);
}

double expectation(const DensityMatrix& rho, const CMatrix& op) {
  if (op.rows() != op.cols() || static_cast<std::size_t>(op.rows()) != rho.dim()) {
    throw DimensionError("expectation: operator dimension does not match rho");
  }
  const Complex v = (rho.matrix() * op).trace();
  if (std::abs(v.imag()) > 1e-9) {
    throw NumericalError("expectation: result has a non-negligible imaginary part");
  }
  return v.real();
}

double expectation(const DensityMatrix& rho, const Projector& p) {
  return expectation(rho, p.matrix());
}

bool is_hermitian(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

CMatrix psd_sqrt(const CMatrix& m) {
  if (!is_hermitian(m)) throw InvalidStateError("psd_sqrt: matrix is not Hermitian");
  const CMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  Eigen::VectorXd ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -kPsdClamp) {
      std::ostringstream os;
      os << "psd_sqrt: eigenvalue " << ev(i) << " below clamp threshold";
      throw InvalidStateError(os.str());
    }
    ev(i) = std::sqrt(std::max(0.0, ev(i)));
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

DensityMatrix werner_state(double v, const Ket& psi) {
  if (psi.dim() != 4) throw DimensionError("werner_state: psi must be a two-qubit ket");
  return DensityMatrix(v * psi.projector() + (1.0 - v) * CMatrix::Identity(4, 4) / 4.0);
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw DimensionError("trace_distance: dimension mismatch");
  const CMatrix d = rho.matrix() - sigma.matrix();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace swapsim
