#pragma once

#include "wannier1d/spectral_basis.hpp"

namespace wannier1d {

/// Fourier-domain Bloch operators for one potential.
///
/// In the truncated plane-wave basis exp(i (k + m Omega) x), m = -M..M:
///
///   D(k)     = diag((k + m Omega)^2)       kinetic part
///   S(k)     = diag(2 (k + m Omega))       dD/dk
///   H(k)     = D(k) + V                    V Toeplitz from the potential
///   Theta(k) = H(k) - E I
///
/// The workspace owns the potential matrix and scratch storage. One workspace
/// per thread; the matrices it returns are independent copies.
class OperatorWorkspace {
 public:
  explicit OperatorWorkspace(const PeriodicPotential& potential);

  int truncation() const noexcept { return M_; }
  int dimension() const noexcept { return 2 * M_ + 1; }
  double reciprocal_period() const noexcept { return omega_; }
  double lattice_constant() const noexcept { return a_; }
  const CMatrix& potential_matrix() const noexcept { return potential_matrix_; }

  RVector kinetic_diagonal(double k) const;
  RVector velocity_diagonal(double k) const;
  CMatrix hamiltonian(double k) const;
  CMatrix shifted_operator(double k, double energy) const;

  /// Writes Theta(k) into the workspace scratch buffer and returns it.
  const CMatrix& assemble_shifted(double k, double energy);
  /// y^* H(k) y without forming H(k).
  cplx quadratic_form(double k, const CVector& y) const;

 private:
  double a_;
  double omega_;
  int M_;
  CMatrix potential_matrix_;
  CMatrix theta_scratch_;
};

}  // namespace wannier1d
