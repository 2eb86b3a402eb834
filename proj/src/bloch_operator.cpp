#include "wannier1d/bloch_operator.hpp"

namespace wannier1d {

OperatorWorkspace::OperatorWorkspace(const PeriodicPotential& potential)
    : a_(potential.lattice_constant()),
      omega_(potential.reciprocal_period()),
      M_(potential.truncation()),
      potential_matrix_(build_potential_matrix(potential)),
      theta_scratch_(potential.dimension(), potential.dimension()) {}

RVector OperatorWorkspace::kinetic_diagonal(double k) const {
  RVector d(dimension());
  for (int r = 0; r < dimension(); ++r) {
    const double q = k + fourier_index(r, M_) * omega_;
    d(r) = q * q;
  }
  return d;
}

RVector OperatorWorkspace::velocity_diagonal(double k) const {
  RVector s(dimension());
  for (int r = 0; r < dimension(); ++r) s(r) = 2.0 * (k + fourier_index(r, M_) * omega_);
  return s;
}

CMatrix OperatorWorkspace::hamiltonian(double k) const {
  CMatrix h = potential_matrix_;
  h.diagonal() += kinetic_diagonal(k).cast<cplx>();
  return h;
}

CMatrix OperatorWorkspace::shifted_operator(double k, double energy) const {
  CMatrix theta = hamiltonian(k);
  theta.diagonal().array() -= energy;
  return theta;
}

const CMatrix& OperatorWorkspace::assemble_shifted(double k, double energy) {
  theta_scratch_ = potential_matrix_;
  for (int r = 0; r < dimension(); ++r) {
    const double q = k + fourier_index(r, M_) * omega_;
    theta_scratch_(r, r) += q * q - energy;
  }
  return theta_scratch_;
}

cplx OperatorWorkspace::quadratic_form(double k, const CVector& y) const {
  cplx acc = y.dot(potential_matrix_ * y);
  for (int r = 0; r < dimension(); ++r) {
    const double q = k + fourier_index(r, M_) * omega_;
    acc += q * q * std::norm(y(r));
  }
  return acc;
}

}  // namespace wannier1d
