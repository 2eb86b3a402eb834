#include "wannier1d/eigensolver.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "wannier1d/errors.hpp"

namespace wannier1d {

RVector band_energies(const OperatorWorkspace& ws, double k) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(ws.hamiltonian(k), Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

BandState band_eigenpair(const OperatorWorkspace& ws, double k, int band,
                         const EigensolverOptions& options) {
  const int dim = ws.dimension();
  if (band < 1 || band > dim) {
    std::ostringstream msg;
    msg << "band index " << band << " outside 1.." << dim;
    throw InvalidArgument(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(ws.hamiltonian(k));
  const RVector& evals = solver.eigenvalues();
  const int idx = band - 1;

  const double radius = std::max({std::abs(evals(0)), std::abs(evals(dim - 1)), 1.0});
  double gap = std::numeric_limits<double>::infinity();
  if (idx > 0) gap = std::min(gap, evals(idx) - evals(idx - 1));
  if (idx + 1 < dim) gap = std::min(gap, evals(idx + 1) - evals(idx));
  if (gap < options.gap_tol * radius) {
    std::ostringstream msg;
    msg << "band " << band << " is degenerate at k=" << k << " (gap " << gap << ")";
    throw DegenerateBand(msg.str(), k, band);
  }

  CVector y = solver.eigenvectors().col(idx);
  Eigen::Index imax = 0;
  y.cwiseAbs2().maxCoeff(&imax);
  y *= std::conj(y(imax)) / std::abs(y(imax));
  y(imax) = y(imax).real();
  normalize_to_cell(y, ws.lattice_constant());
  return BandState{k, evals(idx), std::move(y)};
}

double rayleigh_quotient(const OperatorWorkspace& ws, double k, const CVector& y) {
  const double nrm2 = y.squaredNorm();
  if (!(nrm2 > 0.0)) throw InvalidArgument("Rayleigh quotient of the zero vector");
  return ws.quadratic_form(k, y).real() / nrm2;
}

void normalize_to_cell(CVector& y, double a) {
  const double nrm = y.norm();
  if (!(nrm > 0.0)) throw InvalidArgument("cannot normalize the zero vector");
  y *= 1.0 / (nrm * std::sqrt(a));
}

}  // namespace wannier1d
