#pragma once

#include "wannier1d/bloch_operator.hpp"

namespace wannier1d {

/// One point on a band: quasimomentum, energy, and the Fourier coefficient
/// vector of the periodic Bloch factor, normalized so that |y|^2 = 1/a.
struct BandState {
  double k = 0.0;
  double energy = 0.0;
  CVector y;
};

struct EigensolverOptions {
  /// Minimum gap to the neighbouring eigenvalues, relative to the spectral
  /// radius of H(k), for the band to count as isolated.
  double gap_tol = 1e-8;
};

/// All eigenvalues of H(k), ascending.
RVector band_energies(const OperatorWorkspace& ws, double k);

/// The band-th smallest eigenpair of H(k) (band is 1-based).
///
/// The eigenvector phase is fixed so that its largest-magnitude entry is real
/// and positive; callers must not rely on any particular phase.
/// Throws DegenerateBand when the eigenvalue is not isolated.
BandState band_eigenpair(const OperatorWorkspace& ws, double k, int band,
                         const EigensolverOptions& options = {});

/// y^* H(k) y / y^* y. Throws InvalidArgument for y = 0.
double rayleigh_quotient(const OperatorWorkspace& ws, double k, const CVector& y);

/// Rescales y in place to |y|^2 = 1/a.
void normalize_to_cell(CVector& y, double a);

}  // namespace wannier1d
