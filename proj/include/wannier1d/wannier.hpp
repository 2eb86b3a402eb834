#pragma once

#include <vector>

#include "wannier1d/gauge.hpp"

namespace wannier1d {

/// Samples of the Fourier transform of W_0 on the unfolded frequency grid
///
///   xi_l = -Omega/2 - M Omega + l Omega / K,   l = 0..N-1,  N = (2M+1) K.
///
/// Sample l = r K + j comes from row r of the corrected state at k_j. Adjacent
/// cells share a frequency (j = K of row r and j = 0 of row r+1); the two
/// estimates are averaged. The right end of the last cell is dropped so the
/// grid is uniform and half-open, which makes the uniform 1/K weights the
/// periodic trapezoidal rule.
struct WannierRepresentation {
  double a = 0.0;
  double omega = 0.0;
  int steps = 0;
  int M = 0;
  int band = 0;
  GaugePhases phases;
  int branch = 0;
  std::vector<double> xi;
  std::vector<cplx> alpha;

  double spacing() const { return omega / steps; }
};

/// Largest shifted-periodicity residual assemble_alpha accepts.
inline constexpr double kMaxAssemblyResidual = 1e-4;

/// Throws Error(gauge_not_applied) when the sequence is not shifted-periodic.
WannierRepresentation assemble_alpha(const CorrectedSequence& seq,
                                     double max_residual = kMaxAssemblyResidual);

/// W_0(x) = (1/K) sum_l alpha_l exp(i x xi_l). The result is K a-periodic in x.
std::vector<cplx> evaluate_wannier(const WannierRepresentation& rep,
                                   const std::vector<double>& x);
cplx evaluate_wannier(const WannierRepresentation& rep, double x);

/// W_n(x) = W_0(x - n a).
std::vector<cplx> wannier_shifted(const WannierRepresentation& rep, int n,
                                  const std::vector<double>& x);

/// x_j = -a/2 + j a / 1000, j = 1..1000: one lattice cell around the origin.
std::vector<double> reference_cell_grid(double a);

/// Fixes the sign left open by the realty phase: W_0 is made positive at the
/// sample of reference_cell_grid where |W_0| is largest. Flips alpha and moves
/// phi_0 by pi when needed. Returns true if a flip happened.
bool orient_real_sign(WannierRepresentation& rep);

/// max |Im W_0| / max |W_0| over the given points.
double imaginary_ratio(const WannierRepresentation& rep, const std::vector<double>& x);

struct Moments {
  double center = 0.0;
  double second = 0.0;
  double variance = 0.0;
};

/// Center of the optimally gauged function: (phi_zak + 2 pi branch) a / (2 pi).
double compute_center(const GaugePhases& phases, double a, int branch = 0);

/// (a^2 / 2 pi) int |y'(k)|^2 dk by the trapezoidal rule on the transport grid.
/// Requires |y|^2 = 1/a and stored derivatives.
double compute_variance(const Trajectory& trajectory);

/// Moments in an arbitrary member of the gauge family, from the corrected
/// states and their derivatives:
///
///   <x>   = (a^2 / 2 pi) int i y~^* y~' dk
///   <x^2> = (a^2 / 2 pi) int |y~'|^2 dk
Moments compute_moments(const CorrectedSequence& seq);

struct DecayDiagnostics {
  double e_imag = 0.0;
  double max_abs = 0.0;
  /// Least-squares slope of ln(envelope) against distance from the peak.
  double decay_rate = 0.0;
  /// log10(max_abs) - log10(smallest envelope value).
  double decades = 0.0;
  /// Per-cell maxima used in the fit.
  std::vector<double> envelope_x;
  std::vector<double> envelope;
};

/// Samples W_0 on n_points uniform points of [xmin, xmax] and fits the decay of
/// the cell-wise maxima of |W_0|. Only cells lying entirely inside the window
/// contribute; fewer than four is an InvalidArgument.
DecayDiagnostics decay_diagnostics(const WannierRepresentation& rep, double xmin, double xmax,
                                   int n_points);

}  // namespace wannier1d
