#pragma once

#include <map>
#include <vector>

#include "wannier1d/transport.hpp"

namespace wannier1d {

/// Phases extracted from the endpoints of a transported band.
///
/// phi_zak in (-pi, pi]. phi_0 is only defined mod pi; the extractor returns
/// it in (-pi/2, pi/2] and the real-sign convention applied later may move it
/// by pi, so stored values lie in (-pi, pi].
struct GaugePhases {
  double phi_zak = 0.0;
  double phi_0 = 0.0;
  /// Largest deviation of a single reliable component from the weighted mean.
  double zak_spread = 0.0;
  double realty_spread = 0.0;
};

struct PhaseEstimate {
  double phase = 0.0;
  double spread = 0.0;
  int components = 0;
};

/// Components whose endpoint product is below this (times 1/a) are ignored.
inline constexpr double kReliableProduct = 1e-12;
/// Components entering the spread diagnostic must carry at least this
/// fraction of the largest product; smaller ones are still averaged in, but
/// their phase is dominated by truncation and integration error.
inline constexpr double kSpreadWeight = 1e-4;

/// Zone-boundary jump of the transported vector: y_end[m] = e^{i phi} y_start[m+1]
/// for every row m that has a right neighbour. Combined over components by a
/// magnitude-weighted circular mean.
PhaseEstimate extract_zak_phase(const CVector& y_start, const CVector& y_end, double a);

/// Half-phase making the gauge-corrected coefficients conjugate symmetric:
/// e^{2 i phi} = y_start[m] / conj(y_end[-m]), mod pi, returned in (-pi/2, pi/2].
PhaseEstimate extract_realty_phase(const CVector& y_start, const CVector& y_end, double a);

GaugePhases extract_phases(const Trajectory& trajectory);

/// State sequence after the k-dependent phase e^{-i phi(k)} has been applied.
/// dy holds the derivative of the corrected state (empty when the trajectory
/// had none).
struct CorrectedSequence {
  double a = 0.0;
  double omega = 0.0;
  int band = 0;
  GaugePhases phases;
  /// Integer branch of the Zak phase; the center moves by branch * a.
  int branch = 0;
  std::vector<double> k;
  std::vector<CVector> y;
  std::vector<CVector> dy;

  int steps() const { return static_cast<int>(k.size()) - 1; }
  bool has_derivatives() const { return !dy.empty() && dy.size() == y.size(); }
};

/// Optimal linear gauge phi(k) = phi_0 + phi_zak k / Omega.
CorrectedSequence apply_gauge(const Trajectory& trajectory, const GaugePhases& phases);

/// A non-optimal member of the gauge family, used to probe optimality:
///
///   phi'(k) = (phi_zak + 2 pi n) / Omega + sum_m c_m exp(i m a k),   m != 0.
///
/// c must satisfy c_{-m} = conj(c_m) so that phi stays real.
struct PerturbedGauge {
  int n = 0;
  std::map<int, cplx> c;
};

CorrectedSequence apply_perturbed_gauge(const Trajectory& trajectory,
                                        const GaugePhases& phases,
                                        const PerturbedGauge& perturbation);

/// |y~(-Omega/2) - R y~(Omega/2)| / |y~| over the 2M overlapping rows, where R
/// shifts the Fourier index by one.
double shifted_periodicity_residual(const CorrectedSequence& seq);

/// max_j |i y~_j^* y~_j' - phi'(k_j)/a| over interior nodes, with phi' the
/// connection of the optimal gauge, (phi_zak + 2 pi branch)/Omega.
double berry_connection_deviation(const CorrectedSequence& seq);

}  // namespace wannier1d
