#pragma once

#include <vector>

#include "wannier1d/eigensolver.hpp"

namespace wannier1d {

struct TransportOptions {
  /// IllConditioned when the second-smallest singular value of Theta falls
  /// below cond_tol times the largest one.
  double cond_tol = 1e-10;
  /// Renormalize |y|^2 back to 1/a when it drifts by more than this.
  double drift_tol = 1e-10;
  /// Assemble Theta with the Rayleigh quotient of the stage vector instead of
  /// the integrated energy.
  bool rayleigh_energy = false;
};

/// Right-hand side of the parallel-transport system
///
///   E'(k) = y^* S y / y^* y
///   y'(k) = -Theta(k)^+ S(k) y
///
/// where Theta^+ is the SVD pseudoinverse of H(k) - E with the mode of the
/// smallest singular value discarded.
struct TransportDerivative {
  CVector dy;
  double dE = 0.0;
  /// Smallest singular value kept in the pseudoinverse.
  double sigma_retained = 0.0;
  /// Largest singular value of Theta.
  double sigma_max = 0.0;
};

TransportDerivative transport_rhs(OperatorWorkspace& ws, double k, const CVector& y,
                                  double energy, const TransportOptions& options = {});

struct StepResult {
  CVector y;
  double energy = 0.0;
  /// Derivative at the start of the step (first RK stage).
  CVector dy_start;
  /// Smallest retained singular value across the four stages.
  double sigma_retained = 0.0;
};

/// One classical RK4 step of size dk > 0 from (k, y, E).
StepResult rk4_step(OperatorWorkspace& ws, double k, double dk, const CVector& y,
                    double energy, const TransportOptions& options = {});

enum class TransportMethod { rk4, discrete };

struct TransportStats {
  std::vector<double> sigma_retained;  // per step
  int renormalizations = 0;
  /// max_j | |y_j|^2 - 1/a | before any renormalization.
  double max_norm_drift = 0.0;
  /// max_j |y_j^* y_j'| / (|y_j| |y_j'|).
  double max_orthogonality = 0.0;
  double seconds = 0.0;
};

/// States on the uniform grid k_j = -Omega/2 + j Omega/K, j = 0..K.
struct Trajectory {
  double a = 0.0;
  double omega = 0.0;
  int band = 0;
  int steps = 0;
  TransportMethod method = TransportMethod::rk4;
  std::vector<BandState> states;
  /// y'(k_j); empty for discrete transport.
  std::vector<CVector> derivatives;
  /// Rayleigh quotient of each state.
  std::vector<double> rayleigh;
  TransportStats stats;

  const BandState& front() const { return states.front(); }
  const BandState& back() const { return states.back(); }
  bool has_derivatives() const { return derivatives.size() == states.size(); }
};

/// The K+1 grid points; the endpoints are exactly -Omega/2 and +Omega/2.
std::vector<double> transport_grid(double omega, int steps);

/// Integrates the transport ODE with K = steps RK4 steps from initial.k =
/// -Omega/2 to +Omega/2. Throws IllConditioned with the offending k.
Trajectory integrate_band(OperatorWorkspace& ws, int band, int steps,
                          const BandState& initial, const TransportOptions& options = {});

/// Convenience: solves the initial eigenproblem at -Omega/2 and integrates.
Trajectory integrate_band(OperatorWorkspace& ws, int band, int steps,
                          const TransportOptions& options = {},
                          const EigensolverOptions& eig_options = {});

/// Phase-aligns independently computed eigenvectors: each state is rotated by
/// exp(-i beta_j), beta_j = arg(v_j^* v_{j+1}) against the already aligned
/// predecessor. Throws OrthogonalNeighbors when consecutive overlaps vanish.
Trajectory discrete_transport(std::vector<BandState> states, double a, int band);

/// Independent eigensolves on transport_grid followed by discrete_transport.
/// The first state is replaced by `initial` when given, so the result starts
/// from the same vector as an RK4 trajectory.
Trajectory discrete_transport_band(const OperatorWorkspace& ws, int band, int steps,
                                   const BandState* initial = nullptr,
                                   const EigensolverOptions& eig_options = {});

/// arg(v^* w) and the aligned copy exp(-i arg(v^* w)) w.
double alignment_phase(const CVector& v, const CVector& w);
CVector phase_aligned(const CVector& reference, const CVector& w);

/// |y_K - y(Omega/2)| / |y_K| where y(Omega/2) is a direct eigensolve
/// rescaled to |y_K| and phase-aligned to y_K. Relative, so the value is the
/// same for unit-normalized and 1/a-normalized trajectories.
double endpoint_error(const Trajectory& trajectory, const OperatorWorkspace& ws,
                      const EigensolverOptions& eig_options = {});

}  // namespace wannier1d
