#include "wannier1d/transport.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wannier1d/errors.hpp"
#include "wannier1d/svd.hpp"

namespace wannier1d {

TransportDerivative transport_rhs(OperatorWorkspace& ws, double k, const CVector& y,
                                  double energy, const TransportOptions& options) {
  const int dim = ws.dimension();
  const double nrm2 = y.squaredNorm();
  if (!(nrm2 > 0.0)) throw InvalidArgument("transport_rhs: zero state vector");

  const RVector s = ws.velocity_diagonal(k);
  const CVector z = s.cast<cplx>().cwiseProduct(y);

  TransportDerivative out;
  out.dE = y.dot(z).real() / nrm2;

  const double shift = options.rayleigh_energy ? rayleigh_quotient(ws, k, y) : energy;
  const CMatrix& theta = ws.assemble_shifted(k, shift);
  const SvdResult svd = full_svd(theta);
  const RVector& sigma = svd.sigma;  // descending

  const int kept = dim - 1;
  out.sigma_max = sigma(0);
  out.sigma_retained = sigma(kept - 1);
  if (out.sigma_retained < options.cond_tol * out.sigma_max) {
    std::ostringstream msg;
    msg << "shifted operator has a second near-null singular value at k=" << k
        << " (sigma=" << out.sigma_retained << ", |Theta|=" << out.sigma_max << ")";
    throw IllConditioned(msg.str(), k);
  }

  out.dy = -truncated_pseudoinverse_apply(svd, z, 1);
  return out;
}

StepResult rk4_step(OperatorWorkspace& ws, double k, double dk, const CVector& y,
                    double energy, const TransportOptions& options) {
  if (!(dk > 0.0)) throw InvalidArgument("rk4_step: step must be positive");
  const double half = 0.5 * dk;

  const auto w1 = transport_rhs(ws, k, y, energy, options);
  const auto w2 = transport_rhs(ws, k + half, y + half * w1.dy, energy + half * w1.dE, options);
  const auto w3 = transport_rhs(ws, k + half, y + half * w2.dy, energy + half * w2.dE, options);
  const auto w4 = transport_rhs(ws, k + dk, y + dk * w3.dy, energy + dk * w3.dE, options);

  StepResult out;
  out.y = y + (dk / 6.0) * (w1.dy + 2.0 * w2.dy + 2.0 * w3.dy + w4.dy);
  out.energy = energy + (dk / 6.0) * (w1.dE + 2.0 * w2.dE + 2.0 * w3.dE + w4.dE);
  out.dy_start = w1.dy;
  out.sigma_retained = std::min({w1.sigma_retained, w2.sigma_retained, w3.sigma_retained,
                                 w4.sigma_retained});
  return out;
}

std::vector<double> transport_grid(double omega, int steps) {
  if (steps < 1) throw InvalidArgument("transport grid needs at least one step");
  std::vector<double> k(steps + 1);
  for (int j = 0; j <= steps; ++j) k[j] = -0.5 * omega + omega * j / steps;
  k.front() = -0.5 * omega;
  k.back() = 0.5 * omega;
  return k;
}

namespace {

double orthogonality(const CVector& y, const CVector& dy) {
  const double denom = y.norm() * dy.norm();
  return denom > 0.0 ? std::abs(y.dot(dy)) / denom : 0.0;
}

}  // namespace

Trajectory integrate_band(OperatorWorkspace& ws, int band, int steps,
                          const BandState& initial, const TransportOptions& options) {
  if (steps < 2) throw InvalidArgument("integrate_band: K must be >= 2");
  const double omega = ws.reciprocal_period();
  const double a = ws.lattice_constant();
  if (std::abs(initial.k + 0.5 * omega) > 1e-14 * omega) {
    throw InvalidArgument("integrate_band: initial state must sit at k = -Omega/2");
  }
  if (initial.y.size() != ws.dimension()) {
    throw InvalidArgument("integrate_band: initial vector has wrong dimension");
  }

  const auto start = std::chrono::steady_clock::now();
  const auto grid = transport_grid(omega, steps);
  const double dk = omega / steps;
  const double target = 1.0 / a;

  Trajectory traj;
  traj.a = a;
  traj.omega = omega;
  traj.band = band;
  traj.steps = steps;
  traj.method = TransportMethod::rk4;
  traj.states.reserve(steps + 1);
  traj.derivatives.reserve(steps + 1);
  traj.rayleigh.reserve(steps + 1);
  traj.stats.sigma_retained.reserve(steps);

  CVector y = initial.y;
  double energy = initial.energy;
  try {
    for (int j = 0; j < steps; ++j) {
      const double drift = std::abs(y.squaredNorm() - target);
      traj.stats.max_norm_drift = std::max(traj.stats.max_norm_drift, drift);
      if (drift > options.drift_tol) {
        normalize_to_cell(y, a);
        ++traj.stats.renormalizations;
      }
      auto step = rk4_step(ws, grid[j], dk, y, energy, options);
      traj.stats.max_orthogonality =
          std::max(traj.stats.max_orthogonality, orthogonality(y, step.dy_start));
      traj.stats.sigma_retained.push_back(step.sigma_retained);
      traj.rayleigh.push_back(rayleigh_quotient(ws, grid[j], y));
      traj.states.push_back(BandState{grid[j], energy, y});
      traj.derivatives.push_back(std::move(step.dy_start));
      y = std::move(step.y);
      energy = step.energy;
    }
    const double drift = std::abs(y.squaredNorm() - target);
    traj.stats.max_norm_drift = std::max(traj.stats.max_norm_drift, drift);
    if (drift > options.drift_tol) {
      normalize_to_cell(y, a);
      ++traj.stats.renormalizations;
    }
    auto last = transport_rhs(ws, grid[steps], y, energy, options);
    traj.stats.max_orthogonality =
        std::max(traj.stats.max_orthogonality, orthogonality(y, last.dy));
    traj.rayleigh.push_back(rayleigh_quotient(ws, grid[steps], y));
    traj.states.push_back(BandState{grid[steps], energy, y});
    traj.derivatives.push_back(std::move(last.dy));
  } catch (const IllConditioned& e) {
    throw IllConditioned(e.what(), e.k().value_or(0.0), band);
  }

  traj.stats.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return traj;
}

Trajectory integrate_band(OperatorWorkspace& ws, int band, int steps,
                          const TransportOptions& options,
                          const EigensolverOptions& eig_options) {
  const auto initial =
      band_eigenpair(ws, -0.5 * ws.reciprocal_period(), band, eig_options);
  return integrate_band(ws, band, steps, initial, options);
}

double alignment_phase(const CVector& v, const CVector& w) { return std::arg(v.dot(w)); }

CVector phase_aligned(const CVector& reference, const CVector& w) {
  return std::polar(1.0, -alignment_phase(reference, w)) * w;
}

Trajectory discrete_transport(std::vector<BandState> states, double a, int band) {
  if (states.size() < 2) throw InvalidArgument("discrete_transport: need >= 2 states");
  for (std::size_t j = 0; j + 1 < states.size(); ++j) {
    const CVector& v = states[j].y;
    CVector& w = states[j + 1].y;
    const cplx overlap = v.dot(w);
    if (std::abs(overlap) < 1e-8 * v.norm() * w.norm()) {
      std::ostringstream msg;
      msg << "consecutive eigenvectors are orthogonal near k=" << states[j + 1].k
          << "; refine the k-grid";
      throw OrthogonalNeighbors(msg.str(), states[j + 1].k);
    }
    w *= std::polar(1.0, -std::arg(overlap));
  }
  Trajectory traj;
  traj.a = a;
  traj.omega = 2.0 * std::numbers::pi / a;
  traj.band = band;
  traj.steps = static_cast<int>(states.size()) - 1;
  traj.method = TransportMethod::discrete;
  traj.rayleigh.reserve(states.size());
  for (const auto& s : states) traj.rayleigh.push_back(s.energy);
  traj.states = std::move(states);
  return traj;
}

Trajectory discrete_transport_band(const OperatorWorkspace& ws, int band, int steps,
                                   const BandState* initial,
                                   const EigensolverOptions& eig_options) {
  const auto start = std::chrono::steady_clock::now();
  const auto grid = transport_grid(ws.reciprocal_period(), steps);
  std::vector<BandState> states;
  states.reserve(grid.size());
  for (double k : grid) states.push_back(band_eigenpair(ws, k, band, eig_options));
  if (initial != nullptr) states.front() = *initial;
  auto traj = discrete_transport(std::move(states), ws.lattice_constant(), band);
  traj.stats.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return traj;
}

double endpoint_error(const Trajectory& trajectory, const OperatorWorkspace& ws,
                      const EigensolverOptions& eig_options) {
  const BandState& last = trajectory.back();
  auto direct = band_eigenpair(ws, last.k, trajectory.band, eig_options);
  CVector ref = phase_aligned(last.y, direct.y);
  const double scale = last.y.norm();
  ref *= scale / ref.norm();
  return (last.y - ref).norm() / scale;
}

}  // namespace wannier1d
