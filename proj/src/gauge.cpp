#include "wannier1d/gauge.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "wannier1d/errors.hpp"

namespace wannier1d {

namespace {

constexpr double pi = std::numbers::pi;

double wrap_pi(double x) {
  x = std::remainder(x, 2.0 * pi);
  return x <= -pi ? x + 2.0 * pi : x;
}

// Circular mean of arg(z) weighted by |z|, i.e. arg(sum z), restricted to
// components above the reliability floor.
PhaseEstimate weighted_phase(const std::vector<cplx>& z, double floor, const char* what) {
  cplx sum = 0.0;
  double largest = 0.0;
  int used = 0;
  for (const cplx& v : z) {
    if (std::abs(v) < floor) continue;
    sum += v;
    largest = std::max(largest, std::abs(v));
    ++used;
  }
  if (used == 0 || std::abs(sum) == 0.0) {
    std::ostringstream msg;
    msg << what << ": every endpoint product is below " << floor;
    throw NoReliableComponent(msg.str());
  }
  PhaseEstimate out;
  out.phase = std::arg(sum);
  out.components = used;
  for (const cplx& v : z) {
    if (std::abs(v) < floor || std::abs(v) < kSpreadWeight * largest) continue;
    out.spread = std::max(out.spread, std::abs(wrap_pi(std::arg(v) - out.phase)));
  }
  return out;
}

void check_pair(const CVector& y_start, const CVector& y_end, double a) {
  if (y_start.size() != y_end.size() || y_start.size() < 3 || y_start.size() % 2 == 0) {
    throw InvalidArgument("endpoint vectors must have equal odd length 2M+1");
  }
  if (!(a > 0.0)) throw InvalidArgument("lattice constant must be positive");
}

}  // namespace

PhaseEstimate extract_zak_phase(const CVector& y_start, const CVector& y_end, double a) {
  check_pair(y_start, y_end, a);
  const Eigen::Index n = y_start.size();
  std::vector<cplx> z(n - 1);
  for (Eigen::Index r = 0; r + 1 < n; ++r) z[r] = y_end(r) * std::conj(y_start(r + 1));
  return weighted_phase(z, kReliableProduct / a, "Zak phase");
}

PhaseEstimate extract_realty_phase(const CVector& y_start, const CVector& y_end, double a) {
  check_pair(y_start, y_end, a);
  const Eigen::Index n = y_start.size();
  std::vector<cplx> z(n);
  for (Eigen::Index r = 0; r < n; ++r) z[r] = y_start(r) * y_end(n - 1 - r);
  PhaseEstimate est = weighted_phase(z, kReliableProduct / a, "realty phase");
  // est.phase is 2 phi_0 in (-pi, pi]; halve into (-pi/2, pi/2].
  est.phase *= 0.5;
  est.spread *= 0.5;
  return est;
}

GaugePhases extract_phases(const Trajectory& trajectory) {
  if (trajectory.states.size() < 2) throw InvalidArgument("trajectory has no endpoints");
  const CVector& y0 = trajectory.front().y;
  const CVector& yK = trajectory.back().y;
  const auto zak = extract_zak_phase(y0, yK, trajectory.a);
  const auto real = extract_realty_phase(y0, yK, trajectory.a);
  return GaugePhases{zak.phase, real.phase, zak.spread, real.spread};
}

namespace {

// phi(k) and phi'(k) for a member of the gauge family.
struct GaugeFunction {
  double phi_0;
  double slope;
  double a;
  const std::map<int, cplx>* c;

  double value(double k) const {
    double v = phi_0 + slope * k;
    if (c) {
      for (const auto& [m, cm] : *c) {
        v += (cm * std::polar(1.0, m * a * k) / cplx(0.0, m * a)).real();
      }
    }
    return v;
  }
  double derivative(double k) const {
    double d = slope;
    if (c) {
      for (const auto& [m, cm] : *c) d += (cm * std::polar(1.0, m * a * k)).real();
    }
    return d;
  }
};

CorrectedSequence correct(const Trajectory& traj, const GaugePhases& phases, int branch,
                          const GaugeFunction& phi) {
  CorrectedSequence out;
  out.a = traj.a;
  out.omega = traj.omega;
  out.band = traj.band;
  out.phases = phases;
  out.branch = branch;
  const std::size_t n = traj.states.size();
  out.k.reserve(n);
  out.y.reserve(n);
  const bool derivs = traj.has_derivatives();
  if (derivs) out.dy.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double k = traj.states[j].k;
    const cplx rot = std::polar(1.0, -phi.value(k));
    out.k.push_back(k);
    out.y.push_back(rot * traj.states[j].y);
    if (derivs) {
      const cplx shift(0.0, phi.derivative(k));
      out.dy.push_back(rot * (traj.derivatives[j] - shift * traj.states[j].y));
    }
  }
  return out;
}

}  // namespace

CorrectedSequence apply_gauge(const Trajectory& trajectory, const GaugePhases& phases) {
  const GaugeFunction phi{phases.phi_0, phases.phi_zak / trajectory.omega, trajectory.a,
                          nullptr};
  return correct(trajectory, phases, 0, phi);
}

CorrectedSequence apply_perturbed_gauge(const Trajectory& trajectory,
                                        const GaugePhases& phases,
                                        const PerturbedGauge& perturbation) {
  for (const auto& [m, cm] : perturbation.c) {
    if (m == 0) throw InvalidArgument("perturbed gauge: c_0 is absorbed into the Zak branch");
    const auto it = perturbation.c.find(-m);
    const cplx partner = it == perturbation.c.end() ? cplx(0.0) : it->second;
    if (std::abs(partner - std::conj(cm)) > 1e-14 * (1.0 + std::abs(cm))) {
      throw InvalidArgument("perturbed gauge: coefficients must satisfy c_{-m} = conj(c_m)");
    }
  }
  const double slope = (phases.phi_zak + 2.0 * pi * perturbation.n) / trajectory.omega;
  const GaugeFunction phi{phases.phi_0, slope, trajectory.a, &perturbation.c};
  return correct(trajectory, phases, perturbation.n, phi);
}

double shifted_periodicity_residual(const CorrectedSequence& seq) {
  if (seq.y.size() < 2) throw InvalidArgument("sequence has no endpoints");
  const CVector& y0 = seq.y.front();
  const CVector& yK = seq.y.back();
  const Eigen::Index n = y0.size();
  const double diff = (y0.tail(n - 1) - yK.head(n - 1)).norm();
  return diff / yK.norm();
}

double berry_connection_deviation(const CorrectedSequence& seq) {
  if (!seq.has_derivatives()) {
    throw Error(ErrorKind::missing_derivatives, "sequence carries no derivative vectors");
  }
  const double expected =
      (seq.phases.phi_zak + 2.0 * pi * seq.branch) / (seq.omega * seq.a);
  double worst = 0.0;
  for (std::size_t j = 1; j + 1 < seq.y.size(); ++j) {
    const cplx conn = cplx(0.0, 1.0) * seq.y[j].dot(seq.dy[j]);
    worst = std::max(worst, std::abs(conn - expected));
  }
  return worst;
}

}  // namespace wannier1d
