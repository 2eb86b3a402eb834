#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "wannier1d/errors.hpp"
#include "wannier1d/gauge.hpp"
#include "wannier1d/wannier.hpp"

using namespace wannier1d;
using std::numbers::pi;

namespace {

const double kA = 2 * pi;

CVector sample_vector() {
  CVector v(7);
  v << cplx(0.01, 0.002), cplx(-0.05, 0.03), cplx(0.2, -0.1), cplx(0.3, 0.05),
      cplx(-0.12, 0.2), cplx(0.04, -0.02), cplx(0.003, 0.001);
  return v;
}

// y_end with y_end[m] = e^{i phi} y_start[m+1] on the overlapping rows.
CVector jumped(const CVector& start, double phi) {
  CVector end = CVector::Zero(start.size());
  end.head(start.size() - 1) = std::polar(1.0, phi) * start.tail(start.size() - 1);
  return end;
}

Trajectory gaussian_band(int band, int steps) {
  OperatorWorkspace ws(gaussian5_potential(kA, 10));
  return integrate_band(ws, band, steps);
}

}  // namespace

TEST_SUITE("gauge") {

TEST_CASE("Zak phase of constructed jumps") {
  const CVector s = sample_vector();
  CHECK(extract_zak_phase(s, jumped(s, 0.0), kA).phase == doctest::Approx(0.0));
  const auto est = extract_zak_phase(s, jumped(s, -pi / 2), kA);
  CHECK(est.phase == doctest::Approx(-pi / 2).epsilon(1e-14));
  CHECK(est.spread < 1e-15);
  // With y_start[m+1] = i y_end[m] the jump is -pi/2.
  CVector start = s, end = CVector::Zero(7);
  end.head(6) = start.tail(6) / cplx(0.0, 1.0);
  CHECK(extract_zak_phase(start, end, kA).phase == doctest::Approx(-pi / 2));
  CHECK(extract_zak_phase(s, jumped(s, pi), kA).phase == doctest::Approx(pi));
}

TEST_CASE("no reliable component") {
  const CVector z = CVector::Zero(5);
  CHECK_THROWS_AS(extract_zak_phase(z, z, kA), NoReliableComponent);
  CHECK_THROWS_AS(extract_realty_phase(z, z, kA), NoReliableComponent);
  CVector tiny = CVector::Constant(5, 1e-8);
  CHECK_THROWS_AS(extract_zak_phase(tiny, tiny, kA), NoReliableComponent);
  CHECK_THROWS_AS(extract_zak_phase(CVector::Ones(5), CVector::Ones(7), kA), InvalidArgument);
}

TEST_CASE("realty phase of constructed pairs") {
  CVector s(5);
  s << 0.1, 0.3, 0.8, 0.3, 0.1;
  CHECK(extract_realty_phase(s, s.reverse(), kA).phase == doctest::Approx(0.0));
  // Rotating both ends by e^{i pi/4} requires phi_0 = pi/4.
  const cplx r = std::polar(1.0, pi / 4);
  CVector rs = r * s;
  CVector re = r * CVector(s.reverse());
  CHECK(extract_realty_phase(rs, re, kA).phase == doctest::Approx(pi / 4));
  // The half-phase is folded into (-pi/2, pi/2].
  const cplx big = std::polar(1.0, 2.0);
  const double phi = extract_realty_phase(big * s, big * CVector(s.reverse()), kA).phase;
  CHECK(phi == doctest::Approx(2.0 - pi));
}

TEST_CASE("even potential quantizes the Zak phase; matches a discrete Berry phase") {
  OperatorWorkspace ws(gaussian5_potential(kA, 10));
  for (int band = 1; band <= 2; ++band) {
    const auto traj = integrate_band(ws, band, 400);
    const auto ph = extract_phases(traj);
    const double dist = std::min(std::abs(ph.phi_zak), pi - std::abs(ph.phi_zak));
    CHECK(dist <= 1e-6);
    CHECK(ph.zak_spread <= 1e-6);

    // Independent loop of reference eigenvectors on a fine grid, closed with
    // the index-shifted first vector.
    const int n = 2000;
    std::vector<oracle::Vec> loop;
    for (int j = 0; j < n; ++j) {
      const double k = -0.5 + static_cast<double>(j) / n;
      loop.push_back(oracle::eigenpairs(oracle::hamiltonian(oracle::gaussian5_coefficient, kA, 10, k))
                         .vectors[band - 1]);
    }
    oracle::Vec closing = oracle::Vec::Zero(21);
    closing.head(20) = loop.front().tail(20);
    loop.push_back(closing);
    const double berry = oracle::discrete_berry_phase(loop);
    CHECK(std::abs(std::remainder(berry - ph.phi_zak, 2 * pi)) <= 1e-5);
  }
}

TEST_CASE("asymmetric potential: discrete Berry phase agrees with the extracted phase") {
  OperatorWorkspace ws(asym_exp_potential(kA, 15));
  const auto traj = integrate_band(ws, 1, 400);
  const auto ph = extract_phases(traj);
  CHECK(ph.zak_spread <= 1e-6);
  auto coef = [pot = asym_exp_potential(kA, 15)](int j) { return pot.coefficient(j); };
  const int n = 2000;
  std::vector<oracle::Vec> loop;
  for (int j = 0; j < n; ++j) {
    const double k = -0.5 + static_cast<double>(j) / n;
    loop.push_back(oracle::eigenpairs(oracle::hamiltonian(coef, kA, 15, k)).vectors[0]);
  }
  oracle::Vec closing = oracle::Vec::Zero(31);
  closing.head(30) = loop.front().tail(30);
  loop.push_back(closing);
  CHECK(std::abs(std::remainder(oracle::discrete_berry_phase(loop) - ph.phi_zak, 2 * pi)) <= 1e-5);
}

TEST_CASE("gauge correction makes the sequence shifted-periodic") {
  OperatorWorkspace ws(gaussian5_potential(kA, 10));
  const auto traj = integrate_band(ws, 1, 200);
  const double err = endpoint_error(traj, ws);
  const auto ph = extract_phases(traj);
  const auto seq = apply_gauge(traj, ph);
  CHECK(shifted_periodicity_residual(seq) <= 10 * err);
  for (std::size_t j = 0; j < seq.y.size(); ++j) {
    CHECK(std::abs(seq.y[j].norm() - traj.states[j].y.norm()) <= 1e-15);
  }
  CHECK(berry_connection_deviation(seq) <= 10 * err);
}

TEST_CASE("shifted periodicity at the transport error scale, coarse grid") {
  OperatorWorkspace ws(gaussian5_potential(kA, 10));
  const auto traj = integrate_band(ws, 1, 50);
  const auto seq = apply_gauge(traj, extract_phases(traj));
  CHECK(shifted_periodicity_residual(seq) <= 10 * endpoint_error(traj, ws));
}

TEST_CASE("zero phases leave the trajectory untouched") {
  const auto traj = gaussian_band(1, 40);
  const auto seq = apply_gauge(traj, GaugePhases{});
  for (std::size_t j = 0; j < seq.y.size(); ++j) {
    CHECK((seq.y[j] - traj.states[j].y).norm() == 0.0);
    CHECK((seq.dy[j] - traj.derivatives[j]).norm() == 0.0);
  }
}

TEST_CASE("perturbed gauge reductions and validation") {
  OperatorWorkspace ws(asym_exp_potential(kA, 15));
  const auto traj = integrate_band(ws, 1, 200);
  const auto ph = extract_phases(traj);
  const auto opt = apply_gauge(traj, ph);
  const auto same = apply_perturbed_gauge(traj, ph, PerturbedGauge{});
  for (std::size_t j = 0; j < opt.y.size(); ++j) {
    CHECK((opt.y[j] - same.y[j]).norm() <= 1e-15);
    CHECK((opt.dy[j] - same.dy[j]).norm() <= 1e-14);
  }

  PerturbedGauge bad;
  bad.c[1] = 0.1;
  CHECK_THROWS_AS(apply_perturbed_gauge(traj, ph, bad), InvalidArgument);
  bad.c[-1] = 0.2;
  CHECK_THROWS_AS(apply_perturbed_gauge(traj, ph, bad), InvalidArgument);
  PerturbedGauge zero;
  zero.c[0] = 0.1;
  CHECK_THROWS_AS(apply_perturbed_gauge(traj, ph, zero), InvalidArgument);

  PerturbedGauge p;
  p.n = 1;
  p.c[1] = cplx(0.1, 0.05);
  p.c[-1] = cplx(0.1, -0.05);
  const auto pert = apply_perturbed_gauge(traj, ph, p);
  CHECK(shifted_periodicity_residual(pert) <= 10 * endpoint_error(traj, ws) + 1e-12);
}

TEST_CASE("a constant initial phase changes neither the Zak phase nor |W_0|") {
  OperatorWorkspace ws(asym_exp_potential(kA, 15));
  auto start = band_eigenpair(ws, -0.5, 1);
  const auto t0 = integrate_band(ws, 1, 120, start);
  start.y *= std::polar(1.0, 0.77);
  const auto t1 = integrate_band(ws, 1, 120, start);
  const auto p0 = extract_phases(t0), p1 = extract_phases(t1);
  CHECK(std::abs(p0.phi_zak - p1.phi_zak) <= 1e-10);
  auto r0 = assemble_alpha(apply_gauge(t0, p0));
  auto r1 = assemble_alpha(apply_gauge(t1, p1));
  const auto x = reference_cell_grid(kA);
  const auto w0 = evaluate_wannier(r0, x), w1 = evaluate_wannier(r1, x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(std::abs(std::abs(w0[i]) - std::abs(w1[i])) <= 1e-10);
  }
}

TEST_CASE("Berry connection identity needs derivatives") {
  CorrectedSequence seq;
  seq.k = {0.0, 1.0};
  seq.y = {CVector::Ones(3), CVector::Ones(3)};
  CHECK_THROWS_AS(berry_connection_deviation(seq), Error);
}

}  // TEST_SUITE
