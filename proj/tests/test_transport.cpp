#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "wannier1d/errors.hpp"
#include "wannier1d/transport.hpp"

using namespace wannier1d;
using std::numbers::pi;

namespace {

const double kA = 2 * pi;

CVector center_state(int M, double a) {
  CVector y = CVector::Zero(2 * M + 1);
  y(M) = 1.0 / std::sqrt(a);
  return y;
}

}  // namespace

TEST_SUITE("transport") {

TEST_CASE("constant potential: flat connection at interior k") {
  OperatorWorkspace ws(constant_potential(kA, 4, 0.6));
  const CVector y = center_state(4, kA);
  for (double k : {-0.3, 0.1, 0.35}) {
    const auto d = transport_rhs(ws, k, y, k * k + 0.6);
    CHECK(d.dy.norm() < 1e-14);
    CHECK(d.dE == doctest::Approx(2 * k).epsilon(1e-14));
  }
  // E' = 2k is integrated exactly and y does not move.
  const auto step = rk4_step(ws, 0.1, 0.05, y, 0.01 + 0.6);
  CHECK((step.y - y).norm() < 1e-14);
  CHECK(step.energy == doctest::Approx(0.15 * 0.15 + 0.6).epsilon(1e-14));
}

TEST_CASE("derivative is orthogonal to the state") {
  OperatorWorkspace ws(asym_exp_potential(kA, 15));
  for (int band = 1; band <= 3; ++band) {
    for (double k : {-0.4, 0.0, 0.27}) {
      const auto st = band_eigenpair(ws, k, band);
      const auto d = transport_rhs(ws, k, st.y, st.energy);
      CHECK(std::abs(st.y.dot(d.dy)) <= 1e-10 * st.y.norm() * d.dy.norm());
      CHECK(d.dE == doctest::Approx(st.y.dot(ws.velocity_diagonal(k).cast<cplx>().cwiseProduct(st.y)).real() /
                                    st.y.squaredNorm()));
    }
  }
}

TEST_CASE("derivative matches a finite difference of aligned reference eigenvectors") {
  OperatorWorkspace ws(gaussian5_potential(kA, 10));
  const double k = 0.0, h = 1e-5;
  const auto st = band_eigenpair(ws, k, 1);
  const auto d = transport_rhs(ws, k, st.y, st.energy);

  auto ref = [&](double kk) {
    const auto e = oracle::eigenpairs(oracle::hamiltonian(oracle::gaussian5_coefficient, kA, 10, kk));
    return oracle::aligned(st.y, e.vectors[0] / std::sqrt(kA));
  };
  const oracle::Vec fd = (ref(k + h) - ref(k - h)) / (2 * h);
  CHECK((fd - d.dy).norm() <= 1e-6 * d.dy.norm());
}

TEST_CASE("the derivative of the energy equals the slope of the band") {
  OperatorWorkspace ws(asym_exp_potential(kA, 15));
  const double k = 0.21, h = 1e-5;
  const auto st = band_eigenpair(ws, k, 2);
  const auto d = transport_rhs(ws, k, st.y, st.energy);
  const double fd = (band_eigenpair(ws, k + h, 2).energy - band_eigenpair(ws, k - h, 2).energy) / (2 * h);
  CHECK(d.dE == doctest::Approx(fd).epsilon(1e-8));
}

TEST_CASE("a second near-null direction is reported") {
  OperatorWorkspace ws(constant_potential(kA, 3, 0.0));
  const CVector y = center_state(3, kA);
  try {
    transport_rhs(ws, -0.5, y, 0.25);
    FAIL("expected IllConditioned");
  } catch (const IllConditioned& e) {
    CHECK(*e.k() == -0.5);
  }
  CHECK_THROWS_AS(rk4_step(ws, 0.1, 0.0, y, 0.01), InvalidArgument);
  CHECK_THROWS_AS(transport_rhs(ws, 0.1, CVector::Zero(7), 0.01), InvalidArgument);
}

TEST_CASE("constant potential cannot start a band at the zone edge") {
  OperatorWorkspace ws(constant_potential(kA, 3, 0.2));
  CHECK_THROWS_AS(integrate_band(ws, 1, 10), DegenerateBand);
  // Forcing the free state as the start hits the doubled null space instead.
  const BandState forced{-0.5, 0.45, center_state(3, kA)};
  try {
    integrate_band(ws, 1, 10, forced);
    FAIL("expected IllConditioned");
  } catch (const IllConditioned& e) {
    CHECK(*e.k() == -0.5);
    CHECK(*e.band() == 1);
  }
}

TEST_CASE("grid and argument checks") {
  const auto g = transport_grid(1.0, 7);
  REQUIRE(g.size() == 8);
  CHECK(g.front() == -0.5);
  CHECK(g.back() == 0.5);
  OperatorWorkspace ws(gaussian5_potential(kA, 10));
  CHECK_THROWS_AS(integrate_band(ws, 1, 1), InvalidArgument);
  auto st = band_eigenpair(ws, -0.4, 1);
  CHECK_THROWS_AS(integrate_band(ws, 1, 10, st), InvalidArgument);
}

TEST_CASE("trajectory invariants for a well-resolved band") {
  OperatorWorkspace ws(gaussian5_potential(kA, 10));
  const auto traj = integrate_band(ws, 1, 400);
  REQUIRE(traj.states.size() == 401);
  REQUIRE(traj.has_derivatives());
  CHECK(traj.front().k == -0.5);
  CHECK(traj.back().k == 0.5);
  CHECK(traj.stats.sigma_retained.size() == 400);
  CHECK(traj.stats.max_norm_drift <= 1e-10);
  CHECK(traj.stats.renormalizations == 0);
  CHECK(traj.stats.max_orthogonality <= 1e-10);
  for (const auto& s : traj.states) CHECK(std::abs(s.y.squaredNorm() * kA - 1.0) <= 1e-10 * kA);

  // Integrated energy against the Rayleigh quotient at the end point.
  const double err = endpoint_error(traj, ws);
  CHECK(std::abs(traj.back().energy - traj.rayleigh.back()) <= 10 * err * err + 1e-12);
  // Against the exact band energy.
  CHECK(std::abs(traj.back().energy - band_eigenpair(ws, 0.5, 1).energy) < 1e-10);
}

TEST_CASE("fourth-order endpoint convergence on band 2") {
  OperatorWorkspace ws(gaussian5_potential(kA, 10));
  const double e1 = endpoint_error(integrate_band(ws, 2, 100), ws);
  const double e2 = endpoint_error(integrate_band(ws, 2, 200), ws);
  CHECK(std::log2(e1 / e2) == doctest::Approx(4.0).epsilon(0.125));
}

TEST_CASE("time reversal maps the trajectory to its conjugate mirror") {
  // Starting from the conjugated, index-reversed end state reproduces the
  // original trajectory read backwards (the potential is real, so H(-k) is
  // the index-reversed conjugate of H(k)).
  OperatorWorkspace ws(asym_exp_potential(kA, 15));
  const int K = 200;
  const auto fwd = integrate_band(ws, 2, K);
  const double err = endpoint_error(fwd, ws);
  const CVector& yK = fwd.back().y;
  BandState start{-0.5, fwd.back().energy, yK.reverse().conjugate()};
  const auto back = integrate_band(ws, 2, K, start);
  double worst = 0.0;
  for (int j = 0; j <= K; ++j) {
    const CVector mirror = fwd.states[K - j].y.reverse().conjugate();
    worst = std::max(worst, (back.states[j].y - mirror).norm() / mirror.norm());
  }
  CHECK(worst <= 10 * err);
}

TEST_CASE("discrete transport alignment") {
  CVector v1(3);
  v1 << cplx(0.3, 0.1), cplx(-0.5, 0.2), cplx(0.1, -0.7);
  const double theta = 1.234;
  std::vector<BandState> pure{{0.0, 0.0, v1}, {0.1, 0.0, std::polar(1.0, theta) * v1}};
  auto t = discrete_transport(pure, kA, 1);
  CHECK((t.states[1].y - v1).norm() < 1e-15);

  std::vector<BandState> real{{0.0, 0.0, v1}, {0.1, 0.0, 2.5 * v1}};
  t = discrete_transport(real, kA, 1);
  CHECK((t.states[1].y - 2.5 * v1).norm() < 1e-15);

  CVector w = CVector::Zero(3);
  w(0) = std::conj(v1(1));
  w(1) = -std::conj(v1(0));
  std::vector<BandState> ortho{{0.0, 0.0, v1}, {0.1, 0.0, w}};
  CHECK_THROWS_AS(discrete_transport(ortho, kA, 1), OrthogonalNeighbors);
  CHECK(alignment_phase(v1, std::polar(1.0, theta) * v1) == doctest::Approx(theta));
}

TEST_CASE("discrete transport converges to the RK4 endpoint at second order") {
  // The even potential is useless here: its transport phase is pinned to 0 or
  // pi, so the discrete endpoint is exact at every K.
  OperatorWorkspace ws(asym_exp_potential(kA, 15));
  const auto rk = integrate_band(ws, 1, 1600);
  const CVector& target = rk.back().y;
  std::vector<double> logK, logE;
  for (int K : {100, 200, 400, 800}) {
    const auto d = discrete_transport_band(ws, 1, K, &rk.front());
    logK.push_back(std::log(K));
    logE.push_back(std::log((d.back().y - target).norm() / target.norm()));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < logK.size(); ++i) {
    sx += logK[i]; sy += logE[i]; sxx += logK[i] * logK[i]; sxy += logK[i] * logE[i];
  }
  const double n = static_cast<double>(logK.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == doctest::Approx(-2.0).epsilon(0.15));
}

TEST_CASE("endpoint error vanishes for eigensolve trajectories") {
  OperatorWorkspace ws(gaussian5_potential(kA, 10));
  const auto d = discrete_transport_band(ws, 1, 50);
  CHECK(endpoint_error(d, ws) < 1e-14);
}

}  // TEST_SUITE
