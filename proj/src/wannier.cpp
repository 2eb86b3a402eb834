#include "wannier1d/wannier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "wannier1d/errors.hpp"

namespace wannier1d {

namespace {

constexpr double pi = std::numbers::pi;

// Trapezoidal rule on a uniform grid with both endpoints.
template <class F>
double trapezoid(std::size_t count, double h, F&& f) {
  double sum = 0.5 * (f(0) + f(count - 1));
  for (std::size_t j = 1; j + 1 < count; ++j) sum += f(j);
  return h * sum;
}

}  // namespace

WannierRepresentation assemble_alpha(const CorrectedSequence& seq, double max_residual) {
  if (seq.y.size() < 3) throw InvalidArgument("assemble_alpha: need at least two steps");
  const double residual = shifted_periodicity_residual(seq);
  if (!(residual <= max_residual)) {
    std::ostringstream msg;
    msg << "states are not shifted-periodic (residual " << residual
        << "); apply the gauge correction first";
    throw Error(ErrorKind::gauge_not_applied, msg.str(), std::nullopt, seq.band);
  }

  const int K = seq.steps();
  const int dim = static_cast<int>(seq.y.front().size());
  const int M = (dim - 1) / 2;

  WannierRepresentation rep;
  rep.a = seq.a;
  rep.omega = seq.omega;
  rep.steps = K;
  rep.M = M;
  rep.band = seq.band;
  rep.phases = seq.phases;
  rep.branch = seq.branch;

  const std::size_t n = static_cast<std::size_t>(dim) * K;
  rep.xi.resize(n);
  rep.alpha.resize(n);
  const double h = seq.omega / K;
  const double xi0 = -0.5 * seq.omega - M * seq.omega;
  for (int r = 0; r < dim; ++r) {
    for (int j = 0; j < K; ++j) {
      const std::size_t l = static_cast<std::size_t>(r) * K + j;
      rep.xi[l] = xi0 + h * static_cast<double>(l);
      if (j == 0 && r > 0) {
        rep.alpha[l] = 0.5 * (seq.y.front()(r) + seq.y.back()(r - 1));
      } else {
        rep.alpha[l] = seq.y[j](r);
      }
    }
  }
  return rep;
}

cplx evaluate_wannier(const WannierRepresentation& rep, double x) {
  // exp(i x xi_l) by recurrence, resynchronized periodically to keep the
  // accumulated rounding at the level of a few ulps.
  constexpr std::size_t resync = 128;
  const std::size_t n = rep.alpha.size();
  const cplx step = std::polar(1.0, x * rep.spacing());
  cplx acc = 0.0;
  cplx phase = 1.0;
  for (std::size_t l = 0; l < n; ++l) {
    if (l % resync == 0) phase = std::polar(1.0, x * rep.xi[l]);
    acc += rep.alpha[l] * phase;
    phase *= step;
  }
  return acc / static_cast<double>(rep.steps);
}

std::vector<cplx> evaluate_wannier(const WannierRepresentation& rep,
                                   const std::vector<double>& x) {
  std::vector<cplx> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(),
                 [&](double xv) { return evaluate_wannier(rep, xv); });
  return out;
}

std::vector<cplx> wannier_shifted(const WannierRepresentation& rep, int n,
                                  const std::vector<double>& x) {
  std::vector<double> shifted(x.size());
  std::transform(x.begin(), x.end(), shifted.begin(),
                 [&](double xv) { return xv - n * rep.a; });
  return evaluate_wannier(rep, shifted);
}

std::vector<double> reference_cell_grid(double a) {
  std::vector<double> x(1000);
  for (int j = 1; j <= 1000; ++j) x[j - 1] = -0.5 * a + a * j / 1000.0;
  return x;
}

bool orient_real_sign(WannierRepresentation& rep) {
  const auto w = evaluate_wannier(rep, reference_cell_grid(rep.a));
  const auto peak = std::max_element(w.begin(), w.end(), [](cplx p, cplx q) {
    return std::abs(p) < std::abs(q);
  });
  if (peak == w.end() || peak->real() >= 0.0) return false;
  for (auto& v : rep.alpha) v = -v;
  double phi = rep.phases.phi_0 + pi;
  if (phi > pi) phi -= 2.0 * pi;
  rep.phases.phi_0 = phi;
  return true;
}

double imaginary_ratio(const WannierRepresentation& rep, const std::vector<double>& x) {
  double max_im = 0.0;
  double max_abs = 0.0;
  for (const cplx& v : evaluate_wannier(rep, x)) {
    max_im = std::max(max_im, std::abs(v.imag()));
    max_abs = std::max(max_abs, std::abs(v));
  }
  return max_abs > 0.0 ? max_im / max_abs : 0.0;
}

double compute_center(const GaugePhases& phases, double a, int branch) {
  return (phases.phi_zak + 2.0 * pi * branch) * a / (2.0 * pi);
}

double compute_variance(const Trajectory& trajectory) {
  if (!trajectory.has_derivatives()) {
    throw Error(ErrorKind::missing_derivatives,
                "variance needs the derivative vectors of an RK4 trajectory");
  }
  const double a = trajectory.a;
  const double h = trajectory.omega / trajectory.steps;
  const auto& d = trajectory.derivatives;
  const double integral =
      trapezoid(d.size(), h, [&](std::size_t j) { return d[j].squaredNorm(); });
  return a * a / (2.0 * pi) * integral;
}

Moments compute_moments(const CorrectedSequence& seq) {
  if (!seq.has_derivatives()) {
    throw Error(ErrorKind::missing_derivatives, "moments need corrected derivative vectors");
  }
  const double a = seq.a;
  const double h = seq.omega / seq.steps();
  const double scale = a * a / (2.0 * pi);
  Moments m;
  m.center = scale * trapezoid(seq.y.size(), h, [&](std::size_t j) {
               return (cplx(0.0, 1.0) * seq.y[j].dot(seq.dy[j])).real();
             });
  m.second = scale * trapezoid(seq.y.size(), h,
                               [&](std::size_t j) { return seq.dy[j].squaredNorm(); });
  m.variance = m.second - m.center * m.center;
  return m;
}

DecayDiagnostics decay_diagnostics(const WannierRepresentation& rep, double xmin, double xmax,
                                   int n_points) {
  if (!(xmax > xmin) || n_points < 2) {
    throw InvalidArgument("decay window needs xmax > xmin and at least two points");
  }
  std::vector<double> x(n_points);
  for (int i = 0; i < n_points; ++i) x[i] = xmin + (xmax - xmin) * i / (n_points - 1);
  const auto w = evaluate_wannier(rep, x);

  DecayDiagnostics out;
  double max_im = 0.0;
  std::size_t peak = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    max_im = std::max(max_im, std::abs(w[i].imag()));
    if (std::abs(w[i]) > out.max_abs) {
      out.max_abs = std::abs(w[i]);
      peak = i;
    }
  }
  out.e_imag = out.max_abs > 0.0 ? max_im / out.max_abs : 0.0;

  // Cells [n a - a/2, n a + a/2) that lie inside the window.
  const double a = rep.a;
  std::map<long, std::pair<double, double>> cells;  // n -> (x at max, max)
  for (std::size_t i = 0; i < w.size(); ++i) {
    const long n = std::lround(std::floor(x[i] / a + 0.5));
    if (n * a - 0.5 * a < xmin || n * a + 0.5 * a > xmax) continue;
    auto [it, fresh] = cells.try_emplace(n, x[i], std::abs(w[i]));
    if (!fresh && std::abs(w[i]) > it->second.second) it->second = {x[i], std::abs(w[i])};
  }
  if (cells.size() < 4) {
    std::ostringstream msg;
    msg << "decay window holds " << cells.size() << " whole cells; need at least 4";
    throw InvalidArgument(msg.str());
  }

  const double x_peak = x[peak];
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  double smallest = out.max_abs;
  for (const auto& [n, cell] : cells) {
    const double value = std::max(cell.second, std::numeric_limits<double>::min());
    const double dist = std::abs(cell.first - x_peak);
    const double lv = std::log(value);
    out.envelope_x.push_back(cell.first);
    out.envelope.push_back(cell.second);
    sx += dist;
    sy += lv;
    sxx += dist * dist;
    sxy += dist * lv;
    smallest = std::min(smallest, value);
  }
  const double count = static_cast<double>(cells.size());
  const double denom = count * sxx - sx * sx;
  out.decay_rate = denom > 0.0 ? (count * sxy - sx * sy) / denom : 0.0;
  out.decades = out.max_abs > 0.0 ? std::log10(out.max_abs / smallest) : 0.0;
  return out;
}

}  // namespace wannier1d
