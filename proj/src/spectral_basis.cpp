#include "wannier1d/spectral_basis.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "wannier1d/errors.hpp"

namespace wannier1d {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "InvalidArgument";
    case ErrorKind::degenerate_band: return "DegenerateBand";
    case ErrorKind::ill_conditioned: return "IllConditioned";
    case ErrorKind::orthogonal_neighbors: return "OrthogonalNeighbors";
    case ErrorKind::no_reliable_component: return "NoReliableComponent";
    case ErrorKind::gauge_not_applied: return "GaugeNotApplied";
    case ErrorKind::missing_derivatives: return "MissingDerivatives";
    case ErrorKind::config: return "ConfigError";
    case ErrorKind::io: return "IoError";
  }
  return "Unknown";
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_lattice(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw InvalidArgument("lattice constant must be positive and finite");
  }
}

void require_truncation(int M) {
  if (M < 1) throw InvalidArgument("truncation M must be >= 1");
}

}  // namespace

PeriodicPotential::PeriodicPotential(double lattice_constant,
                                     std::vector<cplx> coefficients,
                                     std::string source)
    : a_(lattice_constant),
      omega_(kTwoPi / lattice_constant),
      coeffs_(std::move(coefficients)),
      source_(std::move(source)) {
  require_lattice(a_);
  if (coeffs_.size() < 3 || coeffs_.size() % 2 == 0) {
    throw InvalidArgument("coefficient list must have odd length 2M+1 with M >= 1");
  }
  M_ = static_cast<int>(coeffs_.size() / 2);

  double scale = 0.0;
  for (const auto& c : coeffs_) scale = std::max(scale, std::abs(c));
  const double tol = 1e-10 * std::max(scale, 1.0);
  for (int j = 0; j <= M_; ++j) {
    const cplx plus = coeffs_[row_of(j, M_)];
    const cplx minus = coeffs_[row_of(-j, M_)];
    if (std::abs(plus - std::conj(minus)) > tol) {
      std::ostringstream msg;
      msg << "coefficients violate Hermitian symmetry at j=" << j
          << " (potential must be real)";
      throw InvalidArgument(msg.str());
    }
    const cplx sym = 0.5 * (plus + std::conj(minus));
    coeffs_[row_of(j, M_)] = sym;
    coeffs_[row_of(-j, M_)] = std::conj(sym);
  }
  coeffs_[row_of(0, M_)] = coeffs_[row_of(0, M_)].real();
}

cplx PeriodicPotential::coefficient(int j) const noexcept {
  if (j < -M_ || j > M_) return {0.0, 0.0};
  return coeffs_[row_of(j, M_)];
}

double PeriodicPotential::operator()(double x) const {
  double v = coeffs_[row_of(0, M_)].real();
  for (int j = 1; j <= M_; ++j) {
    v += 2.0 * std::real(coeffs_[row_of(j, M_)] * std::polar(1.0, j * omega_ * x));
  }
  return v;
}

std::vector<double> sample_grid(double a, int M) {
  require_lattice(a);
  require_truncation(M);
  const int n = 2 * M + 1;
  std::vector<double> t(n);
  for (int j = 0; j < n; ++j) t[j] = -0.5 * a + a * j / n;
  return t;
}

std::vector<cplx> fourier_coefficients(std::span<const double> samples) {
  const auto n = static_cast<int>(samples.size());
  if (n < 3 || n % 2 == 0) {
    throw InvalidArgument("sample count must be odd (2M+1) with M >= 1");
  }
  const int M = n / 2;
  std::vector<cplx> coeffs(n);
  // Omega t_n = -pi + 2 pi n / (2M+1), independent of a.
  for (int j = -M; j <= M; ++j) {
    cplx acc{0.0, 0.0};
    for (int s = 0; s < n; ++s) {
      const double theta = -std::numbers::pi + kTwoPi * s / n;
      acc += samples[s] * std::polar(1.0, -j * theta);
    }
    coeffs[row_of(j, M)] = acc / static_cast<double>(n);
  }
  return coeffs;
}

CMatrix build_potential_matrix(const PeriodicPotential& potential) {
  const int dim = potential.dimension();
  CMatrix V = CMatrix::Zero(dim, dim);
  for (int m = 0; m < dim; ++m) {
    for (int n = 0; n < dim; ++n) V(m, n) = potential.coefficient(m - n);
  }
  return V;
}

PeriodicPotential potential_from_function(double a, int M,
                                          const std::function<double(double)>& f,
                                          std::string source) {
  const auto t = sample_grid(a, M);
  std::vector<double> values(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) values[i] = f(t[i]);
  return potential_from_samples(a, values, std::move(source));
}

PeriodicPotential potential_from_samples(double a, std::span<const double> samples,
                                         std::string source) {
  for (double v : samples) {
    if (!std::isfinite(v)) throw InvalidArgument("potential samples must be finite");
  }
  return PeriodicPotential(a, fourier_coefficients(samples), std::move(source));
}

PeriodicPotential potential_from_trig_series(double a, int M, double c0,
                                             std::span<const double> cos_terms,
                                             std::span<const double> sin_terms,
                                             std::string source) {
  require_truncation(M);
  std::vector<cplx> coeffs(2 * M + 1, cplx{0.0, 0.0});
  coeffs[row_of(0, M)] = c0;
  // cos(jx) = (e^{ijx} + e^{-ijx})/2, sin(jx) = (e^{ijx} - e^{-ijx})/(2i)
  for (int j = 1; j <= M; ++j) {
    const double c = j <= static_cast<int>(cos_terms.size()) ? cos_terms[j - 1] : 0.0;
    const double s = j <= static_cast<int>(sin_terms.size()) ? sin_terms[j - 1] : 0.0;
    const cplx plus{0.5 * c, -0.5 * s};
    coeffs[row_of(j, M)] = plus;
    coeffs[row_of(-j, M)] = std::conj(plus);
  }
  return PeriodicPotential(a, std::move(coeffs), std::move(source));
}

double gaussian5_value(double x, double a) {
  const double omega = kTwoPi / a;
  double v = -0.5;
  for (int j = 1; j <= 5; ++j) v -= std::exp(-j * j / 4.0) * std::cos(j * omega * x);
  return v;
}

double asym_exp_value(double x, double a) {
  const double omega = kTwoPi / a;
  return 0.25 * (1.0 + 2.0 * std::sin(2.0 * omega * x) + 3.0 * std::exp(std::cos(omega * x)));
}

PeriodicPotential gaussian5_potential(double a, int M) {
  return potential_from_function(a, M, [a](double x) { return gaussian5_value(x, a); },
                                 "gaussian5");
}

PeriodicPotential asym_exp_potential(double a, int M) {
  return potential_from_function(a, M, [a](double x) { return asym_exp_value(x, a); },
                                 "asym-exp");
}

PeriodicPotential constant_potential(double a, int M, double value) {
  require_truncation(M);
  std::vector<cplx> coeffs(2 * M + 1, cplx{0.0, 0.0});
  coeffs[row_of(0, M)] = value;
  std::ostringstream src;
  src << "constant(" << value << ")";
  return PeriodicPotential(a, std::move(coeffs), src.str());
}

PeriodicPotential named_potential(const std::string& name, double a, int M) {
  if (name == "gaussian5") return gaussian5_potential(a, M);
  if (name == "asym-exp") return asym_exp_potential(a, M);
  throw InvalidArgument("unknown builtin potential '" + name +
                        "' (expected gaussian5 or asym-exp)");
}

std::vector<double> coefficient_magnitudes(const PeriodicPotential& potential) {
  const int M = potential.truncation();
  std::vector<double> mags(M + 1);
  for (int j = 0; j <= M; ++j) mags[j] = std::abs(potential.coefficient(j));
  return mags;
}

bool has_decaying_envelope(const PeriodicPotential& potential, double floor) {
  const auto mags = coefficient_magnitudes(potential);
  for (std::size_t j = 2; j < mags.size(); ++j) {
    if (mags[j - 1] < floor) break;
    if (mags[j] > mags[j - 1] * (1.0 + 1e-12) && mags[j] >= floor) return false;
  }
  return true;
}

}  // namespace wannier1d
