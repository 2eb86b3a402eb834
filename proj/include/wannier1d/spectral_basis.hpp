#pragma once

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace wannier1d {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

/// Maps a 0-based matrix/vector row to its Fourier index, m - M - 1 in the
/// 1-based convention. Row 0 is Fourier index -M, row 2M is +M.
constexpr int fourier_index(int row, int M) noexcept { return row - M; }
/// Inverse of fourier_index.
constexpr int row_of(int fourier, int M) noexcept { return fourier + M; }

/// Truncated Fourier description of a real a-periodic potential
///
///   V(x) ~ sum_{j=-M}^{M} c_j exp(i j Omega x),   Omega = 2 pi / a.
///
/// Coefficients are stored center-indexed: coefficients()[row_of(j, M)] is
/// c_j. Hermitian symmetry c_{-j} = conj(c_j) is enforced at construction
/// (to a tolerance); the stored coefficients are symmetrized exactly.
class PeriodicPotential {
 public:
  PeriodicPotential(double lattice_constant, std::vector<cplx> coefficients,
                    std::string source);

  double lattice_constant() const noexcept { return a_; }
  double reciprocal_period() const noexcept { return omega_; }
  int truncation() const noexcept { return M_; }
  int dimension() const noexcept { return 2 * M_ + 1; }
  const std::vector<cplx>& coefficients() const noexcept { return coeffs_; }
  /// c_j for |j| <= M, zero otherwise.
  cplx coefficient(int j) const noexcept;
  const std::string& source() const noexcept { return source_; }

  /// Evaluates the trigonometric interpolant at x.
  double operator()(double x) const;

 private:
  double a_;
  double omega_;
  int M_;
  std::vector<cplx> coeffs_;
  std::string source_;
};

/// The 2M+1 equispaced sample abscissae t_j = -a/2 + (j-1) a / (2M+1),
/// j = 1..2M+1, covering [-a/2, a/2).
std::vector<double> sample_grid(double a, int M);

/// Coefficients of the trigonometric interpolant through samples taken on
/// sample_grid(a, M). The analysis step carries the 1/(2M+1) factor:
///
///   c_j = 1/(2M+1) sum_n V(t_n) exp(-i j Omega t_n)
///
/// so that the synthesis sum_j c_j exp(i j Omega x) reproduces the samples.
/// The transform is independent of a since j Omega t_n depends only on n.
std::vector<cplx> fourier_coefficients(std::span<const double> samples);

/// Toeplitz Hermitian matrix with entries V(m, n) = c_{m-n} for |m-n| <= M.
CMatrix build_potential_matrix(const PeriodicPotential& potential);

/// Samples f on sample_grid(a, M) and interpolates.
PeriodicPotential potential_from_function(double a, int M,
                                          const std::function<double(double)>& f,
                                          std::string source);

PeriodicPotential potential_from_samples(double a, std::span<const double> samples,
                                         std::string source);

/// V(x) = c0 + sum_j cos_j cos(j Omega x) + sin_j sin(j Omega x), j >= 1.
/// Entries beyond M are dropped.
PeriodicPotential potential_from_trig_series(double a, int M, double c0,
                                             std::span<const double> cos_terms,
                                             std::span<const double> sin_terms,
                                             std::string source);

/// V(x) = -1/2 - sum_{j=1}^{5} exp(-j^2/4) cos(j Omega x).
double gaussian5_value(double x, double a);
/// V(x) = (1 + 2 sin(2 Omega x) + 3 exp(cos(Omega x))) / 4.
double asym_exp_value(double x, double a);

PeriodicPotential gaussian5_potential(double a, int M);
PeriodicPotential asym_exp_potential(double a, int M);
PeriodicPotential constant_potential(double a, int M, double value);

/// Builtin potential by name ("gaussian5", "asym-exp"). Throws InvalidArgument
/// on unknown names.
PeriodicPotential named_potential(const std::string& name, double a, int M);

/// |c_j| for j = 0..M, used as a smoothness diagnostic.
std::vector<double> coefficient_magnitudes(const PeriodicPotential& potential);

/// True when |c_j| is nonincreasing over j = 1..M until it first drops below
/// the absolute floor (roundoff-level tails are not compared).
bool has_decaying_envelope(const PeriodicPotential& potential, double floor = 1e-14);

}  // namespace wannier1d
