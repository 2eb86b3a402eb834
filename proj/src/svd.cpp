#include "wannier1d/svd.hpp"

#include <string>

#include <lapacke.h>

#include "wannier1d/errors.hpp"

namespace wannier1d {

SvdResult full_svd(const CMatrix& A) {
  if (A.rows() != A.cols()) throw InvalidArgument("full_svd: matrix must be square");
  const auto n = static_cast<lapack_int>(A.rows());
  CMatrix work = A;
  SvdResult out{CMatrix(n, n), RVector(n), CMatrix(n, n)};
  CMatrix vh(n, n);
  std::vector<double> superb(std::max<lapack_int>(n - 1, 1));
  const lapack_int info = LAPACKE_zgesvd(
      LAPACK_COL_MAJOR, 'A', 'A', n, n, reinterpret_cast<lapack_complex_double*>(work.data()),
      n, out.sigma.data(), reinterpret_cast<lapack_complex_double*>(out.U.data()), n,
      reinterpret_cast<lapack_complex_double*>(vh.data()), n, superb.data());
  if (info != 0) {
    throw Error(ErrorKind::ill_conditioned, "zgesvd failed with info=" + std::to_string(info));
  }
  out.V = vh.adjoint();
  return out;
}

CVector truncated_pseudoinverse_apply(const SvdResult& svd, const CVector& b, int dropped) {
  const auto kept = svd.sigma.size() - dropped;
  CVector coeff = svd.U.leftCols(kept).adjoint() * b;
  coeff.array() /= svd.sigma.head(kept).array().cast<cplx>();
  return svd.V.leftCols(kept) * coeff;
}

}  // namespace wannier1d
