#pragma once

#include "wannier1d/spectral_basis.hpp"

namespace wannier1d {

/// Full SVD A = U diag(sigma) V^* of a square complex matrix, singular values
/// descending. Backed by LAPACK zgesvd (bidiagonal QR iteration).
struct SvdResult {
  CMatrix U;
  RVector sigma;
  CMatrix V;
};

SvdResult full_svd(const CMatrix& A);

/// Applies the pseudoinverse of A with the `dropped` smallest singular modes
/// discarded: V_r diag(1/sigma_r) U_r^* b.
CVector truncated_pseudoinverse_apply(const SvdResult& svd, const CVector& b, int dropped);

}  // namespace wannier1d
