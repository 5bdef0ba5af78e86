#include "premit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace premit::linalg {

namespace {

constexpr double kSvdCheckTolerance = 1e-12;

Matrix orthonormal_columns(const Matrix& y) {
  Eigen::HouseholderQR<Matrix> qr(y);
  return qr.householderQ() * Matrix::Identity(y.rows(), std::min(y.rows(), y.cols()));
}

bool accurate(const Eigen::Ref<const Matrix>& mat, const Svd& f) {
  const double scale = std::sqrt(static_cast<double>(std::max(mat.rows(), mat.cols())));
  const double norm = mat.norm();
  const Eigen::Index k = f.s.size();
  if (!f.s.allFinite() || !f.u.allFinite() || !f.v.allFinite()) return false;
  const double recon = (f.u * f.s.asDiagonal() * f.v.transpose() - mat).norm();
  if (recon > kSvdCheckTolerance * scale * std::max(norm, std::numeric_limits<double>::min())) return false;
  // Columns paired with zero singular values may be arbitrary; check the rest.
  Eigen::Index r = 0;
  while (r < k && f.s(r) > kNumericalZero * f.s(0)) ++r;
  const Matrix iu = f.u.leftCols(r).transpose() * f.u.leftCols(r) - Matrix::Identity(r, r);
  const Matrix iv = f.v.leftCols(r).transpose() * f.v.leftCols(r) - Matrix::Identity(r, r);
  return iu.norm() <= kSvdCheckTolerance * scale && iv.norm() <= kSvdCheckTolerance * scale;
}

}  // namespace

Svd thin_svd(const Eigen::Ref<const Matrix>& mat) {
  if (mat.rows() == 0 || mat.cols() == 0) throw std::invalid_argument("thin_svd: empty matrix");
  // Divide and conquer is fast but can return inaccurate factors for some
  // rank-deficient inputs, so its result is checked and Jacobi is the fallback.
  {
    Eigen::BDCSVD<Matrix> svd(mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() == Eigen::Success) {
      Svd out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
      if (accurate(mat, out)) return out;
    }
  }
  Eigen::JacobiSVD<Matrix> svd(mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw std::runtime_error("thin_svd: SVD did not converge");
  return Svd{svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

Svd rsvd(const Eigen::Ref<const Matrix>& mat, Eigen::Index target_rank, Eigen::Index oversampling,
         int power_iterations, std::uint64_t seed) {
  if (target_rank < 1) throw std::invalid_argument("rsvd: target rank must be >= 1");
  const Eigen::Index m = mat.rows();
  const Eigen::Index n = mat.cols();
  const Eigen::Index min_dim = std::min(m, n);
  const Eigen::Index rank = std::min(target_rank, min_dim);
  const Eigen::Index sketch = std::min(rank + std::max<Eigen::Index>(oversampling, 0), min_dim);

  std::mt19937_64 gen(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix omega(n, sketch);
  for (Eigen::Index j = 0; j < sketch; ++j)
    for (Eigen::Index i = 0; i < n; ++i) omega(i, j) = gauss(gen);

  Matrix q = orthonormal_columns(mat * omega);
  for (int it = 0; it < power_iterations; ++it) {
    Matrix z = orthonormal_columns(mat.transpose() * q);
    q = orthonormal_columns(mat * z);
  }
  // B = Qᵀ A; decompose Bᵀ = V_b S U_bᵀ (tall and thin).
  const Svd small = thin_svd(mat.transpose() * q);

  Svd out;
  out.s = small.s.head(rank);
  out.u = q * small.v.leftCols(rank);
  out.v = small.u.leftCols(rank);
  return out;
}

TruncatedSvd truncated_svd(const Eigen::Ref<const Matrix>& mat, const Truncation& trunc, const SvdOptions& opts) {
  const Eigen::Index min_dim = std::min(mat.rows(), mat.cols());
  const Eigen::Index chi = trunc.chi_max > 0 ? std::min(trunc.chi_max, min_dim) : min_dim;

  TruncatedSvd out;
  out.norm_squared = mat.squaredNorm();

  Svd svd;
  if (min_dim > opts.rsvd_threshold && chi + opts.oversampling < min_dim) {
    svd = rsvd(mat, chi, opts.oversampling, opts.power_iterations);
    out.used_rsvd = true;
  } else {
    svd = thin_svd(mat);
  }

  const Eigen::Index computed = svd.s.size();
  const double s0 = computed > 0 ? svd.s(0) : 0.0;
  Eigen::Index nonzero = 0;
  while (nonzero < computed && svd.s(nonzero) > kNumericalZero * s0) ++nonzero;

  Eigen::Index keep = std::min(chi, nonzero);
  if (trunc.tol > 0.0 && keep > 1) {
    // Weight outside the computed spectrum counts as tail (RSVD case).
    double kept_total = 0.0;
    for (Eigen::Index j = 0; j < nonzero; ++j) kept_total += svd.s(j) * svd.s(j);
    const double unseen = out.used_rsvd ? std::max(0.0, out.norm_squared - kept_total) : 0.0;
    const double budget = trunc.tol * out.norm_squared;
    double tail = unseen;
    for (Eigen::Index j = nonzero; j-- > keep;) tail += svd.s(j) * svd.s(j);
    while (keep > 1) {
      const double next = tail + svd.s(keep - 1) * svd.s(keep - 1);
      if (next > budget) break;
      tail = next;
      --keep;
    }
  }
  keep = std::max<Eigen::Index>(keep, 1);

  if (out.used_rsvd) {
    double kept = 0.0;
    for (Eigen::Index j = 0; j < keep; ++j) kept += svd.s(j) * svd.s(j);
    out.discarded_weight = std::max(0.0, out.norm_squared - kept);
  } else {
    double d = 0.0;
    for (Eigen::Index j = keep; j < nonzero; ++j) d += svd.s(j) * svd.s(j);
    out.discarded_weight = d;
  }

  out.u = svd.u.leftCols(keep);
  out.s = svd.s.head(keep);
  out.v = svd.v.leftCols(keep);
  if (nonzero == 0) {
    out.s.setZero();
  }
  return out;
}

}  // namespace premit::linalg
