#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace premit::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Thin factorization mat ≈ U diag(S) Vᵀ with S non-increasing.
struct Svd {
  Matrix u;
  Vector s;
  Matrix v;
};

/// Full thin SVD (divide and conquer).
Svd thin_svd(const Eigen::Ref<const Matrix>& mat);

/// Randomized SVD with a Gaussian sketch. target_rank is clamped to the
/// smallest matrix dimension. The sketch is drawn from a generator seeded
/// with `seed`, so results are reproducible.
Svd rsvd(const Eigen::Ref<const Matrix>& mat, Eigen::Index target_rank, Eigen::Index oversampling = 10,
         int power_iterations = 2, std::uint64_t seed = 0x5eed);

struct SvdOptions {
  /// RSVD is used once min(rows, cols) exceeds this.
  Eigen::Index rsvd_threshold = 256;
  Eigen::Index oversampling = 10;
  int power_iterations = 2;
};

/// Truncation request: keep at most chi_max values, and drop the tail while
/// its weight stays below tol * ||mat||_F^2.
struct Truncation {
  Eigen::Index chi_max = 0;
  double tol = 0.0;
};

/// Singular values below this fraction of the largest are treated as exact
/// zeros: they are always dropped and never counted as discarded weight.
inline constexpr double kNumericalZero = 1e-14;

struct TruncatedSvd {
  Matrix u;   // rows x rank
  Vector s;   // rank
  Matrix v;   // cols x rank
  double norm_squared = 0.0;       // ||mat||_F^2
  double discarded_weight = 0.0;   // absolute, excluding numerical zeros
  bool used_rsvd = false;
};

/// SVD followed by truncation. Always keeps at least one value (zero matrix
/// gives rank 1 with zero factors).
TruncatedSvd truncated_svd(const Eigen::Ref<const Matrix>& mat, const Truncation& trunc,
                           const SvdOptions& opts = {});

}  // namespace premit::linalg
