#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "premit/pauli.hpp"

namespace premit::qcrb {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using pauli::CMatrix;

inline constexpr std::size_t kMaxBlochQubits = 3;
inline constexpr std::size_t kMaxStructureQubits = 2;

/// θ_i = Tr[ρ P_i] over the non-identity Paulis, i = 1 … 4ⁿ − 1 stored at
/// position i − 1 (unnormalized Pauli convention).
struct BlochVector {
  std::size_t n = 0;
  Vector theta;
};

/// Throws std::invalid_argument unless ρ is Hermitian with unit trace and
/// n <= kMaxBlochQubits.
BlochVector bloch(const CMatrix& rho);
/// ρ = (I + Σ θ_i P_i) / 2ⁿ.
CMatrix reconstruct(const BlochVector& b);
/// Smallest eigenvalue of the reconstructed ρ is >= −tol.
bool is_physical(const BlochVector& b, double tol = 1e-10);

/// Normalized-basis PTM vector of ρ and back.
Vector to_ptm(const BlochVector& b);
BlochVector from_ptm(std::size_t n, const Vector& v);

/// μ_ijm defined by {P_i, P_j} = 2δ_ij I + Σ_m μ_ijm P_m, i, j, m >= 1.
struct StructureTensor {
  std::size_t n = 0;
  /// entries[(i−1)·(4ⁿ−1) + (j−1)] lists (m, μ_ijm) with μ ≠ 0.
  std::vector<std::vector<std::pair<std::size_t, double>>> entries;

  double operator()(std::size_t i, std::size_t j, std::size_t m) const;
};
StructureTensor structure_tensor(std::size_t n);

/// G_ij = ½ Tr[ρ {P_i, P_j}] = δ_ij + ½ Σ_m μ_ijm θ_m.
Matrix g_matrix(const BlochVector& b);

/// J = (Gᵀ − θθᵀ)⁻¹. Throws std::domain_error when the smallest eigenvalue
/// of Gᵀ − θθᵀ is below `cutoff` (pure or rank-deficient states).
Matrix qfim(const BlochVector& b, double cutoff = 1e-10);

/// (xᵀ G x − f²) / N with f = xᵀθ, for X = Σ x_i P_i.
double qcrb_noiseless(const Vector& x, const BlochVector& b, double copies);

/// Bound for the surrogate Y = Σ y_i P_i + y₀ I measured on the noisy state
/// with Bloch vector Aθ + c: y = A⁻ᵀx, y₀ = −cᵀy. Throws
/// std::invalid_argument for singular A.
double qcrb_noisy(const Vector& x, const BlochVector& b, const Matrix& A, const Vector& c, double copies);

/// (Tr[ρ op²] − Tr[ρ op]²) / N.
double variance_direct(const CMatrix& op, const CMatrix& rho, double copies);

/// X = Σ x_i P_i (identity excluded).
CMatrix observable(std::size_t n, const Vector& x, double x0 = 0.0);

}  // namespace premit::qcrb
