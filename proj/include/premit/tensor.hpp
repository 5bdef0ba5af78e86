#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "premit/linalg.hpp"
#include "premit/pauli.hpp"

namespace premit::tensor {

using Index = Eigen::Index;
using linalg::Matrix;
using linalg::RowMatrix;
using linalg::Vector;

/// Rank-3 core with shape (left, phys, right), stored row-major.
struct Core {
  Index left = 1;
  Index phys = 1;
  Index right = 1;
  std::vector<double> data;

  Core() = default;
  Core(Index l, Index p, Index r) : left(l), phys(p), right(r), data(static_cast<std::size_t>(l * p * r), 0.0) {}

  double& operator()(Index a, Index s, Index b) { return data[static_cast<std::size_t>((a * phys + s) * right + b)]; }
  double operator()(Index a, Index s, Index b) const {
    return data[static_cast<std::size_t>((a * phys + s) * right + b)];
  }
};

/// Sparse linear map on the (possibly multi-site) physical index.
struct SparseOp {
  struct Entry {
    Index out;
    Index in;
    double value;
  };
  Index dim = 0;
  std::vector<Entry> entries;

  /// Keeps entries with |value| > cutoff.
  static SparseOp from_dense(const Matrix& m, double cutoff = 0.0);
  bool is_identity() const;
};

enum class Sweep { Right, Left };

enum class SvdMethod { Svd, Rsvd };

struct CompressionReport {
  /// Sum of squared truncated singular values relative to the squared norm
  /// before truncation.
  double discarded_weight = 0.0;
  std::vector<Index> bond_dims;
  SvdMethod method = SvdMethod::Svd;
};

/// Open-boundary tensor train with a uniform physical dimension. Tracks an
/// orthogonality center when one is known.
class TensorTrain {
public:
  TensorTrain() = default;
  /// Throws std::invalid_argument if bonds are inconsistent or boundary bonds
  /// are not 1.
  explicit TensorTrain(std::vector<Core> cores);

  std::size_t size() const { return cores_.size(); }
  Index phys_dim() const { return cores_.empty() ? 0 : cores_.front().phys; }
  const Core& core(std::size_t k) const { return cores_[k]; }
  const std::vector<Core>& cores() const { return cores_; }

  /// n+1 entries including the two boundary bonds.
  std::vector<Index> bond_dims() const;
  Index max_bond() const;

  std::optional<std::size_t> center() const { return center_; }
  /// Brings the train into mixed-canonical form with center at k.
  void move_center(std::size_t k);

  double norm_squared() const;
  void scale(double factor);

  /// Applies op to site k in place. The center is kept when op is
  /// orthogonal; pass orthogonal = false otherwise.
  void apply_one_site(std::size_t k, const SparseOp& op, bool orthogonal);

  struct TwoSiteResult {
    double discarded = 0.0;     // absolute
    double norm_squared = 0.0;  // of the updated two-site block
    bool used_rsvd = false;
  };
  /// Applies a two-site op on sites (k, k+1), then splits with truncation.
  /// The center ends at k+1 for Sweep::Right and at k for Sweep::Left.
  TwoSiteResult apply_two_site(std::size_t k, const SparseOp& op, const linalg::Truncation& trunc,
                               const linalg::SvdOptions& opts, Sweep dir);

  /// Canonicalize-then-truncate two-sweep compression.
  CompressionReport compress(const linalg::Truncation& trunc, const linalg::SvdOptions& opts = {});

private:
  void shift_right(std::size_t k);
  void shift_left(std::size_t k);

  std::vector<Core> cores_;
  std::optional<std::size_t> center_;
};

/// PTM vector over n qubits (physical dimension 4).
class Mps {
public:
  Mps() = default;
  explicit Mps(TensorTrain tt);

  std::size_t size() const { return tt_.size(); }
  std::vector<Index> bond_dims() const { return tt_.bond_dims(); }
  Index max_bond() const { return tt_.max_bond(); }
  const TensorTrain& train() const { return tt_; }
  TensorTrain& train() { return tt_; }

  /// Product vector from per-site 4-vectors.
  static Mps product(const std::vector<Eigen::Vector4d>& sites);

private:
  TensorTrain tt_;
};

/// PTM matrix over n qubits (two physical legs of dimension 4, fused as
/// row * 4 + col into one leg of dimension 16).
class Mpo {
public:
  Mpo() = default;
  explicit Mpo(TensorTrain tt);

  std::size_t size() const { return tt_.size(); }
  std::vector<Index> bond_dims() const { return tt_.bond_dims(); }
  Index max_bond() const { return tt_.max_bond(); }
  const TensorTrain& train() const { return tt_; }
  TensorTrain& train() { return tt_; }

  static Mpo identity(std::size_t n);
  /// Product operator from per-site 4x4 matrices.
  static Mpo product(const std::vector<Eigen::Matrix4d>& sites);

private:
  TensorTrain tt_;
};

/// PTM vector of a Pauli string: √2 e_letter on each site, so that
/// inner(state, pauli_mps(P)) = Tr[ρ P].
Mps pauli_mps(const pauli::PauliString& p);
/// Unit basis vector e_index.
Mps basis_mps(const pauli::PauliString& p);
/// PTM vector of |0…0⟩⟨0…0|.
Mps zero_state_mps(std::size_t n);

Mps apply_mpo(const Mpo& m, const Mps& v);
/// a ∘ b (b applied first).
Mpo compose_mpo(const Mpo& a, const Mpo& b);

std::pair<Mps, CompressionReport> compress(Mps x, Index chi_max, double tol, const linalg::SvdOptions& opts = {});
std::pair<Mpo, CompressionReport> compress(Mpo x, Index chi_max, double tol, const linalg::SvdOptions& opts = {});

double inner(const Mps& v, const Mps& w);
/// ⟨bra| m |ket⟩.
double sandwich(const Mps& bra, const Mpo& m, const Mps& ket);
/// Single matrix element m[row, col].
double element(const Mpo& m, const pauli::PauliString& row, const pauli::PauliString& col);

pauli::DensePtm to_dense(const Mps& v);
pauli::DensePtm to_dense(const Mpo& m);
Mps mps_from_dense(const pauli::DensePtm& d);
Mpo mpo_from_dense(const pauli::DensePtm& d);

/// Full 4^n vector for n <= kMaxVectorQubits (beyond the DensePtm cap).
inline constexpr std::size_t kMaxVectorQubits = 12;
Vector to_vector(const Mps& v);

/// Local op M -> row_op · M · col_opᵀ acting on k fused MPO sites, where
/// row_op and col_op are 4^k x 4^k. Conjugation by a PTM R is
/// mpo_local_op(R, R) since R⁻¹ = Rᵀ.
SparseOp mpo_local_op(const Matrix& row_op, const Matrix& col_op);

// Binary dump: little-endian header (magic "PTTN", version, n, kind, n+1
// bond dims as uint32), then cores as float64 row-major.
enum class DumpKind : std::uint32_t { Mps = 0, Mpo = 1 };
inline constexpr std::uint32_t kDumpVersion = 1;

void write_binary(std::ostream& os, const Mps& v);
void write_binary(std::ostream& os, const Mpo& m);
Mps read_mps(std::istream& is);
Mpo read_mpo(std::istream& is);
void save(const std::string& path, const Mpo& m);
Mpo load_mpo(const std::string& path);

}  // namespace premit::tensor
