#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace premit::pauli {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

/// Single-qubit Pauli letter. The numeric code is the PTM basis index.
enum class Letter : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char to_char(Letter l);
Letter letter_from_char(char c);

/// Integer index into the 4^n Pauli basis. Base-4 digits are the letter
/// codes with qubit 0 as the most significant digit.
struct PauliIndex {
  std::uint64_t value = 0;
  friend bool operator==(PauliIndex, PauliIndex) = default;
  friend auto operator<=>(PauliIndex, PauliIndex) = default;
};

/// An n-qubit Pauli word, qubit 0 first.
class PauliString {
public:
  PauliString() = default;
  explicit PauliString(std::vector<Letter> letters);
  /// Parses an ASCII word such as "ZZIZZ". Throws std::invalid_argument on
  /// empty input or unknown letters.
  explicit PauliString(std::string_view word);

  static PauliString identity(std::size_t n);
  /// The same letter on every qubit, e.g. Z^{⊗n}.
  static PauliString uniform(std::size_t n, Letter l);

  std::size_t size() const { return letters_.size(); }
  Letter operator[](std::size_t q) const { return letters_[q]; }
  const std::vector<Letter>& letters() const { return letters_; }

  std::size_t weight() const;
  bool is_identity() const { return weight() == 0; }
  /// Qubits carrying a non-identity letter, ascending.
  std::vector<std::size_t> support() const;

  std::string str() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;
  friend auto operator<=>(const PauliString&, const PauliString&) = default;

private:
  std::vector<Letter> letters_;
};

/// Largest qubit count for which a PauliIndex fits in 64 bits.
inline constexpr std::size_t kMaxIndexQubits = 31;

PauliIndex index_of(const PauliString& p);
/// Throws std::out_of_range if idx >= 4^n.
PauliString pauli_of(PauliIndex idx, std::size_t n);

/// True iff p and q anticommute. Throws std::invalid_argument on length
/// mismatch.
bool anticommutes(const PauliString& p, const PauliString& q);

// ---------------------------------------------------------------------------
// Dense PTM oracle (n <= 6). Basis: σ̃ = σ/√2 per qubit.

inline constexpr std::size_t kMaxDenseQubits = 6;

/// Real PTM vector (4^n) or matrix (4^n x 4^n) for n <= kMaxDenseQubits.
struct DensePtm {
  std::size_t n = 0;
  Eigen::MatrixXd entries;  // 4^n x 1 for vectors

  bool is_vector() const { return entries.cols() == 1; }
};

/// Single-qubit Pauli matrix.
CMatrix letter_matrix(Letter l);
/// Dense 2^n x 2^n matrix of a Pauli string (kron order qubit 0 first).
CMatrix dense_matrix(const PauliString& p);

/// Component i = Tr[A P_i] / sqrt(2^n). A must be Hermitian (real PTM).
/// Throws std::invalid_argument if A is not square with power-of-two
/// dimension, not Hermitian, or n exceeds kMaxDenseQubits.
DensePtm ptm_vector(const CMatrix& op);

/// Inverse of ptm_vector: A = Σ_i v_i P_i / sqrt(2^n).
CMatrix operator_from_ptm(const DensePtm& v);

/// Linear superoperator given by its action on operators.
using Superoperator = std::function<CMatrix(const CMatrix&)>;

/// E_ij = Tr[σ̃_i ℰ(σ̃_j)] for a channel on n qubits.
DensePtm ptm_matrix(const Superoperator& channel, std::size_t n);
/// PTM of the channel ρ -> Σ_k K_k ρ K_k†.
DensePtm ptm_matrix(const std::vector<CMatrix>& kraus);
/// PTM of unitary conjugation ρ -> U ρ U†.
DensePtm ptm_of_unitary(const CMatrix& u);

std::size_t qubits_of_dimension(Eigen::Index dim);

}  // namespace premit::pauli
