#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "premit/circuit.hpp"
#include "premit/linalg.hpp"
#include "premit/noise.hpp"
#include "premit/tensor.hpp"

namespace premit::mitigation {

using pauli::PauliString;
using tensor::Index;

/// Running inverse-adjoint map [M†]⁻¹ after `layers` middle-out steps.
struct MiddleOutState {
  tensor::Mpo mpo;
  std::size_t layers = 0;
  Index chi_max = 0;  // 0 = unbounded
  double tol = 0.0;
  linalg::SvdOptions svd;
  std::vector<tensor::CompressionReport> log;

  std::size_t n() const { return mpo.size(); }
  /// Sum of the logged relative discarded weights.
  double total_discarded() const;
};

MiddleOutState middle_out_init(std::size_t n, Index chi_max, double tol, const linalg::SvdOptions& svd = {});

/// M -> Λ⁻¹ ∘ U ∘ M ∘ U⁻¹, applied gate by gate with truncation after every
/// two-site update.
MiddleOutState middle_out_step(MiddleOutState s, const circuit::Layer& u, const noise::NoiseLayer& noise);

/// Same map built from whole-layer MPO compositions followed by a single
/// compression. Intended for small systems.
MiddleOutState middle_out_step_composed(MiddleOutState s, const circuit::Layer& u, const noise::NoiseLayer& noise);

/// Applies every layer of Trotter step `step` (0-based).
MiddleOutState advance_trotter_step(MiddleOutState s, const circuit::TrotterCircuit& c,
                                    const circuit::NoiseAssignment& noise, std::size_t step);

/// Diagonal entry [M†]⁻¹_{ii}.
double dca_coefficient(const MiddleOutState& s, const PauliString& target);

/// PTM vector of the surrogate Ŷ for a Pauli target: [M†]⁻¹ applied to the
/// target's PTM vector.
struct SurrogateColumn {
  tensor::Mps column;
  PauliString target;
};
SurrogateColumn surrogate_column(const MiddleOutState& s, const PauliString& target);

/// ⟨Ŷ⟩ on the state: a single inner product of PTM vectors.
double apc_expectation(const SurrogateColumn& col, const tensor::Mps& noisy_state);
double dca_expectation(double coef, double noisy_value);

/// Σ_k |y_k| over the Pauli coefficients of Ŷ = Σ_k y_k P_k. Requires n <= 4.
inline constexpr std::size_t kMaxGammaQubits = 4;
double probabilistic_gamma(const SurrogateColumn& col);

/// Pauli coefficients y_k of Ŷ (n <= tensor::kMaxVectorQubits).
Eigen::VectorXd column_coefficients(const SurrogateColumn& col);

struct ColumnDiagnostics {
  double diagonal = 0.0;
  double max_off_diagonal = 0.0;
  PauliString argmax;
  /// Absent when every off-diagonal entry vanishes.
  std::optional<double> dominance_ratio;
  /// True when max_off_diagonal comes from a full scan of the column.
  bool exact = true;
  /// Off-diagonal coefficients excluding the identity and the target,
  /// filled for n <= kMaxGammaQubits.
  std::vector<double> off_diagonal;
};
ColumnDiagnostics column_diagnostics(const MiddleOutState& s, const PauliString& target);

// ---------------------------------------------------------------------------
// Dense oracle (n <= 4).

inline constexpr std::size_t kMaxOracleQubits = 4;

/// Affine action θ' = A θ + c of the multi-layer map U⁻¹ ∘ (noisy circuit)
/// on the unnormalized Bloch vector, plus its full normalized-basis PTM.
struct DenseChannelOracle {
  std::size_t n = 0;
  Eigen::MatrixXd A;     // (4^n − 1) x (4^n − 1)
  Eigen::VectorXd c;     // 4^n − 1
  Eigen::MatrixXd full;  // 4^n x 4^n

  struct Surrogate {
    Eigen::VectorXd y;  // 4^n − 1
    double y0 = 0.0;
  };
  /// y = A⁻ᵀ x, y0 = −cᵀ y for a target X = Σ x_i P_i (identity excluded).
  Surrogate exact_surrogate(const Eigen::VectorXd& x) const;
  /// (fullᵀ)⁻¹, directly comparable to the middle-out MPO.
  Eigen::MatrixXd inverse_adjoint() const;
};

DenseChannelOracle dense_channel_oracle(const circuit::TrotterCircuit& c, const circuit::NoiseAssignment& noise,
                                        std::size_t upto_step);

/// Dense density matrix after `upto_step` Trotter steps from |0…0⟩.
pauli::CMatrix dense_evolve(const circuit::TrotterCircuit& c, const circuit::NoiseAssignment& noise,
                            std::size_t upto_step, bool with_noise);

/// Full 4^n PTM vector of the state after `upto_step` steps, applied gate by
/// gate (n <= tensor::kMaxVectorQubits).
Eigen::VectorXd dense_state_ptm(const circuit::TrotterCircuit& c, const circuit::NoiseAssignment& noise,
                                std::size_t upto_step, bool with_noise);

/// Full 4^n column of [M†]⁻¹ for a Pauli target after `upto_step` steps:
/// Λ_L⁻¹ U_L ⋯ Λ_1⁻¹ U_1 U_1⁻¹ ⋯ U_L⁻¹ e_P (n <= tensor::kMaxVectorQubits).
Eigen::VectorXd dense_surrogate_column(const circuit::TrotterCircuit& c, const circuit::NoiseAssignment& noise,
                                       std::size_t upto_step, const PauliString& target);

// ---------------------------------------------------------------------------
// Checkpoints: <stem>.bin (tensor dump) and <stem>.json (sidecar).

void save_checkpoint(const std::string& stem, const MiddleOutState& s, std::size_t trotter_step);
/// Returns the state and the Trotter step stored in the sidecar.
std::pair<MiddleOutState, std::size_t> load_checkpoint(const std::string& stem);

}  // namespace premit::mitigation
