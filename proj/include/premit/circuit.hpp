#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "premit/noise.hpp"
#include "premit/pauli.hpp"
#include "premit/tensor.hpp"

namespace premit::circuit {

enum class GateKind { RX, RZ, CNOT };

/// RX(θ) = exp(−iθX/2), RZ(θ) = exp(−iθZ/2), CNOT(control, target) on
/// adjacent qubits.
struct Gate {
  GateKind kind = GateKind::RX;
  std::size_t q0 = 0;  // qubit, or control for CNOT
  std::size_t q1 = 0;  // target for CNOT
  double angle = 0.0;

  static Gate rx(std::size_t q, double angle) { return {GateKind::RX, q, q, angle}; }
  static Gate rz(std::size_t q, double angle) { return {GateKind::RZ, q, q, angle}; }
  static Gate cnot(std::size_t control, std::size_t target) { return {GateKind::CNOT, control, target, 0.0}; }

  bool two_qubit() const { return kind == GateKind::CNOT; }
  /// Lowest qubit the gate touches.
  std::size_t first() const { return q0 < q1 ? q0 : q1; }
  friend bool operator==(const Gate&, const Gate&) = default;
};

/// Gates on pairwise-disjoint qubits. A layer is noisy iff it has a CNOT.
class Layer {
public:
  Layer() = default;
  /// Throws std::invalid_argument on overlapping supports, qubits out of
  /// range, or non-adjacent CNOTs.
  Layer(std::size_t n, std::vector<Gate> gates);

  std::size_t n() const { return n_; }
  const std::vector<Gate>& gates() const { return gates_; }
  bool noisy() const;

private:
  std::size_t n_ = 0;
  std::vector<Gate> gates_;
};

struct IsingParams {
  double h = 1.0;
  double J = 0.5236;
  double dt = 0.5;
  /// RZ in the ZZ block acts on the CNOT target when true, else on the control.
  bool rz_on_target = true;
};

struct TrotterCircuit {
  std::size_t n = 0;
  std::vector<Layer> layers;
  /// step_end[s] is one past the last layer of step s.
  std::vector<std::size_t> step_end;
  IsingParams params;

  std::size_t steps() const { return step_end.size(); }
  /// Layer range [begin, end) of step s (0-based).
  std::size_t step_begin(std::size_t s) const { return s == 0 ? 0 : step_end[s - 1]; }
};

/// RX(2hδt) on all qubits, then CNOT / RZ(−2Jδt) / CNOT on even links, then
/// the same on odd links. Throws std::invalid_argument for n < 2.
std::vector<Layer> build_ising_step(std::size_t n, const IsingParams& p);
TrotterCircuit build_ising_circuit(std::size_t n, std::size_t steps, const IsingParams& p);
/// Repeats a custom step `steps` times.
TrotterCircuit repeat_step(std::size_t n, const std::vector<Layer>& step, std::size_t steps);

Layer invert_layer(const Layer& layer);

/// 2x2 or 4x4 unitary; a CNOT is expressed on (first(), first()+1).
pauli::CMatrix gate_unitary(const Gate& g);
/// Real 4x4 or 16x16 PTM of the gate.
Eigen::MatrixXd gate_ptm(const Gate& g);
/// Dense 2^n unitary of a layer (n <= 8).
pauli::CMatrix dense_unitary(const Layer& layer);

tensor::Mpo layer_to_mpo(const Layer& layer);

/// One local action of a layer program. On a PTM vector the site(s) are
/// mapped by row_op. On a PTM matrix M the update is row_op · M · unitaryᵀ.
struct LocalAction {
  std::size_t site = 0;
  bool two_site = false;
  Eigen::MatrixXd row_op;
  Eigen::MatrixXd unitary;
  bool orthogonal = false;
  tensor::Sweep sweep = tensor::Sweep::Right;
};

/// Decomposes "apply the layer, then the diagonal noise" into local actions:
/// single-qubit gates, then each two-qubit gate merged with the noise factor
/// on its link (left to right), then noise-only links (right to left).
/// Pass nullptr for a noiseless layer.
std::vector<LocalAction> layer_program(const Layer& layer, const noise::DiagonalFactors* noise);

/// Noise channel attached to each layer of a circuit; noiseless layers get a
/// zero-rate channel.
struct NoiseAssignment {
  std::vector<noise::NoiseLayer> per_layer;
};

enum class NoisePlacement {
  Parity,    // first model on even-link CNOT layers, second on odd-link
  Position,  // first model on the first CNOT layer of each block, second on the next
};

NoiseAssignment assign_ising_noise(const TrotterCircuit& c, const noise::NoiseLayer& first,
                                   const noise::NoiseLayer& second, NoisePlacement placement);
/// Cycles the given models over the noisy layers in order.
NoiseAssignment assign_cyclic(const TrotterCircuit& c, const std::vector<noise::NoiseLayer>& models);

}  // namespace premit::circuit
