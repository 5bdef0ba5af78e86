#pragma once

#include <cstdint>
#include <string>

#include "premit/circuit.hpp"
#include "premit/linalg.hpp"
#include "premit/tensor.hpp"

namespace premit::sim {

using pauli::PauliString;
using tensor::Index;

/// PTM vector of ρ (ideal) or of the noisy state.
struct StateMps {
  tensor::Mps mps;
  bool ideal = true;
  Index chi_max = 0;
  double tol = 0.0;
  /// Accumulated relative discarded weight.
  double discarded = 0.0;
};

/// Evolves |0…0⟩ one Trotter step at a time, applying each layer and then,
/// when noise is on, the layer's noise channel. Truncates after every
/// two-site update and rescales to unit trace after a step that truncated.
class Evolver {
public:
  Evolver(const circuit::TrotterCircuit& c, const circuit::NoiseAssignment& noise, Index chi_max, double tol,
          bool with_noise, const linalg::SvdOptions& svd = {});

  void advance();
  std::size_t step() const { return step_; }
  const StateMps& state() const { return state_; }

private:
  const circuit::TrotterCircuit* circuit_;
  const circuit::NoiseAssignment* noise_;
  linalg::SvdOptions svd_;
  StateMps state_;
  std::size_t step_ = 0;
};

StateMps evolve(const circuit::TrotterCircuit& c, const circuit::NoiseAssignment& noise, Index chi_max, double tol,
                std::size_t upto_step, bool with_noise, const linalg::SvdOptions& svd = {});

/// Tr[ρ] read off the identity component.
double trace(const StateMps& s);
/// Tr[ρ P] without clamping.
double raw_expectation(const StateMps& s, const PauliString& p);
/// Tr[ρ P] clamped to [−1, 1].
double expectation(const StateMps& s, const PauliString& p);

struct ShotResult {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t shots = 0;
  std::uint64_t seed = 0;
};

/// ±1 outcomes with P(+1) = (1 + v)/2. Throws std::invalid_argument for
/// |v| > 1 or shots < 1.
ShotResult sample_shots(double v, std::int64_t shots, std::uint64_t seed);

struct OverheadRecord {
  double gamma_empirical = 0.0;
  double gamma_analytic = 0.0;
  std::string method;
};

/// γ = mitigated std / noisy std. Throws std::invalid_argument when the
/// noisy std is not positive.
OverheadRecord empirical_overhead(double mitigated_std, double noisy_std, double analytic, std::string method);

/// Π γ over every noisy layer up to the end of step `upto_step`.
double pec_theoretical_gamma(const circuit::TrotterCircuit& c, const circuit::NoiseAssignment& noise,
                             std::size_t upto_step);

/// Deterministic seed derivation for independent sampling streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

}  // namespace premit::sim
