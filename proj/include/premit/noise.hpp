#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "premit/pauli.hpp"
#include "premit/tensor.hpp"

namespace premit::noise {

using pauli::PauliString;

/// One term λ (P ρ P − ρ) of a sparse Pauli-Lindblad generator.
struct LindbladGenerator {
  PauliString pauli;
  double rate = 0.0;
};

/// Pauli-Lindblad channel exp(Σ_k λ_k (P_k · P_k − id)) on a linear chain.
/// Generators are weight 1 or weight 2 on adjacent qubits. Duplicate Paulis
/// are merged by summing their rates.
class NoiseLayer {
public:
  NoiseLayer() = default;
  /// Throws std::invalid_argument on a length mismatch, a support that is not
  /// weight 1 or an adjacent pair, or a negative/non-finite rate.
  NoiseLayer(std::size_t n, std::vector<LindbladGenerator> generators, std::string label = {});

  static NoiseLayer noiseless(std::size_t n, std::string label = {});

  std::size_t n() const { return n_; }
  const std::vector<LindbladGenerator>& generators() const { return generators_; }
  const std::string& label() const { return label_; }
  /// True when every rate is zero.
  bool is_noiseless() const;

private:
  std::size_t n_ = 0;
  std::vector<LindbladGenerator> generators_;
  std::string label_;
};

/// f(p) = Π_k exp(−2 λ_k [p anticommutes with P_k]).
double fidelity(const NoiseLayer& layer, const PauliString& p);
/// γ = Π_k exp(2 λ_k).
double gamma(const NoiseLayer& layer);

/// Diagonal PTM of the channel (or its inverse, with reciprocal fidelities)
/// as an MPO of bond dimension at most 4.
tensor::Mpo to_mpo(const NoiseLayer& layer, bool inverse);

using Diagonal4 = Eigen::Vector4d;
using Diagonal16 = Eigen::Matrix<double, 16, 1>;

/// Factorization f(p) = Π_q sites[q](p_q) · Π_q links[q](p_q, p_{q+1}), with
/// the link index p_q * 4 + p_{q+1}.
struct DiagonalFactors {
  std::vector<Diagonal4> sites;
  std::vector<Diagonal16> links;
};
DiagonalFactors diagonal_factors(const NoiseLayer& layer, bool inverse);
/// Moves every site factor onto a neighbouring link (site q onto link q, the
/// last site onto the last link). Leaves the factors unchanged when n = 1.
DiagonalFactors fold_sites_into_links(DiagonalFactors f);

/// Weight-1 X, Y, Z on every qubit plus all nine weight-2 Paulis on every
/// adjacent pair.
std::vector<PauliString> default_template(std::size_t n);

/// Rates drawn uniformly from a generator seeded with `seed`, rescaled so
/// that Σ λ = ln(target_gamma) / 2. Throws std::invalid_argument for
/// target_gamma < 1 or an empty template.
NoiseLayer calibrate_rates(const std::vector<PauliString>& templ, double target_gamma, std::uint64_t seed,
                           std::string label = {});

/// Dense diagonal PTM (n <= 6).
pauli::DensePtm dense_ptm(const NoiseLayer& layer, bool inverse = false);
/// Applies the channel to a dense density matrix, one generator at a time as
/// ρ -> (1 − p) ρ + p P ρ P with p = (1 − e^{−2λ}) / 2.
pauli::CMatrix apply_dense(const NoiseLayer& layer, const pauli::CMatrix& rho);

}  // namespace premit::noise
