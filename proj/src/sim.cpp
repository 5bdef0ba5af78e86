#include "premit/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "premit/noise.hpp"

namespace premit::sim {

Evolver::Evolver(const circuit::TrotterCircuit& c, const circuit::NoiseAssignment& noise, Index chi_max, double tol,
                 bool with_noise, const linalg::SvdOptions& svd)
    : circuit_(&c), noise_(&noise), svd_(svd) {
  if (noise.per_layer.size() != c.layers.size()) throw std::invalid_argument("noise assignment size mismatch");
  state_.mps = tensor::zero_state_mps(c.n);
  state_.ideal = !with_noise;
  state_.chi_max = chi_max;
  state_.tol = tol;
}

void Evolver::advance() {
  const auto& c = *circuit_;
  if (step_ >= c.steps()) throw std::out_of_range("Evolver: no more steps");
  const linalg::Truncation trunc{state_.chi_max, state_.tol};
  auto& train = state_.mps.train();
  bool truncated = false;
  for (std::size_t l = c.step_begin(step_); l < c.step_end[step_]; ++l) {
    const auto& layer_noise = noise_->per_layer[l];
    const bool noisy = !state_.ideal && !layer_noise.is_noiseless();
    const auto factors = noise::diagonal_factors(layer_noise, false);
    for (const auto& a : circuit::layer_program(c.layers[l], noisy ? &factors : nullptr)) {
      const auto op = tensor::SparseOp::from_dense(a.row_op);
      if (!a.two_site) {
        train.apply_one_site(a.site, op, a.orthogonal);
        continue;
      }
      const auto r = train.apply_two_site(a.site, op, trunc, svd_, a.sweep);
      if (r.norm_squared > 0.0) state_.discarded += r.discarded / r.norm_squared;
      truncated = truncated || r.discarded > 0.0;
    }
  }
  // Truncation can shift the identity component; every channel here is
  // trace preserving, so restore Tr[ρ] = 1.
  if (truncated) {
    const double t = trace(state_);
    if (t > 0.0) train.scale(1.0 / t);
  }
  ++step_;
}

StateMps evolve(const circuit::TrotterCircuit& c, const circuit::NoiseAssignment& noise, Index chi_max, double tol,
                std::size_t upto_step, bool with_noise, const linalg::SvdOptions& svd) {
  if (upto_step > c.steps()) throw std::out_of_range("evolve: step beyond circuit");
  Evolver e(c, noise, chi_max, tol, with_noise, svd);
  for (std::size_t s = 0; s < upto_step; ++s) e.advance();
  return e.state();
}

double trace(const StateMps& s) {
  return raw_expectation(s, PauliString::identity(s.mps.size()));
}

double raw_expectation(const StateMps& s, const PauliString& p) {
  if (p.size() != s.mps.size()) throw std::invalid_argument("expectation: length mismatch");
  return tensor::inner(s.mps, tensor::pauli_mps(p));
}

double expectation(const StateMps& s, const PauliString& p) {
  return std::clamp(raw_expectation(s, p), -1.0, 1.0);
}

ShotResult sample_shots(double v, std::int64_t shots, std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("sample_shots: shots must be >= 1");
  if (!(std::abs(v) <= 1.0)) throw std::invalid_argument("sample_shots: |value| must be <= 1");
  std::mt19937_64 gen(seed);
  std::binomial_distribution<std::int64_t> dist(shots, (1.0 + v) / 2.0);
  const std::int64_t plus = dist(gen);
  const double n = static_cast<double>(shots);
  ShotResult r;
  r.mean = (2.0 * static_cast<double>(plus) - n) / n;
  const double var = shots > 1 ? std::max(0.0, (1.0 - r.mean * r.mean) * n / (n - 1.0)) : 0.0;
  r.std_error = std::sqrt(var / n);
  r.shots = shots;
  r.seed = seed;
  return r;
}

OverheadRecord empirical_overhead(double mitigated_std, double noisy_std, double analytic, std::string method) {
  if (!(noisy_std > 0.0)) throw std::invalid_argument("empirical_overhead: noisy std must be positive");
  return {mitigated_std / noisy_std, analytic, std::move(method)};
}

double pec_theoretical_gamma(const circuit::TrotterCircuit& c, const circuit::NoiseAssignment& noise,
                             std::size_t upto_step) {
  if (upto_step > c.steps()) throw std::out_of_range("pec_theoretical_gamma: step beyond circuit");
  if (noise.per_layer.size() != c.layers.size()) throw std::invalid_argument("noise assignment size mismatch");
  const std::size_t end = upto_step == 0 ? 0 : c.step_end[upto_step - 1];
  double g = 1.0;
  for (std::size_t l = 0; l < end; ++l)
    if (c.layers[l].noisy()) g *= noise::gamma(noise.per_layer[l]);
  return g;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  // splitmix64 finalizer over the folded inputs
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(mix(base) ^ a) ^ b) ^ c);
}

}  // namespace premit::sim
