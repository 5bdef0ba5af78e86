#include <cmath>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "premit/mitigation.hpp"
#include "premit/sim.hpp"

using namespace premit::sim;
using premit::circuit::NoiseAssignment;
using premit::circuit::TrotterCircuit;
using premit::pauli::PauliIndex;
using premit::pauli::PauliString;

namespace {

struct Setup {
  TrotterCircuit circuit;
  NoiseAssignment noise;
};

Setup ising(std::size_t n, std::size_t steps) {
  Setup s;
  s.circuit = premit::circuit::build_ising_circuit(n, steps, {});
  const auto templ = premit::noise::default_template(n);
  s.noise = premit::circuit::assign_ising_noise(s.circuit, premit::noise::calibrate_rates(templ, 1.14, 1),
                                                premit::noise::calibrate_rates(templ, 1.137, 2),
                                                premit::circuit::NoisePlacement::Parity);
  return s;
}

}  // namespace

TEST_SUITE("sim") {

TEST_CASE("MPS evolution matches dense density matrices") {
  const std::size_t n = 4;
  auto s = ising(n, 3);
  for (bool noisy : {false, true}) {
    Evolver e(s.circuit, s.noise, 0, 0.0, noisy);
    for (std::size_t k = 1; k <= 3; ++k) {
      e.advance();
      const auto rho = premit::mitigation::dense_evolve(s.circuit, s.noise, k, noisy);
      const auto expect = premit::pauli::ptm_vector(rho).entries;
      CHECK((premit::tensor::to_dense(e.state().mps).entries - expect).norm() < 1e-9);
      CHECK(trace(e.state()) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(e.advance(), std::out_of_range);
  }
}

TEST_CASE("expectations read Tr[rho P]") {
  const std::size_t n = 3;
  auto s = ising(n, 2);
  const auto st = evolve(s.circuit, s.noise, 0, 0.0, 2, true);
  const auto rho = premit::mitigation::dense_evolve(s.circuit, s.noise, 2, true);
  for (std::size_t i = 0; i < 64; ++i) {
    const auto p = premit::pauli::pauli_of(PauliIndex{i}, n);
    const double exact = (rho * premit::pauli::dense_matrix(p)).trace().real();
    CHECK(raw_expectation(st, p) == doctest::Approx(exact).scale(1.0).epsilon(1e-10));
    CHECK(std::abs(expectation(st, p)) <= 1.0);
  }
  CHECK_THROWS_AS(raw_expectation(st, PauliString("ZZ")), std::invalid_argument);
}

TEST_CASE("forward then inverse returns the initial state") {
  const std::size_t n = 5;
  auto step = premit::circuit::build_ising_step(n, {});
  auto inverse = step;
  std::reverse(inverse.begin(), inverse.end());
  for (auto& l : inverse) l = premit::circuit::invert_layer(l);
  std::vector<premit::circuit::Layer> round = step;
  round.insert(round.end(), inverse.begin(), inverse.end());
  auto c = premit::circuit::repeat_step(n, round, 1);
  NoiseAssignment quiet;
  for (std::size_t l = 0; l < c.layers.size(); ++l) quiet.per_layer.push_back(premit::noise::NoiseLayer::noiseless(n));
  const auto st = evolve(c, quiet, 0, 0.0, 1, false);
  const auto zero = premit::tensor::zero_state_mps(n);
  CHECK(premit::tensor::inner(st.mps, zero) == doctest::Approx(premit::tensor::inner(zero, zero)).epsilon(1e-12));
  CHECK(premit::tensor::inner(st.mps, st.mps) == doctest::Approx(premit::tensor::inner(zero, zero)).epsilon(1e-12));
}

TEST_CASE("an ideal Trotter step conserves the PTM norm") {
  for (std::size_t n : {2u, 5u, 10u}) {
    auto s = ising(n, 1);
    const auto st = evolve(s.circuit, s.noise, 0, 0.0, 1, false);
    const auto zero = premit::tensor::zero_state_mps(n);
    CHECK(premit::tensor::inner(st.mps, st.mps) == doctest::Approx(premit::tensor::inner(zero, zero)).epsilon(1e-10));
    CHECK(trace(st) == doctest::Approx(1.0).epsilon(1e-10));
  }
  auto a = premit::circuit::build_ising_step(6, {});
  auto b = premit::circuit::build_ising_step(6, {});
  REQUIRE(a.size() == b.size());
  for (std::size_t l = 0; l < a.size(); ++l) CHECK((dense_unitary(a[l]) - dense_unitary(b[l])).norm() == 0.0);
}

TEST_CASE("noise preserves the trace at n = 10 under truncation") {
  auto s = ising(10, 2);
  const auto st = evolve(s.circuit, s.noise, 16, 0.0, 2, true);
  CHECK(st.mps.max_bond() <= 16);
  CHECK(trace(st) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("shot sampling statistics") {
  const double v = 0.3;
  const std::int64_t shots = 100000;
  std::vector<double> means;
  for (std::uint64_t k = 0; k < 400; ++k) {
    const auto r = sample_shots(v, shots, derive_seed(5, k));
    CHECK(r.shots == shots);
    CHECK(std::abs(r.mean) <= 1.0);
    CHECK(r.std_error == doctest::Approx(std::sqrt((1.0 - r.mean * r.mean) / (shots - 1.0))));
    means.push_back(r.mean);
  }
  const double mean = std::accumulate(means.begin(), means.end(), 0.0) / means.size();
  double var = 0.0;
  for (double m : means) var += (m - mean) * (m - mean);
  var /= means.size() - 1.0;
  const double expect_var = (1.0 - v * v) / shots;
  CHECK(std::abs(mean - v) < 5.0 * std::sqrt(expect_var / means.size()));
  CHECK(var == doctest::Approx(expect_var).epsilon(0.2));

  const auto a = sample_shots(v, shots, 9);
  const auto b = sample_shots(v, shots, 9);
  CHECK(a.mean == b.mean);
  CHECK(sample_shots(1.0, 10, 1).mean == 1.0);
  CHECK(sample_shots(-1.0, 10, 1).mean == -1.0);
  CHECK_THROWS_AS(sample_shots(1.5, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_shots(0.1, 0, 1), std::invalid_argument);
}

TEST_CASE("seed derivation separates streams") {
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
  CHECK(derive_seed(2, 2) != derive_seed(1, 2));
}

TEST_CASE("overhead bookkeeping") {
  const auto r = empirical_overhead(0.3, 0.2, 1.5, "dca");
  CHECK(r.gamma_empirical == doctest::Approx(1.5));
  CHECK(r.method == "dca");
  CHECK_THROWS_AS(empirical_overhead(0.3, 0.0, 1.5, "dca"), std::invalid_argument);
  auto s = ising(10, 2);
  CHECK(pec_theoretical_gamma(s.circuit, s.noise, 1) == doctest::Approx(std::pow(1.14 * 1.137, 2)).epsilon(1e-12));
  CHECK(pec_theoretical_gamma(s.circuit, s.noise, 2) == doctest::Approx(std::pow(1.14 * 1.137, 4)).epsilon(1e-12));
  CHECK(pec_theoretical_gamma(s.circuit, s.noise, 0) == 1.0);
}

}  // TEST_SUITE
