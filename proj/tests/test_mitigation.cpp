#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "oracles.hpp"
#include "premit/mitigation.hpp"
#include "premit/sim.hpp"

using namespace premit::mitigation;
using premit::circuit::NoiseAssignment;
using premit::circuit::TrotterCircuit;
using premit::noise::NoiseLayer;
using premit::pauli::PauliIndex;
using premit::pauli::PauliString;

namespace {

struct Setup {
  TrotterCircuit circuit;
  NoiseAssignment noise;
};

Setup ising(std::size_t n, std::size_t steps, double g1 = 1.14, double g2 = 1.137) {
  Setup s;
  s.circuit = premit::circuit::build_ising_circuit(n, steps, {});
  const auto templ = premit::noise::default_template(n);
  s.noise = premit::circuit::assign_ising_noise(s.circuit, premit::noise::calibrate_rates(templ, g1, 1),
                                                premit::noise::calibrate_rates(templ, g2, 2),
                                                premit::circuit::NoisePlacement::Parity);
  return s;
}

MiddleOutState run(const Setup& s, std::size_t steps, Index chi = 0, double tol = 0.0) {
  auto st = middle_out_init(s.circuit.n, chi, tol);
  for (std::size_t k = 0; k < steps; ++k) st = advance_trotter_step(std::move(st), s.circuit, s.noise, k);
  return st;
}

oracle::Vector target_vector(const PauliString& p) {
  oracle::Vector x = oracle::Vector::Zero(static_cast<Eigen::Index>((std::size_t{1} << (2 * p.size())) - 1));
  x(static_cast<Eigen::Index>(premit::pauli::index_of(p).value) - 1) = 1.0;
  return x;
}

}  // namespace

TEST_SUITE("mitigation") {

TEST_CASE("zero noise leaves the identity") {
  auto s = ising(4, 2, 1.0, 1.0);
  const auto st = run(s, 2);
  CHECK(st.layers == 14);
  CHECK((premit::tensor::to_dense(st.mpo).entries - oracle::Matrix::Identity(256, 256)).norm() < 1e-10);
}

TEST_CASE("a pure noise layer gives the inverse channel") {
  std::mt19937_64 gen(41);
  std::uniform_real_distribution<double> u(0.0, 0.05);
  std::vector<premit::noise::LindbladGenerator> gens;
  for (const auto& p : premit::noise::default_template(4)) gens.push_back({p, u(gen)});
  const NoiseLayer noise(4, gens);
  auto st = middle_out_step(middle_out_init(4, 0, 0.0), premit::circuit::Layer(4, {}), noise);
  const auto expect = premit::tensor::to_dense(premit::noise::to_mpo(noise, true)).entries;
  CHECK((premit::tensor::to_dense(st.mpo).entries - expect).norm() < 1e-10);
}

TEST_CASE("middle-out map equals the dense inverse adjoint") {
  for (std::size_t n : {2u, 3u}) {
    auto s = ising(n, 2);
    auto st = middle_out_init(n, 0, 0.0);
    for (std::size_t k = 0; k < 2; ++k) {
      st = advance_trotter_step(std::move(st), s.circuit, s.noise, k);
      const auto o = dense_channel_oracle(s.circuit, s.noise, k + 1);
      CHECK((premit::tensor::to_dense(st.mpo).entries - o.inverse_adjoint()).norm() < 1e-9);
    }
  }
  auto s = ising(4, 1);
  const auto o = dense_channel_oracle(s.circuit, s.noise, 1);
  CHECK((premit::tensor::to_dense(run(s, 1).mpo).entries - o.inverse_adjoint()).norm() < 1e-9);
}

TEST_CASE("full-vector oracles agree with the dense channel and density matrix") {
  auto s = ising(3, 2);
  for (std::size_t k = 0; k <= 2; ++k) {
    for (bool noisy : {false, true}) {
      const auto rho = dense_evolve(s.circuit, s.noise, k, noisy);
      CHECK((dense_state_ptm(s.circuit, s.noise, k, noisy) - premit::pauli::ptm_vector(rho).entries).norm() < 1e-12);
    }
    if (k == 0) continue;
    const oracle::Matrix inv = dense_channel_oracle(s.circuit, s.noise, k).inverse_adjoint();
    for (const char* w : {"ZZZ", "XIY", "IIZ"}) {
      const PauliString p(w);
      const auto col = inv.col(static_cast<Eigen::Index>(premit::pauli::index_of(p).value));
      CHECK((dense_surrogate_column(s.circuit, s.noise, k, p) - col).norm() < 1e-10);
    }
  }
  auto big = ising(6, 1);
  const auto st = run(big, 1);
  const PauliString p("ZXZYZZ");
  CHECK((column_coefficients(surrogate_column(st, p)) - dense_surrogate_column(big.circuit, big.noise, 1, p)).norm() <
        1e-10);
}

TEST_CASE("composed and gate-wise steps agree") {
  auto s = ising(3, 1);
  auto a = middle_out_init(3, 0, 0.0);
  auto b = middle_out_init(3, 0, 0.0);
  for (std::size_t l = 0; l < s.circuit.layers.size(); ++l) {
    a = middle_out_step(std::move(a), s.circuit.layers[l], s.noise.per_layer[l]);
    b = middle_out_step_composed(std::move(b), s.circuit.layers[l], s.noise.per_layer[l]);
  }
  CHECK((premit::tensor::to_dense(a.mpo).entries - premit::tensor::to_dense(b.mpo).entries).norm() < 1e-10);
}

TEST_CASE("APC recovers the ideal expectation") {
  const std::size_t n = 3;
  auto s = ising(n, 2);
  const auto st = run(s, 2);
  const auto noisy = premit::sim::evolve(s.circuit, s.noise, 0, 0.0, 2, true);
  const auto ideal = premit::mitigation::dense_evolve(s.circuit, s.noise, 2, false);
  for (const char* w : {"ZZZ", "XII", "ZIZ", "YXZ"}) {
    const PauliString p(w);
    const double exact = (ideal * premit::pauli::dense_matrix(p)).trace().real();
    const auto col = surrogate_column(st, p);
    CHECK(apc_expectation(col, noisy.mps) == doctest::Approx(exact).epsilon(1e-8).scale(1.0));
    const double noisy_value = premit::sim::raw_expectation(noisy, p);
    CHECK(dca_expectation(dca_coefficient(st, p), noisy_value) ==
          doctest::Approx(dca_coefficient(st, p) * noisy_value));
  }
}

TEST_CASE("surrogate coefficients and gamma match the oracle") {
  const std::size_t n = 3;
  auto s = ising(n, 2);
  const auto st = run(s, 2);
  const auto o = dense_channel_oracle(s.circuit, s.noise, 2);
  const oracle::Matrix inv = o.inverse_adjoint();
  for (const char* w : {"ZZZ", "XIY", "IIZ"}) {
    const PauliString p(w);
    const auto k = static_cast<Eigen::Index>(premit::pauli::index_of(p).value);
    const auto col = surrogate_column(st, p);
    const oracle::Vector y = column_coefficients(col);
    CHECK((y - inv.col(k)).norm() < 1e-9);
    const auto sur = o.exact_surrogate(target_vector(p));
    CHECK(y(0) == doctest::Approx(sur.y0).scale(1.0).epsilon(1e-9));
    CHECK((y.tail(y.size() - 1) - sur.y).norm() < 1e-9);
    CHECK(probabilistic_gamma(col) == doctest::Approx(inv.col(k).cwiseAbs().sum()).epsilon(1e-9));
    const double dca = dca_coefficient(st, p);
    CHECK(dca == doctest::Approx(inv(k, k)).epsilon(1e-9));
    CHECK(dca >= 1.0);

    const auto d = column_diagnostics(st, p);
    CHECK(d.exact);
    CHECK(d.off_diagonal.size() == 62);
    double best = 0.0;
    for (Eigen::Index i = 1; i < 64; ++i)
      if (i != k) best = std::max(best, std::abs(inv(i, k)));
    CHECK(d.max_off_diagonal == doctest::Approx(best).epsilon(1e-9));
    CHECK(d.diagonal == doctest::Approx(dca));
    if (best > 0.0) {
      REQUIRE(d.dominance_ratio.has_value());
      CHECK(*d.dominance_ratio == doctest::Approx(std::abs(dca) / best).epsilon(1e-9));
    }
  }
}

TEST_CASE("diagonal coefficient is at least one for every Pauli") {
  auto s = ising(3, 1);
  const auto st = run(s, 1);
  for (std::size_t i = 1; i < 64; ++i) CHECK(dca_coefficient(st, premit::pauli::pauli_of(PauliIndex{i}, 3)) >= 1.0 - 1e-12);
}

TEST_CASE("truncation is logged and bounded") {
  auto s = ising(5, 2);
  const auto exact = run(s, 2);
  const auto cut = run(s, 2, 4);
  CHECK(cut.mpo.max_bond() <= 4);
  CHECK(cut.log.size() == 14);
  CHECK(cut.total_discarded() > 0.0);
  CHECK(exact.total_discarded() < 1e-20);
  const PauliString p("ZZZZZ");
  CHECK(dca_coefficient(cut, p) == doctest::Approx(dca_coefficient(exact, p)).epsilon(1e-2));
}

TEST_CASE("checkpoints round trip") {
  auto s = ising(4, 1);
  const auto st = run(s, 1, 8, 1e-12);
  const auto dir = std::filesystem::temp_directory_path() / "premit_ckpt_test";
  std::filesystem::create_directories(dir);
  const std::string stem = (dir / "step_1").string();
  save_checkpoint(stem, st, 1);
  auto [back, step] = load_checkpoint(stem);
  CHECK(step == 1);
  CHECK(back.layers == st.layers);
  CHECK(back.chi_max == 8);
  CHECK(back.tol == st.tol);
  CHECK(back.log.size() == st.log.size());
  CHECK((premit::tensor::to_dense(back.mpo).entries - premit::tensor::to_dense(st.mpo).entries).norm() == 0.0);
  std::filesystem::remove_all(dir);
  CHECK_THROWS(load_checkpoint(stem));
}

TEST_CASE("argument validation") {
  const auto st = middle_out_init(5, 0, 0.0);
  CHECK_THROWS_AS(dca_coefficient(st, PauliString("ZZ")), std::invalid_argument);
  CHECK_THROWS_AS(probabilistic_gamma(surrogate_column(st, PauliString("ZZZZZ"))), std::invalid_argument);
  auto s = ising(5, 1);
  CHECK_THROWS_AS(dense_channel_oracle(s.circuit, s.noise, 1), std::invalid_argument);
  CHECK_THROWS_AS(advance_trotter_step(st, s.circuit, s.noise, 1), std::out_of_range);
}

}  // TEST_SUITE
