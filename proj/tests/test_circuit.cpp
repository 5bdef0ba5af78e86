#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "premit/circuit.hpp"

using namespace premit::circuit;
using premit::noise::NoiseLayer;
using premit::pauli::CMatrix;
using premit::pauli::Letter;
using premit::pauli::PauliString;

namespace {

CMatrix letter(Letter l) { return premit::pauli::letter_matrix(l); }

// exp(iJδt Σ ZZ) on the given links after exp(−ihδt Σ X), as dense matrices.
CMatrix ising_step_oracle(int n, const IsingParams& p) {
  CMatrix hx = CMatrix::Zero(Eigen::Index{1} << n, Eigen::Index{1} << n);
  for (int q = 0; q < n; ++q) hx += oracle::cembed(letter(Letter::X), q, 1, n);
  CMatrix u = oracle::expm_i_hermitian(hx, p.h * p.dt);
  const CMatrix zz = oracle::ckron(letter(Letter::Z), letter(Letter::Z));
  for (int parity = 0; parity < 2; ++parity) {
    CMatrix hz = CMatrix::Zero(u.rows(), u.cols());
    for (int q = parity; q + 1 < n; q += 2) hz += oracle::cembed(zz, q, 2, n);
    u = oracle::expm_i_hermitian(hz, -p.J * p.dt) * u;
  }
  return u;
}

CMatrix step_unitary(const std::vector<Layer>& layers) {
  const Eigen::Index dim = Eigen::Index{1} << layers.front().n();
  CMatrix u = CMatrix::Identity(dim, dim);
  for (const auto& l : layers) u = dense_unitary(l) * u;
  return u;
}

// Applies a layer program to a dense PTM vector with independent embeddings.
oracle::Vector run_program(const std::vector<LocalAction>& prog, oracle::Vector v, int n) {
  for (const auto& a : prog)
    v = oracle::embed(a.row_op, static_cast<int>(a.site), a.two_site ? 2 : 1, n, 4) * v;
  return v;
}

NoiseLayer random_noise(std::size_t n, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 0.05);
  std::vector<premit::noise::LindbladGenerator> gens;
  for (const auto& p : premit::noise::default_template(n)) gens.push_back({p, u(gen)});
  return NoiseLayer(n, gens);
}

}  // namespace

TEST_SUITE("circuit") {

TEST_CASE("Ising step structure at n = 10") {
  auto c = build_ising_circuit(10, 3, {});
  CHECK(c.steps() == 3);
  CHECK(c.layers.size() == 21);
  CHECK(c.step_end == std::vector<std::size_t>{7, 14, 21});
  std::vector<std::size_t> cnots;
  for (std::size_t l = 0; l < 7; ++l) {
    if (!c.layers[l].noisy()) continue;
    std::size_t k = 0;
    for (const auto& g : c.layers[l].gates()) k += g.two_qubit() ? 1 : 0;
    cnots.push_back(k);
  }
  CHECK(cnots == std::vector<std::size_t>{5, 5, 4, 4});
  CHECK(c.layers[0].gates().size() == 10);
  CHECK(c.layers[0].gates()[0].angle == doctest::Approx(1.0));
  CHECK(c.layers[2].gates()[0].angle == doctest::Approx(-0.5236));
  CHECK_THROWS_AS(build_ising_step(1, {}), std::invalid_argument);
}

TEST_CASE("gate unitaries") {
  const double t = 0.37;
  CHECK((gate_unitary(Gate::rx(0, t)) - oracle::expm_i_hermitian(letter(Letter::X), t / 2)).norm() < 1e-14);
  CHECK((gate_unitary(Gate::rz(0, t)) - oracle::expm_i_hermitian(letter(Letter::Z), t / 2)).norm() < 1e-14);
  CMatrix cx = CMatrix::Zero(4, 4);
  cx(0, 0) = cx(1, 1) = cx(2, 3) = cx(3, 2) = 1.0;
  CHECK((gate_unitary(Gate::cnot(0, 1)) - cx).norm() == 0.0);
  CMatrix xc = CMatrix::Zero(4, 4);
  xc(0, 0) = xc(3, 1) = xc(2, 2) = xc(1, 3) = 1.0;
  CHECK((gate_unitary(Gate::cnot(1, 0)) - xc).norm() == 0.0);

  oracle::Matrix cx_ptm = gate_ptm(Gate::cnot(0, 1));
  CHECK((cx_ptm * cx_ptm.transpose() - oracle::Matrix::Identity(16, 16)).norm() < 1e-13);
  // CNOT maps X⊗I to X⊗X and I⊗Z to Z⊗Z.
  CHECK(cx_ptm(1 * 4 + 1, 1 * 4 + 0) == doctest::Approx(1.0));
  CHECK(cx_ptm(3 * 4 + 3, 0 * 4 + 3) == doctest::Approx(1.0));
}

TEST_CASE("Ising step unitary matches the Trotter product") {
  for (int n : {2, 3, 4, 5}) {
    IsingParams p;
    CHECK((step_unitary(build_ising_step(n, p)) - ising_step_oracle(n, p)).norm() < 1e-12);
  }
}

TEST_CASE("CNOT pairs cancel when J = 0") {
  const int n = 4;
  IsingParams p;
  p.J = 0.0;
  CMatrix hx = CMatrix::Zero(16, 16);
  for (int q = 0; q < n; ++q) hx += oracle::cembed(letter(Letter::X), q, 1, n);
  CHECK((step_unitary(build_ising_step(n, p)) - oracle::expm_i_hermitian(hx, p.dt)).norm() < 1e-12);
  p.h = 0.0;
  CHECK((step_unitary(build_ising_step(n, p)) - CMatrix::Identity(16, 16)).norm() < 1e-12);
}

TEST_CASE("layer MPOs are orthogonal PTMs of the layer") {
  const std::size_t n = 4;
  for (const auto& layer : build_ising_step(n, {})) {
    const auto m = premit::tensor::to_dense(layer_to_mpo(layer)).entries;
    const auto expect = premit::pauli::ptm_of_unitary(dense_unitary(layer)).entries;
    CHECK((m - expect).norm() < 1e-12);
    CHECK((m * m.transpose() - oracle::Matrix::Identity(256, 256)).norm() < 1e-12);
  }
}

TEST_CASE("layer programs preserve the norm and match dense noise") {
  std::mt19937_64 gen(31);
  const int n = 4;
  auto noise = random_noise(n, gen);
  const auto factors = premit::noise::diagonal_factors(noise, false);
  const auto inv_factors = premit::noise::diagonal_factors(noise, true);
  const oracle::Matrix lam = premit::noise::dense_ptm(noise).entries;
  const oracle::Matrix lam_inv = premit::noise::dense_ptm(noise, true).entries;
  const oracle::Vector v = oracle::random_matrix(256, 1, gen);
  for (const auto& layer : build_ising_step(n, {})) {
    const oracle::Matrix u = premit::pauli::ptm_of_unitary(dense_unitary(layer)).entries;
    const auto clean = run_program(layer_program(layer, nullptr), v, n);
    CHECK((clean - u * v).norm() < 1e-12);
    CHECK(clean.norm() == doctest::Approx(v.norm()).epsilon(1e-12));
    for (const auto& a : layer_program(layer, nullptr))
      if (a.orthogonal) CHECK((a.row_op * a.row_op.transpose() - oracle::Matrix::Identity(a.row_op.rows(), a.row_op.rows())).norm() < 1e-12);
    CHECK((run_program(layer_program(layer, &factors), v, n) - lam * u * v).norm() < 1e-12);
    CHECK((run_program(layer_program(layer, &inv_factors), v, n) - lam_inv * u * v).norm() < 1e-10);
  }
}

TEST_CASE("inverse layers") {
  for (const auto& layer : build_ising_step(5, {})) {
    const CMatrix u = dense_unitary(layer);
    CHECK((dense_unitary(invert_layer(layer)) * u - CMatrix::Identity(32, 32)).norm() < 1e-12);
  }
}

TEST_CASE("layer validation") {
  CHECK_THROWS_AS(Layer(3, {Gate::rx(0, 0.1), Gate::cnot(0, 1)}), std::invalid_argument);
  CHECK_THROWS_AS(Layer(3, {Gate::cnot(0, 2)}), std::invalid_argument);
  CHECK_THROWS_AS(Layer(3, {Gate::rx(3, 0.1)}), std::invalid_argument);
  CHECK_THROWS_AS(Layer(3, {Gate::cnot(1, 1)}), std::invalid_argument);
  CHECK_FALSE(Layer(3, {Gate::rx(0, 0.1)}).noisy());
  CHECK(Layer(3, {Gate::cnot(2, 1)}).noisy());
}

TEST_CASE("noise placement") {
  auto c = build_ising_circuit(4, 2, {});
  const auto a = NoiseLayer(4, {{PauliString("XIII"), 0.1}}, "a");
  const auto b = NoiseLayer(4, {{PauliString("IZII"), 0.1}}, "b");
  auto parity = assign_ising_noise(c, a, b, NoisePlacement::Parity);
  auto position = assign_ising_noise(c, a, b, NoisePlacement::Position);
  REQUIRE(parity.per_layer.size() == c.layers.size());
  std::vector<std::string> labels_parity, labels_position;
  for (std::size_t l = 0; l < c.layers.size(); ++l) {
    if (!c.layers[l].noisy()) {
      CHECK(parity.per_layer[l].is_noiseless());
      continue;
    }
    labels_parity.push_back(parity.per_layer[l].label());
    labels_position.push_back(position.per_layer[l].label());
  }
  CHECK(labels_parity == std::vector<std::string>{"a", "a", "b", "b", "a", "a", "b", "b"});
  CHECK(labels_position == std::vector<std::string>{"a", "b", "a", "b", "a", "b", "a", "b"});
  auto cyc = assign_cyclic(c, {a, b});
  CHECK(cyc.per_layer[1].label() == "a");
  CHECK(cyc.per_layer[3].label() == "b");
  CHECK_THROWS_AS(assign_cyclic(c, {}), std::invalid_argument);
}

}  // TEST_SUITE
