#include "doctest.h"
#include "oracles.hpp"
#include "premit/pauli.hpp"

using namespace premit::pauli;

TEST_SUITE("pauli") {

TEST_CASE("parse, print and index round trip") {
  PauliString p("XIZY");
  CHECK(p.str() == "XIZY");
  CHECK(p.weight() == 3);
  CHECK(p.support() == std::vector<std::size_t>{0, 2, 3});
  CHECK(index_of(p).value == 1 * 64 + 0 * 16 + 3 * 4 + 2);
  CHECK(pauli_of(index_of(p), 4) == p);
  for (std::uint64_t i = 0; i < 256; ++i) CHECK(index_of(pauli_of(PauliIndex{i}, 4)).value == i);
  CHECK_THROWS_AS(PauliString("XQ"), std::invalid_argument);
  CHECK_THROWS_AS(PauliString(""), std::invalid_argument);
  CHECK_THROWS_AS(pauli_of(PauliIndex{16}, 2), std::out_of_range);
}

TEST_CASE("anticommutation agrees with dense matrices") {
  for (std::uint64_t i = 0; i < 16; ++i)
    for (std::uint64_t j = 0; j < 16; ++j) {
      auto p = pauli_of(PauliIndex{i}, 2);
      auto q = pauli_of(PauliIndex{j}, 2);
      const CMatrix a = dense_matrix(p), b = dense_matrix(q);
      const bool anti = (a * b + b * a).norm() < 1e-12;
      CHECK(anticommutes(p, q) == anti);
    }
  CHECK_THROWS_AS(anticommutes(PauliString("X"), PauliString("XX")), std::invalid_argument);
}

TEST_CASE("dense matrix uses qubit 0 as the leftmost kron factor") {
  const CMatrix xz = oracle::ckron(letter_matrix(Letter::X), letter_matrix(Letter::Z));
  CHECK((dense_matrix(PauliString("XZ")) - xz).norm() < 1e-14);
  const CMatrix y = letter_matrix(Letter::Y);
  CHECK(y(0, 1) == cplx(0, -1));
  CHECK(y(1, 0) == cplx(0, 1));
}

TEST_CASE("PTM vector of the zero state") {
  CMatrix rho = CMatrix::Zero(2, 2);
  rho(0, 0) = 1;
  auto v = ptm_vector(rho);
  const double h = 1.0 / std::sqrt(2.0);
  CHECK(v.entries(0, 0) == doctest::Approx(h));
  CHECK(v.entries(1, 0) == doctest::Approx(0.0));
  CHECK(v.entries(2, 0) == doctest::Approx(0.0));
  CHECK(v.entries(3, 0) == doctest::Approx(h));
  CHECK((operator_from_ptm(v) - rho).norm() < 1e-14);
}

TEST_CASE("PTM vector round trip and non-Hermitian rejection") {
  std::mt19937_64 gen(3);
  const CMatrix rho = oracle::random_density(3, gen);
  auto v = ptm_vector(rho);
  CHECK((operator_from_ptm(v) - rho).norm() < 1e-12);
  CMatrix bad = CMatrix::Zero(2, 2);
  bad(0, 1) = 1;
  CHECK_THROWS_AS(ptm_vector(bad), std::invalid_argument);
  CHECK_THROWS_AS(ptm_vector(CMatrix::Identity(3, 3)), std::invalid_argument);
}

TEST_CASE("unitary PTM is orthogonal and maps states correctly") {
  std::mt19937_64 gen(5);
  CMatrix h(4, 4);
  std::normal_distribution<double> g;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) h(i, j) = cplx(g(gen), g(gen));
  h = (h + h.adjoint()).eval();
  const CMatrix u = oracle::expm_i_hermitian(h, 0.7);
  const auto r = ptm_of_unitary(u);
  CHECK((r.entries.transpose() * r.entries - Eigen::MatrixXd::Identity(16, 16)).norm() < 1e-12);
  const CMatrix rho = oracle::random_density(2, gen);
  const auto in = ptm_vector(rho);
  const auto out = ptm_vector(u * rho * u.adjoint());
  CHECK((r.entries * in.entries - out.entries).norm() < 1e-12);
}

TEST_CASE("Hadamard PTM swaps X and Z") {
  CMatrix had(2, 2);
  had << 1, 1, 1, -1;
  had /= std::sqrt(2.0);
  const auto r = ptm_of_unitary(had).entries;
  CHECK(r(0, 0) == doctest::Approx(1.0));
  CHECK(r(3, 1) == doctest::Approx(1.0));
  CHECK(r(1, 3) == doctest::Approx(1.0));
  CHECK(r(2, 2) == doctest::Approx(-1.0));
}


TEST_CASE("documented index and commutation examples") {
  CHECK(index_of(PauliString("II")).value == 0);
  CHECK(index_of(PauliString("Z")).value == 3);
  CHECK(index_of(PauliString("ZZ")).value == 15);
  CHECK(pauli_of(PauliIndex{0}, 3) == PauliString("III"));
  CHECK(pauli_of(PauliIndex{15}, 2) == PauliString("ZZ"));
  for (std::uint64_t i = 0; i < 64; ++i) {
    const auto p = pauli_of(PauliIndex{i}, 3);
    CHECK(pauli_of(index_of(p), 3) == p);
    CHECK_FALSE(anticommutes(p, p));
    CHECK_FALSE(anticommutes(p, PauliString::identity(3)));
    for (std::uint64_t j = 0; j < 64; j += 7) {
      const auto q = pauli_of(PauliIndex{j}, 3);
      CHECK(anticommutes(p, q) == anticommutes(q, p));
    }
  }
  CHECK(anticommutes(PauliString("X"), PauliString("Z")));
  CHECK_FALSE(anticommutes(PauliString("XI"), PauliString("IZ")));
}

TEST_CASE("PTM vectors preserve Hilbert-Schmidt products") {
  const auto id = ptm_vector(CMatrix::Identity(2, 2));
  CHECK(id.entries(0, 0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(id.entries.bottomRows(3).norm() == 0.0);
  std::mt19937_64 gen(6);
  for (int n : {1, 2, 3}) {
    const Eigen::Index dim = Eigen::Index{1} << n;
    auto herm = [&] {
      CMatrix a(dim, dim);
      std::normal_distribution<double> g;
      for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = cplx(g(gen), g(gen));
      return CMatrix(a + a.adjoint());
    };
    const CMatrix a = herm(), b = herm();
    const auto va = ptm_vector(a), vb = ptm_vector(b);
    CHECK(va.entries.squaredNorm() == doctest::Approx((a.adjoint() * a).trace().real()).epsilon(1e-12));
    CHECK(va.entries.col(0).dot(vb.entries.col(0)) ==
          doctest::Approx((a.adjoint() * b).trace().real()).epsilon(1e-12));
  }
}

TEST_CASE("channel PTMs: identity, X conjugation and composition") {
  const auto id = ptm_matrix([](const CMatrix& x) { return x; }, 2);
  CHECK((id.entries - Eigen::MatrixXd::Identity(16, 16)).norm() < 1e-14);
  const CMatrix x = dense_matrix(PauliString("X"));
  const auto px = ptm_matrix(std::vector<CMatrix>{x});
  CHECK((px.entries - Eigen::Vector4d(1, 1, -1, -1).asDiagonal().toDenseMatrix()).norm() < 1e-14);
  std::mt19937_64 gen(7);
  for (int k = 0; k < 10; ++k) {
    const CMatrix ua = oracle::expm_i_hermitian(oracle::random_density(1, gen, 0.0), 1.1);
    const CMatrix ub = oracle::expm_i_hermitian(oracle::random_density(1, gen, 0.0), 0.6);
    const auto ab = ptm_matrix([&](const CMatrix& r) { return CMatrix(ua * ub * r * ub.adjoint() * ua.adjoint()); }, 1);
    CHECK((ab.entries - ptm_of_unitary(ua).entries * ptm_of_unitary(ub).entries).norm() < 1e-12);
  }
}

}
