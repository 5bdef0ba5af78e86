#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "premit/noise.hpp"
#include "premit/qcrb.hpp"

using namespace premit::qcrb;
using premit::pauli::PauliIndex;
using premit::pauli::PauliString;

namespace {

std::size_t count(std::size_t n) { return (std::size_t{1} << (2 * n)) - 1; }

Vector random_x(std::size_t n, std::mt19937_64& gen) {
  return oracle::random_matrix(static_cast<Eigen::Index>(count(n)), 1, gen);
}

// Affine Bloch action θ' = Aθ + c of a channel, from its action on Paulis.
std::pair<Matrix, Vector> affine(const premit::pauli::Superoperator& ch, std::size_t n) {
  const std::size_t d = count(n);
  const Eigen::Index dim = Eigen::Index{1} << n;
  Matrix a(d, d);
  Vector c(d);
  const CMatrix half = ch(CMatrix::Identity(dim, dim) / static_cast<double>(dim));
  for (std::size_t i = 1; i <= d; ++i) {
    const CMatrix pi = premit::pauli::dense_matrix(premit::pauli::pauli_of(PauliIndex{i}, n));
    c(i - 1) = (half * pi).trace().real();
    for (std::size_t j = 1; j <= d; ++j) {
      const CMatrix pj = premit::pauli::dense_matrix(premit::pauli::pauli_of(PauliIndex{j}, n));
      a(i - 1, j - 1) = (ch(pj / static_cast<double>(dim)) * pi).trace().real();
    }
  }
  return {a, c};
}

premit::noise::NoiseLayer random_noise(std::size_t n, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 0.15);
  std::vector<premit::noise::LindbladGenerator> gens;
  for (const auto& p : premit::noise::default_template(n)) gens.push_back({p, u(gen)});
  return premit::noise::NoiseLayer(n, gens);
}

}  // namespace

TEST_SUITE("qcrb") {

TEST_CASE("Bloch round trip and PTM bridge") {
  std::mt19937_64 gen(51);
  for (std::size_t n : {1u, 2u, 3u}) {
    const CMatrix rho = oracle::random_density(static_cast<int>(n), gen);
    const auto b = bloch(rho);
    CHECK(b.theta.size() == static_cast<Eigen::Index>(count(n)));
    CHECK((reconstruct(b) - rho).norm() < 1e-12);
    CHECK(is_physical(b));
    CHECK((to_ptm(b) - premit::pauli::ptm_vector(rho).entries).norm() < 1e-12);
    CHECK((from_ptm(n, to_ptm(b)).theta - b.theta).norm() < 1e-12);
  }
  BlochVector bad{1, Vector::Constant(3, 1.0)};
  CHECK_FALSE(is_physical(bad));
  CHECK_THROWS_AS(bloch(CMatrix::Identity(2, 2)), std::invalid_argument);
  CHECK_THROWS_AS(bloch(CMatrix::Identity(16, 16) / 16.0), std::invalid_argument);
}

TEST_CASE("structure constants from the anticommutator") {
  const auto mu = structure_tensor(2);
  const auto i = premit::pauli::index_of(PauliString("XI")).value;
  const auto j = premit::pauli::index_of(PauliString("XZ")).value;
  const auto m = premit::pauli::index_of(PauliString("IZ")).value;
  CHECK(mu(i, j, m) == 2.0);

  for (std::size_t n : {1u, 2u}) {
    const auto t = structure_tensor(n);
    const std::size_t d = count(n);
    const Eigen::Index dim = Eigen::Index{1} << n;
    for (std::size_t a = 1; a <= d; ++a)
      for (std::size_t b = 1; b <= d; ++b) {
        const CMatrix pa = premit::pauli::dense_matrix(premit::pauli::pauli_of(PauliIndex{a}, n));
        const CMatrix pb = premit::pauli::dense_matrix(premit::pauli::pauli_of(PauliIndex{b}, n));
        const CMatrix anti = pa * pb + pb * pa;
        for (std::size_t c = 1; c <= d; ++c) {
          const CMatrix pc = premit::pauli::dense_matrix(premit::pauli::pauli_of(PauliIndex{c}, n));
          const double expect = (anti * pc).trace().real() / static_cast<double>(dim);
          CHECK(t(a, b, c) == doctest::Approx(expect).scale(1.0));
        }
      }
  }

  std::mt19937_64 gen(52);
  std::uniform_int_distribution<std::size_t> pick(1, count(2));
  for (int k = 0; k < 50; ++k) {
    const std::size_t a = pick(gen), b = pick(gen), c = pick(gen);
    const double v = mu(a, b, c);
    CHECK(mu(b, a, c) == v);
    CHECK(mu(a, c, b) == v);
    CHECK(mu(c, b, a) == v);
  }
  CHECK_THROWS_AS(structure_tensor(3), std::invalid_argument);
}

TEST_CASE("G matrix is half the anticommutator expectation") {
  std::mt19937_64 gen(53);
  const CMatrix rho = oracle::random_density(2, gen);
  const auto g = g_matrix(bloch(rho));
  for (std::size_t a = 1; a <= 15; ++a)
    for (std::size_t b = 1; b <= 15; ++b) {
      const CMatrix pa = premit::pauli::dense_matrix(premit::pauli::pauli_of(PauliIndex{a}, 2));
      const CMatrix pb = premit::pauli::dense_matrix(premit::pauli::pauli_of(PauliIndex{b}, 2));
      CHECK(g(a - 1, b - 1) == doctest::Approx(0.5 * (rho * (pa * pb + pb * pa)).trace().real()).scale(1.0));
    }
}

TEST_CASE("noiseless bound equals the direct variance") {
  std::mt19937_64 gen(54);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 1 + k % 2;
    const double copies = 1.0 + k;
    const CMatrix rho = oracle::random_density(static_cast<int>(n), gen, 0.01 + 0.2 * (k % 5) / 4.0);
    const Vector x = random_x(n, gen);
    const double direct = variance_direct(observable(n, x), rho, copies);
    CHECK(qcrb_noiseless(x, bloch(rho), copies) == doctest::Approx(direct).epsilon(1e-9).scale(1e-9));
  }
}

TEST_CASE("noisy bound equals the surrogate variance on the noisy state") {
  std::mt19937_64 gen(55);
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 1 + k % 2;
    const CMatrix rho = oracle::random_density(static_cast<int>(n), gen, 0.01 + 0.1 * (k % 3));
    const Vector x = random_x(n, gen);
    CMatrix u = oracle::expm_i_hermitian(oracle::random_density(static_cast<int>(n), gen, 0.0), 1.3);
    const auto noise = random_noise(n, gen);
    premit::pauli::Superoperator ch;
    if (k % 4 == 3) {
      // Non-unital: amplitude damping on qubit 0 after the unitary.
      const double g = 0.1 + 0.02 * (k % 7);
      CMatrix k0 = CMatrix::Zero(2, 2), k1 = CMatrix::Zero(2, 2);
      k0(0, 0) = 1.0;
      k0(1, 1) = std::sqrt(1.0 - g);
      k1(0, 1) = std::sqrt(g);
      const CMatrix e0 = oracle::cembed(k0, 0, 1, static_cast<int>(n));
      const CMatrix e1 = oracle::cembed(k1, 0, 1, static_cast<int>(n));
      ch = [=](const CMatrix& r) {
        const CMatrix v = u * r * u.adjoint();
        return CMatrix(e0 * v * e0.adjoint() + e1 * v * e1.adjoint());
      };
    } else {
      ch = [=](const CMatrix& r) { return premit::noise::apply_dense(noise, u * r * u.adjoint()); };
    }
    const auto [a, c] = affine(ch, n);
    if (k % 4 == 3) CHECK(c.norm() > 1e-3);
    const Vector y = a.transpose().fullPivLu().solve(x);
    const double y0 = -c.dot(y);
    const CMatrix sur = observable(n, y, y0);
    const CMatrix noisy = ch(rho);
    const double copies = 3.0 + k;
    const double direct = variance_direct(sur, noisy, copies);
    CHECK((noisy * sur).trace().real() == doctest::Approx((rho * observable(n, x)).trace().real()).scale(1.0));
    CHECK(qcrb_noisy(x, bloch(rho), a, c, copies) == doctest::Approx(direct).epsilon(1e-9).scale(1e-9));
  }
}

TEST_CASE("trivial bounds") {
  CMatrix zero = CMatrix::Zero(2, 2);
  zero(0, 0) = 1.0;
  Vector z = Vector::Zero(3);
  z(2) = 1.0;
  CHECK(qcrb_noiseless(z, bloch(zero), 1.0) == doctest::Approx(0.0).scale(1.0));
  CHECK(variance_direct(observable(1, z), zero, 1.0) == doctest::Approx(0.0).scale(1.0));
  Vector x = Vector::Zero(3);
  x(0) = 1.0;
  CHECK(variance_direct(observable(1, x), zero, 1.0) == doctest::Approx(1.0));
  CHECK(qcrb_noiseless(x, bloch(zero), 4.0) == doctest::Approx(0.25));
}

TEST_CASE("QFIM grows as the state approaches purity") {
  std::mt19937_64 gen(57);
  const CMatrix pure = oracle::random_density(2, gen, 0.0);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(pure);
  const Eigen::VectorXcd top = es.eigenvectors().col(3);
  const CMatrix proj = top * top.adjoint();
  double last = 0.0;
  for (double p : {0.5, 0.2, 0.1, 0.05, 0.02, 0.01}) {
    const CMatrix rho = (1.0 - p) * proj + p * CMatrix::Identity(4, 4) / 4.0;
    Eigen::SelfAdjointEigenSolver<Matrix> ev(qfim(bloch(rho)));
    const double largest = ev.eigenvalues().maxCoeff();
    CHECK(largest > last);
    last = largest;
  }
}

TEST_CASE("QFIM and singular cases") {
  std::mt19937_64 gen(56);
  const CMatrix rho = oracle::random_density(2, gen, 0.1);
  const auto b = bloch(rho);
  const Matrix j = qfim(b);
  const Matrix cov = g_matrix(b).transpose() - b.theta * b.theta.transpose();
  CHECK((j * cov - Matrix::Identity(15, 15)).norm() < 1e-8);
  CMatrix pure = CMatrix::Zero(2, 2);
  pure(0, 0) = 1.0;
  CHECK_THROWS_AS(qfim(bloch(pure)), std::domain_error);
  const Vector x = Vector::Ones(3);
  CHECK_THROWS_AS(qcrb_noisy(x, bloch(pure), Matrix::Zero(3, 3), Vector::Zero(3), 10), std::invalid_argument);
  CHECK_THROWS_AS(qcrb_noiseless(Vector::Ones(4), bloch(pure), 10), std::invalid_argument);
  CHECK_THROWS_AS(qcrb_noiseless(x, bloch(pure), 0.5), std::invalid_argument);
}

}  // TEST_SUITE
