#include <cmath>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "premit/noise.hpp"

using namespace premit::noise;
using premit::pauli::CMatrix;
using premit::pauli::PauliIndex;
using premit::pauli::PauliString;

namespace {

NoiseLayer random_layer(std::size_t n, std::mt19937_64& gen, double scale = 0.05) {
  std::uniform_real_distribution<double> u(0.0, scale);
  std::vector<LindbladGenerator> gens;
  for (const auto& p : default_template(n)) gens.push_back({p, u(gen)});
  return NoiseLayer(n, gens);
}

// exp(L) with L(ρ) = Σ λ (PρP − ρ), built as a column-major superoperator.
CMatrix lindblad_superop(const NoiseLayer& layer) {
  const Eigen::Index dim = Eigen::Index{1} << layer.n();
  const Eigen::Index d2 = dim * dim;
  CMatrix l = CMatrix::Zero(d2, d2);
  for (const auto& g : layer.generators()) {
    const CMatrix p = premit::pauli::dense_matrix(g.pauli);
    l += g.rate * (oracle::ckron(p.conjugate(), p) - CMatrix::Identity(d2, d2));
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(l);
  const Eigen::VectorXd ev = es.eigenvalues().array().exp();
  return es.eigenvectors() * ev.cast<oracle::cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix apply_superop(const CMatrix& s, const CMatrix& rho) {
  const Eigen::Index dim = rho.rows();
  Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho.data(), dim * dim);
  Eigen::VectorXcd out = s * v;
  return Eigen::Map<CMatrix>(out.data(), dim, dim);
}

}  // namespace

TEST_SUITE("noise") {

TEST_CASE("fidelities match the exponentiated Lindbladian") {
  std::mt19937_64 gen(21);
  const std::size_t n = 3;
  auto layer = random_layer(n, gen);
  const CMatrix s = lindblad_superop(layer);
  const auto ptm = premit::pauli::ptm_matrix([&](const CMatrix& x) { return apply_superop(s, x); }, n);
  const auto ptm_dense = dense_ptm(layer);
  const auto ptm_inv = dense_ptm(layer, true);
  for (std::size_t i = 0; i < 64; ++i) {
    const auto p = premit::pauli::pauli_of(PauliIndex{i}, n);
    const auto ii = static_cast<Eigen::Index>(i);
    CHECK(ptm.entries(ii, ii) == doctest::Approx(fidelity(layer, p)).epsilon(1e-12));
    CHECK(ptm_dense.entries(ii, ii) == doctest::Approx(fidelity(layer, p)).epsilon(1e-12));
    CHECK(ptm_inv.entries(ii, ii) * fidelity(layer, p) == doctest::Approx(1.0));
  }
  CHECK((ptm.entries - ptm_dense.entries).norm() < 1e-12);
}

TEST_CASE("dense application matches the Lindbladian") {
  std::mt19937_64 gen(22);
  auto layer = random_layer(3, gen, 0.2);
  const CMatrix rho = oracle::random_density(3, gen);
  CHECK((apply_dense(layer, rho) - apply_superop(lindblad_superop(layer), rho)).norm() < 1e-12);
}

TEST_CASE("channel MPO and its inverse") {
  std::mt19937_64 gen(23);
  const std::size_t n = 4;
  auto layer = random_layer(n, gen);
  auto fwd = to_mpo(layer, false);
  auto inv = to_mpo(layer, true);
  CHECK(fwd.max_bond() <= 4);
  CHECK((premit::tensor::to_dense(fwd).entries - dense_ptm(layer).entries).norm() < 1e-11);
  CHECK((premit::tensor::to_dense(inv).entries - dense_ptm(layer, true).entries).norm() < 1e-10);
  const auto prod = premit::tensor::to_dense(premit::tensor::compose_mpo(fwd, inv)).entries;
  CHECK((prod - oracle::Matrix::Identity(256, 256)).norm() < 1e-10);
}

TEST_CASE("channel is unital") {
  std::mt19937_64 gen(24);
  for (std::size_t n : {2u, 5u, 10u}) {
    auto layer = random_layer(n, gen);
    const auto id = premit::tensor::pauli_mps(PauliString::identity(n));
    const auto out = premit::tensor::apply_mpo(to_mpo(layer, false), id);
    CHECK(premit::tensor::inner(out, id) == doctest::Approx(premit::tensor::inner(id, id)).epsilon(1e-12));
    CHECK(premit::tensor::inner(out, out) == doctest::Approx(premit::tensor::inner(id, id)).epsilon(1e-12));
  }
}

TEST_CASE("diagonal factors reproduce the fidelities") {
  std::mt19937_64 gen(25);
  const std::size_t n = 4;
  auto layer = random_layer(n, gen);
  for (bool inverse : {false, true}) {
    const auto f = diagonal_factors(layer, inverse);
    const auto folded = fold_sites_into_links(f);
    CHECK(folded.links.size() == n - 1);
    for (std::size_t i = 0; i < 256; ++i) {
      const auto p = premit::pauli::pauli_of(PauliIndex{i}, n);
      double a = 1.0, b = 1.0;
      for (std::size_t q = 0; q < n; ++q) a *= f.sites[q](static_cast<int>(p[q]));
      for (std::size_t q = 0; q + 1 < n; ++q) {
        const int k = static_cast<int>(p[q]) * 4 + static_cast<int>(p[q + 1]);
        a *= f.links[q](k);
        b *= folded.links[q](k);
      }
      for (std::size_t q = 0; q < folded.sites.size(); ++q) b *= folded.sites[q](static_cast<int>(p[q]));
      const double expect = inverse ? 1.0 / fidelity(layer, p) : fidelity(layer, p);
      CHECK(a == doctest::Approx(expect).epsilon(1e-12));
      CHECK(b == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("single-qubit factors survive when n = 1") {
  NoiseLayer layer(1, {{PauliString("X"), 0.1}});
  const auto f = fold_sites_into_links(diagonal_factors(layer, false));
  REQUIRE(f.sites.size() == 1);
  CHECK(f.links.empty());
  CHECK(f.sites[0](2) == doctest::Approx(std::exp(-0.2)));
}

TEST_CASE("gamma and calibration") {
  NoiseLayer layer(2, {{PauliString("XI"), 0.1}, {PauliString("ZZ"), 0.2}});
  CHECK(gamma(layer) == doctest::Approx(std::exp(0.6)));
  CHECK(fidelity(layer, PauliString("ZI")) == doctest::Approx(std::exp(-0.2)));
  CHECK(fidelity(layer, PauliString("YX")) == doctest::Approx(std::exp(-0.2)));
  CHECK(fidelity(layer, PauliString("YI")) == doctest::Approx(std::exp(-0.6)));
  CHECK(fidelity(layer, PauliString("II")) == 1.0);

  const auto templ = default_template(10);
  CHECK(templ.size() == 111);
  auto a = calibrate_rates(templ, 1.14, 7);
  auto b = calibrate_rates(templ, 1.14, 7);
  auto c = calibrate_rates(templ, 1.14, 8);
  CHECK(gamma(a) == doctest::Approx(1.14).epsilon(1e-12));
  CHECK(gamma(c) == doctest::Approx(1.14).epsilon(1e-12));
  double sum = 0.0;
  bool same = true, differ = false;
  for (std::size_t k = 0; k < a.generators().size(); ++k) {
    sum += a.generators()[k].rate;
    CHECK(a.generators()[k].rate >= 0.0);
    same = same && a.generators()[k].rate == b.generators()[k].rate;
    differ = differ || a.generators()[k].rate != c.generators()[k].rate;
  }
  CHECK(sum == doctest::Approx(std::log(1.14) / 2.0));
  CHECK(same);
  CHECK(differ);
  CHECK(gamma(calibrate_rates(templ, 1.0, 1)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(calibrate_rates(templ, 0.9, 1), std::invalid_argument);
  CHECK_THROWS_AS(calibrate_rates({}, 1.1, 1), std::invalid_argument);
}

TEST_CASE("validation and merging") {
  CHECK_THROWS_AS(NoiseLayer(3, {{PauliString("XIZ"), 0.1}}), std::invalid_argument);
  CHECK_THROWS_AS(NoiseLayer(3, {{PauliString("XYZ"), 0.1}}), std::invalid_argument);
  CHECK_THROWS_AS(NoiseLayer(3, {{PauliString("XI"), 0.1}}), std::invalid_argument);
  CHECK_THROWS_AS(NoiseLayer(2, {{PauliString("XI"), -0.1}}), std::invalid_argument);
  CHECK_THROWS_AS(NoiseLayer(2, {{PauliString("XI"), std::nan("")}}), std::invalid_argument);
  NoiseLayer merged(2, {{PauliString("XI"), 0.1}, {PauliString("XI"), 0.05}});
  REQUIRE(merged.generators().size() == 1);
  CHECK(merged.generators()[0].rate == doctest::Approx(0.15));

  auto quiet = NoiseLayer::noiseless(4);
  CHECK(quiet.is_noiseless());
  CHECK(gamma(quiet) == 1.0);
  CHECK((premit::tensor::to_dense(to_mpo(quiet, true)).entries - oracle::Matrix::Identity(256, 256)).norm() < 1e-12);
}

}  // TEST_SUITE
