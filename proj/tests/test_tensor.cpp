#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "premit/tensor.hpp"

using namespace premit::tensor;
using premit::pauli::DensePtm;
using premit::pauli::PauliString;

namespace {

DensePtm random_vector(std::size_t n, std::mt19937_64& gen) {
  return {n, oracle::random_matrix(Index{1} << (2 * n), 1, gen)};
}

DensePtm random_ptm(std::size_t n, std::mt19937_64& gen) {
  const Index d = Index{1} << (2 * n);
  return {n, oracle::random_matrix(d, d, gen)};
}

}  // namespace

TEST_SUITE("tensor") {

TEST_CASE("dense round trip for vectors and operators") {
  std::mt19937_64 gen(11);
  auto v = random_vector(3, gen);
  auto mps = mps_from_dense(v);
  CHECK((to_dense(mps).entries - v.entries).norm() < 1e-12);
  CHECK(mps.bond_dims() == std::vector<Index>{1, 4, 4, 1});

  auto m = random_ptm(2, gen);
  auto mpo = mpo_from_dense(m);
  CHECK((to_dense(mpo).entries - m.entries).norm() < 1e-12);
  CHECK(element(mpo, PauliString("XZ"), PauliString("YI")) == doctest::Approx(m.entries(1 * 4 + 3, 2 * 4 + 0)));
}

TEST_CASE("identity and product operators") {
  auto id = Mpo::identity(3);
  CHECK((to_dense(id).entries - oracle::Matrix::Identity(64, 64)).norm() == 0.0);
  std::mt19937_64 gen(12);
  std::vector<Eigen::Matrix4d> sites;
  oracle::Matrix full = oracle::Matrix::Identity(1, 1);
  for (int k = 0; k < 3; ++k) {
    Eigen::Matrix4d s = oracle::random_matrix(4, 4, gen);
    sites.push_back(s);
    full = oracle::kron(full, s);
  }
  CHECK((to_dense(Mpo::product(sites)).entries - full).norm() < 1e-12);
}

TEST_CASE("Pauli and zero-state vectors") {
  auto zero = zero_state_mps(3);
  CHECK(inner(zero, pauli_mps(PauliString("ZZZ"))) == doctest::Approx(1.0));
  CHECK(inner(zero, pauli_mps(PauliString("ZIZ"))) == doctest::Approx(1.0));
  CHECK(inner(zero, pauli_mps(PauliString("XII"))) == doctest::Approx(0.0));
  CHECK(inner(zero, pauli_mps(PauliString("III"))) == doctest::Approx(1.0));
  CHECK(inner(basis_mps(PauliString("XY")), basis_mps(PauliString("XY"))) == doctest::Approx(1.0));
  CHECK(inner(basis_mps(PauliString("XY")), basis_mps(PauliString("YX"))) == doctest::Approx(0.0));
}

TEST_CASE("apply, compose, inner and sandwich match dense algebra") {
  std::mt19937_64 gen(13);
  auto a = random_ptm(2, gen), b = random_ptm(2, gen);
  auto x = random_vector(2, gen), y = random_vector(2, gen);
  auto ma = mpo_from_dense(a), mb = mpo_from_dense(b);
  auto vx = mps_from_dense(x), vy = mps_from_dense(y);

  CHECK((to_dense(apply_mpo(ma, vx)).entries - a.entries * x.entries).norm() < 1e-10);
  CHECK((to_dense(compose_mpo(ma, mb)).entries - a.entries * b.entries).norm() < 1e-9);
  CHECK(inner(vx, vy) == doctest::Approx(x.entries.col(0).dot(y.entries.col(0))));
  const double s = (y.entries.transpose() * a.entries * x.entries)(0, 0);
  CHECK(sandwich(vy, ma, vx) == doctest::Approx(s));
}

TEST_CASE("moving the center keeps the represented tensor") {
  std::mt19937_64 gen(14);
  auto x = random_vector(4, gen);
  auto v = mps_from_dense(x);
  for (std::size_t k : {3u, 0u, 2u, 1u}) {
    v.train().move_center(k);
    CHECK(v.train().center() == k);
    CHECK((to_dense(v).entries - x.entries).norm() < 1e-10);
    CHECK(v.train().norm_squared() == doctest::Approx(x.entries.squaredNorm()));
  }
  // Cores left of the center are left-orthonormal.
  v.train().move_center(3);
  for (std::size_t k = 0; k < 3; ++k) {
    const Core& c = v.train().core(k);
    Eigen::Map<const RowMatrix> m(c.data.data(), c.left * c.phys, c.right);
    CHECK((m.transpose() * m - oracle::Matrix::Identity(c.right, c.right)).norm() < 1e-12);
  }
}

TEST_CASE("two-site update on a vector matches the embedded dense op") {
  std::mt19937_64 gen(15);
  auto x = random_vector(4, gen);
  const oracle::Matrix op = oracle::random_matrix(16, 16, gen);
  for (auto dir : {Sweep::Right, Sweep::Left}) {
    auto v = mps_from_dense(x);
    auto r = v.train().apply_two_site(1, SparseOp::from_dense(op), {}, {}, dir);
    CHECK(r.discarded < 1e-20);
    const oracle::Matrix expect = oracle::embed(op, 1, 2, 4, 4) * x.entries;
    CHECK((to_dense(v).entries - expect).norm() < 1e-9 * expect.norm());
    CHECK(v.train().center() == (dir == Sweep::Right ? 2u : 1u));
  }
}

TEST_CASE("one-site updates keep or drop the center as requested") {
  std::mt19937_64 gen(16);
  auto x = random_vector(3, gen);
  auto v = mps_from_dense(x);
  v.train().move_center(0);
  Eigen::HouseholderQR<oracle::Matrix> qr(oracle::random_matrix(4, 4, gen));
  const oracle::Matrix q = qr.householderQ();
  v.train().apply_one_site(2, SparseOp::from_dense(q), true);
  CHECK(v.train().center() == 0u);
  const oracle::Matrix expect = oracle::embed(q, 2, 1, 3, 4) * x.entries;
  CHECK((to_dense(v).entries - expect).norm() < 1e-10);
  v.train().apply_one_site(1, SparseOp::from_dense(oracle::Matrix::Identity(4, 4) * 2.0), false);
  CHECK(!v.train().center().has_value());
  CHECK(v.train().norm_squared() == doctest::Approx(4.0 * expect.squaredNorm()));
}

TEST_CASE("local operator conjugation on fused operator sites") {
  std::mt19937_64 gen(17);
  auto m = random_ptm(3, gen);
  const oracle::Matrix r = oracle::random_matrix(16, 16, gen);
  const oracle::Matrix c = oracle::random_matrix(16, 16, gen);
  auto mpo = mpo_from_dense(m);
  mpo.train().apply_two_site(1, mpo_local_op(r, c), {}, {}, Sweep::Right);
  const oracle::Matrix er = oracle::embed(r, 1, 2, 3, 4), ec = oracle::embed(c, 1, 2, 3, 4);
  const oracle::Matrix expect = er * m.entries * ec.transpose();
  CHECK((to_dense(mpo).entries - expect).norm() < 1e-9 * expect.norm());

  const oracle::Matrix s = oracle::random_matrix(4, 4, gen);
  auto one = mpo_from_dense(m);
  one.train().apply_one_site(0, mpo_local_op(s, oracle::Matrix::Identity(4, 4)), false);
  CHECK((to_dense(one).entries - oracle::embed(s, 0, 1, 3, 4) * m.entries).norm() < 1e-9);
}

TEST_CASE("compression is exact on redundant trains and reports truncation") {
  std::mt19937_64 gen(18);
  // Bond 1 after compression: identity composed with itself.
  auto bloated = compose_mpo(compose_mpo(Mpo::identity(3), Mpo::identity(3)), Mpo::identity(3));
  auto [c, rep] = compress(bloated, 0, 0.0);
  CHECK(c.max_bond() == 1);
  CHECK(rep.discarded_weight < 1e-24);

  auto y = random_vector(2, gen);
  auto [t, trep] = compress(mps_from_dense(y), 1, 0.0);
  const double err = (to_dense(t).entries - y.entries).squaredNorm() / y.entries.squaredNorm();
  CHECK(trep.discarded_weight == doctest::Approx(err).epsilon(1e-8));
  CHECK(trep.bond_dims == std::vector<Index>{1, 1, 1});
}

TEST_CASE("binary dump round trip and validation") {
  std::mt19937_64 gen(19);
  auto m = mpo_from_dense(random_ptm(2, gen));
  std::stringstream ss;
  write_binary(ss, m);
  const std::string bytes = ss.str();
  CHECK(bytes.substr(0, 4) == "PTTN");
  CHECK(bytes.size() == 4 + 4 * 3 + 4 * 3 + 8 * (16 * 16 + 16 * 16));
  auto back = read_mpo(ss);
  CHECK((to_dense(back).entries - to_dense(m).entries).norm() == 0.0);
  std::stringstream bad(bytes);
  CHECK_THROWS(read_mps(bad));
  std::stringstream trunc(bytes.substr(0, 30));
  CHECK_THROWS(read_mpo(trunc));
}

TEST_CASE("invalid trains are rejected") {
  std::vector<Core> cores{Core(1, 4, 2), Core(3, 4, 1)};
  CHECK_THROWS_AS(TensorTrain{cores}, std::invalid_argument);
  CHECK_THROWS_AS(Mpo(TensorTrain({Core(1, 4, 1)})), std::invalid_argument);
  CHECK_THROWS_AS(apply_mpo(Mpo::identity(2), zero_state_mps(3)), std::invalid_argument);
}


TEST_CASE("bond dimensions multiply under apply") {
  std::mt19937_64 gen(20);
  std::vector<Core> mc{Core(1, 16, 2), Core(2, 16, 1)};
  std::vector<Core> vc{Core(1, 4, 3), Core(3, 4, 1)};
  for (auto* cs : {&mc, &vc})
    for (auto& c : *cs)
      for (auto& x : c.data) x = std::normal_distribution<double>()(gen);
  const Mpo m{TensorTrain(mc)};
  const Mps v{TensorTrain(vc)};
  const auto out = apply_mpo(m, v);
  CHECK(out.bond_dims() == std::vector<Index>{1, 6, 1});
  CHECK((to_dense(out).entries - to_dense(m).entries * to_dense(v).entries).norm() < 1e-12);
  const auto same = apply_mpo(Mpo::identity(2), v);
  CHECK((to_dense(same).entries - to_dense(v).entries).norm() < 1e-14);
}

TEST_CASE("Pauli basis vectors are orthonormal") {
  std::mt19937_64 gen(21);
  std::uniform_int_distribution<std::uint64_t> pick(0, 63);
  for (int k = 0; k < 20; ++k) {
    const auto i = pick(gen), j = k % 2 == 0 ? pick(gen) : i;
    const auto pi = premit::pauli::pauli_of(premit::pauli::PauliIndex{i}, 3);
    const auto pj = premit::pauli::pauli_of(premit::pauli::PauliIndex{j}, 3);
    CHECK(inner(basis_mps(pi), basis_mps(pj)) == doctest::Approx(i == j ? 1.0 : 0.0).scale(1.0));
  }
  auto x = random_vector(4, gen), y = random_vector(4, gen);
  CHECK(inner(mps_from_dense(x), mps_from_dense(y)) ==
        doctest::Approx(x.entries.col(0).dot(y.entries.col(0))).epsilon(1e-12));
  CHECK(inner(mps_from_dense(x), mps_from_dense(x)) >= 0.0);
}

TEST_CASE("dense conversion of zero and product inputs") {
  auto z = mps_from_dense({3, oracle::Matrix::Zero(64, 1)});
  CHECK(z.bond_dims() == std::vector<Index>{1, 1, 1, 1});
  CHECK(to_dense(z).entries.norm() == 0.0);
  std::mt19937_64 gen(22);
  std::vector<Eigen::Matrix4d> sites;
  oracle::Matrix full = oracle::Matrix::Identity(1, 1);
  for (int k = 0; k < 3; ++k) {
    sites.push_back(oracle::random_matrix(4, 4, gen));
    full = oracle::kron(full, sites.back());
  }
  auto p = mpo_from_dense({3, full});
  CHECK(p.bond_dims() == std::vector<Index>{1, 1, 1, 1});
  CHECK((to_dense(p).entries - full).norm() < 1e-12 * full.norm());
}

TEST_CASE("compression of inflated products and truncation error accounting") {
  std::mt19937_64 gen(23);
  std::vector<Eigen::Vector4d> sites;
  for (int k = 0; k < 4; ++k) sites.push_back(oracle::random_matrix(4, 1, gen));
  const auto prod = Mps::product(sites);
  // Split the product into two equal bond-2 branches, then compress back.
  std::vector<Core> cores = prod.train().cores();
  for (std::size_t k = 0; k < cores.size(); ++k) {
    Core c(k == 0 ? 1 : 2, 4, k + 1 == cores.size() ? 1 : 2);
    for (Index a = 0; a < c.left; ++a)
      for (Index s = 0; s < 4; ++s)
        for (Index b = 0; b < c.right; ++b)
          c(a, s, b) = (a == b || c.left == 1 || c.right == 1) ? cores[k](0, s, 0) * (k == 0 ? 0.5 : 1.0) : 0.0;
    cores[k] = c;
  }
  const Mps inflated{TensorTrain(cores)};
  CHECK((to_dense(inflated).entries - to_dense(prod).entries).norm() < 1e-12);
  auto [c, rep] = compress(inflated, 8, 0.0);
  CHECK(c.max_bond() == 1);
  CHECK((to_dense(c).entries - to_dense(prod).entries).norm() < 1e-12);

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 g(100 + seed);
    auto x = random_vector(4, g);
    auto [t, trep] = compress(mps_from_dense(x), 2, 0.0);
    CHECK(t.max_bond() <= 2);
    const double err = (to_dense(t).entries - x.entries).squaredNorm() / x.entries.squaredNorm();
    CHECK(trep.discarded_weight == doctest::Approx(err).epsilon(1e-9).scale(1e-9));
    auto [same, srep] = compress(mps_from_dense(x), 64, 0.0);
    CHECK(srep.discarded_weight == 0.0);
    CHECK((to_dense(same).entries - x.entries).norm() < 1e-12);
  }
}

}
