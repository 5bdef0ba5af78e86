#include "doctest.h"
#include "oracles.hpp"
#include "premit/linalg.hpp"

using namespace premit::linalg;

TEST_SUITE("linalg") {

TEST_CASE("thin SVD reconstructs") {
  std::mt19937_64 gen(1);
  const Matrix a = oracle::random_matrix(30, 12, gen);
  auto s = thin_svd(a);
  CHECK((s.u * s.s.asDiagonal() * s.v.transpose() - a).norm() < 1e-12);
}

TEST_CASE("randomized SVD recovers a low-rank matrix") {
  std::mt19937_64 gen(2);
  const Matrix a = oracle::random_matrix(400, 15, gen) * oracle::random_matrix(15, 300, gen);
  auto s = rsvd(a, 15);
  CHECK(s.s.size() == 15);
  CHECK((s.u * s.s.asDiagonal() * s.v.transpose() - a).norm() < 1e-9 * a.norm());
  auto exact = thin_svd(a);
  CHECK((s.s - exact.s.head(15)).norm() < 1e-9 * exact.s(0));
}

TEST_CASE("randomized SVD is reproducible") {
  std::mt19937_64 gen(3);
  const Matrix a = oracle::random_matrix(100, 80, gen);
  auto s1 = rsvd(a, 10);
  auto s2 = rsvd(a, 10);
  CHECK((s1.s - s2.s).norm() == 0.0);
}

TEST_CASE("chi truncation keeps the largest values and reports the tail") {
  std::mt19937_64 gen(4);
  const Matrix a = oracle::random_matrix(20, 20, gen);
  auto full = thin_svd(a);
  auto t = truncated_svd(a, {5, 0.0});
  CHECK(t.s.size() == 5);
  const double tail = full.s.tail(15).squaredNorm();
  CHECK(t.discarded_weight == doctest::Approx(tail).epsilon(1e-10));
  const Matrix approx = t.u * t.s.asDiagonal() * t.v.transpose();
  CHECK((a - approx).squaredNorm() == doctest::Approx(tail).epsilon(1e-10));
  CHECK(t.norm_squared == doctest::Approx(a.squaredNorm()));
}

TEST_CASE("tolerance truncation drops a tail below the budget") {
  Matrix d = Matrix::Zero(6, 6);
  const double vals[] = {1.0, 0.5, 0.1, 1e-3, 1e-4, 1e-5};
  for (int i = 0; i < 6; ++i) d(i, i) = vals[i];
  const double norm2 = d.squaredNorm();
  auto t = truncated_svd(d, {0, 2e-6 / norm2});
  CHECK(t.s.size() == 3);
  CHECK(t.discarded_weight == doctest::Approx(1e-6 + 1e-8 + 1e-10));
  // chi takes precedence over tol
  auto c = truncated_svd(d, {2, 1e-12});
  CHECK(c.s.size() == 2);
}

TEST_CASE("numerical zeros are dropped without counting as discarded") {
  std::mt19937_64 gen(5);
  const Matrix a = oracle::random_matrix(10, 2, gen) * oracle::random_matrix(2, 10, gen);
  auto t = truncated_svd(a, {});
  CHECK(t.s.size() == 2);
  CHECK(t.discarded_weight < 1e-20);
  auto z = truncated_svd(Matrix::Zero(4, 4), {});
  CHECK(z.s.size() == 1);
  CHECK(z.s(0) == 0.0);
}

TEST_CASE("randomized branch matches exact truncation on a decaying spectrum") {
  std::mt19937_64 gen(6);
  const Eigen::Index n = 400;
  Matrix u = oracle::random_matrix(n, n, gen), v = oracle::random_matrix(n, n, gen);
  Eigen::HouseholderQR<Matrix> qu(u), qv(v);
  Matrix q1 = qu.householderQ(), q2 = qv.householderQ();
  Vector s(n);
  for (Eigen::Index i = 0; i < n; ++i) s(i) = std::exp(-0.15 * static_cast<double>(i));
  const Matrix a = q1 * s.asDiagonal() * q2.transpose();
  auto t = truncated_svd(a, {40, 0.0});
  CHECK(t.used_rsvd);
  CHECK(t.s.size() == 40);
  CHECK((t.s - s.head(40)).norm() < 1e-8);
  CHECK(t.discarded_weight == doctest::Approx(s.tail(n - 40).squaredNorm()).epsilon(1e-6));
}


TEST_CASE("thin SVD stays accurate on structured rank-deficient matrices") {
  std::mt19937_64 gen(8);
  Matrix perm = Matrix::Zero(16, 16);
  for (int i = 0; i < 16; ++i) perm(i, (5 * i + 3) % 16) = 1.0;
  const Matrix low = oracle::random_matrix(4, 2, gen) * oracle::random_matrix(2, 4, gen);
  std::vector<Matrix> cases{
      oracle::kron(low, perm),
      oracle::kron(perm.topRows(4), oracle::kron(low, Matrix::Identity(4, 4))),
      oracle::random_matrix(64, 8, gen) * oracle::random_matrix(8, 16, gen),
      oracle::kron(Matrix::Identity(8, 8), low).leftCols(20),
  };
  for (const auto& a : cases)
    for (const Matrix& m : {a, Matrix(a.transpose())}) {
      const auto s = thin_svd(m);
      CHECK((s.u * s.s.asDiagonal() * s.v.transpose() - m).norm() < 1e-12 * m.norm());
      Eigen::Index r = 0;
      while (r < s.s.size() && s.s(r) > 1e-12 * s.s(0)) ++r;
      CHECK((s.u.leftCols(r).transpose() * s.u.leftCols(r) - Matrix::Identity(r, r)).norm() < 1e-12);
      CHECK((s.v.leftCols(r).transpose() * s.v.leftCols(r) - Matrix::Identity(r, r)).norm() < 1e-12);
    }
}

TEST_CASE("randomized SVD: exact rank, full rank and ordering") {
  std::mt19937_64 gen(9);
  const Matrix a = oracle::random_matrix(64, 3, gen) * oracle::random_matrix(3, 64, gen);
  auto s = rsvd(a, 3);
  CHECK((s.u * s.s.asDiagonal() * s.v.transpose() - a).norm() < 1e-10 * a.norm());
  CHECK((s.u.transpose() * s.u - Matrix::Identity(3, 3)).norm() < 1e-12);
  CHECK((s.v.transpose() * s.v - Matrix::Identity(3, 3)).norm() < 1e-12);

  const Matrix b = oracle::random_matrix(50, 30, gen);
  auto full = rsvd(b, 30);
  CHECK((full.s - thin_svd(b).s).norm() < 1e-8);
  for (Eigen::Index i = 1; i < full.s.size(); ++i) CHECK(full.s(i) <= full.s(i - 1));
  CHECK(rsvd(b, 100).s.size() == 30);
}

TEST_CASE("randomized SVD error stays within 10x of optimal on polynomial spectra") {
  const Eigen::Index m = 300, n = 200, rank = 20;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 gen(1000 + seed);
    Eigen::HouseholderQR<Matrix> qu(oracle::random_matrix(m, n, gen)), qv(oracle::random_matrix(n, n, gen));
    const Matrix u = qu.householderQ() * Matrix::Identity(m, n);
    const Matrix v = qv.householderQ() * Matrix::Identity(n, n);
    Vector s(n);
    for (Eigen::Index i = 0; i < n; ++i) s(i) = 1.0 / std::pow(1.0 + i, 1.0 + 0.1 * static_cast<double>(seed % 5));
    const Matrix a = u * s.asDiagonal() * v.transpose();
    const auto r = rsvd(a, rank, 10, 2, seed);
    const double err = (r.u * r.s.asDiagonal() * r.v.transpose() - a).norm();
    const double best = s.tail(n - rank).norm();
    CHECK(err <= 10.0 * best);
  }
}

}
