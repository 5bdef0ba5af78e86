#pragma once

// Dense reference helpers shared by the unit and acceptance tests.

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

#include "premit/pauli.hpp"

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using cplx = std::complex<double>;

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& gen) {
  std::normal_distribution<double> g;
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = g(gen);
  return m;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline CMatrix ckron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// op acting on `sites` consecutive subsystems of dimension d starting at
/// `first`, embedded in n subsystems.
inline Matrix embed(const Matrix& op, int first, int sites, int n, Eigen::Index d) {
  Matrix left = Matrix::Identity(static_cast<Eigen::Index>(std::pow(d, first)), static_cast<Eigen::Index>(std::pow(d, first)));
  const int after = n - first - sites;
  Matrix right = Matrix::Identity(static_cast<Eigen::Index>(std::pow(d, after)), static_cast<Eigen::Index>(std::pow(d, after)));
  return kron(kron(left, op), right);
}

inline CMatrix cembed(const CMatrix& op, int first, int sites, int n) {
  const Eigen::Index l = Eigen::Index{1} << first;
  const Eigen::Index r = Eigen::Index{1} << (n - first - sites);
  return ckron(ckron(CMatrix::Identity(l, l), op), CMatrix::Identity(r, r));
}

/// Random density matrix mixed with a little of the maximally mixed state.
inline CMatrix random_density(int n, std::mt19937_64& gen, double mix = 0.05) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  std::normal_distribution<double> g;
  CMatrix a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = cplx(g(gen), g(gen));
  CMatrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return (1.0 - mix) * rho + mix * CMatrix::Identity(dim, dim) / static_cast<double>(dim);
}

inline CMatrix expm_i_hermitian(const CMatrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const auto& v = es.eigenvectors();
  Eigen::VectorXcd phase(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < phase.size(); ++i) phase(i) = std::exp(cplx(0.0, -t * es.eigenvalues()(i)));
  return v * phase.asDiagonal() * v.adjoint();
}

}  // namespace oracle
