#include "premit/qcrb.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace premit::qcrb {

using pauli::cplx;
using pauli::Letter;
using pauli::PauliIndex;
using pauli::PauliString;

namespace {

PauliString basis(std::size_t i, std::size_t n) { return pauli::pauli_of(PauliIndex{i}, n); }

std::size_t count(std::size_t n) { return (std::size_t{1} << (2 * n)) - 1; }

// σ_a σ_b = phase · σ_c for single letters.
std::pair<cplx, Letter> letter_product(Letter a, Letter b) {
  if (a == Letter::I) return {1.0, b};
  if (b == Letter::I) return {1.0, a};
  if (a == b) return {1.0, Letter::I};
  const int ia = static_cast<int>(a), ib = static_cast<int>(b);
  const int ic = 6 - ia - ib;
  const bool cyclic = (ib - ia + 3) % 3 == 1;
  return {cplx(0.0, cyclic ? 1.0 : -1.0), static_cast<Letter>(ic)};
}

}  // namespace

BlochVector bloch(const CMatrix& rho) {
  if (rho.rows() != rho.cols()) throw std::invalid_argument("bloch: density matrix must be square");
  const std::size_t n = pauli::qubits_of_dimension(rho.rows());
  if (n > kMaxBlochQubits) throw std::invalid_argument("bloch: qubit count exceeds cap");
  if ((rho - rho.adjoint()).norm() > 1e-10) throw std::invalid_argument("bloch: density matrix is not Hermitian");
  if (std::abs(rho.trace() - cplx(1.0, 0.0)) > 1e-10) throw std::invalid_argument("bloch: trace is not 1");
  BlochVector b{n, Vector(static_cast<Eigen::Index>(count(n)))};
  for (std::size_t i = 1; i <= count(n); ++i)
    b.theta(static_cast<Eigen::Index>(i - 1)) = (rho * pauli::dense_matrix(basis(i, n))).trace().real();
  return b;
}

CMatrix reconstruct(const BlochVector& b) {
  const Eigen::Index dim = Eigen::Index{1} << b.n;
  CMatrix rho = CMatrix::Identity(dim, dim);
  for (std::size_t i = 1; i <= count(b.n); ++i) {
    const double t = b.theta(static_cast<Eigen::Index>(i - 1));
    if (t != 0.0) rho += t * pauli::dense_matrix(basis(i, b.n));
  }
  return rho / static_cast<double>(dim);
}

bool is_physical(const BlochVector& b, double tol) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(reconstruct(b));
  return es.eigenvalues().minCoeff() >= -tol;
}

Vector to_ptm(const BlochVector& b) {
  const double s = std::pow(2.0, -static_cast<double>(b.n) / 2.0);
  Vector v(b.theta.size() + 1);
  v(0) = s;
  v.tail(b.theta.size()) = s * b.theta;
  return v;
}

BlochVector from_ptm(std::size_t n, const Vector& v) {
  if (static_cast<std::size_t>(v.size()) != count(n) + 1) throw std::invalid_argument("from_ptm: wrong length");
  const double s = std::pow(2.0, static_cast<double>(n) / 2.0);
  return {n, s * v.tail(v.size() - 1)};
}

double StructureTensor::operator()(std::size_t i, std::size_t j, std::size_t m) const {
  const std::size_t d = count(n);
  for (const auto& [mm, mu] : entries[(i - 1) * d + (j - 1)])
    if (mm == m) return mu;
  return 0.0;
}

StructureTensor structure_tensor(std::size_t n) {
  if (n == 0 || n > kMaxStructureQubits) throw std::invalid_argument("structure_tensor: qubit count out of range");
  const std::size_t d = count(n);
  StructureTensor t{n, std::vector<std::vector<std::pair<std::size_t, double>>>(d * d)};
  for (std::size_t i = 1; i <= d; ++i)
    for (std::size_t j = 1; j <= d; ++j) {
      const auto pi = basis(i, n), pj = basis(j, n);
      if (i == j || pauli::anticommutes(pi, pj)) continue;
      cplx phase = 1.0;
      std::vector<Letter> out(n);
      for (std::size_t q = 0; q < n; ++q) {
        auto [ph, l] = letter_product(pi[q], pj[q]);
        phase *= ph;
        out[q] = l;
      }
      // Commuting distinct Paulis multiply to ±P_m with m ≠ 0.
      const std::size_t m = pauli::index_of(PauliString(std::move(out))).value;
      t.entries[(i - 1) * d + (j - 1)].emplace_back(m, 2.0 * phase.real());
    }
  return t;
}

Matrix g_matrix(const BlochVector& b) {
  const std::size_t d = count(b.n);
  Matrix g = Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  if (b.n == 1) return g;
  const auto mu = structure_tensor(b.n);
  for (std::size_t i = 1; i <= d; ++i)
    for (std::size_t j = 1; j <= d; ++j)
      for (const auto& [m, v] : mu.entries[(i - 1) * d + (j - 1)])
        g(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1)) +=
            0.5 * v * b.theta(static_cast<Eigen::Index>(m - 1));
  return g;
}

Matrix qfim(const BlochVector& b, double cutoff) {
  const Matrix cov = g_matrix(b).transpose() - b.theta * b.theta.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
  if (es.eigenvalues().minCoeff() < cutoff)
    throw std::domain_error("qfim: Gᵀ − θθᵀ is singular (pure or rank-deficient state)");
  return es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

double qcrb_noiseless(const Vector& x, const BlochVector& b, double copies) {
  if (x.size() != b.theta.size()) throw std::invalid_argument("qcrb_noiseless: coefficient length mismatch");
  if (!(copies >= 1.0)) throw std::invalid_argument("qcrb_noiseless: copies must be >= 1");
  const double f = x.dot(b.theta);
  return (x.dot(g_matrix(b) * x) - f * f) / copies;
}

double qcrb_noisy(const Vector& x, const BlochVector& b, const Matrix& A, const Vector& c, double copies) {
  if (x.size() != b.theta.size() || A.rows() != x.size() || A.cols() != x.size() || c.size() != x.size())
    throw std::invalid_argument("qcrb_noisy: dimension mismatch");
  if (!(copies >= 1.0)) throw std::invalid_argument("qcrb_noisy: copies must be >= 1");
  Eigen::FullPivLU<Matrix> lu(A.transpose());
  if (!lu.isInvertible()) throw std::invalid_argument("qcrb_noisy: channel matrix is singular");
  const Vector y = lu.solve(x);
  const double y0 = -c.dot(y);
  const BlochVector noisy{b.n, A * b.theta + c};
  const double f = x.dot(b.theta);
  return (y.dot(g_matrix(noisy) * y) - (f - y0) * (f - y0)) / copies;
}

double variance_direct(const CMatrix& op, const CMatrix& rho, double copies) {
  if (op.rows() != rho.rows() || op.cols() != rho.cols()) throw std::invalid_argument("variance_direct: size mismatch");
  if (!(copies >= 1.0)) throw std::invalid_argument("variance_direct: copies must be >= 1");
  const double m1 = (rho * op).trace().real();
  const double m2 = (rho * op * op).trace().real();
  return std::max(0.0, m2 - m1 * m1) / copies;
}

CMatrix observable(std::size_t n, const Vector& x, double x0) {
  if (static_cast<std::size_t>(x.size()) != count(n)) throw std::invalid_argument("observable: wrong length");
  const Eigen::Index dim = Eigen::Index{1} << n;
  CMatrix op = x0 * CMatrix::Identity(dim, dim);
  for (std::size_t i = 1; i <= count(n); ++i)
    if (x(static_cast<Eigen::Index>(i - 1)) != 0.0)
      op += x(static_cast<Eigen::Index>(i - 1)) * pauli::dense_matrix(basis(i, n));
  return op;
}

}  // namespace premit::qcrb
