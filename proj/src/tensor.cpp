#include "premit/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace premit::tensor {

namespace {

using ConstRowMap = Eigen::Map<const RowMatrix>;
using RowMap = Eigen::Map<RowMatrix>;
using ConstColMap = Eigen::Map<const Matrix>;

Core core_from(Index l, Index p, Index r, const Eigen::Ref<const RowMatrix>& m) {
  Core c(l, p, r);
  RowMap(c.data.data(), m.rows(), m.cols()) = m;
  return c;
}

Matrix thin_q(const Eigen::HouseholderQR<Matrix>& qr, Index rows, Index m) {
  return qr.householderQ() * Matrix::Identity(rows, m);
}

double contract(const TensorTrain& v, const TensorTrain& w) {
  if (v.size() != w.size() || v.phys_dim() != w.phys_dim())
    throw std::invalid_argument("contract: trains have different shapes");
  Matrix e = Matrix::Ones(1, 1);
  for (std::size_t k = 0; k < v.size(); ++k) {
    const Core& a = v.core(k);
    const Core& b = w.core(k);
    ConstRowMap am(a.data.data(), a.left, a.phys * a.right);
    ConstRowMap bm(b.data.data(), b.left, b.phys * b.right);
    Matrix next = Matrix::Zero(a.right, b.right);
    for (Index s = 0; s < a.phys; ++s)
      next.noalias() += am.middleCols(s * a.right, a.right).transpose() * (e * bm.middleCols(s * b.right, b.right));
    e = std::move(next);
  }
  return e(0, 0);
}

// Full vector over phys^n, site 0 most significant.
Vector full_vector(const TensorTrain& t) {
  std::vector<double> buf{1.0};
  Index rows = 1;
  for (const Core& c : t.cores()) {
    ConstRowMap l(buf.data(), rows, c.left);
    ConstRowMap cm(c.data.data(), c.left, c.phys * c.right);
    std::vector<double> next(static_cast<std::size_t>(rows * c.phys * c.right));
    RowMap(next.data(), rows, c.phys * c.right).noalias() = l * cm;
    buf = std::move(next);
    rows *= c.phys;
  }
  return Eigen::Map<const Vector>(buf.data(), rows);
}

TensorTrain train_from_vector(const Vector& full, std::size_t n, Index d) {
  linalg::SvdOptions exact;
  exact.rsvd_threshold = std::numeric_limits<Index>::max();
  std::vector<double> buf(full.data(), full.data() + full.size());
  std::vector<Core> cores;
  Index chi = 1;
  Index rest = full.size();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    rest /= d;
    // Row-major (chi·d) x rest block, viewed col-major as its transpose.
    ConstColMap mt(buf.data(), rest, chi * d);
    auto t = linalg::truncated_svd(mt, {}, exact);
    const Index keep = t.s.size();
    cores.push_back(core_from(chi, d, keep, t.v));
    RowMatrix rem = t.s.asDiagonal() * t.u.transpose();
    buf.assign(rem.data(), rem.data() + rem.size());
    chi = keep;
  }
  Core last(chi, d, 1);
  std::copy(buf.begin(), buf.end(), last.data.begin());
  cores.push_back(std::move(last));
  return TensorTrain(std::move(cores));
}

// Fused MPO index over k sites for row multi-index rho and column gamma.
Index fuse(Index rho, Index gamma, int k) {
  Index out = 0;
  for (int j = 0; j < k; ++j) {
    const int shift = 2 * (k - 1 - j);
    const Index r = (rho >> shift) & 3;
    const Index c = (gamma >> shift) & 3;
    out = out * 16 + r * 4 + c;
  }
  return out;
}

std::vector<std::tuple<Index, Index, double>> nonzeros(const Matrix& m) {
  std::vector<std::tuple<Index, Index, double>> out;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0.0) out.emplace_back(i, j, m(i, j));
  return out;
}

}  // namespace

SparseOp SparseOp::from_dense(const Matrix& m, double cutoff) {
  if (m.rows() != m.cols()) throw std::invalid_argument("SparseOp: matrix must be square");
  SparseOp op;
  op.dim = m.rows();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      if (std::abs(m(i, j)) > cutoff) op.entries.push_back({i, j, m(i, j)});
  return op;
}

bool SparseOp::is_identity() const {
  if (static_cast<Index>(entries.size()) != dim) return false;
  std::vector<bool> seen(static_cast<std::size_t>(dim), false);
  for (const auto& e : entries) {
    if (e.out != e.in || e.value != 1.0) return false;
    seen[static_cast<std::size_t>(e.in)] = true;
  }
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

TensorTrain::TensorTrain(std::vector<Core> cores) : cores_(std::move(cores)) {
  if (cores_.empty()) throw std::invalid_argument("tensor train needs at least one site");
  const Index d = cores_.front().phys;
  if (cores_.front().left != 1 || cores_.back().right != 1)
    throw std::invalid_argument("tensor train boundary bonds must be 1");
  for (std::size_t k = 0; k < cores_.size(); ++k) {
    const Core& c = cores_[k];
    if (c.phys != d) throw std::invalid_argument("tensor train physical dimensions differ");
    if (c.left < 1 || c.right < 1) throw std::invalid_argument("tensor train bond must be positive");
    if (static_cast<Index>(c.data.size()) != c.left * c.phys * c.right)
      throw std::invalid_argument("tensor train core data has wrong size");
    if (k + 1 < cores_.size() && c.right != cores_[k + 1].left)
      throw std::invalid_argument("tensor train bond dimensions do not match");
  }
}

std::vector<Index> TensorTrain::bond_dims() const {
  std::vector<Index> b;
  b.reserve(cores_.size() + 1);
  for (const Core& c : cores_) b.push_back(c.left);
  b.push_back(cores_.empty() ? 1 : cores_.back().right);
  return b;
}

Index TensorTrain::max_bond() const {
  const auto b = bond_dims();
  return *std::max_element(b.begin(), b.end());
}

void TensorTrain::shift_right(std::size_t k) {
  Core& a = cores_[k];
  Core& b = cores_[k + 1];
  const Index rows = a.left * a.phys;
  Eigen::HouseholderQR<Matrix> qr(ConstRowMap(a.data.data(), rows, a.right));
  const Index m = std::min(rows, a.right);
  RowMatrix r = qr.matrixQR().topRows(m).template triangularView<Eigen::Upper>();
  RowMatrix nb = r * ConstRowMap(b.data.data(), b.left, b.phys * b.right);
  a = core_from(a.left, a.phys, m, thin_q(qr, rows, m));
  b = core_from(m, b.phys, b.right, nb);
}

void TensorTrain::shift_left(std::size_t k) {
  Core& a = cores_[k - 1];
  Core& b = cores_[k];
  const Index cols = b.phys * b.right;
  Eigen::HouseholderQR<Matrix> qr(ConstRowMap(b.data.data(), b.left, cols).transpose());
  const Index m = std::min(cols, b.left);
  Matrix r = qr.matrixQR().topRows(m).template triangularView<Eigen::Upper>();
  RowMatrix na = ConstRowMap(a.data.data(), a.left * a.phys, a.right) * r.transpose();
  b = core_from(m, b.phys, b.right, thin_q(qr, cols, m).transpose());
  a = core_from(a.left, a.phys, m, na);
}

void TensorTrain::move_center(std::size_t k) {
  if (k >= cores_.size()) throw std::out_of_range("move_center: site out of range");
  if (!center_) {
    for (std::size_t j = 0; j < k; ++j) shift_right(j);
    for (std::size_t j = cores_.size() - 1; j > k; --j) shift_left(j);
  } else {
    for (std::size_t j = *center_; j < k; ++j) shift_right(j);
    for (std::size_t j = *center_; j > k; --j) shift_left(j);
  }
  center_ = k;
}

double TensorTrain::norm_squared() const {
  if (center_) {
    const Core& c = cores_[*center_];
    double s = 0.0;
    for (double x : c.data) s += x * x;
    return s;
  }
  return contract(*this, *this);
}

void TensorTrain::scale(double factor) {
  const std::size_t k = center_.value_or(0);
  for (double& x : cores_[k].data) x *= factor;
}

void TensorTrain::apply_one_site(std::size_t k, const SparseOp& op, bool orthogonal) {
  if (k >= cores_.size()) throw std::out_of_range("apply_one_site: site out of range");
  Core& c = cores_[k];
  if (op.dim != c.phys) throw std::invalid_argument("apply_one_site: op dimension mismatch");
  Core out(c.left, c.phys, c.right);
  for (Index a = 0; a < c.left; ++a)
    for (const auto& e : op.entries) {
      const double* src = &c.data[static_cast<std::size_t>((a * c.phys + e.in) * c.right)];
      double* dst = &out.data[static_cast<std::size_t>((a * c.phys + e.out) * c.right)];
      for (Index b = 0; b < c.right; ++b) dst[b] += e.value * src[b];
    }
  c = std::move(out);
  if (!orthogonal && center_ && *center_ != k) center_.reset();
}

TensorTrain::TwoSiteResult TensorTrain::apply_two_site(std::size_t k, const SparseOp& op,
                                                       const linalg::Truncation& trunc,
                                                       const linalg::SvdOptions& opts, Sweep dir) {
  if (k + 1 >= cores_.size()) throw std::out_of_range("apply_two_site: site out of range");
  if (!center_ || (*center_ != k && *center_ != k + 1)) move_center(k);
  Core& a = cores_[k];
  Core& b = cores_[k + 1];
  const Index d = a.phys;
  const Index dd = d * d;
  if (op.dim != dd) throw std::invalid_argument("apply_two_site: op dimension mismatch");
  const Index l = a.left;
  const Index r = b.right;

  RowMatrix theta = ConstRowMap(a.data.data(), l * d, a.right) * ConstRowMap(b.data.data(), b.left, d * r);
  RowMatrix updated = RowMatrix::Zero(l * d, d * r);
  for (Index x = 0; x < l; ++x)
    for (const auto& e : op.entries) {
      const double* src = theta.data() + (x * dd + e.in) * r;
      double* dst = updated.data() + (x * dd + e.out) * r;
      for (Index y = 0; y < r; ++y) dst[y] += e.value * src[y];
    }
  theta.resize(0, 0);

  // Column-major view of the row-major block is its transpose: Θᵀ = U S Vᵀ.
  auto t = linalg::truncated_svd(ConstColMap(updated.data(), d * r, l * d), trunc, opts);
  updated.resize(0, 0);
  const Index keep = t.s.size();
  if (dir == Sweep::Right) {
    a = core_from(l, d, keep, t.v);
    b = core_from(keep, d, r, t.s.asDiagonal() * t.u.transpose());
    center_ = k + 1;
  } else {
    a = core_from(l, d, keep, t.v * t.s.asDiagonal());
    b = core_from(keep, d, r, t.u.transpose());
    center_ = k;
  }
  return {t.discarded_weight, t.norm_squared, t.used_rsvd};
}

CompressionReport TensorTrain::compress(const linalg::Truncation& trunc, const linalg::SvdOptions& opts) {
  CompressionReport rep;
  const std::size_t n = cores_.size();
  move_center(n - 1);
  const double norm2 = norm_squared();
  double discarded = 0.0;
  for (std::size_t k = n - 1; k > 0; --k) {
    Core& b = cores_[k];
    Core& a = cores_[k - 1];
    auto t = linalg::truncated_svd(ConstColMap(b.data.data(), b.phys * b.right, b.left), trunc, opts);
    const Index keep = t.s.size();
    discarded += t.discarded_weight;
    if (t.used_rsvd) rep.method = SvdMethod::Rsvd;
    RowMatrix na = ConstRowMap(a.data.data(), a.left * a.phys, a.right) * (t.v * t.s.asDiagonal());
    b = core_from(keep, b.phys, b.right, t.u.transpose());
    a = core_from(a.left, a.phys, keep, na);
    center_ = k - 1;
  }
  rep.discarded_weight = norm2 > 0.0 ? discarded / norm2 : 0.0;
  rep.bond_dims = bond_dims();
  return rep;
}

Mps::Mps(TensorTrain tt) : tt_(std::move(tt)) {
  if (tt_.phys_dim() != 4) throw std::invalid_argument("Mps requires physical dimension 4");
}

Mpo::Mpo(TensorTrain tt) : tt_(std::move(tt)) {
  if (tt_.phys_dim() != 16) throw std::invalid_argument("Mpo requires physical dimension 16");
}

Mps Mps::product(const std::vector<Eigen::Vector4d>& sites) {
  std::vector<Core> cores;
  for (const auto& v : sites) {
    Core c(1, 4, 1);
    for (int s = 0; s < 4; ++s) c.data[static_cast<std::size_t>(s)] = v(s);
    cores.push_back(std::move(c));
  }
  return Mps(TensorTrain(std::move(cores)));
}

Mpo Mpo::product(const std::vector<Eigen::Matrix4d>& sites) {
  std::vector<Core> cores;
  for (const auto& m : sites) {
    Core c(1, 16, 1);
    for (int r = 0; r < 4; ++r)
      for (int col = 0; col < 4; ++col) c.data[static_cast<std::size_t>(r * 4 + col)] = m(r, col);
    cores.push_back(std::move(c));
  }
  return Mpo(TensorTrain(std::move(cores)));
}

Mpo Mpo::identity(std::size_t n) {
  return product(std::vector<Eigen::Matrix4d>(n, Eigen::Matrix4d::Identity()));
}

Mps pauli_mps(const pauli::PauliString& p) {
  std::vector<Eigen::Vector4d> sites;
  for (auto l : p.letters()) sites.push_back(std::sqrt(2.0) * Eigen::Vector4d::Unit(static_cast<int>(l)));
  return Mps::product(sites);
}

Mps basis_mps(const pauli::PauliString& p) {
  std::vector<Eigen::Vector4d> sites;
  for (auto l : p.letters()) sites.push_back(Eigen::Vector4d::Unit(static_cast<int>(l)));
  return Mps::product(sites);
}

Mps zero_state_mps(std::size_t n) {
  if (n == 0) throw std::invalid_argument("zero_state_mps: n must be positive");
  const double h = 1.0 / std::sqrt(2.0);
  return Mps::product(std::vector<Eigen::Vector4d>(n, Eigen::Vector4d(h, 0.0, 0.0, h)));
}

Mps apply_mpo(const Mpo& m, const Mps& v) {
  if (m.size() != v.size()) throw std::invalid_argument("apply_mpo: size mismatch");
  std::vector<Core> cores;
  for (std::size_t k = 0; k < m.size(); ++k) {
    const Core& w = m.train().core(k);
    const Core& x = v.train().core(k);
    Core out(w.left * x.left, 4, w.right * x.right);
    for (Index a = 0; a < w.left; ++a)
      for (Index r = 0; r < 4; ++r)
        for (Index c = 0; c < 4; ++c)
          for (Index b = 0; b < w.right; ++b) {
            const double wv = w(a, r * 4 + c, b);
            if (wv == 0.0) continue;
            for (Index i = 0; i < x.left; ++i)
              for (Index j = 0; j < x.right; ++j) out(a * x.left + i, r, b * x.right + j) += wv * x(i, c, j);
          }
    cores.push_back(std::move(out));
  }
  return Mps(TensorTrain(std::move(cores)));
}

Mpo compose_mpo(const Mpo& a, const Mpo& b) {
  if (a.size() != b.size()) throw std::invalid_argument("compose_mpo: size mismatch");
  std::vector<Core> cores;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const Core& p = a.train().core(k);
    const Core& q = b.train().core(k);
    Core out(p.left * q.left, 16, p.right * q.right);
    for (Index i = 0; i < p.left; ++i)
      for (Index r = 0; r < 4; ++r)
        for (Index m = 0; m < 4; ++m)
          for (Index j = 0; j < p.right; ++j) {
            const double pv = p(i, r * 4 + m, j);
            if (pv == 0.0) continue;
            for (Index x = 0; x < q.left; ++x)
              for (Index c = 0; c < 4; ++c)
                for (Index y = 0; y < q.right; ++y)
                  out(i * q.left + x, r * 4 + c, j * q.right + y) += pv * q(x, m * 4 + c, y);
          }
    cores.push_back(std::move(out));
  }
  return Mpo(TensorTrain(std::move(cores)));
}

std::pair<Mps, CompressionReport> compress(Mps x, Index chi_max, double tol, const linalg::SvdOptions& opts) {
  auto rep = x.train().compress({chi_max, tol}, opts);
  return {std::move(x), std::move(rep)};
}

std::pair<Mpo, CompressionReport> compress(Mpo x, Index chi_max, double tol, const linalg::SvdOptions& opts) {
  auto rep = x.train().compress({chi_max, tol}, opts);
  return {std::move(x), std::move(rep)};
}

double inner(const Mps& v, const Mps& w) { return contract(v.train(), w.train()); }

double sandwich(const Mps& bra, const Mpo& m, const Mps& ket) {
  if (bra.size() != m.size() || ket.size() != m.size()) throw std::invalid_argument("sandwich: size mismatch");
  // Environment e[x][a][y] over (bra, mpo, ket) bonds.
  std::vector<double> e{1.0};
  for (std::size_t k = 0; k < m.size(); ++k) {
    const Core& u = bra.train().core(k);
    const Core& w = m.train().core(k);
    const Core& v = ket.train().core(k);
    const Index X = u.left, Xn = u.right, A = w.left, An = w.right, Y = v.left, Yn = v.right;

    // t1[a][y][r][x'] = Σ_x e[x][a][y] u[x][r][x']
    std::vector<double> t1(static_cast<std::size_t>(A * Y * 4 * Xn), 0.0);
    for (Index x = 0; x < X; ++x)
      for (Index a = 0; a < A; ++a)
        for (Index y = 0; y < Y; ++y) {
          const double ev = e[static_cast<std::size_t>((x * A + a) * Y + y)];
          if (ev == 0.0) continue;
          for (Index r = 0; r < 4; ++r) {
            double* dst = &t1[static_cast<std::size_t>(((a * Y + y) * 4 + r) * Xn)];
            const double* src = &u.data[static_cast<std::size_t>((x * 4 + r) * Xn)];
            for (Index xn = 0; xn < Xn; ++xn) dst[xn] += ev * src[xn];
          }
        }
    // t2[y][c][x'][a'] = Σ_{a,r} t1[a][y][r][x'] w[a][r*4+c][a']
    std::vector<double> t2(static_cast<std::size_t>(Y * 4 * Xn * An), 0.0);
    for (Index a = 0; a < A; ++a)
      for (Index r = 0; r < 4; ++r)
        for (Index c = 0; c < 4; ++c) {
          const double* wrow = &w.data[static_cast<std::size_t>((a * 16 + r * 4 + c) * An)];
          for (Index y = 0; y < Y; ++y)
            for (Index xn = 0; xn < Xn; ++xn) {
              const double tv = t1[static_cast<std::size_t>(((a * Y + y) * 4 + r) * Xn + xn)];
              if (tv == 0.0) continue;
              double* dst = &t2[static_cast<std::size_t>(((y * 4 + c) * Xn + xn) * An)];
              for (Index an = 0; an < An; ++an) dst[an] += tv * wrow[an];
            }
        }
    // e'[x'][a'][y'] = Σ_{y,c} t2[y][c][x'][a'] v[y][c][y']
    std::vector<double> next(static_cast<std::size_t>(Xn * An * Yn), 0.0);
    for (Index y = 0; y < Y; ++y)
      for (Index c = 0; c < 4; ++c) {
        const double* vrow = &v.data[static_cast<std::size_t>((y * 4 + c) * Yn)];
        for (Index xn = 0; xn < Xn; ++xn)
          for (Index an = 0; an < An; ++an) {
            const double tv = t2[static_cast<std::size_t>(((y * 4 + c) * Xn + xn) * An + an)];
            if (tv == 0.0) continue;
            double* dst = &next[static_cast<std::size_t>((xn * An + an) * Yn)];
            for (Index yn = 0; yn < Yn; ++yn) dst[yn] += tv * vrow[yn];
          }
      }
    e = std::move(next);
  }
  return e[0];
}

double element(const Mpo& m, const pauli::PauliString& row, const pauli::PauliString& col) {
  if (row.size() != m.size() || col.size() != m.size()) throw std::invalid_argument("element: size mismatch");
  Eigen::RowVectorXd v = Eigen::RowVectorXd::Ones(1);
  for (std::size_t k = 0; k < m.size(); ++k) {
    const Core& w = m.train().core(k);
    const Index p = static_cast<Index>(row[k]) * 4 + static_cast<Index>(col[k]);
    Eigen::RowVectorXd next = Eigen::RowVectorXd::Zero(w.right);
    for (Index a = 0; a < w.left; ++a)
      if (v(a) != 0.0)
        for (Index b = 0; b < w.right; ++b) next(b) += v(a) * w(a, p, b);
    v = std::move(next);
  }
  return v(0);
}

Vector to_vector(const Mps& v) {
  if (v.size() > kMaxVectorQubits) throw std::invalid_argument("to_vector: qubit count exceeds cap");
  return full_vector(v.train());
}

pauli::DensePtm to_dense(const Mps& v) {
  if (v.size() > pauli::kMaxDenseQubits) throw std::invalid_argument("to_dense: qubit count exceeds dense cap");
  return {v.size(), full_vector(v.train())};
}

pauli::DensePtm to_dense(const Mpo& m) {
  const std::size_t n = m.size();
  if (n > pauli::kMaxDenseQubits) throw std::invalid_argument("to_dense: qubit count exceeds dense cap");
  const Vector fused = full_vector(m.train());
  const Index dim = Index{1} << (2 * n);
  pauli::DensePtm out{n, Matrix(dim, dim)};
  for (Index f = 0; f < fused.size(); ++f) {
    Index rho = 0, gamma = 0, rem = f;
    for (std::size_t j = 0; j < n; ++j) {
      const Index shift = static_cast<Index>(j);
      const Index p = rem & 15;
      rem >>= 4;
      rho |= (p >> 2) << (2 * shift);
      gamma |= (p & 3) << (2 * shift);
    }
    out.entries(rho, gamma) = fused(f);
  }
  return out;
}

Mps mps_from_dense(const pauli::DensePtm& d) {
  if (!d.is_vector() || d.entries.rows() != (Index{1} << (2 * d.n)))
    throw std::invalid_argument("mps_from_dense: expected a 4^n vector");
  return Mps(train_from_vector(d.entries.col(0), d.n, 4));
}

Mpo mpo_from_dense(const pauli::DensePtm& d) {
  const Index dim = Index{1} << (2 * d.n);
  if (d.entries.rows() != dim || d.entries.cols() != dim)
    throw std::invalid_argument("mpo_from_dense: expected a 4^n x 4^n matrix");
  const int n = static_cast<int>(d.n);
  Vector fused(dim * dim);
  for (Index rho = 0; rho < dim; ++rho)
    for (Index gamma = 0; gamma < dim; ++gamma) fused(fuse(rho, gamma, n)) = d.entries(rho, gamma);
  return Mpo(train_from_vector(fused, d.n, 16));
}

SparseOp mpo_local_op(const Matrix& row_op, const Matrix& col_op) {
  if (row_op.rows() != row_op.cols() || col_op.rows() != col_op.cols() || row_op.rows() != col_op.rows())
    throw std::invalid_argument("mpo_local_op: operators must be square and equal size");
  int k = 0;
  for (Index d = row_op.rows(); d > 1; d /= 4) ++k;
  if ((Index{1} << (2 * k)) != row_op.rows()) throw std::invalid_argument("mpo_local_op: size must be 4^k");
  SparseOp op;
  op.dim = Index{1} << (4 * k);
  const auto rn = nonzeros(row_op);
  const auto cn = nonzeros(col_op);
  op.entries.reserve(rn.size() * cn.size());
  for (const auto& [r, rp, rv] : rn)
    for (const auto& [c, cp, cv] : cn) op.entries.push_back({fuse(r, c, k), fuse(rp, cp, k), rv * cv});
  return op;
}

}  // namespace premit::tensor
