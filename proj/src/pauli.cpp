#include "premit/pauli.hpp"

#include <cmath>
#include <stdexcept>

namespace premit::pauli {

namespace {

// P[row, col] for one qubit, given the row/col bits. Returns 0 when the entry
// vanishes.
cplx letter_entry(Letter l, unsigned row, unsigned col) {
  switch (l) {
    case Letter::I: return row == col ? cplx{1, 0} : cplx{0, 0};
    case Letter::X: return row != col ? cplx{1, 0} : cplx{0, 0};
    case Letter::Y:
      if (row == col) return {0, 0};
      return row == 0 ? cplx{0, -1} : cplx{0, 1};
    case Letter::Z:
      if (row != col) return {0, 0};
      return row == 0 ? cplx{1, 0} : cplx{-1, 0};
  }
  return {0, 0};
}

bool flips(Letter l) { return l == Letter::X || l == Letter::Y; }

// Tr[A P] using the monomial structure of P.
cplx trace_with(const CMatrix& a, const PauliString& p) {
  const std::size_t n = p.size();
  std::uint64_t xmask = 0;
  for (std::size_t q = 0; q < n; ++q)
    if (flips(p[q])) xmask |= std::uint64_t{1} << (n - 1 - q);

  const std::uint64_t dim = std::uint64_t{1} << n;
  cplx total{0, 0};
  for (std::uint64_t c = 0; c < dim; ++c) {
    const std::uint64_t r = c ^ xmask;
    cplx phase{1, 0};
    for (std::size_t q = 0; q < n; ++q) {
      const unsigned shift = static_cast<unsigned>(n - 1 - q);
      phase *= letter_entry(p[q], (c >> shift) & 1u, (r >> shift) & 1u);
    }
    // Tr[A P] = Σ_c (P A)[c, c] = Σ_c P[c, r] A[r, c]
    total += phase * a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }
  return total;
}

}  // namespace

char to_char(Letter l) {
  static constexpr char kChars[] = {'I', 'X', 'Y', 'Z'};
  return kChars[static_cast<int>(l)];
}

Letter letter_from_char(char c) {
  switch (c) {
    case 'I': case 'i': return Letter::I;
    case 'X': case 'x': return Letter::X;
    case 'Y': case 'y': return Letter::Y;
    case 'Z': case 'z': return Letter::Z;
    default: break;
  }
  throw std::invalid_argument(std::string("invalid Pauli letter '") + c + "'");
}

PauliString::PauliString(std::vector<Letter> letters) : letters_(std::move(letters)) {
  if (letters_.empty()) throw std::invalid_argument("Pauli string must have at least one qubit");
}

PauliString::PauliString(std::string_view word) {
  if (word.empty()) throw std::invalid_argument("Pauli string must have at least one qubit");
  letters_.reserve(word.size());
  for (char c : word) letters_.push_back(letter_from_char(c));
}

PauliString PauliString::identity(std::size_t n) { return uniform(n, Letter::I); }

PauliString PauliString::uniform(std::size_t n, Letter l) {
  return PauliString(std::vector<Letter>(n, l));
}

std::size_t PauliString::weight() const {
  std::size_t w = 0;
  for (Letter l : letters_) w += l != Letter::I;
  return w;
}

std::vector<std::size_t> PauliString::support() const {
  std::vector<std::size_t> s;
  for (std::size_t q = 0; q < letters_.size(); ++q)
    if (letters_[q] != Letter::I) s.push_back(q);
  return s;
}

std::string PauliString::str() const {
  std::string s;
  s.reserve(letters_.size());
  for (Letter l : letters_) s.push_back(to_char(l));
  return s;
}

PauliIndex index_of(const PauliString& p) {
  if (p.size() > kMaxIndexQubits)
    throw std::invalid_argument("Pauli index overflows 64 bits beyond 31 qubits");
  std::uint64_t v = 0;
  for (Letter l : p.letters()) v = v * 4 + static_cast<std::uint64_t>(l);
  return PauliIndex{v};
}

PauliString pauli_of(PauliIndex idx, std::size_t n) {
  if (n == 0 || n > kMaxIndexQubits) throw std::out_of_range("qubit count out of range");
  if (idx.value >> (2 * n)) throw std::out_of_range("Pauli index out of range for qubit count");
  std::vector<Letter> letters(n);
  std::uint64_t v = idx.value;
  for (std::size_t q = n; q-- > 0;) {
    letters[q] = static_cast<Letter>(v & 3u);
    v >>= 2;
  }
  return PauliString(std::move(letters));
}

bool anticommutes(const PauliString& p, const PauliString& q) {
  if (p.size() != q.size()) throw std::invalid_argument("anticommutes: length mismatch");
  bool odd = false;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] != Letter::I && q[i] != Letter::I && p[i] != q[i]) odd = !odd;
  return odd;
}

CMatrix letter_matrix(Letter l) {
  CMatrix m(2, 2);
  for (unsigned r = 0; r < 2; ++r)
    for (unsigned c = 0; c < 2; ++c) m(r, c) = letter_entry(l, r, c);
  return m;
}

CMatrix dense_matrix(const PauliString& p) {
  const std::size_t n = p.size();
  if (n > kMaxDenseQubits + 2) throw std::invalid_argument("dense Pauli matrix too large");
  const Eigen::Index dim = Eigen::Index{1} << n;
  CMatrix m = CMatrix::Zero(dim, dim);
  std::uint64_t xmask = 0;
  for (std::size_t q = 0; q < n; ++q)
    if (flips(p[q])) xmask |= std::uint64_t{1} << (n - 1 - q);
  for (std::uint64_t r = 0; r < static_cast<std::uint64_t>(dim); ++r) {
    const std::uint64_t c = r ^ xmask;
    cplx v{1, 0};
    for (std::size_t q = 0; q < n; ++q) {
      const unsigned shift = static_cast<unsigned>(n - 1 - q);
      v *= letter_entry(p[q], (r >> shift) & 1u, (c >> shift) & 1u);
    }
    m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
  }
  return m;
}

std::size_t qubits_of_dimension(Eigen::Index dim) {
  if (dim < 2) throw std::invalid_argument("operator dimension must be a power of two >= 2");
  std::size_t n = 0;
  Eigen::Index d = dim;
  while (d > 1) {
    if (d & 1) throw std::invalid_argument("operator dimension is not a power of two");
    d >>= 1;
    ++n;
  }
  return n;
}

DensePtm ptm_vector(const CMatrix& op) {
  if (op.rows() != op.cols()) throw std::invalid_argument("ptm_vector: operator must be square");
  const std::size_t n = qubits_of_dimension(op.rows());
  if (n > kMaxDenseQubits) throw std::invalid_argument("ptm_vector: qubit count exceeds dense cap");
  if ((op - op.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, op.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("ptm_vector: operator is not Hermitian");

  const std::uint64_t count = std::uint64_t{1} << (2 * n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(std::uint64_t{1} << n));
  DensePtm out{n, Eigen::MatrixXd(static_cast<Eigen::Index>(count), 1)};
  for (std::uint64_t i = 0; i < count; ++i)
    out.entries(static_cast<Eigen::Index>(i), 0) = trace_with(op, pauli_of(PauliIndex{i}, n)).real() * scale;
  return out;
}

CMatrix operator_from_ptm(const DensePtm& v) {
  if (!v.is_vector()) throw std::invalid_argument("operator_from_ptm: expected a PTM vector");
  const std::size_t n = v.n;
  const Eigen::Index dim = Eigen::Index{1} << n;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  CMatrix a = CMatrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < v.entries.rows(); ++i) {
    const double c = v.entries(i, 0);
    if (c == 0.0) continue;
    a += (c * scale) * dense_matrix(pauli_of(PauliIndex{static_cast<std::uint64_t>(i)}, n));
  }
  return a;
}

DensePtm ptm_matrix(const Superoperator& channel, std::size_t n) {
  if (n == 0 || n > kMaxDenseQubits) throw std::invalid_argument("ptm_matrix: qubit count out of range");
  const std::uint64_t count = std::uint64_t{1} << (2 * n);
  const double norm = static_cast<double>(std::uint64_t{1} << n);
  DensePtm out{n, Eigen::MatrixXd(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(count))};
  for (std::uint64_t j = 0; j < count; ++j) {
    const CMatrix image = channel(dense_matrix(pauli_of(PauliIndex{j}, n)));
    if (image.rows() != static_cast<Eigen::Index>(std::uint64_t{1} << n) || image.cols() != image.rows())
      throw std::invalid_argument("ptm_matrix: channel output has wrong dimension");
    for (std::uint64_t i = 0; i < count; ++i)
      out.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          trace_with(image, pauli_of(PauliIndex{i}, n)).real() / norm;
  }
  return out;
}

DensePtm ptm_matrix(const std::vector<CMatrix>& kraus) {
  if (kraus.empty()) throw std::invalid_argument("ptm_matrix: empty Kraus set");
  const Eigen::Index dim = kraus.front().rows();
  for (const auto& k : kraus)
    if (k.rows() != dim || k.cols() != dim) throw std::invalid_argument("ptm_matrix: Kraus dimension mismatch");
  const std::size_t n = qubits_of_dimension(dim);
  return ptm_matrix(
      [&kraus](const CMatrix& rho) {
        CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
        for (const auto& k : kraus) out += k * rho * k.adjoint();
        return out;
      },
      n);
}

DensePtm ptm_of_unitary(const CMatrix& u) { return ptm_matrix(std::vector<CMatrix>{u}); }

}  // namespace premit::pauli
