#include <stdexcept>

#include "premit/mitigation.hpp"

namespace premit::mitigation {

using pauli::CMatrix;

namespace {

void check(const circuit::TrotterCircuit& c, const circuit::NoiseAssignment& noise, std::size_t upto_step,
           std::size_t cap) {
  if (c.n > cap) throw std::invalid_argument("dense oracle: qubit count exceeds cap");
  if (upto_step > c.steps()) throw std::out_of_range("dense oracle: step beyond circuit");
  if (noise.per_layer.size() != c.layers.size()) throw std::invalid_argument("noise assignment size mismatch");
}

std::size_t layer_count(const circuit::TrotterCircuit& c, std::size_t upto_step) {
  return upto_step == 0 ? 0 : c.step_end[upto_step - 1];
}

// Applies a local action to a full PTM vector, qubit 0 most significant.
void apply_local(Eigen::VectorXd& v, std::size_t n, const circuit::LocalAction& a) {
  const std::size_t sites = a.two_site ? 2 : 1;
  const Eigen::Index block = a.row_op.rows();
  const Eigen::Index inner = Eigen::Index{1} << (2 * (n - a.site - sites));
  const Eigen::Index outer = Eigen::Index{1} << (2 * a.site);
  Eigen::VectorXd in(block), out(block);
  for (Eigen::Index o = 0; o < outer; ++o)
    for (Eigen::Index i = 0; i < inner; ++i) {
      const Eigen::Index base = o * block * inner + i;
      for (Eigen::Index j = 0; j < block; ++j) in(j) = v(base + j * inner);
      out.noalias() = a.row_op * in;
      for (Eigen::Index j = 0; j < block; ++j) v(base + j * inner) = out(j);
    }
}

void apply_program(Eigen::VectorXd& v, std::size_t n, const circuit::Layer& layer,
                   const noise::DiagonalFactors* factors) {
  for (const auto& a : circuit::layer_program(layer, factors)) apply_local(v, n, a);
}

void apply_layer(Eigen::VectorXd& v, std::size_t n, const circuit::Layer& layer, const noise::NoiseLayer& noise,
                 bool with_noise, bool inverse_noise) {
  if (!with_noise || noise.is_noiseless()) {
    apply_program(v, n, layer, nullptr);
    return;
  }
  const auto factors = noise::diagonal_factors(noise, inverse_noise);
  apply_program(v, n, layer, &factors);
}

}  // namespace

DenseChannelOracle::Surrogate DenseChannelOracle::exact_surrogate(const Eigen::VectorXd& x) const {
  if (x.size() != A.rows()) throw std::invalid_argument("exact_surrogate: target has wrong length");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A.transpose());
  if (!lu.isInvertible()) throw std::runtime_error("exact_surrogate: channel matrix is singular");
  Surrogate s;
  s.y = lu.solve(x);
  s.y0 = -c.dot(s.y);
  return s;
}

Eigen::MatrixXd DenseChannelOracle::inverse_adjoint() const {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(full.transpose());
  if (!lu.isInvertible()) throw std::runtime_error("inverse_adjoint: channel matrix is singular");
  return lu.inverse();
}

DenseChannelOracle dense_channel_oracle(const circuit::TrotterCircuit& c, const circuit::NoiseAssignment& noise,
                                        std::size_t upto_step) {
  check(c, noise, upto_step, kMaxOracleQubits);
  const std::size_t layers = layer_count(c, upto_step);
  std::vector<CMatrix> unitaries;
  for (std::size_t l = 0; l < layers; ++l) unitaries.push_back(circuit::dense_unitary(c.layers[l]));

  // Ideal inverse circuit first, then the noisy circuit.
  auto channel = [&](const CMatrix& x) {
    CMatrix r = x;
    for (std::size_t l = layers; l-- > 0;) r = unitaries[l].adjoint() * r * unitaries[l];
    for (std::size_t l = 0; l < layers; ++l) {
      r = unitaries[l] * r * unitaries[l].adjoint();
      r = noise::apply_dense(noise.per_layer[l], r);
    }
    return r;
  };
  DenseChannelOracle o;
  o.n = c.n;
  o.full = pauli::ptm_matrix(channel, c.n).entries;
  const Eigen::Index d = o.full.rows();
  o.A = o.full.bottomRightCorner(d - 1, d - 1);
  o.c = o.full.col(0).tail(d - 1);
  return o;
}

CMatrix dense_evolve(const circuit::TrotterCircuit& c, const circuit::NoiseAssignment& noise, std::size_t upto_step,
                     bool with_noise) {
  check(c, noise, upto_step, pauli::kMaxDenseQubits);
  const Eigen::Index dim = Eigen::Index{1} << c.n;
  CMatrix rho = CMatrix::Zero(dim, dim);
  rho(0, 0) = 1.0;
  for (std::size_t l = 0; l < layer_count(c, upto_step); ++l) {
    const CMatrix u = circuit::dense_unitary(c.layers[l]);
    rho = u * rho * u.adjoint();
    if (with_noise) rho = noise::apply_dense(noise.per_layer[l], rho);
  }
  return rho;
}

Eigen::VectorXd dense_state_ptm(const circuit::TrotterCircuit& c, const circuit::NoiseAssignment& noise,
                                std::size_t upto_step, bool with_noise) {
  check(c, noise, upto_step, tensor::kMaxVectorQubits);
  Eigen::VectorXd v = tensor::to_vector(tensor::zero_state_mps(c.n));
  for (std::size_t l = 0; l < layer_count(c, upto_step); ++l)
    apply_layer(v, c.n, c.layers[l], noise.per_layer[l], with_noise, false);
  return v;
}

Eigen::VectorXd dense_surrogate_column(const circuit::TrotterCircuit& c, const circuit::NoiseAssignment& noise,
                                       std::size_t upto_step, const PauliString& target) {
  check(c, noise, upto_step, tensor::kMaxVectorQubits);
  if (target.size() != c.n) throw std::invalid_argument("dense_surrogate_column: target length mismatch");
  const std::size_t layers = layer_count(c, upto_step);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(Eigen::Index{1} << (2 * c.n));
  v(static_cast<Eigen::Index>(pauli::index_of(target).value)) = 1.0;
  for (std::size_t l = layers; l-- > 0;) apply_program(v, c.n, circuit::invert_layer(c.layers[l]), nullptr);
  for (std::size_t l = 0; l < layers; ++l) apply_layer(v, c.n, c.layers[l], noise.per_layer[l], true, true);
  return v;
}

}  // namespace premit::mitigation
