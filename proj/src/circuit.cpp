#include "premit/circuit.hpp"

#include <cmath>
#include <stdexcept>

namespace premit::circuit {

using pauli::CMatrix;
using pauli::cplx;

Layer::Layer(std::size_t n, std::vector<Gate> gates) : n_(n), gates_(std::move(gates)) {
  std::vector<bool> used(n, false);
  auto claim = [&](std::size_t q) {
    if (q >= n) throw std::invalid_argument("layer: qubit " + std::to_string(q) + " out of range");
    if (used[q]) throw std::invalid_argument("layer: gates overlap on qubit " + std::to_string(q));
    used[q] = true;
  };
  for (const auto& g : gates_) {
    claim(g.q0);
    if (g.two_qubit()) {
      if (g.q0 + 1 != g.q1 && g.q1 + 1 != g.q0)
        throw std::invalid_argument("layer: CNOT must act on adjacent qubits");
      claim(g.q1);
    }
  }
}

bool Layer::noisy() const {
  for (const auto& g : gates_)
    if (g.two_qubit()) return true;
  return false;
}

std::vector<Layer> build_ising_step(std::size_t n, const IsingParams& p) {
  if (n < 2) throw std::invalid_argument("Ising step needs n >= 2");
  std::vector<Layer> out;
  std::vector<Gate> rx;
  for (std::size_t q = 0; q < n; ++q) rx.push_back(Gate::rx(q, 2.0 * p.h * p.dt));
  out.emplace_back(n, std::move(rx));
  for (std::size_t parity = 0; parity < 2; ++parity) {
    std::vector<Gate> cx, rz;
    for (std::size_t q = parity; q + 1 < n; q += 2) {
      cx.push_back(Gate::cnot(q, q + 1));
      rz.push_back(Gate::rz(p.rz_on_target ? q + 1 : q, -2.0 * p.J * p.dt));
    }
    if (cx.empty()) continue;
    out.emplace_back(n, cx);
    out.emplace_back(n, std::move(rz));
    out.emplace_back(n, std::move(cx));
  }
  return out;
}

TrotterCircuit repeat_step(std::size_t n, const std::vector<Layer>& step, std::size_t steps) {
  TrotterCircuit c;
  c.n = n;
  for (std::size_t s = 0; s < steps; ++s) {
    c.layers.insert(c.layers.end(), step.begin(), step.end());
    c.step_end.push_back(c.layers.size());
  }
  return c;
}

TrotterCircuit build_ising_circuit(std::size_t n, std::size_t steps, const IsingParams& p) {
  auto c = repeat_step(n, build_ising_step(n, p), steps);
  c.params = p;
  return c;
}

Layer invert_layer(const Layer& layer) {
  std::vector<Gate> gates = layer.gates();
  for (auto& g : gates)
    if (!g.two_qubit()) g.angle = -g.angle;
  return Layer(layer.n(), std::move(gates));
}

CMatrix gate_unitary(const Gate& g) {
  const double c = std::cos(g.angle / 2.0), s = std::sin(g.angle / 2.0);
  switch (g.kind) {
    case GateKind::RX: {
      CMatrix u(2, 2);
      u << cplx(c, 0), cplx(0, -s), cplx(0, -s), cplx(c, 0);
      return u;
    }
    case GateKind::RZ: {
      CMatrix u = CMatrix::Zero(2, 2);
      u(0, 0) = std::polar(1.0, -g.angle / 2.0);
      u(1, 1) = std::polar(1.0, g.angle / 2.0);
      return u;
    }
    case GateKind::CNOT: {
      CMatrix u = CMatrix::Zero(4, 4);
      // Basis |a b⟩ with a on the lower qubit.
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const int ctrl = g.q0 < g.q1 ? a : b;
          const int na = g.q0 < g.q1 ? a : a ^ ctrl;
          const int nb = g.q0 < g.q1 ? b ^ ctrl : b;
          u(na * 2 + nb, a * 2 + b) = 1.0;
        }
      return u;
    }
  }
  throw std::logic_error("unknown gate kind");
}

Eigen::MatrixXd gate_ptm(const Gate& g) { return pauli::ptm_of_unitary(gate_unitary(g)).entries; }

CMatrix dense_unitary(const Layer& layer) {
  const std::size_t n = layer.n();
  if (n > pauli::kMaxDenseQubits + 2) throw std::invalid_argument("dense_unitary: too many qubits");
  const Eigen::Index dim = Eigen::Index{1} << n;
  CMatrix u = CMatrix::Identity(dim, dim);
  for (const auto& g : layer.gates()) {
    const std::size_t first = g.first();
    const std::size_t width = g.two_qubit() ? 2 : 1;
    const Eigen::Index left = Eigen::Index{1} << first;
    const Eigen::Index right = Eigen::Index{1} << (n - first - width);
    const CMatrix gu = gate_unitary(g);
    CMatrix full = CMatrix::Zero(dim, dim);
    // I_left ⊗ gu ⊗ I_right
    for (Eigen::Index l = 0; l < left; ++l)
      for (Eigen::Index i = 0; i < gu.rows(); ++i)
        for (Eigen::Index j = 0; j < gu.cols(); ++j)
          for (Eigen::Index r = 0; r < right; ++r)
            full((l * gu.rows() + i) * right + r, (l * gu.cols() + j) * right + r) = gu(i, j);
    u = full * u;
  }
  return u;
}

tensor::Mpo layer_to_mpo(const Layer& layer) {
  auto m = tensor::Mpo::identity(layer.n());
  for (const auto& a : layer_program(layer, nullptr)) {
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(a.row_op.rows(), a.row_op.cols());
    const auto op = tensor::mpo_local_op(a.row_op, id);
    if (a.two_site)
      m.train().apply_two_site(a.site, op, {}, {}, a.sweep);
    else
      m.train().apply_one_site(a.site, op, false);
  }
  return m;
}

std::vector<LocalAction> layer_program(const Layer& layer, const noise::DiagonalFactors* noise) {
  const std::size_t n = layer.n();
  std::vector<LocalAction> out;
  noise::DiagonalFactors f;
  if (noise) {
    if (noise->sites.size() != n) throw std::invalid_argument("layer_program: noise size mismatch");
    f = noise::fold_sites_into_links(*noise);
  }

  for (const auto& g : layer.gates()) {
    if (g.two_qubit()) continue;
    Eigen::MatrixXd r = gate_ptm(g);
    if (noise && n == 1) r = f.sites[0].asDiagonal() * r;
    out.push_back({g.q0, false, r, gate_ptm(g), !(noise && n == 1), tensor::Sweep::Right});
  }
  if (noise && n == 1) {
    const bool covered = !layer.gates().empty();
    if (!covered && !f.sites[0].isOnes())
      out.push_back({0, false, f.sites[0].asDiagonal().toDenseMatrix(), Eigen::MatrixXd::Identity(4, 4), false,
                     tensor::Sweep::Right});
    return out;
  }

  std::vector<bool> gate_link(n > 0 ? n - 1 : 0, false);
  for (const auto& g : layer.gates()) {
    if (!g.two_qubit()) continue;
    const std::size_t k = g.first();
    gate_link[k] = true;
    const Eigen::MatrixXd r = gate_ptm(g);
    Eigen::MatrixXd row = r;
    bool orth = true;
    if (noise && !f.links[k].isOnes()) {
      row = f.links[k].asDiagonal() * r;
      orth = false;
    }
    out.push_back({k, true, row, r, orth, tensor::Sweep::Right});
  }
  if (noise) {
    for (std::size_t k = n - 1; k-- > 0;) {
      if (gate_link[k] || f.links[k].isOnes()) continue;
      out.push_back({k, true, f.links[k].asDiagonal().toDenseMatrix(), Eigen::MatrixXd::Identity(16, 16), false,
                     tensor::Sweep::Left});
    }
  }
  return out;
}

NoiseAssignment assign_ising_noise(const TrotterCircuit& c, const noise::NoiseLayer& first,
                                   const noise::NoiseLayer& second, NoisePlacement placement) {
  if (first.n() != c.n || second.n() != c.n) throw std::invalid_argument("noise assignment: qubit count mismatch");
  NoiseAssignment a;
  for (std::size_t s = 0; s < c.steps(); ++s) {
    std::size_t in_block = 0;
    std::size_t last_parity = 2;
    for (std::size_t l = c.step_begin(s); l < c.step_end[s]; ++l) {
      const Layer& layer = c.layers[l];
      if (!layer.noisy()) {
        a.per_layer.push_back(noise::NoiseLayer::noiseless(c.n));
        continue;
      }
      std::size_t parity = 0;
      for (const auto& g : layer.gates())
        if (g.two_qubit()) {
          parity = g.first() % 2;
          break;
        }
      if (parity != last_parity) in_block = 0;
      last_parity = parity;
      const bool use_first = placement == NoisePlacement::Parity ? parity == 0 : in_block % 2 == 0;
      ++in_block;
      a.per_layer.push_back(use_first ? first : second);
    }
  }
  return a;
}

NoiseAssignment assign_cyclic(const TrotterCircuit& c, const std::vector<noise::NoiseLayer>& models) {
  if (models.empty()) throw std::invalid_argument("noise assignment: no noise models");
  for (const auto& m : models)
    if (m.n() != c.n) throw std::invalid_argument("noise assignment: qubit count mismatch");
  NoiseAssignment a;
  std::size_t next = 0;
  for (const auto& layer : c.layers) {
    if (layer.noisy())
      a.per_layer.push_back(models[next++ % models.size()]);
    else
      a.per_layer.push_back(noise::NoiseLayer::noiseless(c.n));
  }
  return a;
}

}  // namespace premit::circuit
