#include "premit/noise.hpp"

#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

namespace premit::noise {

using pauli::Letter;

namespace {

bool anticommute_letter(Letter a, Letter b) { return a != Letter::I && b != Letter::I && a != b; }

}  // namespace

NoiseLayer::NoiseLayer(std::size_t n, std::vector<LindbladGenerator> generators, std::string label)
    : n_(n), label_(std::move(label)) {
  if (n == 0) throw std::invalid_argument("noise layer: n must be positive");
  std::map<PauliString, std::size_t> seen;
  for (auto& g : generators) {
    if (g.pauli.size() != n)
      throw std::invalid_argument("noise layer '" + label_ + "': generator " + g.pauli.str() + " has wrong length");
    if (!std::isfinite(g.rate) || g.rate < 0.0)
      throw std::invalid_argument("noise layer '" + label_ + "': generator " + g.pauli.str() +
                                  " has a negative or non-finite rate");
    const auto support = g.pauli.support();
    const bool ok = support.size() == 1 || (support.size() == 2 && support[1] == support[0] + 1);
    if (!ok)
      throw std::invalid_argument("noise layer '" + label_ + "': generator " + g.pauli.str() +
                                  " must be weight 1 or act on an adjacent pair");
    auto [it, inserted] = seen.emplace(g.pauli, generators_.size());
    if (inserted)
      generators_.push_back(std::move(g));
    else
      generators_[it->second].rate += g.rate;
  }
}

NoiseLayer NoiseLayer::noiseless(std::size_t n, std::string label) { return NoiseLayer(n, {}, std::move(label)); }

bool NoiseLayer::is_noiseless() const {
  for (const auto& g : generators_)
    if (g.rate != 0.0) return false;
  return true;
}

double fidelity(const NoiseLayer& layer, const PauliString& p) {
  if (p.size() != layer.n()) throw std::invalid_argument("fidelity: length mismatch");
  double exponent = 0.0;
  for (const auto& g : layer.generators())
    if (pauli::anticommutes(p, g.pauli)) exponent += 2.0 * g.rate;
  return std::exp(-exponent);
}

double gamma(const NoiseLayer& layer) {
  double total = 0.0;
  for (const auto& g : layer.generators()) total += g.rate;
  return std::exp(2.0 * total);
}

DiagonalFactors diagonal_factors(const NoiseLayer& layer, bool inverse) {
  const std::size_t n = layer.n();
  DiagonalFactors f;
  f.sites.assign(n, Diagonal4::Ones());
  f.links.assign(n > 0 ? n - 1 : 0, Diagonal16::Ones());
  for (const auto& g : layer.generators()) {
    if (g.rate == 0.0) continue;
    const double decay = std::exp(-2.0 * g.rate);
    const double factor = inverse ? 1.0 / decay : decay;
    const auto support = g.pauli.support();
    if (support.size() == 1) {
      const std::size_t q = support[0];
      for (int a = 0; a < 4; ++a)
        if (anticommute_letter(static_cast<Letter>(a), g.pauli[q])) f.sites[q](a) *= factor;
    } else {
      const std::size_t q = support[0];
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          const bool odd = anticommute_letter(static_cast<Letter>(a), g.pauli[q]) !=
                           anticommute_letter(static_cast<Letter>(b), g.pauli[q + 1]);
          if (odd) f.links[q](a * 4 + b) *= factor;
        }
    }
  }
  return f;
}

DiagonalFactors fold_sites_into_links(DiagonalFactors f) {
  const std::size_t n = f.sites.size();
  if (n < 2) return f;
  for (std::size_t q = 0; q < n; ++q) {
    const std::size_t link = q < n - 1 ? q : n - 2;
    const bool left = q == link;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) f.links[link](a * 4 + b) *= f.sites[q](left ? a : b);
    f.sites[q].setOnes();
  }
  return f;
}

tensor::Mpo to_mpo(const NoiseLayer& layer, bool inverse) {
  using tensor::Core;
  const std::size_t n = layer.n();
  const auto f = diagonal_factors(layer, inverse);
  // Bond carries the previous site's letter so each link factor is local.
  std::vector<Core> cores;
  for (std::size_t k = 0; k < n; ++k) {
    const tensor::Index left = k == 0 ? 1 : 4;
    const tensor::Index right = k + 1 == n ? 1 : 4;
    Core c(left, 16, right);
    for (tensor::Index a = 0; a < left; ++a)
      for (int p = 0; p < 4; ++p) {
        double v = f.sites[k](p);
        if (k > 0) v *= f.links[k - 1](a * 4 + p);
        c(a, p * 4 + p, right == 1 ? 0 : p) = v;
      }
    cores.push_back(std::move(c));
  }
  tensor::Mpo m{tensor::TensorTrain(std::move(cores))};
  m.train().compress({});
  return m;
}

std::vector<PauliString> default_template(std::size_t n) {
  std::vector<PauliString> out;
  const Letter letters[] = {Letter::X, Letter::Y, Letter::Z};
  for (std::size_t q = 0; q < n; ++q)
    for (Letter l : letters) {
      std::vector<Letter> w(n, Letter::I);
      w[q] = l;
      out.emplace_back(std::move(w));
    }
  for (std::size_t q = 0; q + 1 < n; ++q)
    for (Letter a : letters)
      for (Letter b : letters) {
        std::vector<Letter> w(n, Letter::I);
        w[q] = a;
        w[q + 1] = b;
        out.emplace_back(std::move(w));
      }
  return out;
}

NoiseLayer calibrate_rates(const std::vector<PauliString>& templ, double target_gamma, std::uint64_t seed,
                           std::string label) {
  if (templ.empty()) throw std::invalid_argument("calibrate_rates: empty template");
  if (!std::isfinite(target_gamma) || target_gamma < 1.0)
    throw std::invalid_argument("calibrate_rates: target gamma must be >= 1");
  const std::size_t n = templ.front().size();
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> raw(templ.size());
  double sum = 0.0;
  for (auto& r : raw) {
    r = u(gen);
    sum += r;
  }
  const double budget = std::log(target_gamma) / 2.0;
  std::vector<LindbladGenerator> gens;
  for (std::size_t k = 0; k < templ.size(); ++k) gens.push_back({templ[k], budget == 0.0 ? 0.0 : raw[k] * budget / sum});
  return NoiseLayer(n, std::move(gens), std::move(label));
}

pauli::DensePtm dense_ptm(const NoiseLayer& layer, bool inverse) {
  const std::size_t n = layer.n();
  if (n > pauli::kMaxDenseQubits) throw std::invalid_argument("dense_ptm: qubit count exceeds dense cap");
  const Eigen::Index dim = Eigen::Index{1} << (2 * n);
  pauli::DensePtm out{n, Eigen::MatrixXd::Zero(dim, dim)};
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double f = fidelity(layer, pauli::pauli_of(pauli::PauliIndex{static_cast<std::uint64_t>(i)}, n));
    out.entries(i, i) = inverse ? 1.0 / f : f;
  }
  return out;
}

pauli::CMatrix apply_dense(const NoiseLayer& layer, const pauli::CMatrix& rho) {
  if (rho.rows() != (Eigen::Index{1} << layer.n())) throw std::invalid_argument("apply_dense: dimension mismatch");
  pauli::CMatrix out = rho;
  for (const auto& g : layer.generators()) {
    if (g.rate == 0.0) continue;
    const double p = (1.0 - std::exp(-2.0 * g.rate)) / 2.0;
    const pauli::CMatrix pm = pauli::dense_matrix(g.pauli);
    out = (1.0 - p) * out + p * (pm * out * pm);
  }
  return out;
}

}  // namespace premit::noise
