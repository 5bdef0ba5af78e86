#include "premit/mitigation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace premit::mitigation {

namespace {

void check_target(const MiddleOutState& s, const PauliString& target) {
  if (target.size() != s.n()) throw std::invalid_argument("target Pauli length does not match the state");
}

// Greedy search for the largest-magnitude entry of v outside `excluded`,
// refined by single-site sweeps.
std::pair<double, std::vector<int>> greedy_max_entry(const tensor::Mps& v, const std::vector<std::vector<int>>& excluded) {
  using tensor::Core;
  using Matrix = Eigen::MatrixXd;
  const std::size_t n = v.size();
  std::vector<Matrix> right(n + 1);
  right[n] = Matrix::Ones(1, 1);
  for (std::size_t k = n; k-- > 0;) {
    const Core& c = v.train().core(k);
    Matrix r = Matrix::Zero(c.left, c.left);
    for (int s = 0; s < 4; ++s) {
      Matrix cs(c.left, c.right);
      for (Index a = 0; a < c.left; ++a)
        for (Index b = 0; b < c.right; ++b) cs(a, b) = c(a, s, b);
      r += cs * right[k + 1] * cs.transpose();
    }
    right[k] = r;
  }
  auto value = [&](const std::vector<int>& word) {
    Eigen::RowVectorXd l = Eigen::RowVectorXd::Ones(1);
    for (std::size_t k = 0; k < n; ++k) {
      const Core& c = v.train().core(k);
      Eigen::RowVectorXd next = Eigen::RowVectorXd::Zero(c.right);
      for (Index a = 0; a < c.left; ++a)
        for (Index b = 0; b < c.right; ++b) next(b) += l(a) * c(a, word[k], b);
      l = std::move(next);
    }
    return l(0);
  };
  auto is_excluded = [&](const std::vector<int>& w) {
    for (const auto& e : excluded)
      if (e == w) return true;
    return false;
  };

  std::vector<int> word(n, 0);
  Eigen::RowVectorXd l = Eigen::RowVectorXd::Ones(1);
  for (std::size_t k = 0; k < n; ++k) {
    const Core& c = v.train().core(k);
    double best = -1.0;
    Eigen::RowVectorXd best_l;
    for (int s = 0; s < 4; ++s) {
      Eigen::RowVectorXd cand = Eigen::RowVectorXd::Zero(c.right);
      for (Index a = 0; a < c.left; ++a)
        for (Index b = 0; b < c.right; ++b) cand(b) += l(a) * c(a, s, b);
      const double w = (cand * right[k + 1] * cand.transpose())(0, 0);
      if (w > best) {
        best = w;
        best_l = cand;
        word[k] = s;
      }
    }
    l = best_l;
  }
  double best = is_excluded(word) ? 0.0 : std::abs(value(word));
  for (int sweep = 0; sweep < 4; ++sweep) {
    bool improved = false;
    for (std::size_t k = 0; k < n; ++k) {
      auto trial = word;
      for (int s = 0; s < 4; ++s) {
        trial[k] = s;
        if (is_excluded(trial)) continue;
        const double val = std::abs(value(trial));
        if (val > best) {
          best = val;
          word = trial;
          improved = true;
        }
      }
    }
    if (!improved) break;
  }
  return {best, word};
}

std::vector<int> letters_of(const PauliString& p) {
  std::vector<int> w;
  for (auto l : p.letters()) w.push_back(static_cast<int>(l));
  return w;
}

}  // namespace

double MiddleOutState::total_discarded() const {
  double t = 0.0;
  for (const auto& r : log) t += r.discarded_weight;
  return t;
}

MiddleOutState middle_out_init(std::size_t n, Index chi_max, double tol, const linalg::SvdOptions& svd) {
  if (chi_max < 0) throw std::invalid_argument("chi_max must be >= 1 (or 0 for unbounded)");
  if (tol < 0.0) throw std::invalid_argument("tol must be >= 0");
  MiddleOutState s;
  s.mpo = tensor::Mpo::identity(n);
  s.chi_max = chi_max;
  s.tol = tol;
  s.svd = svd;
  return s;
}

MiddleOutState middle_out_step(MiddleOutState s, const circuit::Layer& u, const noise::NoiseLayer& noise) {
  if (u.n() != s.n() || noise.n() != s.n()) throw std::invalid_argument("middle_out_step: qubit count mismatch");
  const auto factors = noise::diagonal_factors(noise, true);
  const bool noisy = !noise.is_noiseless();
  const linalg::Truncation trunc{s.chi_max, s.tol};
  tensor::CompressionReport rep;
  for (const auto& a : circuit::layer_program(u, noisy ? &factors : nullptr)) {
    const auto op = tensor::mpo_local_op(a.row_op, a.unitary);
    if (!a.two_site) {
      s.mpo.train().apply_one_site(a.site, op, a.orthogonal);
      continue;
    }
    const auto r = s.mpo.train().apply_two_site(a.site, op, trunc, s.svd, a.sweep);
    if (r.norm_squared > 0.0) rep.discarded_weight += r.discarded / r.norm_squared;
    if (r.used_rsvd) rep.method = tensor::SvdMethod::Rsvd;
  }
  rep.bond_dims = s.mpo.bond_dims();
  s.log.push_back(std::move(rep));
  ++s.layers;
  return s;
}

MiddleOutState middle_out_step_composed(MiddleOutState s, const circuit::Layer& u, const noise::NoiseLayer& noise) {
  if (u.n() != s.n() || noise.n() != s.n()) throw std::invalid_argument("middle_out_step: qubit count mismatch");
  auto m = tensor::compose_mpo(circuit::layer_to_mpo(u),
                               tensor::compose_mpo(s.mpo, circuit::layer_to_mpo(circuit::invert_layer(u))));
  if (!noise.is_noiseless()) m = tensor::compose_mpo(noise::to_mpo(noise, true), m);
  auto [out, rep] = tensor::compress(std::move(m), s.chi_max, s.tol, s.svd);
  s.mpo = std::move(out);
  s.log.push_back(std::move(rep));
  ++s.layers;
  return s;
}

MiddleOutState advance_trotter_step(MiddleOutState s, const circuit::TrotterCircuit& c,
                                    const circuit::NoiseAssignment& noise, std::size_t step) {
  if (step >= c.steps()) throw std::out_of_range("advance_trotter_step: step out of range");
  if (noise.per_layer.size() != c.layers.size()) throw std::invalid_argument("noise assignment size mismatch");
  for (std::size_t l = c.step_begin(step); l < c.step_end[step]; ++l)
    s = middle_out_step(std::move(s), c.layers[l], noise.per_layer[l]);
  return s;
}

double dca_coefficient(const MiddleOutState& s, const PauliString& target) {
  check_target(s, target);
  return tensor::element(s.mpo, target, target);
}

SurrogateColumn surrogate_column(const MiddleOutState& s, const PauliString& target) {
  check_target(s, target);
  auto col = tensor::apply_mpo(s.mpo, tensor::pauli_mps(target));
  auto [c, rep] = tensor::compress(std::move(col), s.chi_max, 0.0, s.svd);
  return {std::move(c), target};
}

double apc_expectation(const SurrogateColumn& col, const tensor::Mps& noisy_state) {
  return tensor::inner(noisy_state, col.column);
}

double dca_expectation(double coef, double noisy_value) { return coef * noisy_value; }

Eigen::VectorXd column_coefficients(const SurrogateColumn& col) {
  const double scale = std::pow(2.0, -static_cast<double>(col.column.size()) / 2.0);
  return tensor::to_vector(col.column) * scale;
}

double probabilistic_gamma(const SurrogateColumn& col) {
  if (col.column.size() > kMaxGammaQubits) throw std::invalid_argument("probabilistic_gamma: requires n <= 4");
  return column_coefficients(col).cwiseAbs().sum();
}

ColumnDiagnostics column_diagnostics(const MiddleOutState& s, const PauliString& target) {
  check_target(s, target);
  const std::size_t n = s.n();
  const auto col = surrogate_column(s, target);
  ColumnDiagnostics d;
  d.diagonal = dca_coefficient(s, target);
  d.argmax = PauliString::identity(n);
  const auto target_index = static_cast<Eigen::Index>(pauli::index_of(target).value);

  if (n <= tensor::kMaxVectorQubits) {
    const Eigen::VectorXd y = column_coefficients(col);
    for (Eigen::Index k = 1; k < y.size(); ++k) {
      if (k == target_index) continue;
      if (n <= kMaxGammaQubits) d.off_diagonal.push_back(y(k));
      if (std::abs(y(k)) > d.max_off_diagonal) {
        d.max_off_diagonal = std::abs(y(k));
        d.argmax = pauli::pauli_of(pauli::PauliIndex{static_cast<std::uint64_t>(k)}, n);
      }
    }
  } else {
    d.exact = false;
    auto [best, word] = greedy_max_entry(col.column, {std::vector<int>(n, 0), letters_of(target)});
    d.max_off_diagonal = best * std::pow(2.0, -static_cast<double>(n) / 2.0);
    std::vector<pauli::Letter> letters;
    for (int w : word) letters.push_back(static_cast<pauli::Letter>(w));
    d.argmax = PauliString(std::move(letters));
  }
  if (d.max_off_diagonal > 0.0) d.dominance_ratio = std::abs(d.diagonal) / d.max_off_diagonal;
  return d;
}

void save_checkpoint(const std::string& stem, const MiddleOutState& s, std::size_t trotter_step) {
  tensor::save(stem + ".bin", s.mpo);
  nlohmann::json j;
  j["trotter_step"] = trotter_step;
  j["layers"] = s.layers;
  j["n"] = s.n();
  j["chi_max"] = s.chi_max;
  j["tol"] = s.tol;
  j["rsvd_threshold"] = s.svd.rsvd_threshold;
  j["oversampling"] = s.svd.oversampling;
  j["power_iterations"] = s.svd.power_iterations;
  nlohmann::json log = nlohmann::json::array();
  for (const auto& r : s.log) {
    log.push_back({{"discarded_weight", r.discarded_weight},
                   {"max_bond", *std::max_element(r.bond_dims.begin(), r.bond_dims.end())},
                   {"method", r.method == tensor::SvdMethod::Rsvd ? "rsvd" : "svd"}});
  }
  j["log"] = std::move(log);
  std::ofstream os(stem + ".json");
  if (!os) throw std::runtime_error("cannot write " + stem + ".json");
  os << j.dump(2) << '\n';
}

std::pair<MiddleOutState, std::size_t> load_checkpoint(const std::string& stem) {
  std::ifstream is(stem + ".json");
  if (!is) throw std::runtime_error("missing checkpoint " + stem + ".json");
  const auto j = nlohmann::json::parse(is);
  MiddleOutState s;
  s.mpo = tensor::load_mpo(stem + ".bin");
  s.layers = j.at("layers").get<std::size_t>();
  s.chi_max = j.at("chi_max").get<Index>();
  s.tol = j.at("tol").get<double>();
  s.svd.rsvd_threshold = j.at("rsvd_threshold").get<Index>();
  s.svd.oversampling = j.at("oversampling").get<Index>();
  s.svd.power_iterations = j.at("power_iterations").get<int>();
  if (j.at("n").get<std::size_t>() != s.n()) throw std::runtime_error("checkpoint sidecar does not match tensor dump");
  for (const auto& e : j.at("log")) {
    tensor::CompressionReport r;
    r.discarded_weight = e.at("discarded_weight").get<double>();
    r.bond_dims = {e.at("max_bond").get<Index>()};
    r.method = e.at("method").get<std::string>() == "rsvd" ? tensor::SvdMethod::Rsvd : tensor::SvdMethod::Svd;
    s.log.push_back(std::move(r));
  }
  return {std::move(s), j.at("trotter_step").get<std::size_t>()};
}

}  // namespace premit::mitigation
