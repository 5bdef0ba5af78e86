#include "premit/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "premit/qcrb.hpp"
#include "premit/sim.hpp"

namespace premit::experiment {

namespace fs = std::filesystem;
using nlohmann::json;
using pauli::PauliString;

namespace {

const std::set<std::string> kKeys = {
    "n",     "steps", "h",      "J",          "dt",           "chi_max",           "tol",
    "observable", "estimators", "shots", "seeds", "noise", "output", "rz_on_target", "reference_chi_max",
    "state_chi_max", "rsvd", "repetitions", "workers", "noise_assignment", "diagnostics", "memory_cap_mb"};

double number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(field, "must be finite");
  return x;
}

std::int64_t integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) throw ConfigError(field, "expected an integer");
  if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX))
    throw ConfigError(field, "out of range");
  return v.get<std::int64_t>();
}

std::uint64_t seed_value(const json& v, const std::string& field) {
  if (!v.is_number_integer()) throw ConfigError(field, "expected a non-negative integer");
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const auto x = v.get<std::int64_t>();
  if (x < 0) throw ConfigError(field, "expected a non-negative integer");
  return static_cast<std::uint64_t>(x);
}

std::string text(const json& v, const std::string& field) {
  if (!v.is_string()) throw ConfigError(field, "expected a string");
  return v.get<std::string>();
}

PauliString pauli_word(const std::string& w, std::size_t n, const std::string& field) {
  if (w.size() != n) throw ConfigError(field, "Pauli string '" + w + "' must have length " + std::to_string(n));
  try {
    return PauliString(w);
  } catch (const std::exception& e) {
    throw ConfigError(field, e.what());
  }
}

Estimator parse_estimator(const std::string& s, const std::string& field) {
  if (s == "dca") return Estimator::Dca;
  if (s == "apc") return Estimator::Apc;
  if (s == "noisy") return Estimator::Noisy;
  if (s == "exact-oracle") return Estimator::ExactOracle;
  throw ConfigError(field, "unknown estimator '" + s + "' (dca, apc, noisy, exact-oracle)");
}

std::string assignment_name(Assignment a) {
  switch (a) {
    case Assignment::Parity: return "parity";
    case Assignment::Position: return "position";
    case Assignment::Cyclic: return "cyclic";
  }
  return "parity";
}

NoiseModelSpec parse_model(const json& j, std::size_t n, const std::string& field) {
  if (!j.is_object()) throw ConfigError(field, "expected an object");
  for (const auto& [k, v] : j.items())
    if (k != "label" && k != "target_gamma" && k != "seed" && k != "rates" && k != "gamma")
      throw ConfigError(field + "." + k, "unknown key");
  NoiseModelSpec m;
  if (j.contains("label")) m.label = text(j["label"], field + ".label");
  if (j.contains("seed")) m.seed = seed_value(j["seed"], field + ".seed");
  const bool has_target = j.contains("target_gamma");
  const bool has_rates = j.contains("rates");
  if (has_target == has_rates) throw ConfigError(field, "give exactly one of target_gamma or rates");
  if (has_target) {
    const double g = number(j["target_gamma"], field + ".target_gamma");
    if (g < 1.0) throw ConfigError(field + ".target_gamma", "must be >= 1");
    m.target_gamma = g;
    return m;
  }
  const auto& rates = j["rates"];
  if (!rates.is_array()) throw ConfigError(field + ".rates", "expected an array");
  for (std::size_t i = 0; i < rates.size(); ++i) {
    const std::string f = field + ".rates[" + std::to_string(i) + "]";
    const auto& r = rates[i];
    if (!r.is_object() || !r.contains("pauli") || !r.contains("rate"))
      throw ConfigError(f, "expected {\"pauli\": ..., \"rate\": ...}");
    const double rate = number(r["rate"], f + ".rate");
    if (rate < 0.0) throw ConfigError(f + ".rate", "rate must be non-negative");
    m.rates.push_back({pauli_word(text(r["pauli"], f + ".pauli"), n, f + ".pauli"), rate});
  }
  try {
    noise::NoiseLayer(n, m.rates);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field + ".rates", e.what());
  }
  return m;
}

std::vector<NoiseModelSpec> parse_noise(const json& j, std::size_t n, const fs::path& base_dir) {
  if (j.is_object()) {
    if (!j.contains("file") || j.size() != 1) throw ConfigError("noise", "expected a list of models or {\"file\": path}");
    fs::path p = text(j["file"], "noise.file");
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    std::ifstream is(p);
    if (!is) throw ConfigError("noise.file", "cannot open " + p.string());
    json file;
    try {
      file = json::parse(is);
    } catch (const json::exception& e) {
      throw ConfigError("noise.file", e.what());
    }
    if (!file.contains("n") || file["n"] != n) throw ConfigError("noise.file", "qubit count does not match n");
    if (!file.contains("models")) throw ConfigError("noise.file", "missing models");
    std::vector<NoiseModelSpec> out;
    for (std::size_t i = 0; i < file["models"].size(); ++i) {
      json m = file["models"][i];
      m.erase("target_gamma");
      m.erase("seed");
      out.push_back(parse_model(m, n, "noise.file.models[" + std::to_string(i) + "]"));
    }
    return out;
  }
  if (!j.is_array() || j.empty()) throw ConfigError("noise", "expected a non-empty list of models");
  std::vector<NoiseModelSpec> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_model(j[i], n, "noise[" + std::to_string(i) + "]"));
  return out;
}

std::string slug(const std::string& s) {
  std::string out;
  for (char ch : s) out += std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_';
  return out;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << s;
}

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& body) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex m;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, count); ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(m);
            if (!error) error = std::current_exception();
          }
        }
      });
  }
  if (error) std::rethrow_exception(error);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Eigen::VectorXd target_vector(const PauliString& p) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>((std::size_t{1} << (2 * p.size())) - 1));
  x(static_cast<Eigen::Index>(pauli::index_of(p).value) - 1) = 1.0;
  return x;
}

}  // namespace

std::string to_string(Estimator e) {
  switch (e) {
    case Estimator::Dca: return "dca";
    case Estimator::Apc: return "apc";
    case Estimator::Noisy: return "noisy";
    case Estimator::ExactOracle: return "exact-oracle";
  }
  return "dca";
}

Observable resolve_observable(const std::string& name, std::size_t n) {
  if (name == "Z" && n > 1) return {"Z", PauliString::uniform(n, pauli::Letter::Z)};
  if (name == "X" && n > 1) return {"X", PauliString::uniform(n, pauli::Letter::X)};
  if (name == "Y" && n > 1) return {"Y", PauliString::uniform(n, pauli::Letter::Y)};
  if (name == "R1" || name == "R2") {
    if (n != 10) throw ConfigError("observable", name + " is defined for n = 10 only");
    return {name, PauliString(name == "R1" ? "YZZIYXZIZZ" : "IIZIXIXXIX")};
  }
  const auto p = pauli_word(name, n, "observable");
  if (p.is_identity()) throw ConfigError("observable", "identity has no error to mitigate");
  return {name, p};
}

ExperimentConfig parse_config(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ConfigError("<root>", "expected a JSON object");
  for (const auto& [k, v] : j.items())
    if (!kKeys.count(k)) throw ConfigError(k, "unknown key");
  ExperimentConfig c;
  if (j.contains("n")) {
    const auto n = integer(j["n"], "n");
    if (n < 2 || n > 64) throw ConfigError("n", "must be between 2 and 64");
    c.n = static_cast<std::size_t>(n);
  }
  if (j.contains("steps")) {
    const auto s = integer(j["steps"], "steps");
    if (s < 0) throw ConfigError("steps", "must be >= 0");
    c.steps = static_cast<std::size_t>(s);
  }
  if (j.contains("h")) c.h = number(j["h"], "h");
  if (j.contains("J")) c.J = number(j["J"], "J");
  if (j.contains("dt")) c.dt = number(j["dt"], "dt");
  if (j.contains("rz_on_target")) {
    if (!j["rz_on_target"].is_boolean()) throw ConfigError("rz_on_target", "expected a boolean");
    c.rz_on_target = j["rz_on_target"].get<bool>();
  }
  if (j.contains("chi_max")) {
    const auto& v = j["chi_max"];
    c.chi_max.clear();
    const json list = v.is_array() ? v : json::array({v});
    if (list.empty()) throw ConfigError("chi_max", "expected at least one bond dimension");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto x = integer(list[i], "chi_max[" + std::to_string(i) + "]");
      if (x < 1) throw ConfigError("chi_max[" + std::to_string(i) + "]", "must be >= 1");
      c.chi_max.push_back(x);
    }
  }
  if (j.contains("tol")) {
    c.tol = number(j["tol"], "tol");
    if (c.tol < 0.0 || c.tol >= 1.0) throw ConfigError("tol", "must be in [0, 1)");
  }
  {
    std::vector<std::string> names{"Z"};
    if (j.contains("observable")) {
      const auto& v = j["observable"];
      names.clear();
      const json list = v.is_array() ? v : json::array({v});
      if (list.empty()) throw ConfigError("observable", "expected at least one observable");
      for (std::size_t i = 0; i < list.size(); ++i) names.push_back(text(list[i], "observable"));
    }
    std::set<std::string> seen;
    for (const auto& name : names) {
      if (!seen.insert(name).second) throw ConfigError("observable", "duplicate observable " + name);
      c.observables.push_back(resolve_observable(name, c.n));
    }
  }
  if (j.contains("estimators")) {
    const auto& v = j["estimators"];
    if (!v.is_array() || v.empty()) throw ConfigError("estimators", "expected a non-empty list");
    c.estimators.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto e = parse_estimator(text(v[i], "estimators"), "estimators[" + std::to_string(i) + "]");
      if (std::find(c.estimators.begin(), c.estimators.end(), e) != c.estimators.end())
        throw ConfigError("estimators", "duplicate estimator " + to_string(e));
      c.estimators.push_back(e);
    }
  }
  if (std::find(c.estimators.begin(), c.estimators.end(), Estimator::ExactOracle) != c.estimators.end() &&
      c.n > mitigation::kMaxOracleQubits)
    throw ConfigError("estimators", "exact-oracle requires n <= 4");
  if (j.contains("shots")) {
    c.shots = integer(j["shots"], "shots");
    if (c.shots < 1) throw ConfigError("shots", "must be >= 1");
  }
  if (j.contains("seeds")) {
    const auto& s = j["seeds"];
    if (!s.is_object()) throw ConfigError("seeds", "expected {\"noise\": ..., \"sampling\": ...}");
    for (const auto& [k, v] : s.items())
      if (k != "noise" && k != "sampling") throw ConfigError("seeds." + k, "unknown key");
    if (s.contains("noise")) c.noise_seed = seed_value(s["noise"], "seeds.noise");
    if (s.contains("sampling")) c.sampling_seed = seed_value(s["sampling"], "seeds.sampling");
  }
  if (j.contains("noise")) {
    c.noise = parse_noise(j["noise"], c.n, base_dir);
  } else {
    c.noise = {{"lambda1", 1.140, std::nullopt, {}}, {"lambda2", 1.137, std::nullopt, {}}};
  }
  for (std::size_t i = 0; i < c.noise.size(); ++i)
    if (c.noise[i].label.empty()) c.noise[i].label = "lambda" + std::to_string(i + 1);
  if (j.contains("noise_assignment")) {
    const auto a = text(j["noise_assignment"], "noise_assignment");
    if (a == "parity") c.assignment = Assignment::Parity;
    else if (a == "position") c.assignment = Assignment::Position;
    else if (a == "cyclic") c.assignment = Assignment::Cyclic;
    else throw ConfigError("noise_assignment", "expected parity, position or cyclic");
  }
  if (c.assignment != Assignment::Cyclic && c.noise.size() != 2)
    throw ConfigError("noise", assignment_name(c.assignment) + " assignment needs exactly two models");
  if (j.contains("output")) c.output = text(j["output"], "output");
  if (c.output.empty()) throw ConfigError("output", "must not be empty");
  for (const char* key : {"reference_chi_max", "state_chi_max"}) {
    if (!j.contains(key)) continue;
    const auto x = integer(j[key], key);
    if (x < 1) throw ConfigError(key, "must be >= 1");
    (std::string(key) == "reference_chi_max" ? c.reference_chi_max : c.state_chi_max) = x;
  }
  if (j.contains("rsvd")) {
    const auto& r = j["rsvd"];
    if (!r.is_object()) throw ConfigError("rsvd", "expected an object");
    for (const auto& [k, v] : r.items()) {
      const std::string f = "rsvd." + k;
      const auto x = integer(v, f);
      if (k == "threshold") {
        if (x < 1) throw ConfigError(f, "must be >= 1");
        c.svd.rsvd_threshold = x;
      } else if (k == "oversampling") {
        if (x < 0) throw ConfigError(f, "must be >= 0");
        c.svd.oversampling = x;
      } else if (k == "power_iterations") {
        if (x < 0) throw ConfigError(f, "must be >= 0");
        c.svd.power_iterations = static_cast<int>(x);
      } else {
        throw ConfigError(f, "unknown key");
      }
    }
  }
  if (j.contains("repetitions")) {
    const auto x = integer(j["repetitions"], "repetitions");
    if (x < 1) throw ConfigError("repetitions", "must be >= 1");
    c.repetitions = static_cast<std::size_t>(x);
  }
  if (j.contains("workers")) {
    const auto x = integer(j["workers"], "workers");
    if (x < 1) throw ConfigError("workers", "must be >= 1");
    c.workers = static_cast<std::size_t>(x);
  }
  if (j.contains("diagnostics")) {
    if (!j["diagnostics"].is_boolean()) throw ConfigError("diagnostics", "expected a boolean");
    c.diagnostics = j["diagnostics"].get<bool>();
  }
  if (j.contains("memory_cap_mb")) {
    c.memory_cap_mb = number(j["memory_cap_mb"], "memory_cap_mb");
    if (c.memory_cap_mb <= 0.0) throw ConfigError("memory_cap_mb", "must be positive");
  }
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("--config", "cannot open " + path.string());
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw ConfigError("--config", e.what());
  }
  return parse_config(j, path.parent_path());
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["n"] = c.n;
  j["steps"] = c.steps;
  j["h"] = c.h;
  j["J"] = c.J;
  j["dt"] = c.dt;
  j["rz_on_target"] = c.rz_on_target;
  j["chi_max"] = c.chi_max;
  j["tol"] = c.tol;
  json obs = json::array();
  for (const auto& o : c.observables) obs.push_back(o.label);
  j["observable"] = obs;
  json est = json::array();
  for (auto e : c.estimators) est.push_back(to_string(e));
  j["estimators"] = est;
  j["shots"] = c.shots;
  j["seeds"] = {{"noise", c.noise_seed}, {"sampling", c.sampling_seed}};
  json noise = json::array();
  for (const auto& m : c.noise) {
    json e;
    e["label"] = m.label;
    if (m.target_gamma) e["target_gamma"] = *m.target_gamma;
    if (m.seed) e["seed"] = *m.seed;
    if (!m.target_gamma) {
      json rates = json::array();
      for (const auto& g : m.rates) rates.push_back({{"pauli", g.pauli.str()}, {"rate", g.rate}});
      e["rates"] = rates;
    }
    noise.push_back(e);
  }
  j["noise"] = noise;
  j["noise_assignment"] = assignment_name(c.assignment);
  j["output"] = c.output;
  j["reference_chi_max"] = c.reference_chi_max;
  j["state_chi_max"] = c.state_chi_max;
  j["rsvd"] = {{"threshold", c.svd.rsvd_threshold},
               {"oversampling", c.svd.oversampling},
               {"power_iterations", c.svd.power_iterations}};
  j["repetitions"] = c.repetitions;
  j["workers"] = c.workers;
  j["diagnostics"] = c.diagnostics;
  j["memory_cap_mb"] = c.memory_cap_mb;
  return j;
}

circuit::TrotterCircuit build_circuit(const ExperimentConfig& cfg) {
  circuit::IsingParams p;
  p.h = cfg.h;
  p.J = cfg.J;
  p.dt = cfg.dt;
  p.rz_on_target = cfg.rz_on_target;
  return circuit::build_ising_circuit(cfg.n, cfg.steps, p);
}

std::vector<noise::NoiseLayer> build_noise_models(const ExperimentConfig& cfg) {
  const auto templ = noise::default_template(cfg.n);
  std::vector<noise::NoiseLayer> out;
  for (std::size_t i = 0; i < cfg.noise.size(); ++i) {
    const auto& m = cfg.noise[i];
    if (m.target_gamma) {
      const std::uint64_t seed = m.seed ? *m.seed : cfg.noise_seed + i;
      out.push_back(noise::calibrate_rates(templ, *m.target_gamma, seed, m.label));
    } else {
      out.emplace_back(cfg.n, m.rates, m.label);
    }
  }
  return out;
}

circuit::NoiseAssignment assign_noise(const ExperimentConfig& cfg, const circuit::TrotterCircuit& c,
                                      const std::vector<noise::NoiseLayer>& models) {
  switch (cfg.assignment) {
    case Assignment::Parity:
      return circuit::assign_ising_noise(c, models.at(0), models.at(1), circuit::NoisePlacement::Parity);
    case Assignment::Position:
      return circuit::assign_ising_noise(c, models.at(0), models.at(1), circuit::NoisePlacement::Position);
    case Assignment::Cyclic: return circuit::assign_cyclic(c, models);
  }
  return {};
}

double estimated_memory_mb(std::size_t n, tensor::Index chi) {
  // No bond of an n-site MPO exceeds 16^(n/2).
  const double bond = std::min(static_cast<double>(chi), std::pow(4.0, static_cast<double>(n)));
  // MPO cores plus the two-site block, its update and the SVD workspace.
  const double mpo = static_cast<double>(n) * bond * bond * 16.0;
  const double block = 4.0 * (16.0 * bond) * (16.0 * bond);
  return (mpo + block) * 8.0 / (1024.0 * 1024.0);
}

std::filesystem::path checkpoint_stem(const fs::path& output, tensor::Index chi, std::size_t step) {
  return output / ("chi_" + std::to_string(chi)) / ("step_" + std::to_string(step));
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << kResultsHeader << '\n';
  for (const auto& r : rows) {
    os << r.step << ',' << r.chi_max << ',' << to_string(r.estimator) << ',' << format_number(r.ideal) << ','
       << format_number(r.noisy) << ',' << format_number(r.mitigated) << ',' << format_number(r.abs_error) << ','
       << (r.gamma_analytic ? format_number(*r.gamma_analytic) : "") << ','
       << (r.gamma_empirical ? format_number(*r.gamma_empirical) : "") << ',' << format_number(r.pec_gamma_theory)
       << ',' << r.shots << ',' << r.seed << '\n';
  }
  return os.str();
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << "observable,chi_max,estimator,steps,mean_abs_error,max_abs_error,gamma_fit_exponent\n";
  for (const auto& r : rows)
    os << r.observable << ',' << r.chi_max << ',' << to_string(r.estimator) << ',' << r.steps << ','
       << format_number(r.mean_abs_error) << ',' << format_number(r.max_abs_error) << ','
       << (r.gamma_fit_exponent ? format_number(*r.gamma_fit_exponent) : "") << '\n';
  return os.str();
}

std::string diagnostics_csv(const std::vector<DiagnosticsRow>& rows) {
  std::ostringstream os;
  os << "observable,step,chi_max,diagonal,max_off_diagonal,dominance_ratio,argmax,exact\n";
  for (const auto& r : rows)
    os << r.observable << ',' << r.step << ',' << r.chi_max << ',' << format_number(r.diag.diagonal) << ','
       << format_number(r.diag.max_off_diagonal) << ','
       << (r.diag.dominance_ratio ? format_number(*r.diag.dominance_ratio) : "") << ',' << r.diag.argmax.str() << ','
       << (r.diag.exact ? 1 : 0) << '\n';
  return os.str();
}

std::vector<SummaryRow> summarize(const std::vector<ObservableResults>& results) {
  std::vector<SummaryRow> out;
  for (const auto& obs : results) {
    std::vector<std::pair<tensor::Index, Estimator>> keys;
    for (const auto& r : obs.rows)
      if (std::find(keys.begin(), keys.end(), std::make_pair(r.chi_max, r.estimator)) == keys.end())
        keys.emplace_back(r.chi_max, r.estimator);
    for (const auto& [chi, est] : keys) {
      SummaryRow s;
      s.observable = obs.observable.label;
      s.chi_max = chi;
      s.estimator = est;
      double sxy = 0.0, sxx = 0.0;
      for (const auto& r : obs.rows) {
        if (r.chi_max != chi || r.estimator != est || r.step == 0) continue;
        ++s.steps;
        s.mean_abs_error += r.abs_error;
        s.max_abs_error = std::max(s.max_abs_error, r.abs_error);
        if (r.gamma_analytic && *r.gamma_analytic > 0.0 && r.pec_gamma_theory > 1.0) {
          const double x = std::log(r.pec_gamma_theory);
          sxy += x * std::log(*r.gamma_analytic);
          sxx += x * x;
        }
      }
      if (s.steps > 0) s.mean_abs_error /= static_cast<double>(s.steps);
      if (sxx > 0.0 && est != Estimator::Noisy) s.gamma_fit_exponent = sxy / sxx;
      out.push_back(s);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// run

namespace {

json run_fingerprint(const ExperimentConfig& cfg, const std::vector<noise::NoiseLayer>& models) {
  json j = to_json(cfg);
  for (const char* k : {"steps", "observable", "estimators", "shots", "seeds", "output", "reference_chi_max",
                        "state_chi_max", "repetitions", "workers", "diagnostics", "memory_cap_mb", "chi_max"})
    j.erase(k);
  json m = json::array();
  for (const auto& layer : models) {
    json rates = json::array();
    for (const auto& g : layer.generators()) rates.push_back({{"pauli", g.pauli.str()}, {"rate", g.rate}});
    m.push_back(rates);
  }
  j["noise"] = m;
  return j;
}

struct StepContext {
  std::size_t step = 0;
  double ideal = 0.0;
  const sim::StateMps* noisy = nullptr;
  double pec = 1.0;
  std::optional<mitigation::DenseChannelOracle> oracle;
  std::optional<Eigen::VectorXd> noisy_traces;  // Tr[ρ' P_k], k >= 1
};

struct Task {
  std::size_t chi_index = 0;
  std::size_t obs_index = 0;
};

}  // namespace

RunResult run(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto t_start = std::chrono::steady_clock::now();
  for (auto chi : cfg.chi_max)
    if (estimated_memory_mb(cfg.n, chi) > cfg.memory_cap_mb)
      throw std::runtime_error("resource cap exceeded: chi_max " + std::to_string(chi) + " needs about " +
                               format_number(std::round(estimated_memory_mb(cfg.n, chi))) + " MB, cap " +
                               format_number(cfg.memory_cap_mb) + " MB");

  const auto c = build_circuit(cfg);
  const auto models = build_noise_models(cfg);
  const auto na = assign_noise(cfg, c, models);
  const fs::path out = cfg.output;

  const json fingerprint = run_fingerprint(cfg, models);
  if (opts.write_files) {
    fs::create_directories(out);
    const fs::path fp = out / "fingerprint.json";
    if (opts.resume && fs::exists(fp)) {
      std::ifstream is(fp);
      if (json::parse(is) != fingerprint)
        throw std::runtime_error("resume: checkpoints in " + out.string() + " belong to a different configuration");
    }
    write_text(fp, fingerprint.dump(2) + "\n");
  }
  const bool exact_oracle =
      std::find(cfg.estimators.begin(), cfg.estimators.end(), Estimator::ExactOracle) != cfg.estimators.end();

  RunResult result;
  for (const auto& o : cfg.observables) result.results.push_back({o, {}});
  json manifest;
  manifest["engine_version"] = kEngineVersion;
  manifest["config"] = to_json(cfg);
  manifest["seeds"] = {{"noise", cfg.noise_seed}, {"sampling", cfg.sampling_seed}};
  json model_info = json::array();
  for (std::size_t i = 0; i < models.size(); ++i) {
    json m = {{"label", models[i].label()}, {"gamma", noise::gamma(models[i])}};
    if (cfg.noise[i].target_gamma)
      m["seed"] = cfg.noise[i].seed ? *cfg.noise[i].seed : cfg.noise_seed + i;
    model_info.push_back(m);
  }
  manifest["noise_models"] = model_info;
  json step_log = json::array();
  double t_mid = 0.0, t_evolve = 0.0, t_eval = 0.0;

  sim::Evolver ideal(c, na, cfg.reference_chi_max, 0.0, false, cfg.svd);
  sim::Evolver noisy(c, na, cfg.state_chi_max, 0.0, true, cfg.svd);
  std::vector<mitigation::MiddleOutState> mid;
  for (auto chi : cfg.chi_max) mid.push_back(mitigation::middle_out_init(cfg.n, chi, cfg.tol, cfg.svd));

  std::vector<Task> tasks;
  for (std::size_t ci = 0; ci < cfg.chi_max.size(); ++ci)
    for (std::size_t oi = 0; oi < cfg.observables.size(); ++oi) tasks.push_back({ci, oi});

  for (std::size_t step = 0; step <= cfg.steps; ++step) {
    json entry;
    entry["step"] = step;
    if (step > 0) {
      auto t0 = std::chrono::steady_clock::now();
      ideal.advance();
      noisy.advance();
      t_evolve += seconds_since(t0);
      t0 = std::chrono::steady_clock::now();
      json per_chi = json::object();
      for (std::size_t ci = 0; ci < mid.size(); ++ci) {
        const auto chi = cfg.chi_max[ci];
        const fs::path stem = checkpoint_stem(out, chi, step);
        bool resumed = false;
        if (opts.write_files && opts.resume && fs::exists(stem.string() + ".json") &&
            fs::exists(stem.string() + ".bin")) {
          auto [loaded, at] = mitigation::load_checkpoint(stem.string());
          if (at != step || loaded.layers != c.step_end[step - 1])
            throw std::runtime_error("resume: checkpoint " + stem.string() + " does not match step");
          mid[ci] = std::move(loaded);
          resumed = true;
        } else {
          mid[ci] = mitigation::advance_trotter_step(std::move(mid[ci]), c, na, step - 1);
          if (opts.write_files) {
            fs::create_directories(stem.parent_path());
            mitigation::save_checkpoint(stem.string(), mid[ci], step);
          }
        }
        per_chi[std::to_string(chi)] = {{"cumulative_discarded_weight", mid[ci].total_discarded()},
                                        {"max_bond", mid[ci].mpo.max_bond()},
                                        {"resumed", resumed}};
      }
      t_mid += seconds_since(t0);
      entry["middle_out"] = per_chi;
    }
    entry["ideal_state"] = {{"discarded_weight", ideal.state().discarded}, {"max_bond", ideal.state().mps.max_bond()}};
    entry["noisy_state"] = {{"discarded_weight", noisy.state().discarded}, {"max_bond", noisy.state().mps.max_bond()}};
    step_log.push_back(entry);

    const auto t0 = std::chrono::steady_clock::now();
    StepContext ctx;
    ctx.step = step;
    ctx.noisy = &noisy.state();
    ctx.pec = sim::pec_theoretical_gamma(c, na, step);
    if (exact_oracle && step > 0) {
      ctx.oracle = mitigation::dense_channel_oracle(c, na, step);
      const Eigen::VectorXd v = pauli::ptm_vector(mitigation::dense_evolve(c, na, step, true)).entries;
      ctx.noisy_traces = v.tail(v.size() - 1) * std::pow(2.0, static_cast<double>(cfg.n) / 2.0);
    }

    std::vector<std::vector<ResultRow>> task_rows(tasks.size());
    std::vector<std::optional<DiagnosticsRow>> task_diag(tasks.size());
    parallel_for(tasks.size(), cfg.workers, [&](std::size_t ti) {
      const auto& task = tasks[ti];
      const auto& st = mid[task.chi_index];
      const auto& obs = cfg.observables[task.obs_index];
      const auto& p = obs.pauli;
      const double ideal_value = sim::raw_expectation(ideal.state(), p);
      const double noisy_value = sim::raw_expectation(*ctx.noisy, p);
      const double clamped = std::clamp(noisy_value, -1.0, 1.0);

      auto row = [&](Estimator e) {
        ResultRow r;
        r.step = step;
        r.chi_max = cfg.chi_max[task.chi_index];
        r.estimator = e;
        r.ideal = ideal_value;
        r.noisy = noisy_value;
        r.pec_gamma_theory = ctx.pec;
        return r;
      };
      // Independent shot streams per (step, observable, repetition); the noisy
      // stream feeds the noisy estimator and the denominator of the DCA overhead.
      auto noisy_seed = [&](std::size_t rep) { return sim::derive_seed(cfg.sampling_seed, step, task.obs_index, 2 * rep); };
      auto dca_seed = [&](std::size_t rep) {
        return sim::derive_seed(cfg.sampling_seed, step, task.obs_index, 2 * rep + 1);
      };
      const double reps = static_cast<double>(cfg.repetitions);

      std::optional<mitigation::SurrogateColumn> column;
      auto get_column = [&]() -> const mitigation::SurrogateColumn& {
        if (!column) column = mitigation::surrogate_column(st, p);
        return *column;
      };

      for (auto e : cfg.estimators) {
        ResultRow r = row(e);
        switch (e) {
          case Estimator::Noisy: {
            double mean = 0.0;
            for (std::size_t k = 0; k < cfg.repetitions; ++k)
              mean += sim::sample_shots(clamped, cfg.shots, noisy_seed(k)).mean;
            r.mitigated = mean / reps;
            r.gamma_analytic = 1.0;
            r.gamma_empirical = 1.0;
            r.shots = cfg.shots;
            r.seed = noisy_seed(0);
            break;
          }
          case Estimator::Dca: {
            const double coef = mitigation::dca_coefficient(st, p);
            double mean = 0.0, gamma = 0.0;
            bool have_gamma = true;
            for (std::size_t k = 0; k < cfg.repetitions; ++k) {
              const auto d = sim::sample_shots(clamped, cfg.shots, dca_seed(k));
              const auto ref = sim::sample_shots(clamped, cfg.shots, noisy_seed(k));
              mean += mitigation::dca_expectation(coef, d.mean);
              if (ref.std_error > 0.0)
                gamma += sim::empirical_overhead(std::abs(coef) * d.std_error, ref.std_error, std::abs(coef), "dca")
                             .gamma_empirical;
              else
                have_gamma = false;
            }
            r.mitigated = mean / reps;
            r.gamma_analytic = std::abs(coef);
            if (have_gamma) r.gamma_empirical = gamma / reps;
            r.shots = cfg.shots;
            r.seed = dca_seed(0);
            break;
          }
          case Estimator::Apc: {
            const auto& col = get_column();
            r.mitigated = mitigation::apc_expectation(col, ctx.noisy->mps);
            if (cfg.n <= mitigation::kMaxGammaQubits) r.gamma_analytic = mitigation::probabilistic_gamma(col);
            break;
          }
          case Estimator::ExactOracle: {
            if (step == 0) {
              r.mitigated = noisy_value;
              r.gamma_analytic = 1.0;
            } else {
              const auto sur = ctx.oracle->exact_surrogate(target_vector(p));
              r.mitigated = sur.y.dot(*ctx.noisy_traces) + sur.y0;
              r.gamma_analytic = sur.y.cwiseAbs().sum() + std::abs(sur.y0);
            }
            break;
          }
        }
        r.abs_error = std::abs(r.mitigated - r.ideal);
        task_rows[ti].push_back(r);
      }
      if (cfg.diagnostics) {
        DiagnosticsRow d;
        d.step = step;
        d.chi_max = cfg.chi_max[task.chi_index];
        d.observable = obs.label;
        d.diag = mitigation::column_diagnostics(st, p);
        task_diag[ti] = d;
      }
    });
    // Single-threaded collection in task order keeps the output deterministic.
    for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
      auto& dst = result.results[tasks[ti].obs_index].rows;
      dst.insert(dst.end(), task_rows[ti].begin(), task_rows[ti].end());
      if (task_diag[ti]) result.diagnostics.push_back(*task_diag[ti]);
    }
    t_eval += seconds_since(t0);
  }

  result.summary = summarize(result.results);
  manifest["steps"] = step_log;
  manifest["wall_clock_s"] = {{"middle_out", t_mid},
                              {"state_evolution", t_evolve},
                              {"evaluation", t_eval},
                              {"total", seconds_since(t_start)}};
  json files = json::array();
  if (opts.write_files) {
    for (const auto& r : result.results) {
      const std::string name = "results_" + slug(r.observable.label) + ".csv";
      write_text(out / name, results_csv(r.rows));
      files.push_back({{"file", name}, {"observable", r.observable.label}, {"pauli", r.observable.pauli.str()}});
    }
    write_text(out / "summary.csv", summary_csv(result.summary));
    files.push_back({{"file", "summary.csv"}});
    if (cfg.diagnostics) {
      write_text(out / "diagnostics.csv", diagnostics_csv(result.diagnostics));
      files.push_back({{"file", "diagnostics.csv"}});
    }
  }
  manifest["files"] = files;
  manifest["row_seeds"] =
      "seed column = derive_seed(seeds.sampling, step, observable index, stream); stream 2r is the noisy "
      "stream and 2r+1 the DCA stream of repetition r";
  result.manifest = manifest;
  if (opts.write_files) write_text(out / "manifest.json", manifest.dump(2) + "\n");
  return result;
}

// ---------------------------------------------------------------------------
// validate / qcrb

namespace {

CheckResult check(std::string name, double residual, double tolerance) {
  return {std::move(name), residual, tolerance, std::isfinite(residual) && residual <= tolerance};
}

double relative(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

circuit::NoiseAssignment ising_noise(const circuit::TrotterCircuit& c, std::size_t n, std::uint64_t seed) {
  const auto templ = noise::default_template(n);
  return circuit::assign_ising_noise(c, noise::calibrate_rates(templ, 1.140, seed),
                                     noise::calibrate_rates(templ, 1.137, seed + 1), circuit::NoisePlacement::Parity);
}

pauli::CMatrix random_state(std::size_t n, std::mt19937_64& gen, double mix) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  std::normal_distribution<double> g;
  pauli::CMatrix a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = {g(gen), g(gen)};
  pauli::CMatrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return (1.0 - mix) * rho + mix * pauli::CMatrix::Identity(dim, dim) / static_cast<double>(dim);
}

pauli::CMatrix random_unitary(std::size_t n, std::mt19937_64& gen) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  std::normal_distribution<double> g;
  pauli::CMatrix a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = {g(gen), g(gen)};
  Eigen::HouseholderQR<pauli::CMatrix> qr(a);
  return qr.householderQ();
}

}  // namespace

std::vector<CheckResult> qcrb_checks(std::uint64_t seed, std::size_t noiseless_instances,
                                     std::size_t noisy_instances) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g;
  double worst_clean = 0.0, worst_noisy = 0.0;
  for (std::size_t k = 0; k < noiseless_instances; ++k) {
    const std::size_t n = 1 + k % 2;
    const auto rho = random_state(n, gen, 0.01 + 0.05 * static_cast<double>(k % 5));
    Eigen::VectorXd x((Eigen::Index{1} << (2 * n)) - 1);
    for (auto& v : x) v = g(gen);
    const double copies = 1.0 + static_cast<double>(k % 10);
    const double direct = qcrb::variance_direct(qcrb::observable(n, x), rho, copies);
    worst_clean = std::max(worst_clean, relative(qcrb::qcrb_noiseless(x, qcrb::bloch(rho), copies), direct));
  }
  for (std::size_t k = 0; k < noisy_instances; ++k) {
    const std::size_t n = 1 + k % 2;
    const auto rho = random_state(n, gen, 0.01 + 0.05 * static_cast<double>(k % 3));
    Eigen::VectorXd x((Eigen::Index{1} << (2 * n)) - 1);
    for (auto& v : x) v = g(gen);
    std::uniform_real_distribution<double> u(0.0, 0.15);
    std::vector<noise::LindbladGenerator> gens;
    for (const auto& p : noise::default_template(n)) gens.push_back({p, u(gen)});
    const noise::NoiseLayer layer(n, gens);
    const auto un = random_unitary(n, gen);
    const pauli::Superoperator ch = [&](const pauli::CMatrix& r) {
      return noise::apply_dense(layer, pauli::CMatrix(un * r * un.adjoint()));
    };
    // Affine Bloch action θ' = Aθ + c from the normalized-basis PTM.
    const Eigen::MatrixXd full = pauli::ptm_matrix(ch, n).entries;
    const Eigen::Index d = full.rows();
    const Eigen::MatrixXd a = full.bottomRightCorner(d - 1, d - 1);
    const Eigen::VectorXd cvec = full.col(0).tail(d - 1) * std::pow(2.0, static_cast<double>(n) / 2.0);
    const Eigen::VectorXd y = a.transpose().fullPivLu().solve(x);
    const auto sur = qcrb::observable(n, y, -cvec.dot(y));
    const double copies = 2.0 + static_cast<double>(k % 7);
    const double direct = qcrb::variance_direct(sur, ch(rho), copies);
    worst_noisy = std::max(worst_noisy, relative(qcrb::qcrb_noisy(x, qcrb::bloch(rho), a, cvec, copies), direct));
  }
  return {check("qcrb noiseless saturation (" + std::to_string(noiseless_instances) + " instances)", worst_clean, 1e-9),
          check("qcrb noisy saturation (" + std::to_string(noisy_instances) + " instances)", worst_noisy, 1e-9)};
}

std::vector<CheckResult> validate(std::uint64_t seed) {
  std::vector<CheckResult> out;
  std::mt19937_64 gen(seed);
  {
    const std::size_t n = 3;
    const auto c = circuit::build_ising_circuit(n, 2, {});
    const auto na = ising_noise(c, n, seed);
    auto st = mitigation::middle_out_init(n, 4096, 0.0);
    for (std::size_t k = 0; k < 2; ++k) st = mitigation::advance_trotter_step(std::move(st), c, na, k);
    const auto o = mitigation::dense_channel_oracle(c, na, 2);
    const Eigen::MatrixXd inv = o.inverse_adjoint();
    out.push_back(check("middle-out MPO equals dense inverse adjoint (n=3, 2 steps)",
                        (tensor::to_dense(st.mpo).entries - inv).cwiseAbs().maxCoeff(), 1e-9));
    const PauliString z = PauliString::uniform(n, pauli::Letter::Z);
    const auto ideal = mitigation::dense_evolve(c, na, 2, false);
    const double exact = (ideal * pauli::dense_matrix(z)).trace().real();
    const auto noisy = sim::evolve(c, na, 0, 0.0, 2, true);
    out.push_back(check("APC on the noisy state equals the ideal <ZZZ>",
                        std::abs(mitigation::apc_expectation(mitigation::surrogate_column(st, z), noisy.mps) - exact),
                        1e-8));
    const auto k = static_cast<Eigen::Index>(pauli::index_of(z).value);
    out.push_back(check("DCA coefficient equals the oracle diagonal",
                        std::abs(mitigation::dca_coefficient(st, z) - inv(k, k)), 1e-9));
    const Eigen::VectorXd rho_ptm = pauli::ptm_vector(mitigation::dense_evolve(c, na, 2, true)).entries;
    out.push_back(check("noisy MPS evolution equals the density-matrix oracle",
                        (tensor::to_dense(noisy.mps).entries - rho_ptm).cwiseAbs().maxCoeff(), 1e-9));
  }
  {
    const std::size_t n = 6;
    const auto c = circuit::build_ising_circuit(n, 1, {});
    const auto na = ising_noise(c, n, seed);
    const auto st = mitigation::advance_trotter_step(mitigation::middle_out_init(n, 0, 0.0), c, na, 0);
    const PauliString p("ZXZYZZ");
    const Eigen::VectorXd col = mitigation::column_coefficients(mitigation::surrogate_column(st, p));
    out.push_back(check("surrogate column equals the full-vector oracle (n=6)",
                        (col - mitigation::dense_surrogate_column(c, na, 1, p)).cwiseAbs().maxCoeff(), 1e-10));
  }
  {
    const auto templ4 = noise::default_template(4);
    const auto layer = noise::calibrate_rates(templ4, 1.14, seed);
    const auto prod = tensor::compose_mpo(noise::to_mpo(layer, false), noise::to_mpo(layer, true));
    out.push_back(check("channel times inverse is the identity (n=4 dense)",
                        (tensor::to_dense(prod).entries - Eigen::MatrixXd::Identity(256, 256)).cwiseAbs().maxCoeff(),
                        1e-12));
    const auto big = noise::calibrate_rates(noise::default_template(10), 1.14, seed);
    const auto prod10 = tensor::compose_mpo(noise::to_mpo(big, false), noise::to_mpo(big, true));
    std::uniform_int_distribution<int> letter(0, 3);
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
      std::vector<pauli::Letter> a(10), b(10);
      for (auto& l : a) l = static_cast<pauli::Letter>(letter(gen));
      for (auto& l : b) l = static_cast<pauli::Letter>(letter(gen));
      const PauliString pa(a), pb(b);
      worst = std::max(worst, std::abs(tensor::element(prod10, pa, pa) - 1.0));
      if (pa != pb) worst = std::max(worst, std::abs(tensor::element(prod10, pa, pb)));
    }
    out.push_back(check("channel times inverse is the identity (n=10, 100 sampled Paulis)", worst, 1e-12));
  }
  {
    double worst = 0.0;
    for (std::size_t n = 2; n <= 3; ++n) {
      const auto c = circuit::build_ising_circuit(n, 2, {});
      const auto na = ising_noise(c, n, seed);
      for (std::size_t s = 1; s <= 2; ++s) {
        const auto o = mitigation::dense_channel_oracle(c, na, s);
        worst = std::max(worst, o.c.cwiseAbs().maxCoeff());
        const auto sur = o.exact_surrogate(target_vector(PauliString::uniform(n, pauli::Letter::Z)));
        worst = std::max(worst, std::abs(sur.y0));
      }
    }
    out.push_back(check("Pauli-noise circuits are unital (c = 0, y0 = 0)", worst, 1e-12));
  }
  {
    const auto templ = noise::default_template(10);
    const double a = noise::gamma(noise::calibrate_rates(templ, 1.140, seed));
    const double b = noise::gamma(noise::calibrate_rates(templ, 1.137, seed + 1));
    out.push_back(check("calibrated layer gammas 1.140 and 1.137", std::max(std::abs(a - 1.140), std::abs(b - 1.137)),
                        1e-9));
  }
  for (auto& r : qcrb_checks(seed)) out.push_back(std::move(r));
  {
    json bad = {{"n", 2}, {"noise", json::array({{{"rates", json::array({{{"pauli", "XI"}, {"rate", -0.1}}})}},
                                                   {{"target_gamma", 1.1}}})}};
    bool rejected = false;
    try {
      parse_config(bad);
    } catch (const ConfigError& e) {
      rejected = e.field().find("rate") != std::string::npos;
    }
    out.push_back(check("negative noise rate is rejected with a field diagnostic", rejected ? 0.0 : 1.0, 0.0));
  }
  return out;
}

std::string checks_csv(const std::vector<CheckResult>& checks) {
  std::ostringstream os;
  os << "check,residual,tolerance,passed\n";
  for (const auto& c : checks)
    os << '"' << c.name << "\"," << format_number(c.residual) << ',' << format_number(c.tolerance) << ','
       << (c.passed ? "pass" : "fail") << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// diagnose / calibrate

mitigation::ColumnDiagnostics diagnose(const ExperimentConfig& cfg, tensor::Index chi, std::size_t step,
                                       const Observable& obs, bool write_files) {
  mitigation::MiddleOutState st;
  if (step == 0) {
    st = mitigation::middle_out_init(cfg.n, chi, cfg.tol, cfg.svd);
  } else {
    const fs::path stem = checkpoint_stem(cfg.output, chi, step);
    if (!fs::exists(stem.string() + ".json") || !fs::exists(stem.string() + ".bin"))
      throw std::runtime_error("missing checkpoint " + stem.string() + " (run the experiment first)");
    st = mitigation::load_checkpoint(stem.string()).first;
    if (st.n() != cfg.n) throw std::runtime_error("checkpoint qubit count does not match the configuration");
  }
  auto d = mitigation::column_diagnostics(st, obs.pauli);
  // The identity map at step 0 has no off-diagonal entries to export.
  if (step == 0) d.off_diagonal.clear();
  if (write_files) {
    const fs::path out = cfg.output;
    fs::create_directories(out);
    const std::string stem = "diagnose_" + slug(obs.label) + "_chi" + std::to_string(chi) + "_step" + std::to_string(step);
    json j;
    j["observable"] = obs.label;
    j["pauli"] = obs.pauli.str();
    j["step"] = step;
    j["chi_max"] = chi;
    j["diagonal"] = d.diagonal;
    j["max_off_diagonal"] = d.max_off_diagonal;
    j["argmax"] = d.argmax.str();
    j["dominance_ratio"] = d.dominance_ratio ? json(*d.dominance_ratio) : json(nullptr);
    j["exact"] = d.exact;
    j["off_diagonal_count"] = d.off_diagonal.size();
    write_text(out / (stem + ".json"), j.dump(2) + "\n");
    if (cfg.n <= mitigation::kMaxGammaQubits) {
      std::ostringstream os;
      os << "pauli,value\n";
      const auto target = pauli::index_of(obs.pauli).value;
      std::size_t next = 0;
      for (std::uint64_t k = 1; k < (std::uint64_t{1} << (2 * cfg.n)) && next < d.off_diagonal.size(); ++k) {
        if (k == target) continue;
        os << pauli::pauli_of(pauli::PauliIndex{k}, cfg.n).str() << ',' << format_number(d.off_diagonal[next++])
           << '\n';
      }
      write_text(out / (stem + "_offdiag.csv"), os.str());
    }
  }
  return d;
}

json noise_file(const ExperimentConfig& cfg) {
  const auto models = build_noise_models(cfg);
  json j;
  j["n"] = cfg.n;
  json list = json::array();
  for (std::size_t i = 0; i < models.size(); ++i) {
    json m;
    m["label"] = models[i].label();
    if (cfg.noise[i].target_gamma) {
      m["target_gamma"] = *cfg.noise[i].target_gamma;
      m["seed"] = cfg.noise[i].seed ? *cfg.noise[i].seed : cfg.noise_seed + i;
    }
    m["gamma"] = noise::gamma(models[i]);
    json rates = json::array();
    for (const auto& g : models[i].generators()) rates.push_back({{"pauli", g.pauli.str()}, {"rate", g.rate}});
    m["rates"] = rates;
    list.push_back(m);
  }
  j["models"] = list;
  return j;
}

std::string calibrate(const ExperimentConfig& cfg, const fs::path& path) {
  const std::string text_out = noise_file(cfg).dump(2) + "\n";
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_text(path, text_out);
  return text_out;
}

}  // namespace premit::experiment
