#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "premit/experiment.hpp"

namespace ex = premit::experiment;

namespace {

struct Common {
  std::string config;
  std::string output;
  std::size_t workers = 0;
  std::optional<std::uint64_t> seed_override;
};

ex::ExperimentConfig load(const Common& o) {
  auto cfg = o.config.empty() ? ex::parse_config(nlohmann::json::object()) : ex::load_config(o.config);
  if (!o.output.empty()) cfg.output = o.output;
  if (o.workers > 0) cfg.workers = o.workers;
  if (o.seed_override) {
    cfg.noise_seed = *o.seed_override;
    cfg.sampling_seed = *o.seed_override;
  }
  return cfg;
}

void add_common(CLI::App* app, Common& o, bool need_config) {
  auto* c = app->add_option("--config", o.config, "experiment configuration (JSON)");
  if (need_config) c->required();
  c->check(CLI::ExistingFile);
  app->add_option("--output", o.output, "output directory (overrides the configuration)");
  app->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  app->add_option("--seed-override", o.seed_override, "replace both the noise and the sampling seed");
}

int print_checks(const std::vector<ex::CheckResult>& checks, const std::string& output) {
  bool ok = true;
  for (const auto& c : checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  residual=" << ex::format_number(c.residual)
              << "  tol=" << ex::format_number(c.tolerance) << '\n';
    ok = ok && c.passed;
  }
  if (!output.empty()) {
    std::filesystem::create_directories(output);
    std::ofstream(std::filesystem::path(output) / "checks.csv") << ex::checks_csv(checks);
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pre-processing error mitigation with middle-out tensor networks"};
  app.set_version_flag("--version", std::string(ex::kEngineVersion));
  app.require_subcommand(1);

  Common run_opts;
  bool resume = false;
  auto* run = app.add_subcommand("run", "run an experiment and write results, summary and manifest");
  add_common(run, run_opts, true);
  run->add_flag("--resume", resume, "reuse matching checkpoints in the output directory");

  Common val_opts;
  std::uint64_t val_seed = 1;
  auto* val = app.add_subcommand("validate", "run the oracle check suites");
  val->add_option("--output", val_opts.output, "directory for checks.csv");
  val->add_option("--seed-override", val_opts.seed_override, "seed of the randomized checks");

  Common diag_opts;
  std::size_t diag_step = 0;
  premit::tensor::Index diag_chi = 0;
  std::string diag_obs;
  auto* diag = app.add_subcommand("diagnose", "column diagnostics from a stored checkpoint");
  add_common(diag, diag_opts, true);
  diag->add_option("--step", diag_step, "Trotter step")->required();
  diag->add_option("--chi", diag_chi, "bond cap of the checkpoint (default: first chi_max)");
  diag->add_option("--observable", diag_obs, "observable (default: first configured)");

  Common cal_opts;
  std::string cal_path;
  auto* cal = app.add_subcommand("calibrate", "write explicit noise rates for the configured models");
  add_common(cal, cal_opts, false);
  cal->add_option("--noise-file", cal_path, "destination (default: <output>/noise.json)");

  Common q_opts;
  std::size_t q_clean = 200, q_noisy = 100;
  auto* q = app.add_subcommand("qcrb", "QCRB saturation on random small instances");
  q->add_option("--output", q_opts.output, "directory for checks.csv");
  q->add_option("--seed-override", q_opts.seed_override, "seed of the random instances");
  q->add_option("--noiseless", q_clean, "noiseless instances");
  q->add_option("--noisy", q_noisy, "noisy instances");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto cfg = load(run_opts);
      const auto result = ex::run(cfg, {resume, true});
      for (const auto& s : result.summary)
        std::cout << s.observable << " chi=" << s.chi_max << ' ' << ex::to_string(s.estimator)
                  << " mean|err|=" << ex::format_number(s.mean_abs_error)
                  << " max|err|=" << ex::format_number(s.max_abs_error) << '\n';
      std::cout << "results written to " << cfg.output << '\n';
      return 0;
    }
    if (*val) {
      if (val_opts.seed_override) val_seed = *val_opts.seed_override;
      return print_checks(ex::validate(val_seed), val_opts.output);
    }
    if (*diag) {
      const auto cfg = load(diag_opts);
      const auto chi = diag_chi > 0 ? diag_chi : cfg.chi_max.front();
      const auto obs = diag_obs.empty() ? cfg.observables.front() : ex::resolve_observable(diag_obs, cfg.n);
      const auto d = ex::diagnose(cfg, chi, diag_step, obs, true);
      std::cout << "diagonal=" << ex::format_number(d.diagonal)
                << " max_off_diagonal=" << ex::format_number(d.max_off_diagonal) << " argmax=" << d.argmax.str()
                << " dominance_ratio=" << (d.dominance_ratio ? ex::format_number(*d.dominance_ratio) : "inf")
                << " off_diagonal_values=" << d.off_diagonal.size() << '\n';
      return 0;
    }
    if (*cal) {
      const auto cfg = load(cal_opts);
      const std::filesystem::path path =
          cal_path.empty() ? std::filesystem::path(cfg.output) / "noise.json" : std::filesystem::path(cal_path);
      ex::calibrate(cfg, path);
      for (const auto& m : ex::noise_file(cfg)["models"])
        std::cout << m["label"].get<std::string>() << " gamma=" << ex::format_number(m["gamma"].get<double>()) << '\n';
      std::cout << "noise written to " << path.string() << '\n';
      return 0;
    }
    if (*q) {
      return print_checks(ex::qcrb_checks(q_opts.seed_override.value_or(1), q_clean, q_noisy), q_opts.output);
    }
  } catch (const ex::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
