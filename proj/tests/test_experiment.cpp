#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "premit/experiment.hpp"

using namespace premit::experiment;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("premit_exp_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::string field_of(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

json small(const fs::path& out) {
  return {{"n", 3},          {"steps", 2},      {"chi_max", json::array({0x7fffffff})},
          {"shots", 2000},   {"output", out.string()},
          {"estimators", json::array({"dca", "apc", "noisy", "exact-oracle"})}};
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("defaults describe the benchmark") {
  const auto c = parse_config(json::object());
  CHECK(c.n == 10);
  CHECK(c.steps == 20);
  CHECK(c.J == 0.5236);
  CHECK(c.observables.size() == 1);
  CHECK(c.observables[0].pauli.str() == "ZZZZZZZZZZ");
  REQUIRE(c.noise.size() == 2);
  CHECK(*c.noise[0].target_gamma == 1.140);
  CHECK(*c.noise[1].target_gamma == 1.137);
  CHECK(parse_config(to_json(c)).n == 10);
  CHECK(to_json(parse_config(to_json(c))) == to_json(c));
  CHECK(resolve_observable("R1", 10).pauli.str() == "YZZIYXZIZZ");
  CHECK(resolve_observable("R2", 10).pauli.str() == "IIZIXIXXIX");
}

TEST_CASE("invalid configurations name the offending field") {
  CHECK(field_of({{"n", 1}}) == "n");
  CHECK(field_of({{"steps", -1}}) == "steps");
  CHECK(field_of({{"shots", 0}}) == "shots");
  CHECK(field_of({{"chi_max", json::array({16, 0})}}) == "chi_max[1]");
  CHECK(field_of({{"tol", -1e-3}}) == "tol");
  CHECK(field_of({{"bogus", 1}}) == "bogus");
  CHECK(field_of({{"estimators", json::array({"magic"})}}) == "estimators[0]");
  CHECK(field_of({{"estimators", json::array({"exact-oracle"})}}) == "estimators");
  CHECK(field_of({{"n", 3}, {"observable", "ZZ"}}) == "observable");
  CHECK(field_of({{"n", 3}, {"observable", "III"}}) == "observable");
  CHECK(field_of({{"n", 3}, {"observable", "R1"}}) == "observable");
  CHECK(field_of({{"seeds", {{"noise", -4}}}}) == "seeds.noise");
  CHECK(field_of({{"noise", json::array({{{"target_gamma", 0.9}}, {{"target_gamma", 1.1}}})}}) ==
        "noise[0].target_gamma");
  CHECK(field_of({{"n", 2},
                  {"noise", json::array({{{"rates", json::array({{{"pauli", "XI"}, {"rate", -0.1}}})}},
                                         {{"target_gamma", 1.1}}})}}) == "noise[0].rates[0].rate");
  CHECK(field_of({{"n", 3},
                  {"noise", json::array({{{"rates", json::array({{{"pauli", "XIZ"}, {"rate", 0.1}}})}},
                                         {{"target_gamma", 1.1}}})}}) == "noise[0].rates");
  CHECK(field_of({{"noise", json::array({{{"target_gamma", 1.1}}})}}) == "noise");
  CHECK(field_of({{"noise", json::array({{{"target_gamma", 1.1}, {"rates", json::array()}}, {{"target_gamma", 1.1}}})}}) ==
        "noise[0]");
  CHECK(field_of({{"workers", 0}}) == "workers");
  CHECK(field_of({{"rsvd", {{"oversampling", -1}}}}) == "rsvd.oversampling");
  CHECK(field_of({{"h", "one"}}) == "h");
  CHECK(field_of({{"n", 3}, {"noise_assignment", "cyclic"}, {"noise", json::array({{{"target_gamma", 1.2}}})}}) == "");
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.0, 1.0, -0.125, 1.0 / 3.0, 1e-300, 6.02214076e23}) CHECK(std::stod(format_number(v)) == v);
  CHECK(format_number(2.5) == "2.5");
}

TEST_CASE("estimators agree with the exact oracle at n = 3 without compression") {
  const auto out = scratch("agree");
  auto cfg = parse_config(small(out));
  const auto r = run(cfg, {false, false});
  REQUIRE(r.results.size() == 1);
  const auto& rows = r.results[0].rows;
  CHECK(rows.size() == 3 * 4);
  for (std::size_t step = 0; step <= 2; ++step) {
    const ResultRow *dca = nullptr, *apc = nullptr, *oracle = nullptr, *noisy = nullptr;
    for (const auto& row : rows) {
      if (row.step != step) continue;
      if (row.estimator == Estimator::Dca) dca = &row;
      if (row.estimator == Estimator::Apc) apc = &row;
      if (row.estimator == Estimator::ExactOracle) oracle = &row;
      if (row.estimator == Estimator::Noisy) noisy = &row;
    }
    REQUIRE(dca);
    REQUIRE(apc);
    REQUIRE(oracle);
    REQUIRE(noisy);
    CHECK(apc->mitigated == doctest::Approx(oracle->mitigated).epsilon(1e-8).scale(1.0));
    CHECK(oracle->mitigated == doctest::Approx(oracle->ideal).epsilon(1e-8).scale(1.0));
    CHECK(*apc->gamma_analytic == doctest::Approx(*oracle->gamma_analytic).epsilon(1e-8));
    CHECK(*dca->gamma_analytic >= 1.0);
    CHECK(noisy->shots == 2000);
    CHECK(apc->shots == 0);
    if (step > 0) {
      REQUIRE(dca->gamma_empirical.has_value());
      CHECK(*dca->gamma_empirical == doctest::Approx(*dca->gamma_analytic).epsilon(0.05));
    }
  }
  REQUIRE(r.diagnostics.size() == 3);
  CHECK(r.diagnostics[0].diag.diagonal == 1.0);
}

TEST_CASE("files, header and determinism") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  auto ja = small(a), jb = small(b);
  jb["workers"] = 4;
  ja["observable"] = jb["observable"] = json::array({"Z", "XYZ"});
  run(parse_config(ja));
  run(parse_config(jb));
  for (const char* f : {"results_Z.csv", "results_XYZ.csv", "summary.csv", "diagnostics.csv"}) {
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const auto text = slurp(a / "results_Z.csv");
  CHECK(text.substr(0, text.find('\n')) == kResultsHeader);
  const auto manifest = json::parse(slurp(a / "manifest.json"));
  CHECK(manifest["engine_version"] == kEngineVersion);
  CHECK(manifest["config"]["n"] == 3);
  CHECK(manifest["steps"].size() == 3);
  CHECK(manifest["wall_clock_s"].contains("middle_out"));
  CHECK(fs::exists(checkpoint_stem(a, 0x7fffffff, 2).string() + ".bin"));

  auto jc = small(scratch("det_c"));
  jc["seeds"] = {{"sampling", 8}};
  const auto other = run(parse_config(jc), {false, false});
  const auto same = run(parse_config(small(scratch("det_d"))), {false, false});
  CHECK(other.results[0].rows[4].mitigated != same.results[0].rows[4].mitigated);
}

TEST_CASE("zero steps gives only the initial row") {
  auto j = small(scratch("zero"));
  j["steps"] = 0;
  const auto r = run(parse_config(j));
  CHECK(r.results[0].rows.size() == 4);
  for (const auto& row : r.results[0].rows) {
    CHECK(row.step == 0);
    CHECK(row.ideal == 1.0);
    CHECK(row.mitigated == doctest::Approx(1.0));
    CHECK(row.pec_gamma_theory == 1.0);
  }
}

TEST_CASE("resume reuses checkpoints and rejects a different configuration") {
  const auto out = scratch("resume");
  auto j = small(out);
  j["chi_max"] = json::array({16});
  const auto first = run(parse_config(j));
  const auto before = slurp(out / "results_Z.csv");
  const auto again = run(parse_config(j), {true, true});
  CHECK(slurp(out / "results_Z.csv") == before);
  for (const auto& s : again.manifest["steps"])
    if (s["step"] != 0) CHECK(s["middle_out"]["16"]["resumed"] == true);
  j["h"] = 0.9;
  CHECK_THROWS_AS(run(parse_config(j), {true, true}), std::runtime_error);
}

TEST_CASE("memory cap is enforced before any work") {
  const json j = {{"chi_max", json::array({4096})}, {"memory_cap_mb", 64}, {"output", scratch("cap").string()}};
  CHECK_THROWS_WITH_AS(run(parse_config(j), {false, false}), doctest::Contains("resource cap"), std::runtime_error);
}

TEST_CASE("diagnose reads checkpoints") {
  const auto out = scratch("diag");
  auto j = small(out);
  const auto cfg = parse_config(j);
  const auto obs = cfg.observables[0];
  const auto d0 = diagnose(cfg, 0x7fffffff, 0, obs, true);
  CHECK(d0.diagonal == 1.0);
  CHECK(d0.off_diagonal.empty());
  CHECK_THROWS_AS(diagnose(cfg, 0x7fffffff, 2, obs, false), std::runtime_error);
  run(cfg);
  const auto d2 = diagnose(cfg, 0x7fffffff, 2, obs, true);
  CHECK(d2.off_diagonal.size() == 62);
  CHECK(d2.diagonal > 1.0);
  const auto csv = slurp(out / "diagnose_Z_chi2147483647_step2_offdiag.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 63);
}

TEST_CASE("calibrate is deterministic and meets the targets") {
  const auto out = scratch("cal");
  const auto cfg = parse_config(json::object());
  const auto t1 = calibrate(cfg, out / "a.json");
  const auto t2 = calibrate(cfg, out / "b.json");
  CHECK(t1 == t2);
  CHECK(slurp(out / "a.json") == slurp(out / "b.json"));
  const auto j = json::parse(t1);
  CHECK(j["models"][0]["gamma"].get<double>() == doctest::Approx(1.140).epsilon(1e-9));
  CHECK(j["models"][1]["gamma"].get<double>() == doctest::Approx(1.137).epsilon(1e-9));
  CHECK(j["models"][0]["rates"].size() == 111);

  // A calibrated file feeds back as explicit rates.
  const auto back = parse_config({{"noise", {{"file", (out / "a.json").string()}}}});
  const auto models = build_noise_models(back);
  CHECK(premit::noise::gamma(models[0]) == doctest::Approx(1.140).epsilon(1e-12));

  const auto unit = parse_config({{"noise", json::array({{{"target_gamma", 1.0}}, {{"target_gamma", 1.0}}})}});
  for (const auto& m : noise_file(unit)["models"])
    for (const auto& r : m["rates"]) CHECK(r["rate"].get<double>() == 0.0);
}

TEST_CASE("validate and qcrb suites pass") {
  for (const auto& c : validate(3)) {
    INFO(c.name << " residual " << c.residual);
    CHECK(c.passed);
  }
  for (const auto& c : qcrb_checks(5, 20, 10)) CHECK(c.passed);
}

TEST_CASE("command line") {
  const std::string cli = PREMIT_CLI_PATH;
  const auto out = scratch("cli");
  std::ofstream(out / "cfg.json") << small(out / "run").dump();
  std::ofstream(out / "bad.json") << json({{"n", 3}, {"shots", -5}}).dump();
  auto sh = [&](const std::string& args) {
    return std::system((cli + " " + args + " > " + (out / "log.txt").string() + " 2>&1").c_str());
  };
  CHECK(sh("run --config " + (out / "cfg.json").string() + " --workers 2") == 0);
  CHECK(fs::exists(out / "run" / "results_Z.csv"));
  CHECK(sh("run --config " + (out / "cfg.json").string() + " --resume --seed-override 11") != 0);
  CHECK(sh("run --config " + (out / "cfg.json").string() + " --resume") == 0);
  CHECK(sh("run --config " + (out / "bad.json").string()) != 0);
  CHECK(slurp(out / "log.txt").find("shots") != std::string::npos);
  CHECK(sh("diagnose --config " + (out / "cfg.json").string() + " --step 1 --chi 2147483647") == 0);
  CHECK(sh("calibrate --config " + (out / "cfg.json").string() + " --noise-file " + (out / "n.json").string()) == 0);
  CHECK(fs::exists(out / "n.json"));
  CHECK(sh("qcrb --noiseless 10 --noisy 5") == 0);
  CHECK(sh("bogus") != 0);
}

}  // TEST_SUITE
