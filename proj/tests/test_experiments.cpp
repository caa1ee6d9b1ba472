#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bdlab/errors.hpp"
#include "bdlab/experiments.hpp"
#include "json.hpp"

using namespace bdlab;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("every experiment ships a complete default config") {
  const auto names = experiment_names();
  REQUIRE(names.size() == 6);
  for (const auto& n : names) {
    const ExperimentConfig cfg = default_config(n);
    CHECK(cfg.name == n);
    CHECK(cfg.replicas >= 1);
    CHECK(!cfg.tolerances.empty());
  }
  // eps-driven experiments carry nonempty lists
  CHECK(!default_config("ceps").eps_list.empty());
  CHECK(!default_config("tv_bridge").eps_list.empty());
  CHECK(!default_config("boundary_measure").eps_list.empty());
  CHECK(!default_config("kappa").eps_list.empty());
  CHECK_THROWS_AS(default_config("nosuch"), ConfigError);
}

TEST_CASE("config validation rejects out-of-range parameters") {
  ExperimentConfig cfg = default_config("ceps");
  cfg.eps_list = {0.7};
  CHECK_THROWS_AS(run_ceps(cfg), ConfigError);
  cfg.eps_list.clear();
  CHECK_THROWS_AS(run_ceps(cfg), ConfigError);

  cfg = default_config("tv_bridge");
  cfg.delta = 0.6;
  CHECK_THROWS_AS(run_tv_bridge(cfg), ConfigError);

  cfg = default_config("kappa");
  cfg.window_a = 2;
  cfg.window_b = 1;
  CHECK_THROWS_AS(run_kappa(cfg), ConfigError);

  cfg = default_config("halfplane_equiv");
  cfg.radius = 0.0;
  CHECK_THROWS_AS(run_halfplane_equiv(cfg), ConfigError);

  cfg = default_config("time_reversal_getoor");
  cfg.x = 0.1;  // below eps
  CHECK_THROWS_AS(run_time_reversal_getoor(cfg), ConfigError);

  cfg = default_config("ceps");
  cfg.name = "nosuch";
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);

  // a named tolerance missing from the map is a config error too
  cfg = default_config("ceps");
  cfg.tolerances.erase("agree_nsigma");
  cfg.replicas = 50;
  cfg.forest_replicas = 2;
  cfg.path_n = 64;
  cfg.m_per_unit = 256.0;
  CHECK_THROWS_AS(run_ceps(cfg), ConfigError);
}

TEST_CASE("small ceps run: report structure and determinism") {
  ExperimentConfig cfg = default_config("ceps");
  cfg.replicas = 1500;
  cfg.forest_replicas = 40;
  cfg.path_n = 256;
  cfg.n_base = 256;
  cfg.m_per_unit = 4096.0;
  cfg.eps_list = {0.5, 0.25};
  const ExperimentReport rep = run_experiment(cfg);
  for (double e : cfg.eps_list) {
    const Estimate& t = rep.estimate("tilt_ceps", e);
    CHECK(t.value > 0.0);
    CHECK(t.value < 1.0);
    CHECK(t.se > 0.0);
    const Estimate& f = rep.estimate("forest_ceps", e);
    CHECK(f.value >= 0.0);
    CHECK(f.value <= 1.0);
    CHECK(rep.estimate("tilt_scaled_ceps", e).value ==
          doctest::Approx(t.value / (e * e)).epsilon(1e-12));
  }
  // tilt expectation decreases with eps (stronger penalty)
  CHECK(rep.estimate("tilt_ceps", 0.25).value <
        rep.estimate("tilt_ceps", 0.5).value);
  CHECK_NOTHROW(rep.verdict("scaled_band"));
  CHECK_NOTHROW(rep.verdict("monotone_approach"));
  CHECK_NOTHROW(rep.verdict("agree_eps_0.5"));
  CHECK(rep.wall_seconds > 0.0);
  CHECK_THROWS(rep.estimate("tilt_ceps", 0.123));
  CHECK_THROWS(rep.verdict("no_such_verdict"));

  const ExperimentReport rep2 = run_ceps(cfg);
  REQUIRE(rep2.estimates.size() == rep.estimates.size());
  for (std::size_t i = 0; i < rep.estimates.size(); ++i) {
    CHECK(rep2.estimates[i].value == rep.estimates[i].value);
    CHECK(rep2.estimates[i].se == rep.estimates[i].se);
  }
}

TEST_CASE("small tv_bridge run") {
  ExperimentConfig cfg = default_config("tv_bridge");
  cfg.replicas = 300;
  cfg.path_n = 128;
  cfg.bins = 10;
  cfg.eps_list = {0.4, 0.2};
  const ExperimentReport rep = run_experiment(cfg);
  for (double e : cfg.eps_list) {
    const double acc = rep.estimate("acceptance_rate", e).value;
    CHECK(acc > 0.0);
    CHECK(acc <= 1.0);
    const double l1 = rep.estimate("binned_l1_t0.5", e).value;
    CHECK(l1 >= 0.0);
    CHECK(l1 <= 2.0);
  }
  CHECK_NOTHROW(rep.estimate("binned_l1_t0.1", 0.4));
  CHECK_NOTHROW(rep.estimate("binned_l1_t0.9", 0.4));
  CHECK_NOTHROW(rep.verdict("rho_calibration"));
  CHECK_NOTHROW(rep.verdict("l1_decreasing"));
  CHECK_NOTHROW(rep.verdict("l1_final"));
}

TEST_CASE("small kappa run") {
  ExperimentConfig cfg = default_config("kappa");
  cfg.replicas = 5;
  cfg.n_base = 128;
  cfg.sigma_min = 1e-4;
  cfg.m_per_unit = 128.0;
  cfg.eps_list = {0.2, 0.1};
  const ExperimentReport rep = run_experiment(cfg);
  for (double e : cfg.eps_list) {
    CHECK(rep.estimate("window_mass_len1", e).value >= 0.0);
    CHECK(rep.estimate("window_mass_len2", e).value >= 0.0);
  }
  CHECK_NOTHROW(rep.verdict("kappa_band"));
  CHECK_NOTHROW(rep.verdict("window_doubling"));
  CHECK_NOTHROW(rep.verdict("eps_stability"));
}

TEST_CASE("small boundary_measure run") {
  ExperimentConfig cfg = default_config("boundary_measure");
  cfg.replicas = 5;
  cfg.n_base = 256;
  cfg.sigma_min = 1e-5;
  cfg.m_per_unit = 256.0;
  cfg.eps_list = {0.1, 0.05};
  const ExperimentReport rep = run_experiment(cfg);
  CHECK(rep.estimate("scaled_tubular_mass", 0.1).value > 0.0);
  CHECK(rep.estimate("scaled_tubular_mass", 0.05).value > 0.0);
  for (int b = 0; b < 8; ++b)
    CHECK_NOTHROW(rep.estimate("arc_scaled_mass", b));
  CHECK_NOTHROW(rep.verdict("global_band"));
  CHECK_NOTHROW(rep.verdict("arc_uniformity"));
  CHECK_NOTHROW(rep.verdict("eps_stability"));
}

TEST_CASE("small halfplane_equiv run") {
  ExperimentConfig cfg = default_config("halfplane_equiv");
  cfg.replicas = 25;
  cfg.radius = 0.15;
  cfg.window_half_width = 2;
  cfg.n_base = 128;
  cfg.sigma_min = 1e-4;
  cfg.m_per_unit = 128.0;
  cfg.tolerances["sat_replicas"] = 8.0;
  const ExperimentReport rep = run_experiment(cfg);
  CHECK(rep.estimate("ball_volume_bm", 0.0).value > 0.0);
  CHECK(rep.estimate("ball_volume_bessel", 0.0).value > 0.0);
  const double p = rep.estimate("ks_volume_p", 0.0).value;
  CHECK(p >= 0.0);
  CHECK(p <= 1.0);
  CHECK_NOTHROW(rep.verdict("window_saturation"));
  CHECK_NOTHROW(rep.verdict("ks_volume"));
  CHECK_NOTHROW(rep.verdict("ks_trace"));
  CHECK_NOTHROW(rep.verdict("negative_control"));
}

TEST_CASE("small time_reversal_getoor run") {
  ExperimentConfig cfg = default_config("time_reversal_getoor");
  cfg.replicas = 800;
  cfg.tolerances["euler_dt"] = 1e-3;
  cfg.tolerances["horizon"] = 60.0;
  cfg.tolerances["exit_radius"] = 10.0;
  const ExperimentReport rep = run_experiment(cfg);
  CHECK(rep.estimate("unfinished_fraction", 0.0).value <= 0.01);
  CHECK(rep.estimate("ks_getoor", 0.0).value < 0.2);
  CHECK(rep.estimate("ks_teps_0", 0.0).value < 0.2);
  CHECK_NOTHROW(rep.estimate("ks_teps", cfg.eps));
  CHECK_NOTHROW(rep.verdict("reversal_two_sample"));
}

TEST_CASE("report files: json echo, csv table, deterministic bytes") {
  ExperimentConfig cfg = default_config("ceps");
  cfg.replicas = 200;
  cfg.forest_replicas = 10;
  cfg.path_n = 64;
  cfg.n_base = 64;
  cfg.m_per_unit = 512.0;
  cfg.eps_list = {0.5};
  const ExperimentReport rep = run_ceps(cfg);
  const std::string dir = "exp_report_dir";
  write_report(rep, dir);

  const std::string jtext = slurp(dir + "/ceps_report.json");
  const nlohmann::json j = nlohmann::json::parse(jtext);
  CHECK(j["config"]["name"] == "ceps");
  CHECK(j["config"]["seed"] == cfg.seed);
  CHECK(j["config"]["eps_list"].size() == 1);
  CHECK(j["estimates"].size() == rep.estimates.size());
  CHECK(j["verdicts"].size() == rep.verdicts.size());
  CHECK(j["passed"].is_boolean());
  bool found = false;
  for (const auto& e : j["estimates"])
    if (e["name"] == "tilt_ceps") {
      CHECK(e["value"].get<double>() ==
            rep.estimate("tilt_ceps", 0.5).value);
      found = true;
    }
  CHECK(found);

  const std::string ctext = slurp(dir + "/ceps_estimates.csv");
  CHECK(ctext.rfind("name,param,value,se\n", 0) == 0);
  CHECK(ctext.find("tilt_ceps,0.5,") != std::string::npos);

  // identical report, identical bytes
  write_report(rep, "exp_report_dir2");
  CHECK(slurp("exp_report_dir2/ceps_report.json") == jtext);
  CHECK(slurp("exp_report_dir2/ceps_estimates.csv") == ctext);

  std::filesystem::remove_all(dir);
  std::filesystem::remove_all("exp_report_dir2");

  // target blocked by an existing regular file -> io error
  { std::ofstream f("exp_report_file"); f << "x"; }
  CHECK_THROWS_AS(write_report(rep, "exp_report_file/sub"), IoError);
  std::remove("exp_report_file");
}
