#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace bdlab {

struct ExperimentConfig {
  std::string name;
  std::uint64_t seed = 20260824;
  std::size_t replicas = 0;  // 0 = experiment default
  std::size_t path_n = 2048;
  std::size_t n_base = 1024;
  double sigma_min = 1e-5;
  double m_per_unit = 512.0;
  std::vector<double> eps_list;
  double delta = 0.1;
  double radius = 0.3;
  int window_a = 0;
  int window_b = 1;
  int window_half_width = 3;
  std::size_t forest_replicas = 20000;
  std::size_t bins = 40;
  double x = 1.0;
  double eps = 0.2;
  std::size_t threads = 1;
  std::map<std::string, double> tolerances;
};

// Experiment defaults (replicas, eps lists, named tolerance bands).
ExperimentConfig default_config(const std::string& name);
std::vector<std::string> experiment_names();

struct Estimate {
  std::string name;
  double param = 0.0;
  double value = 0.0;
  double se = 0.0;
};

struct Verdict {
  std::string name;
  std::string tolerance;  // named band from the config
  double measured = 0.0;
  bool pass = false;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<Estimate> estimates;
  std::vector<Verdict> verdicts;
  double wall_seconds = 0.0;

  bool passed() const;
  const Estimate& estimate(const std::string& name, double param) const;
  const Verdict& verdict(const std::string& name) const;
};

ExperimentReport run_ceps(const ExperimentConfig& cfg);
ExperimentReport run_boundary_measure(const ExperimentConfig& cfg);
ExperimentReport run_tv_bridge(const ExperimentConfig& cfg);
ExperimentReport run_kappa(const ExperimentConfig& cfg);
ExperimentReport run_halfplane_equiv(const ExperimentConfig& cfg);
ExperimentReport run_time_reversal_getoor(const ExperimentConfig& cfg);

// Dispatch by cfg.name.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// JSON report plus a CSV estimates table under `dir`; deterministic content
// (wall time is kept in memory only so identical runs write identical files).
void write_report(const ExperimentReport& report, const std::string& dir);

}  // namespace bdlab
