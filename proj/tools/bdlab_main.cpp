#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bdlab/cycle_io.hpp"
#include "bdlab/densities.hpp"
#include "bdlab/errors.hpp"
#include "bdlab/experiments.hpp"
#include "bdlab/metric.hpp"
#include "bdlab/snake.hpp"
#include "json.hpp"

namespace {

using bdlab::ConfigError;
using bdlab::IoError;

bdlab::ExperimentConfig load_config(const std::string& path,
                                    const std::string& fallback_name) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config parse failure in " + path + ": " + e.what());
  }
  const std::string name =
      j.contains("name") ? j.at("name").get<std::string>() : fallback_name;
  if (name.empty()) throw ConfigError("config missing experiment name");
  bdlab::ExperimentConfig cfg = bdlab::default_config(name);

  const std::vector<std::string> known = {
      "name",       "seed",     "replicas",         "path_n",
      "n_base",     "sigma_min", "m_per_unit",      "eps_list",
      "delta",      "radius",   "window_a",         "window_b",
      "window_half_width",      "forest_replicas",  "bins",
      "x",          "eps",      "threads",          "tolerances"};
  for (const auto& item : j.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end())
      throw ConfigError("unknown config key '" + item.key() + "'");
  }
  try {
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("replicas")) cfg.replicas = j.at("replicas").get<std::size_t>();
    if (j.contains("path_n")) cfg.path_n = j.at("path_n").get<std::size_t>();
    if (j.contains("n_base")) cfg.n_base = j.at("n_base").get<std::size_t>();
    if (j.contains("sigma_min")) cfg.sigma_min = j.at("sigma_min").get<double>();
    if (j.contains("m_per_unit")) cfg.m_per_unit = j.at("m_per_unit").get<double>();
    if (j.contains("eps_list"))
      cfg.eps_list = j.at("eps_list").get<std::vector<double>>();
    if (j.contains("delta")) cfg.delta = j.at("delta").get<double>();
    if (j.contains("radius")) cfg.radius = j.at("radius").get<double>();
    if (j.contains("window_a")) cfg.window_a = j.at("window_a").get<int>();
    if (j.contains("window_b")) cfg.window_b = j.at("window_b").get<int>();
    if (j.contains("window_half_width"))
      cfg.window_half_width = j.at("window_half_width").get<int>();
    if (j.contains("forest_replicas"))
      cfg.forest_replicas = j.at("forest_replicas").get<std::size_t>();
    if (j.contains("bins")) cfg.bins = j.at("bins").get<std::size_t>();
    if (j.contains("x")) cfg.x = j.at("x").get<double>();
    if (j.contains("eps")) cfg.eps = j.at("eps").get<double>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<std::size_t>();
    if (j.contains("tolerances"))
      for (const auto& t : j.at("tolerances").items())
        cfg.tolerances[t.key()] = t.value().get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config type mismatch: ") + e.what());
  }
  if (cfg.replicas == 0 && j.contains("replicas"))
    throw ConfigError("constraint violation: replicas must be >= 1");
  return cfg;
}

struct DensityArgs {
  std::string fn;
  double t = 1.0, x = 1.0, y = 1.0, z = 1.0, eps = 0.0, lambda = 1.0;
  std::vector<double> t_list;
  std::string out;
};

double eval_density(const DensityArgs& a, double t) {
  using namespace bdlab;
  if (a.fn == "erfcx") return erfcx(a.x);
  if (a.fn == "q") return bm_first_passage_density(t, a.x, a.eps);
  if (a.fn == "r") return neg1_first_passage_density(t, a.x, a.eps);
  if (a.fn == "p5") return bessel5_transition(t, a.x, a.y);
  if (a.fn == "p") return neg1_transition(t, a.x, a.y);
  if (a.fn == "peps") return killed_transition(t, a.y, a.z, a.eps);
  if (a.fn == "green") return green(a.y, a.z, a.eps);
  if (a.fn == "green_inf") return green(0.0, a.z, a.eps, true);
  if (a.fn == "rho")
    return midpoint_density(MidpointKind::bessel5bridge00, a.x);
  if (a.fn == "pi") return midpoint_density(MidpointKind::excursion, a.x);
  if (a.fn == "snake_min_tail") return snake_min_tail(a.y);
  if (a.fn == "laplace") return last_passage_laplace(a.x, a.lambda, a.eps);
  throw ConfigError("unknown density function '" + a.fn + "'");
}

int dispatch(int argc, char** argv) {
  CLI::App app{"Brownian disk and half-plane simulation laboratory"};
  app.require_subcommand(1);

  // sample-disk
  auto* disk = app.add_subcommand("sample-disk", "sample a labeled disk cycle");
  std::string disk_kind = "pointed";
  bdlab::ForestOptions disk_opt;
  std::uint64_t disk_seed = 1;
  std::string disk_out = "disk.bin";
  disk->add_option("--kind", disk_kind)
      ->check(CLI::IsMember({"pointed", "boundary-pointed"}));
  disk->add_option("--n-base", disk_opt.n_base);
  disk->add_option("--sigma-min", disk_opt.sigma_min);
  disk->add_option("--m-per-unit", disk_opt.m_per_unit);
  disk->add_option("--seed", disk_seed);
  disk->add_option("--out", disk_out)->required();

  // sample-halfplane
  auto* hp = app.add_subcommand("sample-halfplane",
                                "sample a labeled half-plane window");
  std::string hp_kind = "bm";
  bdlab::ForestOptions hp_opt;
  int hp_a = -1, hp_b = 1;
  std::uint64_t hp_seed = 1;
  std::string hp_out = "halfplane.bin";
  hp->add_option("--kind", hp_kind)->check(CLI::IsMember({"bm", "bessel"}));
  hp->add_option("--a", hp_a);
  hp->add_option("--b", hp_b);
  hp->add_option("--n-base", hp_opt.n_base);
  hp->add_option("--sigma-min", hp_opt.sigma_min);
  hp->add_option("--m-per-unit", hp_opt.m_per_unit);
  hp->add_option("--seed", hp_seed);
  hp->add_option("--out", hp_out)->required();

  // density eval
  auto* density = app.add_subcommand("density", "analytic density evaluation");
  auto* deval = density->add_subcommand("eval", "evaluate one function");
  DensityArgs da;
  deval->add_option("--fn", da.fn)->required();
  deval->add_option("--t", da.t);
  deval->add_option("--x", da.x);
  deval->add_option("--y", da.y);
  deval->add_option("--z", da.z);
  deval->add_option("--eps", da.eps);
  deval->add_option("--lambda", da.lambda);
  deval->add_option("--t-list", da.t_list, "grid of t values (CSV emission)");
  deval->add_option("--out", da.out, "CSV path for grid output");

  // distance
  auto* dist = app.add_subcommand("distance", "distance field over a cycle");
  std::string dist_in, dist_out = "distance.csv", dist_source = "argmin";
  std::size_t dist_index = 0;
  dist->add_option("--in", dist_in)->required();
  dist->add_option("--source", dist_source)
      ->check(CLI::IsMember({"argmin", "boundary", "index"}));
  dist->add_option("--index", dist_index);
  dist->add_option("--out", dist_out)->required();

  // experiment
  auto* exp = app.add_subcommand("experiment", "Monte Carlo campaigns");
  auto* list = exp->add_subcommand("list", "list experiment names");
  auto* run = exp->add_subcommand("run", "run one experiment");
  std::string run_name, run_config, run_out = ".";
  std::optional<std::uint64_t> run_seed;
  std::optional<std::size_t> run_replicas, run_threads;
  run->add_option("name", run_name)->required();
  run->add_option("--config", run_config);
  run->add_option("--out", run_out);
  run->add_option("--seed", run_seed);
  run->add_option("--replicas", run_replicas);
  run->add_option("--threads", run_threads);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (disk->parsed()) {
    bdlab::RngStream rng(disk_seed, 0);
    const auto cycle = bdlab::build_disk(
        disk_kind == "pointed" ? bdlab::DiskKind::pointed
                               : bdlab::DiskKind::boundary_pointed,
        disk_opt, rng);
    bdlab::save_cycle(cycle, disk_out);
    std::printf("wrote %s (%zu sites)\n", disk_out.c_str(), cycle.sites.size());
    return 0;
  }
  if (hp->parsed()) {
    bdlab::RngStream rng(hp_seed, 0);
    const auto cycle = bdlab::build_halfplane_window(
        hp_kind == "bm" ? bdlab::HalfplaneKind::bm_labeled
                        : bdlab::HalfplaneKind::bessel_labeled,
        hp_a, hp_b, hp_opt, rng);
    bdlab::save_cycle(cycle, hp_out);
    std::printf("wrote %s (%zu sites)\n", hp_out.c_str(), cycle.sites.size());
    return 0;
  }
  if (deval->parsed()) {
    if (da.t_list.empty()) {
      std::printf("%s\n", bdlab::format_full(eval_density(da, da.t)).c_str());
    } else {
      bdlab::CsvTable table;
      table.header = {"t", "value"};
      for (double t : da.t_list)
        table.rows.push_back({t, eval_density(da, t)});
      if (da.out.empty()) {
        std::printf("t,value\n");
        for (const auto& row : table.rows)
          std::printf("%s,%s\n", bdlab::format_full(row[0]).c_str(),
                      bdlab::format_full(row[1]).c_str());
      } else {
        bdlab::emit_csv(table, da.out);
      }
    }
    return 0;
  }
  if (dist->parsed()) {
    const auto cycle = bdlab::load_cycle(dist_in);
    const bdlab::RmqTable rmq(cycle);
    std::vector<std::size_t> sources;
    if (dist_source == "argmin") {
      sources.push_back(bdlab::forest_argmin(cycle));
    } else if (dist_source == "index") {
      if (dist_index >= cycle.sites.size())
        throw ConfigError("--index out of range");
      sources.push_back(dist_index);
    } else {
      for (std::size_t i = 0; i < cycle.sites.size(); ++i)
        if (cycle.sites[i].is_boundary) sources.push_back(i);
      if (sources.empty()) throw ConfigError("cycle has no boundary sites");
    }
    const auto field = bdlab::sssp(cycle, rmq, sources);
    bdlab::CsvTable table;
    table.header = {"site_index", "base_coord", "label", "distance", "weight"};
    for (std::size_t i = 0; i < cycle.sites.size(); ++i)
      table.rows.push_back({static_cast<double>(i), cycle.sites[i].base_coord,
                            cycle.sites[i].label, field.dist[i],
                            cycle.sites[i].weight});
    bdlab::emit_csv(table, dist_out);
    std::printf("wrote %s\n", dist_out.c_str());
    return 0;
  }
  if (list->parsed()) {
    for (const auto& n : bdlab::experiment_names()) std::printf("%s\n", n.c_str());
    return 0;
  }
  if (run->parsed()) {
    bdlab::ExperimentConfig cfg = run_config.empty()
                                      ? bdlab::default_config(run_name)
                                      : load_config(run_config, run_name);
    if (cfg.name != run_name)
      throw ConfigError("config name '" + cfg.name +
                        "' does not match requested experiment '" + run_name +
                        "'");
    if (run_seed) cfg.seed = *run_seed;
    if (run_replicas) cfg.replicas = *run_replicas;
    if (run_threads) cfg.threads = *run_threads;
    const auto report = bdlab::run_experiment(cfg);
    bdlab::write_report(report, run_out);
    for (const auto& v : report.verdicts)
      std::printf("%s: %s (measured %.6g, tolerance %s)\n", v.name.c_str(),
                  v.pass ? "pass" : "FAIL", v.measured, v.tolerance.c_str());
    std::printf("wall_seconds %.3f\n", report.wall_seconds);
    if (!report.passed()) {
      std::fprintf(stderr, "error: statistical verdicts failed for %s\n",
                   cfg.name.c_str());
      return 3;
    }
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: config: %s\n", e.what());
    return 2;
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: io: %s\n", e.what());
    return 4;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: config: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: runtime: %s\n", e.what());
    return 3;
  }
}
