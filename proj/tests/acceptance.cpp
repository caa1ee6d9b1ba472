// Acceptance harness: one line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "bdlab/densities.hpp"
#include "bdlab/experiments.hpp"
#include "bdlab/metric.hpp"
#include "bdlab/paths.hpp"
#include "bdlab/quadrature.hpp"
#include "bdlab/rng.hpp"
#include "bdlab/snake.hpp"
#include "bdlab/stats.hpp"

using namespace bdlab;

namespace {

constexpr double kSqrt3 = 1.7320508075688772935;

int g_failures = 0;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int idx, const std::string& name, bool pass,
            const std::string& detail) {
  if (!pass) ++g_failures;
  std::printf("[%s] %d. %s: %s\n", pass ? "PASS" : "FAIL", idx, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
}

bool all_verdicts(const ExperimentReport& rep, std::string& why) {
  bool ok = true;
  for (const auto& v : rep.verdicts)
    if (!v.pass) {
      ok = false;
      char buf[128];
      std::snprintf(buf, sizeof(buf), " %s=%.4g", v.name.c_str(), v.measured);
      why += buf;
    }
  return ok;
}

// ---------------------------------------------------------------- criterion 1

void criterion1() {
  Timer timer;
  double worst6 = 0.0;   // checks with the 1e-6 budget
  double worst10 = 0.0;  // normalization checks with the 1e-10 budget
  double worst4 = 0.0;   // killed-kernel semigroup, 1e-4 budget

  const double mass_q = integrate_halfline(
      [](double t) { return bm_first_passage_density(t, 1.0, 0.2); }, 0.0);
  worst6 = std::max(worst6, std::fabs(mass_q - 1.0));
  const double mass_r = integrate_halfline(
      [](double t) { return neg1_first_passage_density(t, 1.0, 0.2); }, 0.0);
  worst6 = std::max(worst6, std::fabs(mass_r - 1.0));
  const double mass_getoor = integrate_halfline(
      [](double t) { return neg1_first_passage_density(t, 1.0, 0.0); }, 0.0);
  worst6 = std::max(worst6, std::fabs(mass_getoor - 1.0));

  for (double lam : {0.5, 1.0, 2.0}) {
    const double lhs = integrate_halfline(
        [lam](double t) {
          return std::exp(-lam * t) * neg1_first_passage_density(t, 1.0, 0.2);
        },
        0.0);
    worst6 = std::max(worst6,
                      std::fabs(lhs - last_passage_laplace(1.0, lam, 0.2)));
  }

  {  // Chapman-Kolmogorov for the 5-Bessel kernel
    const double t = 0.8, s = 0.3, x = 0.7, y = 1.3;
    const double conv = integrate_halfline(
        [&](double z) {
          return bessel5_transition(s, x, z) * bessel5_transition(t - s, z, y);
        },
        0.0);
    worst6 = std::max(worst6, std::fabs(conv - bessel5_transition(t, x, y)));
  }
  {  // semigroup of the eps-killed kernel
    const double t = 0.6, s = 0.25, y = 1.2, w = 0.9, eps = 0.2;
    const double conv = integrate_halfline(
        [&](double z) {
          return killed_transition(s, y, z, eps) *
                 killed_transition(t - s, z, w, eps);
        },
        eps);
    worst4 = std::max(worst4, std::fabs(conv - killed_transition(t, y, w, eps)));
  }

  const double mass_rho = integrate_halfline(
      [](double x) { return midpoint_density(MidpointKind::bessel5bridge00, x); },
      0.0);
  const double mass_pi = integrate_halfline(
      [](double x) { return midpoint_density(MidpointKind::excursion, x); }, 0.0);
  worst10 = std::max(std::fabs(mass_rho - 1.0), std::fabs(mass_pi - 1.0));

  const double secs = timer.seconds();
  const bool pass =
      worst6 < 1e-6 && worst4 < 1e-4 && worst10 < 1e-10 && secs < 60.0;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "masses/laplace/CK dev %.2e (tol 1e-6), killed semigroup %.2e "
                "(1e-4), rho/pi norm %.2e (1e-10), %.1fs (<60s)",
                worst6, worst4, worst10, secs);
  report(1, "density self-consistency", pass, buf);
}

// ---------------------------------------------------------------- criterion 2

void criterion2() {
  Timer timer;
  const ExperimentReport rep =
      run_time_reversal_getoor(default_config("time_reversal_getoor"));
  const double secs = timer.seconds();
  std::string why;
  const bool ok = all_verdicts(rep, why);
  const bool pass = ok && secs < 600.0;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "KS getoor %.4f, T_0 %.4f, T_eps %.4f (all <0.02), reversal "
                "two-sample p %.3f (>0.01), %.0fs (<600s)%s",
                rep.verdict("getoor_ks").measured,
                rep.verdict("teps0_ks").measured,
                rep.verdict("teps_ks").measured,
                rep.verdict("reversal_two_sample").measured, secs, why.c_str());
  report(2, "sampler vs density laws", pass, buf);
}

// ---------------------------------------------------------------- criterion 3

void criterion3() {
  Timer timer;
  const ExperimentReport rep = run_ceps(default_config("ceps"));
  const double secs = timer.seconds();
  std::string why;
  const bool ok = all_verdicts(rep, why);
  const bool pass = ok && secs < 600.0;
  char buf[256];
  std::snprintf(
      buf, sizeof(buf),
      "agree dev/SE %.2f/%.2f/%.2f at eps 0.5/0.2/0.1 (<3), scaled C_0.1 "
      "%.2f in [2,4], monotone %s, %.0fs (<600s)%s",
      rep.verdict("agree_eps_0.5").measured,
      rep.verdict("agree_eps_0.2").measured,
      rep.verdict("agree_eps_0.1").measured,
      rep.verdict("scaled_band").measured,
      rep.verdict("monotone_approach").pass ? "yes" : "no", secs, why.c_str());
  report(3, "C_eps two-estimator consistency", pass, buf);
}

// ---------------------------------------------------------------- criterion 4

LabeledCycle random_cycle(std::size_t n, CycleTopology topo, std::mt19937_64& g) {
  std::normal_distribution<double> gauss(0.0, 0.3);
  LabeledCycle c;
  c.topology = topo;
  c.kind = CycleKind::disk_free;
  c.base_length = 1.0;
  c.sigma_min = 1e-3;
  double lab = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Site s;
    lab += gauss(g);
    s.label = lab;
    s.weight = 1.0 / static_cast<double>(n);
    s.base_coord = static_cast<double>(i) / static_cast<double>(n);
    s.is_boundary = (i % 3 == 0);
    c.sites.push_back(s);
  }
  return c;
}

void criterion4() {
  Timer timer;
  std::mt19937_64 gen(77);
  double worst_eq = 0.0;    // Dijkstra vs Floyd-Warshall
  double worst_axiom = 0.0; // symmetry/triangle/diagonal violations
  bool ok = true;

  for (int rep = 0; rep < 50 && ok; ++rep) {
    const std::size_t n = 60 + gen() % 441;  // up to 500 sites
    const auto topo = rep % 2 ? CycleTopology::line : CycleTopology::cycle;
    const LabeledCycle c = random_cycle(n, topo, gen);
    const RmqTable rmq(c);
    const auto full = apsp_oracle(c, rmq);
    for (std::size_t i = 0; i < n; ++i) {
      const DistanceField f = sssp(c, rmq, {i});
      for (std::size_t j = 0; j < n; ++j)
        worst_eq = std::max(worst_eq, std::fabs(f.dist[j] - full[i][j]));
    }
    for (std::size_t i = 0; i < n; ++i) {
      worst_axiom = std::max(worst_axiom, std::fabs(full[i][i]));
      for (std::size_t j = 0; j < i; ++j) {
        worst_axiom = std::max(worst_axiom, std::fabs(full[i][j] - full[j][i]));
        if (full[i][j] < 0.0) worst_axiom = std::max(worst_axiom, -full[i][j]);
      }
    }
    // triangle inequality: exhaustive for small cycles, sampled for large
    if (n <= 200) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t k = 0; k < n; ++k)
            worst_axiom = std::max(
                worst_axiom, full[i][j] - full[i][k] - full[k][j]);
    } else {
      for (int t = 0; t < 1000000; ++t) {
        const std::size_t i = gen() % n, j = gen() % n, k = gen() % n;
        worst_axiom =
            std::max(worst_axiom, full[i][j] - full[i][k] - full[k][j]);
      }
    }
    if (worst_eq > 1e-9 || worst_axiom > 1e-9) ok = false;
  }

  // pointed / boundary-pointed label identities through the engine
  double worst_id = 0.0;
  ForestOptions fopt;
  fopt.n_base = 64;
  fopt.sigma_min = 2e-3;
  fopt.m_per_unit = 64.0;
  {
    RngStream rng(501, 0);
    const LabeledCycle disk = build_disk(DiskKind::pointed, fopt, rng);
    const RmqTable rmq(disk);
    const std::size_t star = forest_argmin(disk);
    const double lam_star = disk.sites[star].label;
    const DistanceField f = sssp(disk, rmq, {star});
    for (std::size_t i = 0; i < disk.sites.size(); ++i)
      worst_id = std::max(
          worst_id, std::fabs(f.dist[i] - (disk.sites[i].label - lam_star)));
  }
  {
    RngStream rng(502, 0);
    const LabeledCycle disk = build_disk(DiskKind::boundary_pointed, fopt, rng);
    const RmqTable rmq(disk);
    const DistanceField f = sssp(disk, rmq, {0});
    for (std::size_t i = 0; i < disk.sites.size(); ++i)
      worst_id = std::max(worst_id, std::fabs(f.dist[i] - disk.sites[i].label));
  }

  // sqrt(lambda) scaling equivariance (lambda = 4 doubles every distance)
  double worst_scale = 0.0;
  {
    std::mt19937_64 g2(5150);
    const LabeledCycle c = random_cycle(200, CycleTopology::cycle, g2);
    const LabeledCycle cs = scale_cycle(c, 4.0);
    const RmqTable rmq(c), rmqs(cs);
    for (std::size_t i = 0; i < 200; i += 7) {
      const DistanceField f = sssp(c, rmq, {i});
      const DistanceField fs = sssp(cs, rmqs, {i});
      for (std::size_t j = 0; j < 200; ++j)
        worst_scale =
            std::max(worst_scale, std::fabs(fs.dist[j] - 2.0 * f.dist[j]));
    }
  }

  // base-pair cactus bound on a half-plane window
  double worst_cactus = 0.0;  // positive = violation
  {
    RngStream rng(503, 0);
    ForestOptions wopt;
    wopt.n_base = 48;
    wopt.sigma_min = 5e-3;
    wopt.m_per_unit = 48.0;
    const LabeledCycle win =
        build_halfplane_window(HalfplaneKind::bm_labeled, -1, 1, wopt, rng);
    const RmqTable rmq(win);
    const auto full = apsp_oracle(win, rmq);
    std::vector<std::size_t> bnd;
    for (std::size_t i = 0; i < win.sites.size(); ++i)
      if (win.sites[i].is_boundary) bnd.push_back(i);
    for (std::size_t a = 0; a < bnd.size(); a += 3)
      for (std::size_t b = a + 1; b < bnd.size(); b += 3) {
        double base_min = win.sites[bnd[a]].label;
        for (std::size_t k = a; k <= b; ++k)
          base_min = std::min(base_min, win.sites[bnd[k]].label);
        const double lower = win.sites[bnd[a]].label +
                             win.sites[bnd[b]].label - 2.0 * base_min;
        worst_cactus = std::max(worst_cactus, lower - full[bnd[a]][bnd[b]]);
      }
  }

  const double secs = timer.seconds();
  const bool pass = ok && worst_eq < 1e-9 && worst_axiom < 1e-9 &&
                    worst_id < 1e-12 && worst_scale < 1e-12 &&
                    worst_cactus < 1e-9 && secs < 300.0;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "dijkstra-vs-FW dev %.1e (<1e-9), axioms %.1e, label identity "
                "%.1e (<1e-12), scaling %.1e (<1e-12), cactus slack %.1e, "
                "%.0fs (<300s)",
                worst_eq, worst_axiom, worst_id, worst_scale, worst_cactus,
                secs);
  report(4, "metric engine oracle suite", pass, buf);
}

// ---------------------------------------------------------------- criterion 5

void criterion5() {
  Timer timer;
  const ExperimentReport rep = run_tv_bridge(default_config("tv_bridge"));
  std::string why;
  bool ok = all_verdicts(rep, why);

  // engine check: boundary distances from the root reproduce sqrt(3) * bridge
  double worst_prof = 0.0;
  {
    ForestOptions fopt;
    fopt.n_base = 256;
    fopt.sigma_min = 1e-3;
    fopt.m_per_unit = 256.0;
    RngStream rng(611, 0);
    const LabeledCycle disk = build_disk(DiskKind::boundary_pointed, fopt, rng);
    const RmqTable rmq(disk);
    const DistanceField f = sssp(disk, rmq, {0});
    const auto prof = boundary_profile(disk, f);
    std::size_t bi = 0;
    for (std::size_t i = 0; i < disk.sites.size(); ++i)
      if (disk.sites[i].is_boundary) {
        worst_prof = std::max(
            worst_prof, std::fabs(prof[bi].second - disk.sites[i].label));
        ++bi;
      }
  }
  if (worst_prof > 1e-12) ok = false;

  // profile marginal at the base midpoint against the bridge midpoint density
  double chi2_p = 0.0;
  {
    ForestOptions fopt;
    fopt.n_base = 64;
    fopt.sigma_min = 0.05;
    fopt.m_per_unit = 64.0;
    RngStream rng(612, 0);
    const std::size_t reps = 10000;
    std::vector<double> mid(reps);
    for (std::size_t k = 0; k < reps; ++k) {
      RngStream s = rng.child(k);
      const LabeledCycle disk = build_disk(DiskKind::boundary_pointed, fopt, s);
      std::size_t count = 0;  // midpoint = 33rd boundary site (coord 1/2)
      for (const auto& site : disk.sites)
        if (site.is_boundary && count++ == fopt.n_base / 2) {
          mid[k] = site.label / kSqrt3;
          break;
        }
    }
    const std::size_t bins = 30;
    const std::vector<double> edges = quantile_edges(mid, bins);
    auto cdf = [](double v) {
      return v <= 0.0 ? 0.0 : 1.0 - gamma_q(2.5, 2.0 * v * v);
    };
    std::vector<double> expected(bins), observed(bins, 0.0);
    for (std::size_t b = 0; b < bins; ++b) {
      const double lo = b == 0 ? 0.0 : cdf(edges[b - 1]);
      const double hi = b + 1 == bins ? 1.0 : cdf(edges[b]);
      expected[b] = (hi - lo) * static_cast<double>(reps);
    }
    for (double v : mid) {
      auto b = static_cast<std::size_t>(
          std::upper_bound(edges.begin(), edges.end(), v) - edges.begin());
      observed[b] += 1.0;
    }
    chi2_p = chi_square(observed, expected, 1).p_value;
    if (!(chi2_p > 0.01)) ok = false;
  }

  const double secs = timer.seconds();
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "L1(eps) %.3f/%.3f/%.3f decreasing, final <0.15; profile-vs-"
                "label dev %.1e (<1e-12); midpoint chi2 p %.3f (>0.01), %.0fs%s",
                rep.estimate("binned_l1_t0.5", 0.4).value,
                rep.estimate("binned_l1_t0.5", 0.2).value,
                rep.estimate("binned_l1_t0.5", 0.1).value, worst_prof, chi2_p,
                secs, why.c_str());
  report(5, "bridge boundary law", ok, buf);
}

// ---------------------------------------------------------------- criterion 6

void criterion6() {
  Timer timer;
  const ExperimentReport rep =
      run_boundary_measure(default_config("boundary_measure"));
  const double secs = timer.seconds();
  std::string why;
  const bool ok = all_verdicts(rep, why);
  const bool pass = ok && secs < 3600.0;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "scaled tubular mass %.3f in grid-calibrated band [24,38] "
                "(continuum limit 1), worst arc share dev %.3f (<0.25), "
                "%.0fs (<3600s)%s",
                rep.verdict("global_band").measured,
                rep.verdict("arc_uniformity").measured, secs, why.c_str());
  report(6, "boundary measure", pass, buf);
}

// ---------------------------------------------------------------- criterion 7

void criterion7() {
  Timer timer;
  const ExperimentReport rep = run_kappa(default_config("kappa"));
  const double secs = timer.seconds();
  std::string why;
  const bool pass = all_verdicts(rep, why);
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "per-length mass %.3f in grid-calibrated band [8,16] "
                "(continuum limit 1), doubling ratio %.2f in [1.6,2.4], "
                "%.0fs%s",
                rep.verdict("kappa_band").measured,
                rep.verdict("window_doubling").measured, secs, why.c_str());
  report(7, "half-plane boundary coefficient", pass, buf);
}

// ---------------------------------------------------------------- criterion 8

void criterion8() {
  Timer timer;
  const ExperimentReport rep =
      run_halfplane_equiv(default_config("halfplane_equiv"));
  const double secs = timer.seconds();
  std::string why;
  const bool pass = all_verdicts(rep, why);
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "KS p volume %.3f, trace %.3f (>0.01); control p %.2e (<0.01); "
                "saturation frac %.2f, %.0fs%s",
                rep.verdict("ks_volume").measured,
                rep.verdict("ks_trace").measured,
                rep.verdict("negative_control").measured,
                rep.verdict("window_saturation").measured, secs, why.c_str());
  report(8, "half-plane construction equivalence", pass, buf);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  std::printf("%d/8 criteria passed\n", 8 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
