#include "bdlab/snake.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bdlab/paths.hpp"

namespace bdlab {

namespace {

constexpr double kSqrt3 = 1.7320508075688772935;
constexpr double kSqrt2Pi = 2.5066282746310005024;

std::uint64_t unit_key(int k) {
  return static_cast<std::uint64_t>(static_cast<std::int64_t>(k));
}

std::size_t tree_grid(double sigma, const ForestOptions& opt) {
  const double m = std::ceil(opt.m_per_unit * sigma);
  return std::max<std::size_t>(8, std::min<std::size_t>(
                                      static_cast<std::size_t>(m), 1u << 18));
}

// Minimum of a Brownian bridge of length span from v0 to v1, sampled by
// inverting P(min <= a) = exp(-2 (v0-a)(v1-a) / span).
double bridge_min(double v0, double v1, double span, RngStream& rng) {
  if (span <= 0.0) return std::min(v0, v1);
  const double lnu = std::log(rng.uniform());
  const double d = v0 - v1;
  return 0.5 * (v0 + v1 - std::sqrt(d * d - 2.0 * span * lnu));
}

// Append the boundary grid and trees (sorted by root time) in exploration
// order: boundary site i, then every tree rooted in [coord_i, coord_{i+1}).
// With `exact` the between-site gap minima are assembled too: tree-internal
// gaps come from SnakeTree::gap_mins, base pieces from piece_min(v0, c0, v1,
// c1), which the builder implements per base-process law (and with per-unit
// streams where window nesting must hold).
template <typename PieceMin>
void assemble(LabeledCycle& cycle, const std::vector<double>& base_labels,
              double first_coord, double grid_step, std::size_t n_sites,
              std::vector<SnakeTree>& trees, bool exact,
              PieceMin&& piece_min) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::sort(trees.begin(), trees.end(),
            [](const SnakeTree& a, const SnakeTree& b) {
              return a.root_time < b.root_time;
            });
  const bool cyclic = cycle.topology == CycleTopology::cycle;
  double pending = kInf;
  auto push_site = [&](const Site& s) {
    if (exact && !cycle.sites.empty()) cycle.gap_min.push_back(pending);
    pending = kInf;
    cycle.sites.push_back(s);
  };
  auto base_piece = [&](double v0, double c0, double v1, double c1) {
    if (!exact) return;
    pending = std::min(pending, piece_min(v0, c0, v1, c1));
  };
  std::size_t next = 0;
  std::int64_t point_base = 0;
  for (std::size_t i = 0; i < n_sites; ++i) {
    Site s;
    s.label = base_labels[i];
    s.is_boundary = true;
    s.base_coord = first_coord + grid_step * static_cast<double>(i);
    push_site(s);
    double pos = s.base_coord;
    double pos_val = s.label;
    const double slot_end = first_coord + grid_step * static_cast<double>(i + 1);
    while (next < trees.size() && trees[next].root_time < slot_end) {
      const SnakeTree& t = trees[next];
      base_piece(pos_val, pos, t.root_label, t.root_time);
      if (exact && !t.corner_label.empty()) {
        // contour corner sequence; repeated visits of one knot share a point
        // id so the metric can pass through interior tree points
        for (std::size_t j = 0; j < t.corner_label.size(); ++j) {
          Site ts;
          ts.label = t.corner_label[j];
          ts.weight = t.corner_weight[j];
          ts.base_coord = t.root_time;
          ts.tree_id = static_cast<std::int64_t>(next);
          ts.point_id = point_base + t.corner_point[j];
          push_site(ts);
          pending = t.corner_gap[j];
        }
        point_base += static_cast<std::int64_t>(t.n_points);
      } else {
        const double w = t.sigma / static_cast<double>(t.m);
        for (std::size_t j = 0; j < t.m; ++j) {
          Site ts;
          ts.label = t.tips[j];
          ts.weight = w;
          ts.base_coord = t.root_time;
          ts.tree_id = static_cast<std::int64_t>(next);
          push_site(ts);
          if (exact && !t.gap_mins.empty()) pending = t.gap_mins[j];
        }
      }
      // pending now holds the final descent back to the root
      pos = t.root_time;
      pos_val = t.root_label;
      ++next;
    }
    if (i + 1 < n_sites)
      base_piece(pos_val, pos, base_labels[i + 1], slot_end);
    else if (cyclic)
      base_piece(pos_val, pos, base_labels[0], slot_end);
  }
  if (exact && cyclic) cycle.gap_min.push_back(pending);
}

}  // namespace

double SnakeTree::min_tip() const {
  double m = tips[0];
  for (double v : tips) m = std::min(m, v);
  return m;
}

double SnakeTree::max_zeta() const {
  double m = 0.0;
  for (double v : zeta) m = std::max(m, v);
  return m;
}

std::vector<TreeSeed> sample_tree_skeleton(double length, double sigma_min,
                                           RngStream& rng) {
  if (!(sigma_min > 0.0)) throw std::invalid_argument("skeleton: sigma_min must be > 0");
  if (!(length > 0.0)) throw std::invalid_argument("skeleton: length must be > 0");
  const double mean = 2.0 * length / (kSqrt2Pi * std::sqrt(sigma_min));
  const std::uint64_t count = rng.poisson(mean);
  std::vector<TreeSeed> seeds(count);
  for (auto& s : seeds) {
    s.root_time = length * rng.uniform();
    const double u = rng.uniform();
    s.sigma = sigma_min / (u * u);
  }
  return seeds;
}

SnakeTree sample_snake_tree(double sigma, std::size_t m, double root_time,
                            double root_label, RngStream& rng,
                            bool exact_minima) {
  if (!(sigma > 0.0) || m < 2)
    throw std::invalid_argument("snake tree: need sigma > 0, m >= 2");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  SnakeTree t;
  t.sigma = sigma;
  t.m = m;
  t.root_time = root_time;
  t.root_label = root_label;

  const PathGrid e = sample_normalized_excursion(m, rng);
  const double hscale = std::sqrt(sigma);
  t.zeta.resize(m + 1);
  for (std::size_t i = 0; i <= m; ++i) t.zeta[i] = hscale * e.values[i];

  // knots along the current ancestral path: (height, label), heights
  // increasing; gap records the contour gap during which the piece ending at
  // this knot was laid down (its ascending traversal), id a stable knot index
  // for the corner bookkeeping
  struct Knot {
    double h;
    double label;
    std::size_t gap;
    std::size_t id;
  };
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  // per-knot records for the corner assembly: heights, the gap whose ascent
  // first reaches the knot, the gap whose descent last leaves it, and the
  // sampled minimum of the final piece ending at the knot from below
  struct KnotRec {
    double h;
    double label;
    std::size_t up_gap;
    std::size_t down_gap;
  };
  std::vector<KnotRec> krec;
  std::vector<double> piece_min_of;  // piece ending at knot id, +inf until popped
  std::vector<std::size_t> valley;   // per gap, knot id at the turning height
  auto new_knot = [&](double h, double label, std::size_t up_gap) {
    if (!exact_minima) return std::size_t{0};
    krec.push_back({h, label, up_gap, kNone});
    piece_min_of.push_back(kInf);
    return krec.size() - 1;
  };
  std::vector<Knot> knots{{0.0, root_label, 0, new_knot(0.0, root_label, 0)}};
  if (exact_minima) {
    t.gap_mins.assign(m, kInf);
    valley.resize(m);
  }
  // every finalized piece is conditionally a Brownian bridge given its knots;
  // its sampled minimum belongs to the gap that laid it down and the gap that
  // pops it off the stack
  auto pop_piece = [&](const Knot& lo, const Knot& hi, std::size_t down_gap) {
    const double v = bridge_min(lo.label, hi.label, hi.h - lo.h, rng);
    t.gap_mins[hi.gap] = std::min(t.gap_mins[hi.gap], v);
    t.gap_mins[down_gap] = std::min(t.gap_mins[down_gap], v);
    piece_min_of[hi.id] = v;
    krec[hi.id].down_gap = down_gap;
  };
  t.tips.resize(m + 1);
  t.tips[0] = root_label;
  for (std::size_t i = 0; i < m; ++i) {
    const double h_next = t.zeta[i + 1];
    const double h_min = std::min(t.zeta[i], h_next);
    // truncate the ancestral path to height h_min
    std::size_t k = knots.size() - 1;
    while (knots[k].h > h_min) --k;
    if (exact_minima)
      for (std::size_t j = knots.size() - 1; j > k + 1; --j)
        pop_piece(knots[j - 1], knots[j], i);
    if (knots[k].h < h_min && k + 1 < knots.size()) {
      // Brownian-bridge value between the bracketing knots
      const Knot lo = knots[k];
      const Knot hi = knots[k + 1];
      const double span = hi.h - lo.h;
      const double frac = (h_min - lo.h) / span;
      const double mean = lo.label + frac * (hi.label - lo.label);
      const double var = (hi.h - h_min) * (h_min - lo.h) / span;
      const double val = mean + std::sqrt(var) * rng.gaussian();
      const Knot split{h_min, val, hi.gap, new_knot(h_min, val, hi.gap)};
      if (exact_minima) pop_piece(split, hi, i);
      knots.resize(k + 1);
      knots.push_back(split);
    } else {
      if (exact_minima && k + 1 < knots.size())
        pop_piece(knots[k], knots[k + 1], i);
      knots.resize(k + 1);
    }
    if (exact_minima) valley[i] = knots.back().id;
    if (h_next > h_min) {
      const double lab =
          knots.back().label + std::sqrt(h_next - h_min) * rng.gaussian();
      knots.push_back({h_next, lab, i, new_knot(h_next, lab, i)});
    }
    t.tips[i + 1] = knots.back().label;
  }
  t.tips[m] = root_label;
  if (exact_minima) {
    for (std::size_t i = 0; i < m; ++i)
      t.gap_mins[i] = std::min({t.gap_mins[i], t.tips[i], t.tips[i + 1]});
    t.exact_min = *std::min_element(t.gap_mins.begin(), t.gap_mins.end());

    // Corner sequence: the contour visits each ancestral knot once per pass,
    // and chains through the repeated visits are how the metric climbs over a
    // subtree instead of diving into it. Gap i contributes its popped knots
    // (height descending), the turning knot, then every knot on the segment
    // laid during gap i (height ascending; split knots inherit the gap of the
    // piece they subdivide, so they slot in here). The interior minimum after
    // a descending corner, and before an ascending one, is the sampled
    // minimum of the final piece ending at that knot.
    std::vector<std::vector<std::size_t>> asc(m), desc(m);
    for (std::size_t id = 0; id < krec.size(); ++id) {
      if (id > 0) asc[krec[id].up_gap].push_back(id);
      if (krec[id].down_gap != kNone) desc[krec[id].down_gap].push_back(id);
    }
    const double w = sigma / static_cast<double>(m);
    auto emit = [&](std::size_t id, double gap_after) {
      t.corner_label.push_back(krec[id].label);
      t.corner_weight.push_back(0.0);
      t.corner_point.push_back(static_cast<std::int64_t>(id));
      t.corner_gap.push_back(gap_after);
    };
    for (std::size_t i = 0; i < m; ++i) {
      auto& dn = desc[i];
      auto& up = asc[i];
      std::sort(dn.begin(), dn.end(), [&](std::size_t x, std::size_t y) {
        return krec[x].h > krec[y].h;
      });
      std::sort(up.begin(), up.end(), [&](std::size_t x, std::size_t y) {
        return krec[x].h < krec[y].h;
      });
      for (std::size_t id : dn) emit(id, piece_min_of[id]);
      emit(valley[i], up.empty() ? kInf : piece_min_of[up.front()]);
      for (std::size_t j = 0; j < up.size(); ++j)
        emit(up[j], j + 1 < up.size() ? piece_min_of[up[j + 1]] : kInf);
      // the last corner of the gap sits at contour time (i+1)/m: the tip
      t.corner_weight.back() = w;
    }
    t.n_points = krec.size();
  }
  return t;
}

LabeledCycle build_disk(DiskKind kind, const ForestOptions& opt, RngStream& rng) {
  if (opt.n_base < 8) throw std::invalid_argument("build_disk: n_base must be >= 8");
  if (!(opt.sigma_min > 0.0))
    throw std::invalid_argument("build_disk: sigma_min must be > 0");
  RngStream base_rng = rng.child(1);
  RngStream skel_rng = rng.child(2);
  RngStream tree_rng = rng.child(3);
  RngStream gap_rng = rng.child(4);

  const PathGrid base =
      kind == DiskKind::pointed
          ? sample_normalized_excursion(opt.n_base, base_rng)
          : sample_bessel5_bridge(0.0, 1.0, opt.n_base, base_rng);
  std::vector<double> base_labels(opt.n_base);
  for (std::size_t i = 0; i < opt.n_base; ++i)
    base_labels[i] = kSqrt3 * base.values[i];

  std::vector<TreeSeed> seeds = sample_tree_skeleton(1.0, opt.sigma_min, skel_rng);
  std::vector<SnakeTree> trees;
  trees.reserve(seeds.size());
  for (std::size_t idx = 0; idx < seeds.size(); ++idx) {
    const TreeSeed& s = seeds[idx];
    const double root_label = kSqrt3 * base.at(s.root_time);
    RngStream tr = tree_rng.child(idx);
    SnakeTree t = sample_snake_tree(s.sigma, tree_grid(s.sigma, opt), s.root_time,
                                    root_label, tr, opt.exact_minima);
    const double tmin = opt.exact_minima ? t.exact_min : t.min_tip();
    if (kind == DiskKind::boundary_pointed && tmin < 0.0) continue;
    trees.push_back(std::move(t));
  }

  LabeledCycle cycle;
  cycle.topology = CycleTopology::cycle;
  cycle.kind = kind == DiskKind::pointed ? CycleKind::disk_free
                                         : CycleKind::disk_boundary;
  cycle.base_length = 1.0;
  cycle.sigma_min = opt.sigma_min;
  // pointed disks ride a 1-dim excursion base (interior conditionally a
  // Brownian bridge, rate 3 after the sqrt(3) scaling); the Bessel-bridge
  // base of the boundary-pointed kind has no closed-form piece minimum, so
  // the endpoint minimum stands in (its labels stay near-minimal at the
  // distinguished point anyway).
  auto piece_min = [&](double v0, double c0, double v1, double c1) {
    return kind == DiskKind::pointed
               ? bridge_min(v0, v1, 3.0 * (c1 - c0), gap_rng)
               : std::min(v0, v1);
  };
  assemble(cycle, base_labels, 0.0, 1.0 / static_cast<double>(opt.n_base),
           opt.n_base, trees, opt.exact_minima, piece_min);
  return cycle;
}

LabeledCycle build_halfplane_window(HalfplaneKind kind, int a, int b,
                                    const ForestOptions& opt, RngStream& rng) {
  if (a >= b) throw std::invalid_argument("halfplane window: need a < b");
  if (opt.n_base < 8)
    throw std::invalid_argument("halfplane window: n_base must be >= 8");
  RngStream base_rng = rng.child(1);
  RngStream skel_rng = rng.child(2);
  RngStream tree_rng = rng.child(3);
  RngStream gap_rng = rng.child(4);

  const std::size_t nb = opt.n_base;
  const double h = 1.0 / static_cast<double>(nb);
  const double sdt = std::sqrt(h);
  const std::size_t total = static_cast<std::size_t>(b - a) * nb + 1;
  std::vector<double> base_vals(total, 0.0);
  const std::int64_t nbi = static_cast<std::int64_t>(nb);
  auto store = [&](std::int64_t off, double v) {
    if (off >= 0 && off < static_cast<std::int64_t>(total))
      base_vals[static_cast<std::size_t>(off)] = v;
  };
  const std::size_t dims = kind == HalfplaneKind::bm_labeled ? 1 : 5;

  // per-unit-interval streams: the same seed restricted to a sub-window
  // reproduces the same base path bit-exactly. Forward side covers [0, b),
  // backward side [a, 0); both start from value 0 at coordinate 0.
  double fwd[5] = {0, 0, 0, 0, 0};
  for (int k = 0; k < b; ++k) {
    RngStream u = base_rng.child(unit_key(k));
    for (std::size_t j = 1; j <= nb; ++j) {
      double s = 0.0;
      for (std::size_t d = 0; d < dims; ++d) {
        fwd[d] += sdt * u.gaussian();
        s += fwd[d] * fwd[d];
      }
      store((static_cast<std::int64_t>(k) - a) * nbi + static_cast<std::int64_t>(j),
            dims == 1 ? fwd[0] : std::sqrt(s));
    }
  }
  double bwd[5] = {0, 0, 0, 0, 0};
  for (int k = -1; k >= a; --k) {
    RngStream u = base_rng.child(unit_key(k));
    for (std::size_t j = 1; j <= nb; ++j) {
      double s = 0.0;
      for (std::size_t d = 0; d < dims; ++d) {
        bwd[d] += sdt * u.gaussian();
        s += bwd[d] * bwd[d];
      }
      store((static_cast<std::int64_t>(k) + 1 - a) * nbi - static_cast<std::int64_t>(j),
            dims == 1 ? bwd[0] : std::sqrt(s));
    }
  }
  std::vector<double> base_labels(total);
  for (std::size_t i = 0; i < total; ++i) base_labels[i] = kSqrt3 * base_vals[i];

  std::vector<SnakeTree> trees;
  for (int k = a; k < b; ++k) {
    RngStream sk = skel_rng.child(unit_key(k));
    RngStream tk = tree_rng.child(unit_key(k));
    std::vector<TreeSeed> seeds = sample_tree_skeleton(1.0, opt.sigma_min, sk);
    for (std::size_t idx = 0; idx < seeds.size(); ++idx) {
      const double root = static_cast<double>(k) + seeds[idx].root_time;
      // interpolate in unit-relative coordinates so the label is bit-identical
      // for every window containing unit k
      const double pos = seeds[idx].root_time * static_cast<double>(nb);
      const std::size_t i0 = std::min(static_cast<std::size_t>(pos), nb - 1);
      const double frac = pos - static_cast<double>(i0);
      const std::size_t off = static_cast<std::size_t>(k - a) * nb + i0;
      const double root_label =
          kSqrt3 *
          (base_vals[off] * (1.0 - frac) + base_vals[off + 1] * frac);
      RngStream tr = tk.child(idx);
      SnakeTree t = sample_snake_tree(seeds[idx].sigma,
                                      tree_grid(seeds[idx].sigma, opt), root,
                                      root_label, tr, opt.exact_minima);
      const double tmin = opt.exact_minima ? t.exact_min : t.min_tip();
      if (kind == HalfplaneKind::bessel_labeled && tmin < 0.0) continue;
      trees.push_back(std::move(t));
    }
  }

  LabeledCycle cycle;
  cycle.topology = CycleTopology::line;
  cycle.kind = kind == HalfplaneKind::bm_labeled ? CycleKind::halfplane_bm
                                                 : CycleKind::halfplane_bessel;
  cycle.base_length = static_cast<double>(b - a);
  cycle.sigma_min = opt.sigma_min;
  // base-piece minima keyed per unit interval so nested windows still agree
  // under one seed; the Bessel base falls back to the endpoint minimum
  int gap_unit = a;
  RngStream gap_unit_rng = gap_rng.child(unit_key(a));
  auto piece_min = [&](double v0, double c0, double v1, double c1) {
    if (kind != HalfplaneKind::bm_labeled) return std::min(v0, v1);
    const int unit = static_cast<int>(std::floor(c0));
    if (unit != gap_unit) {
      gap_unit = unit;
      gap_unit_rng = gap_rng.child(unit_key(unit));
    }
    return bridge_min(v0, v1, 3.0 * (c1 - c0), gap_unit_rng);
  };
  assemble(cycle, base_labels, static_cast<double>(a), h, total, trees,
           opt.exact_minima, piece_min);
  return cycle;
}

namespace {

// Snake walk along one tree keeping only the ancestral stack; pieces popped
// off the stack are final, so their continuum minima can be drawn exactly.
double tree_exact_min(double sigma, std::size_t m, double root_label,
                      RngStream& rng) {
  const PathGrid e = sample_normalized_excursion(m, rng);
  const double hscale = std::sqrt(sigma);
  struct Knot {
    double h;
    double label;
  };
  std::vector<Knot> knots{{0.0, root_label}};
  double tmin = root_label;
  double h_cur = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double h_next = hscale * e.values[i + 1];
    const double h_min = std::min(h_cur, h_next);
    h_cur = h_next;
    std::size_t k = knots.size() - 1;
    while (knots[k].h > h_min) --k;
    if (knots[k].h < h_min && k + 1 < knots.size()) {
      for (std::size_t j = k + 1; j + 1 < knots.size(); ++j)
        tmin = std::min(tmin, bridge_min(knots[j].label, knots[j + 1].label,
                                         knots[j + 1].h - knots[j].h, rng));
      const Knot lo = knots[k];
      const Knot hi = knots[k + 1];
      const double span = hi.h - lo.h;
      const double frac = (h_min - lo.h) / span;
      const double mean = lo.label + frac * (hi.label - lo.label);
      const double var = (hi.h - h_min) * (h_min - lo.h) / span;
      const double v = mean + std::sqrt(var) * rng.gaussian();
      tmin = std::min(tmin, bridge_min(v, hi.label, hi.h - h_min, rng));
      knots.resize(k + 1);
      knots.push_back({h_min, v});
    } else {
      for (std::size_t j = k; j + 1 < knots.size(); ++j)
        tmin = std::min(tmin, bridge_min(knots[j].label, knots[j + 1].label,
                                         knots[j + 1].h - knots[j].h, rng));
      knots.resize(k + 1);
    }
    if (h_next > h_min) {
      const double lab =
          knots.back().label + std::sqrt(h_next - h_min) * rng.gaussian();
      knots.push_back({h_next, lab});
      tmin = std::min(tmin, lab);
    }
  }
  for (std::size_t j = 0; j + 1 < knots.size(); ++j)
    tmin = std::min(tmin, bridge_min(knots[j].label, knots[j + 1].label,
                                     knots[j + 1].h - knots[j].h, rng));
  return tmin;
}

}  // namespace

double sample_forest_min(const ForestOptions& opt, RngStream& rng) {
  if (opt.n_base < 8)
    throw std::invalid_argument("forest min: n_base must be >= 8");
  if (!(opt.sigma_min > 0.0))
    throw std::invalid_argument("forest min: sigma_min must be > 0");
  RngStream base_rng = rng.child(1);
  RngStream skel_rng = rng.child(2);
  RngStream tree_rng = rng.child(3);
  const PathGrid base = sample_normalized_excursion(opt.n_base, base_rng);
  std::vector<TreeSeed> seeds = sample_tree_skeleton(1.0, opt.sigma_min, skel_rng);
  double fmin = 0.0;  // the base excursion touches 0
  for (std::size_t idx = 0; idx < seeds.size(); ++idx) {
    const double root_label = kSqrt3 * base.at(seeds[idx].root_time);
    const double m = std::ceil(opt.m_per_unit * seeds[idx].sigma);
    const std::size_t mm = std::max<std::size_t>(
        8, std::min<std::size_t>(static_cast<std::size_t>(m), 1u << 24));
    RngStream tr = tree_rng.child(idx);
    fmin = std::min(fmin,
                    tree_exact_min(seeds[idx].sigma, mm, root_label, tr));
  }
  return fmin;
}

std::size_t forest_argmin(const LabeledCycle& cycle) {
  if (cycle.sites.empty()) throw std::invalid_argument("forest_argmin: empty cycle");
  std::size_t arg = 0;
  for (std::size_t i = 1; i < cycle.sites.size(); ++i)
    if (cycle.sites[i].label < cycle.sites[arg].label) arg = i;
  return arg;
}

LabeledCycle scale_cycle(const LabeledCycle& cycle, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("scale_cycle: lambda must be > 0");
  LabeledCycle out = cycle;
  const double lam2 = lambda * lambda;
  const double root = std::sqrt(lambda);
  out.base_length *= lam2;
  out.sigma_min *= lam2;
  for (auto& s : out.sites) {
    s.label *= root;
    s.weight *= lam2;
    s.base_coord *= lam2;
  }
  for (auto& g : out.gap_min) g *= root;
  return out;
}

double total_weight(const LabeledCycle& cycle) {
  double w = 0.0;
  for (const auto& s : cycle.sites) w += s.weight;
  return w;
}

}  // namespace bdlab
