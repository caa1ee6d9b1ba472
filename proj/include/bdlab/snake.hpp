#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bdlab/rng.hpp"

namespace bdlab {

// One labeled tree: contour lifetime zeta (a scaled excursion) plus the label
// process along it (Brownian along ancestral lines, covariance min zeta).
struct SnakeTree {
  double sigma = 0.0;       // duration
  std::size_t m = 0;        // contour steps; zeta and tips have m+1 entries
  std::vector<double> zeta;
  std::vector<double> tips;
  double root_time = 0.0;   // base coordinate of the root
  double root_label = 0.0;

  // Exact contour minima, filled only when requested: gap_mins[j] is the
  // label minimum between tips j and j+1 (bridge minima of every ancestral
  // piece, sampled when the piece leaves the snake stack), exact_min the
  // minimum over the whole contour.
  std::vector<double> gap_mins;
  double exact_min = 0.0;

  // Contour corner sequence, filled only in exact mode. Every ancestral knot
  // appears once per contour visit (ascent, valley turn, descent) so that
  // interior tree points exist as sites; corners of one knot share a point
  // id, which the metric treats as a single point. corner_gap[k] is the
  // sampled interior label minimum between corners k and k+1; corner_weight
  // puts sigma/m on the corner at each contour tip.
  std::vector<double> corner_label;
  std::vector<double> corner_weight;
  std::vector<double> corner_gap;
  std::vector<std::int64_t> corner_point;
  std::size_t n_points = 0;

  double min_tip() const;
  double max_zeta() const;
};

enum class CycleTopology { cycle, line };

enum class CycleKind {
  disk_free,         // base labels sqrt(3) * normalized excursion
  disk_boundary,     // base labels sqrt(3) * 5-dim Bessel bridge, trees thinned
  halfplane_bm,      // base labels sqrt(3) * two-sided Brownian motion
  halfplane_bessel,  // base labels sqrt(3) * two-sided 5-dim Bessel, thinned
};

struct Site {
  double label = 0.0;
  double weight = 0.0;      // volume mass; zero for boundary sites
  bool is_boundary = false;
  double base_coord = 0.0;  // boundary position (tree sites carry the root's)
  std::int64_t tree_id = -1;
  // Corner sites of one tree point share a point id (>= 0); -1 means the site
  // is a point of its own. The metric joins same-point sites at distance 0.
  std::int64_t point_id = -1;
};

// Exploration cycle: boundary sites in base order, each tree's sites inserted
// as one contiguous block at its root position.
struct LabeledCycle {
  CycleTopology topology = CycleTopology::cycle;
  CycleKind kind = CycleKind::disk_free;
  std::vector<Site> sites;
  double base_length = 1.0;
  double sigma_min = 0.0;
  // Optional exact minima of the unobserved label path between consecutive
  // sites (size n for a cycle, n-1 for a line; empty when not sampled).
  // +infinity marks a gap with no interior. Interval-minimum queries fold
  // these in, which removes the "missed dip" bias of site-only minima.
  std::vector<double> gap_min;
};

struct TreeSeed {
  double root_time;
  double sigma;
};

// Poisson skeleton on a base of length L: count ~ Poisson(2 L (2 pi s)^{-1/2}),
// root times uniform, durations Pareto-1/2 via sigma = sigma_min / U^2.
std::vector<TreeSeed> sample_tree_skeleton(double length, double sigma_min,
                                           RngStream& rng);

// Contour + labels for one tree; exact grid covariance min zeta via the
// truncate-and-extend stack walk. With exact_minima the walk also samples
// the bridge minimum of every ancestral piece when the piece is finalized
// and folds it into gap_mins / exact_min (extra uniform draws, so the tip
// stream differs from the flag-off run).
SnakeTree sample_snake_tree(double sigma, std::size_t m, double root_time,
                            double root_label, RngStream& rng,
                            bool exact_minima = false);

struct ForestOptions {
  std::size_t n_base = 1024;     // boundary grid points per unit base length
  double sigma_min = 1e-4;
  double m_per_unit = 1024.0;    // tree contour points per unit duration
  // Sample exact between-site label minima (tree pieces and, where the base
  // is conditionally Brownian, base pieces) into LabeledCycle::gap_min, and
  // thin constrained kinds on the exact tree minimum instead of the sampled
  // tip minimum.
  bool exact_minima = false;
};

enum class DiskKind { pointed, boundary_pointed };
enum class HalfplaneKind { bm_labeled, bessel_labeled };

LabeledCycle build_disk(DiskKind kind, const ForestOptions& opt, RngStream& rng);

// Window [a, b] of a half-plane; integer a < b keeps the per-unit-interval
// stream discipline so nested windows agree bit-exactly under one seed.
LabeledCycle build_halfplane_window(HalfplaneKind kind, int a, int b,
                                    const ForestOptions& opt, RngStream& rng);

// Index of the minimal label; ties broken by lowest index.
std::size_t forest_argmin(const LabeledCycle& cycle);

// Minimum label over one free pointed disk forest, computed without
// materializing sites. Each unobserved ancestral Brownian piece contributes
// its exact bridge minimum (sampled by inverse CDF) when it leaves the snake
// stack, so the estimate converges much faster in m_per_unit than the tip
// minimum of build_disk and supports very fine contour grids (per-tree
// contour points m_per_unit * sigma, capped at 2^24) in O(stack) memory.
double sample_forest_min(const ForestOptions& opt, RngStream& rng);

// Brownian scaling of an assembled cycle: base/time x lambda^2, labels x
// sqrt(lambda), weights x lambda^2.
LabeledCycle scale_cycle(const LabeledCycle& cycle, double lambda);

double total_weight(const LabeledCycle& cycle);

}  // namespace bdlab
