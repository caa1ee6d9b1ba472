#pragma once

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "bdlab/snake.hpp"

namespace bdlab {

// Sparse-table interval minima over the site labels; cyclic queries run on the
// doubled sequence. When the cycle carries exact gap minima the table is built
// over the interleaved sequence site0, gap0, site1, ... so arc minima include
// the label dips between consecutive sites.
class RmqTable {
 public:
  RmqTable() = default;
  explicit RmqTable(const LabeledCycle& cycle);

  std::size_t size() const { return n_; }
  bool cyclic() const { return cyclic_; }

  // Minimum label over the exploration arc from site i forward to site j,
  // endpoints included (wraps around for cyclic topology).
  double arc_min(std::size_t i, std::size_t j) const;

 private:
  double range_min(std::size_t lo, std::size_t hi) const;  // doubled coords

  std::size_t n_ = 0;
  std::size_t stride_ = 1;  // 2 when gap minima are interleaved
  bool cyclic_ = true;
  std::vector<std::vector<double>> levels_;
};

RmqTable build_rmq(const LabeledCycle& cycle);

// Premetric D^o(i,j) = Lambda_i + Lambda_j - 2 max(arc minima); on a line the
// arc leaving the window is dropped from the max.
double d_circ(const LabeledCycle& cycle, const RmqTable& rmq, std::size_t i,
              std::size_t j);

struct DistanceField {
  std::vector<std::size_t> sources;
  std::vector<double> dist;
};

// Shortest-path closure of D^o from a source set: Dijkstra on the implicit
// complete graph, O(N^2). Sites farther than `cap` keep dist = +infinity.
DistanceField sssp(const LabeledCycle& cycle, const RmqTable& rmq,
                   const std::vector<std::size_t>& sources,
                   double cap = std::numeric_limits<double>::infinity());

// Floyd-Warshall closure of the full D^o matrix; test oracle only (N <= 2000).
std::vector<std::vector<double>> apsp_oracle(const LabeledCycle& cycle,
                                             const RmqTable& rmq);

// Multi-source distance from every boundary site.
DistanceField boundary_distance(const LabeledCycle& cycle, const RmqTable& rmq);

// Volume (site-weight sum) of {distance <= eps}.
double tubular_volume(const LabeledCycle& cycle, const DistanceField& field,
                      double eps);

struct BallResult {
  std::vector<std::size_t> sites;
  double volume = 0.0;
  double boundary_trace_length = 0.0;
};

BallResult ball(const LabeledCycle& cycle, const RmqTable& rmq,
                std::size_t center, double r);

// Distance field restricted to boundary sites, in base order.
std::vector<std::pair<double, double>> boundary_profile(
    const LabeledCycle& cycle, const DistanceField& field);

}  // namespace bdlab
