#include "bdlab/metric.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace bdlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

RmqTable::RmqTable(const LabeledCycle& cycle) {
  if (cycle.sites.empty()) throw std::invalid_argument("rmq: empty cycle");
  n_ = cycle.sites.size();
  cyclic_ = cycle.topology == CycleTopology::cycle;
  stride_ = cycle.gap_min.empty() ? 1 : 2;
  if (stride_ == 2 && cycle.gap_min.size() != (cyclic_ ? n_ : n_ - 1))
    throw std::invalid_argument("rmq: gap_min size mismatch");
  const std::size_t period = n_ * stride_;
  const std::size_t len =
      cyclic_ ? 2 * period : (stride_ == 2 ? period - 1 : n_);
  levels_.emplace_back(len);
  for (std::size_t i = 0; i < len; ++i) {
    const std::size_t p = i % period;
    levels_[0][i] = stride_ == 1 ? cycle.sites[p].label
                    : p % 2 == 0 ? cycle.sites[p / 2].label
                                 : cycle.gap_min[p / 2];
  }
  for (std::size_t width = 2; width <= len; width *= 2) {
    const std::size_t half = width / 2;
    const auto& prev = levels_.back();
    std::vector<double> next(len - width + 1);
    for (std::size_t i = 0; i + width <= len; ++i)
      next[i] = std::min(prev[i], prev[i + half]);
    levels_.push_back(std::move(next));
  }
}

double RmqTable::range_min(std::size_t lo, std::size_t hi) const {
  if (lo == hi) return levels_[0][lo];
  std::size_t level = 0;
  std::size_t span = hi - lo + 1;
  while ((2u << level) <= span) ++level;
  const std::size_t width = 1u << level;
  return std::min(levels_[level][lo], levels_[level][hi + 1 - width]);
}

double RmqTable::arc_min(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) throw std::invalid_argument("rmq: index out of range");
  if (j >= i) return range_min(stride_ * i, stride_ * j);
  if (!cyclic_) throw std::invalid_argument("rmq: backward arc on a line");
  return range_min(stride_ * i, stride_ * (j + n_));
}

RmqTable build_rmq(const LabeledCycle& cycle) { return RmqTable(cycle); }

double d_circ(const LabeledCycle& cycle, const RmqTable& rmq, std::size_t i,
              std::size_t j) {
  if (i == j) return 0.0;
  const double li = cycle.sites[i].label;
  const double lj = cycle.sites[j].label;
  double best;
  if (cycle.topology == CycleTopology::cycle) {
    best = std::max(rmq.arc_min(i, j), rmq.arc_min(j, i));
  } else {
    best = i < j ? rmq.arc_min(i, j) : rmq.arc_min(j, i);
  }
  return li + lj - 2.0 * best;
}

DistanceField sssp(const LabeledCycle& cycle, const RmqTable& rmq,
                   const std::vector<std::size_t>& sources, double cap) {
  const std::size_t n = cycle.sites.size();
  if (sources.empty()) throw std::invalid_argument("sssp: empty source set");
  DistanceField field;
  field.sources = sources;
  field.dist.assign(n, kInf);
  std::vector<char> done(n, 0);
  for (std::size_t s : sources) {
    if (s >= n) throw std::invalid_argument("sssp: source out of range");
    field.dist[s] = 0.0;
  }
  // Corner sites sharing a point id are the same tree point: zero-cost edges
  // between them. siblings[i] chains the corners of one point in a circular
  // list (i alone when the site is a point of its own).
  std::vector<std::size_t> siblings(n);
  bool have_points = false;
  {
    std::vector<std::pair<std::int64_t, std::size_t>> pts;
    for (std::size_t i = 0; i < n; ++i) {
      siblings[i] = i;
      if (cycle.sites[i].point_id >= 0) pts.emplace_back(cycle.sites[i].point_id, i);
    }
    std::sort(pts.begin(), pts.end());
    for (std::size_t a = 0; a < pts.size();) {
      std::size_t b = a;
      while (b + 1 < pts.size() && pts[b + 1].first == pts[a].first) ++b;
      if (b > a) {
        have_points = true;
        for (std::size_t j = a; j < b; ++j)
          siblings[pts[j].second] = pts[j + 1].second;
        siblings[pts[b].second] = pts[a].second;
      }
      a = b + 1;
    }
  }
  if (cap < kInf) {
    // Capped runs only need relaxations that can stay under the cap, and
    // d_circ(u, v) >= |label_u - label_v|, so a label-sorted index lets us
    // skip every pair outside the remaining budget. Distances settled below
    // the cap are identical to the dense scan (the minimizing relaxation is
    // never pruned); entries beyond the cap stay above it.
    std::vector<std::pair<double, std::size_t>> by_label(n);
    for (std::size_t i = 0; i < n; ++i)
      by_label[i] = {cycle.sites[i].label, i};
    std::sort(by_label.begin(), by_label.end());
    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
    for (std::size_t s : sources) heap.emplace(0.0, s);
    while (!heap.empty()) {
      const auto [du, u] = heap.top();
      heap.pop();
      if (done[u] || du > field.dist[u]) continue;
      if (du > cap) break;
      done[u] = 1;
      if (have_points)
        for (std::size_t v = siblings[u]; v != u; v = siblings[v])
          if (!done[v] && du < field.dist[v]) {
            field.dist[v] = du;
            heap.emplace(du, v);
          }
      const double budget = cap - du;
      const double lu = cycle.sites[u].label;
      auto it = std::lower_bound(by_label.begin(), by_label.end(),
                                 std::make_pair(lu - budget, std::size_t{0}));
      for (; it != by_label.end() && it->first <= lu + budget; ++it) {
        const std::size_t v = it->second;
        if (done[v]) continue;
        const double cand = du + d_circ(cycle, rmq, u, v);
        if (cand < field.dist[v]) {
          field.dist[v] = cand;
          if (cand <= cap) heap.emplace(cand, v);
        }
      }
    }
    return field;
  }
  for (;;) {
    std::size_t u = n;
    double du = kInf;
    for (std::size_t i = 0; i < n; ++i) {
      if (!done[i] && field.dist[i] < du) {
        du = field.dist[i];
        u = i;
      }
    }
    if (u == n || du > cap) break;
    done[u] = 1;
    if (have_points)
      for (std::size_t v = siblings[u]; v != u; v = siblings[v])
        if (!done[v] && du < field.dist[v]) field.dist[v] = du;
    for (std::size_t v = 0; v < n; ++v) {
      if (done[v]) continue;
      const double cand = du + d_circ(cycle, rmq, u, v);
      if (cand < field.dist[v]) field.dist[v] = cand;
    }
  }
  return field;
}

std::vector<std::vector<double>> apsp_oracle(const LabeledCycle& cycle,
                                             const RmqTable& rmq) {
  const std::size_t n = cycle.sites.size();
  if (n > 2000) throw std::invalid_argument("apsp_oracle: size guard exceeded");
  std::vector<std::vector<double>> d(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      d[i][j] = i == j ? 0.0 : d_circ(cycle, rmq, i, j);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      const double dik = d[i][k];
      for (std::size_t j = 0; j < n; ++j)
        if (dik + d[k][j] < d[i][j]) d[i][j] = dik + d[k][j];
    }
  return d;
}

DistanceField boundary_distance(const LabeledCycle& cycle, const RmqTable& rmq) {
  std::vector<std::size_t> sources;
  for (std::size_t i = 0; i < cycle.sites.size(); ++i)
    if (cycle.sites[i].is_boundary) sources.push_back(i);
  if (sources.empty())
    throw std::invalid_argument("boundary_distance: no boundary sites");
  return sssp(cycle, rmq, sources);
}

double tubular_volume(const LabeledCycle& cycle, const DistanceField& field,
                      double eps) {
  if (eps < 0.0) throw std::invalid_argument("tubular_volume: eps must be >= 0");
  double vol = 0.0;
  for (std::size_t i = 0; i < cycle.sites.size(); ++i)
    if (field.dist[i] <= eps) vol += cycle.sites[i].weight;
  return vol;
}

BallResult ball(const LabeledCycle& cycle, const RmqTable& rmq,
                std::size_t center, double r) {
  if (r < 0.0) throw std::invalid_argument("ball: r must be >= 0");
  const DistanceField field = sssp(cycle, rmq, {center}, r);
  std::size_t n_boundary = 0;
  for (const auto& s : cycle.sites)
    if (s.is_boundary) ++n_boundary;
  const double arc =
      n_boundary == 0
          ? 0.0
          : cycle.base_length /
                static_cast<double>(cycle.topology == CycleTopology::cycle
                                        ? n_boundary
                                        : n_boundary - 1);
  BallResult out;
  for (std::size_t i = 0; i < cycle.sites.size(); ++i) {
    if (field.dist[i] <= r) {
      out.sites.push_back(i);
      out.volume += cycle.sites[i].weight;
      if (cycle.sites[i].is_boundary) out.boundary_trace_length += arc;
    }
  }
  return out;
}

std::vector<std::pair<double, double>> boundary_profile(
    const LabeledCycle& cycle, const DistanceField& field) {
  if (cycle.kind != CycleKind::disk_boundary)
    throw std::invalid_argument("boundary_profile: cycle is not boundary-pointed");
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < cycle.sites.size(); ++i)
    if (cycle.sites[i].is_boundary)
      out.emplace_back(cycle.sites[i].base_coord, field.dist[i]);
  return out;
}

}  // namespace bdlab
