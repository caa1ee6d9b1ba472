#pragma once

#include <cstddef>
#include <vector>

namespace bdlab {

enum class PathKind {
  bm,
  bridge,
  excursion,
  bessel5,
  besselNeg1,
  bessel5bridge,
  fpbridge,
  tilted,
};

// A real-valued function sampled on a uniform time grid: n steps, n+1 values.
struct PathGrid {
  double t0 = 0.0;
  double t1 = 1.0;
  std::size_t n = 0;
  std::vector<double> values;  // length n + 1
  PathKind kind = PathKind::bm;

  double step() const { return (t1 - t0) / static_cast<double>(n); }
  double duration() const { return t1 - t0; }
  // Time of grid point i.
  double time_at(std::size_t i) const {
    return t0 + (t1 - t0) * (static_cast<double>(i) / static_cast<double>(n));
  }
  // Linear interpolation at time t (clamped to the window).
  double at(double t) const;
};

// Brownian scaling: time dilated by lambda^2, values multiplied by sqrt(lambda).
PathGrid scale_path(const PathGrid& path, double lambda);

}  // namespace bdlab
