#pragma once

#include <cstddef>
#include <optional>
#include <utility>

#include "bdlab/path_grid.hpp"
#include "bdlab/rng.hpp"

namespace bdlab {

// --- Gaussian paths -------------------------------------------------------

// Brownian motion started at `start` on [t0,t1], exact at grid points.
PathGrid sample_bm(double start, double t0, double t1, std::size_t n, RngStream& rng);

// Brownian bridge from a to b on [t0,t1]; endpoints exact.
PathGrid sample_bridge(double a, double b, double t0, double t1, std::size_t n,
                       RngStream& rng);

// Normalized Brownian excursion on [0,1] by cyclic rotation of a bridge at its
// grid argmin (Vervaat transform).
PathGrid sample_normalized_excursion(std::size_t n, RngStream& rng);

// --- Bessel paths ---------------------------------------------------------

// Five-dimensional Bessel process from x >= 0 on [0,t], exact at grid points
// (norm of a 5-dimensional Brownian motion).
PathGrid sample_bessel5(double start, double t, std::size_t n, RngStream& rng);

// Five-dimensional Bessel bridge from x >= 0 to 0 over [0,t]; endpoints exact.
PathGrid sample_bessel5_bridge(double start, double t, std::size_t n, RngStream& rng);

struct AbsorbedPath {
  PathGrid path;      // absorbed at `level` from hit_time onward
  double hit_time;    // linear-interpolated crossing time
  bool finished;      // false if t_max elapsed before absorption
};

// Euler-Maruyama for the dimension -1 Bessel dR = dB - dt/R, started at x,
// stopped at `level`; sub-steps near the barrier where the drift is stiff.
AbsorbedPath sample_bessel_neg1_absorbed(double start, double level, double dt,
                                         double t_max, RngStream& rng);

// Hitting time only (no path storage); +infinity when t_max elapses first.
double neg1_hit_time(double start, double level, double dt, double t_max,
                     RngStream& rng);

// --- First-passage bridge (dimension -1 from x to eps in time t) ----------

struct FpBridgeOptions {
  std::size_t particles = 1024;
  std::size_t euler_substeps = 8;  // Euler sub-steps per grid step
};

// Sequential-Monte-Carlo sampler for the first-passage Bessel bridge
// Pi^{(x,eps)}_t on an n-step grid. Throws on effective-sample-size collapse.
PathGrid sample_first_passage_bridge(double x, double eps, double t, std::size_t n,
                                     RngStream& rng, const FpBridgeOptions& opt = {});

// --- Tilted excursion -----------------------------------------------------

// Trapezoid value of \int_0^1 dt / (eps + path_t)^2 for a path on [0,1].
// Returns +infinity when an interior grid value makes the integrand singular.
double tilt_functional(const PathGrid& path, double eps);

struct TiltedExcursion {
  PathGrid path;
  std::size_t proposals;  // proposals consumed, including the accepted one
};

// Rejection sampler for the excursion reweighted by exp(-tilt). Throws when
// `budget` proposals are exhausted (acceptance is roughly 3 eps^2).
TiltedExcursion sample_tilted_excursion(double eps, std::size_t n, RngStream& rng,
                                        std::size_t budget = 1000000);

}  // namespace bdlab
