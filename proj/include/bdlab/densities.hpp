#pragma once

#include "bdlab/quadrature.hpp"

namespace bdlab {

// Scaled complementary error function exp(z^2) erfc(z); relative error below
// 1e-12 for z in [-10, 1e6].
double erfcx(double z);

// Density q_t(x, eps) of the hitting time of eps by a Brownian motion from x.
double bm_first_passage_density(double t, double x, double eps);

// Density r_t(x, eps) of the hitting time of eps by the Bessel process of
// dimension -1 from x; eps = 0 gives the x^3 (2 pi t^5)^{-1/2} e^{-x^2/(2t)}
// last-passage form. Stable for small eps (no explicit exp(u^2) erfc(u)).
double neg1_first_passage_density(double t, double x, double eps);

// Transition density p'_t(x, y) of the five-dimensional Bessel process.
double bessel5_transition(double t, double x, double y);

// Transition density p_t(x, y) = (x^3 / y^3) p'_t(x, y) of the dimension -1
// process killed at 0 (sub-probability kernel).
double neg1_transition(double t, double x, double y);

// Transition density of the dimension -1 process killed upon hitting eps > 0:
// p_t(y,z) minus the convolution of r_s(y,eps) with p_{t-s}(eps,z).
double killed_transition(double t, double y, double z, double eps,
                         const QuadOptions& opt = {});

// Green function of the dimension -1 process killed at eps: for finite y,
// G(y,z) - G(eps,z) with G(y,z) = (2/3) z min(1, y^3/z^3); y_infinite gives
// the started-from-infinity value (2/3) z (1 - eps^3/z^3).
double green(double y, double z, double eps = 0.0, bool y_infinite = false);

enum class MidpointKind { bessel5bridge00, excursion };

// Density of the midpoint of a five-dimensional Bessel bridge 0->0 over [0,1]
// (c5 x^4 e^{-2x^2}) or of a normalized Brownian excursion (c3 x^2 e^{-2x^2}).
// `printed_constants` reproduces legacy constants that integrate to sqrt(2),
// for side-by-side display only.
double midpoint_density(MidpointKind kind, double x, bool printed_constants = false);

// Tail of the minimum label of a snake trajectory: 3/(2 y^2) for y < 0.
double snake_min_tail(double y);

// Laplace transform of the hitting time of eps from x under dimension -1:
// (1 + x sqrt(2 lambda)) / (1 + eps sqrt(2 lambda)) e^{-(x-eps) sqrt(2 lambda)}.
double last_passage_laplace(double x, double lambda, double eps);

}  // namespace bdlab
