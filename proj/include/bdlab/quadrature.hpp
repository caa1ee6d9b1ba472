#pragma once

#include <functional>

namespace bdlab {

struct QuadOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_depth = 32;
};

// Adaptive Gauss-Kronrod (7-15) on a finite interval.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadOptions& opt = {});

// \int_a^\infty f, with the tail mapped through t = 1/v^2 so that densities
// with power-law decay become smooth near v = 0.
double integrate_halfline(const std::function<double(double)>& f, double a,
                          const QuadOptions& opt = {});

}  // namespace bdlab
