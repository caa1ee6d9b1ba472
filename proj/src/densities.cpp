#include "bdlab/densities.hpp"

#include <cmath>
#include <stdexcept>

namespace bdlab {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kSqrt2Pi = 2.5066282746310005024;

// erfcx(z) - (1 - 1/(2 z^2)) / (z sqrt(pi)) for z > 0: the remainder after
// the first two asymptotic terms of erfc(z) e^{z^2} are absorbed analytically
// into the rest of the hitting-time density. Always positive (the asymptotic
// expansion of erfc envelopes the true value).
double erfcxm2(double z) {
  const double w = 1.0 / (2.0 * z * z);
  if (z < 7.0) return erfcx(z) - (1.0 - w) / (z * kSqrtPi);
  double term = -w;  // k = 1 term of sum_k (-1)^k (2k-1)!! w^k
  double sum = 0.0;
  for (int k = 2; k < 60; ++k) {
    term *= -static_cast<double>(2 * k - 1) * w;
    const double prev = sum;
    sum += term;
    if (sum == prev) break;
  }
  return sum / (z * kSqrtPi);
}

}  // namespace

double erfcx(double z) {
  if (z < 0.0) {
    // erfc(z) = 2 - erfc(-z)
    return 2.0 * std::exp(z * z) - erfcx(-z);
  }
  if (z < 25.0) return std::exp(z * z) * std::erfc(z);
  // asymptotic series; terms decrease well past machine precision for z >= 25
  const double w = 1.0 / (2.0 * z * z);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 40; ++k) {
    term *= -static_cast<double>(2 * k - 1) * w;
    const double prev = sum;
    sum += term;
    if (sum == prev) break;
  }
  return sum / (z * kSqrtPi);
}

double bm_first_passage_density(double t, double x, double eps) {
  if (!(t > 0.0)) throw std::invalid_argument("q: t must be > 0");
  if (!(x > eps)) throw std::invalid_argument("q: need x > eps");
  const double d = x - eps;
  return d / (kSqrt2Pi * t * std::sqrt(t)) * std::exp(-d * d / (2.0 * t));
}

double neg1_first_passage_density(double t, double x, double eps) {
  if (!(t > 0.0)) throw std::invalid_argument("r: t must be > 0");
  if (!(x > eps) || eps < 0.0) throw std::invalid_argument("r: need x > eps >= 0");
  if (eps == 0.0) {
    return x * x * x / (kSqrt2Pi * t * t * std::sqrt(t)) *
           std::exp(-x * x / (2.0 * t));
  }
  const double d = x - eps;
  const double st = std::sqrt(t);
  const double a = st / (eps * std::sqrt(2.0));
  const double b = d / (std::sqrt(2.0) * st);
  const double u = a + b;
  // Regrouped against the first two asymptotic terms of erfcx: the leading
  // cancellation 1 - a^3/u^3 is factored exactly, so every summand is >= 0
  // and the value stays accurate when b << 1 << a.
  const double head = b * (3.0 * a * a + 3.0 * a * b + b * b) / (u * u * u) +
                      2.0 * a * b * b / u;
  const double rest = 2.0 * kSqrtPi * a * a * a * erfcxm2(u);
  return d * std::exp(-d * d / (2.0 * t)) * (head + rest) / (kSqrt2Pi * t * st);
}

double bessel5_transition(double t, double x, double y) {
  if (!(t > 0.0) || x < 0.0 || !(y > 0.0))
    throw std::invalid_argument("p5: need t > 0, x >= 0, y > 0");
  const double z = x * y / t;
  const double d = x - y;
  const double expo = std::exp(-d * d / (2.0 * t) - (z < 0.5 ? z : 0.0));
  if (z < 0.5) {
    const double z2 = z * z;
    const double series =
        1.0 + z2 / 10.0 + z2 * z2 / 280.0 + z2 * z2 * z2 / 15120.0;
    return std::sqrt(2.0 / M_PI) * y * y * y * y /
           (3.0 * t * t * std::sqrt(t)) * series * expo;
  }
  // exponentially scaled I_{3/2}(z): sqrt(2/(pi z)) (cosh - sinh/z) e^{-z}
  const double e2 = std::exp(-2.0 * z);
  const double scaled =
      std::sqrt(2.0 / (M_PI * z)) * (0.5 * (1.0 + e2) - (1.0 - e2) / (2.0 * z));
  return y / t * std::pow(y / x, 1.5) * expo * scaled;
}

double neg1_transition(double t, double x, double y) {
  if (!(x > 0.0)) throw std::invalid_argument("p: x must be > 0");
  const double h = (x / y) * (x / y) * (x / y);
  return h * bessel5_transition(t, x, y);
}

double killed_transition(double t, double y, double z, double eps,
                         const QuadOptions& opt) {
  if (!(eps > 0.0) || !(y > eps) || !(z > eps))
    throw std::invalid_argument("killed transition: need y, z > eps > 0");
  if (!(t > 0.0)) throw std::invalid_argument("killed transition: t must be > 0");
  auto theta_integrand = [&](double theta) {
    const double sn = std::sin(theta);
    const double s = t * sn * sn;
    if (s <= 0.0 || s >= t) return 0.0;
    return neg1_first_passage_density(s, y, eps) * neg1_transition(t - s, eps, z) *
           t * std::sin(2.0 * theta);
  };
  const double conv = integrate(theta_integrand, 0.0, M_PI / 2.0, opt);
  return neg1_transition(t, y, z) - conv;
}

double green(double y, double z, double eps, bool y_infinite) {
  if (!(z > eps) || eps < 0.0)
    throw std::invalid_argument("green: need z > eps >= 0");
  auto g = [](double a, double b) {
    if (a >= b) return 2.0 / 3.0 * b;
    return 2.0 / 3.0 * b * (a / b) * (a / b) * (a / b);
  };
  if (y_infinite) return 2.0 / 3.0 * z * (1.0 - (eps / z) * (eps / z) * (eps / z));
  if (!(y > eps)) throw std::invalid_argument("green: need y > eps");
  return g(y, z) - (eps > 0.0 ? g(eps, z) : 0.0);
}

double midpoint_density(MidpointKind kind, double x, bool printed_constants) {
  if (x < 0.0) throw std::invalid_argument("midpoint density: x must be >= 0");
  const double e = std::exp(-2.0 * x * x);
  if (kind == MidpointKind::bessel5bridge00) {
    const double c5 = printed_constants ? 64.0 / (3.0 * kSqrtPi)
                                        : std::pow(2.0, 3.5) / std::tgamma(2.5);
    return c5 * x * x * x * x * e;
  }
  const double c3 = printed_constants ? 16.0 / kSqrtPi : 16.0 / kSqrt2Pi;
  return c3 * x * x * e;
}

double snake_min_tail(double y) {
  if (!(y < 0.0)) throw std::invalid_argument("snake min tail: y must be < 0");
  return 1.5 / (y * y);
}

double last_passage_laplace(double x, double lambda, double eps) {
  if (!(x > eps) || eps < 0.0)
    throw std::invalid_argument("laplace: need x > eps >= 0");
  if (!(lambda > 0.0)) throw std::invalid_argument("laplace: lambda must be > 0");
  const double s = std::sqrt(2.0 * lambda);
  return (1.0 + x * s) / (1.0 + eps * s) * std::exp(-(x - eps) * s);
}

}  // namespace bdlab
