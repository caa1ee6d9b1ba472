#include "bdlab/paths.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bdlab/densities.hpp"

namespace bdlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_window(double t0, double t1, std::size_t n) {
  if (n == 0) throw std::invalid_argument("path grid needs n >= 1");
  if (!(t1 > t0)) throw std::invalid_argument("path window needs t1 > t0");
}
}  // namespace

double PathGrid::at(double t) const {
  if (t <= t0) return values.front();
  if (t >= t1) return values.back();
  const double pos = (t - t0) / step();
  const auto i = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(i);
  if (i + 1 > n) return values.back();
  return values[i] * (1.0 - frac) + values[i + 1] * frac;
}

PathGrid scale_path(const PathGrid& path, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("scale_path: lambda must be > 0");
  PathGrid out = path;
  const double lam2 = lambda * lambda;
  const double root = std::sqrt(lambda);
  out.t0 = path.t0 * lam2;
  out.t1 = path.t1 * lam2;
  for (auto& v : out.values) v *= root;
  return out;
}

PathGrid sample_bm(double start, double t0, double t1, std::size_t n, RngStream& rng) {
  check_window(t0, t1, n);
  if (!std::isfinite(start)) throw std::invalid_argument("sample_bm: non-finite start");
  PathGrid p;
  p.t0 = t0;
  p.t1 = t1;
  p.n = n;
  p.kind = PathKind::bm;
  p.values.resize(n + 1);
  const double sdt = std::sqrt((t1 - t0) / static_cast<double>(n));
  double w = start;
  p.values[0] = w;
  for (std::size_t i = 1; i <= n; ++i) {
    w += sdt * rng.gaussian();
    p.values[i] = w;
  }
  return p;
}

PathGrid sample_bridge(double a, double b, double t0, double t1, std::size_t n,
                       RngStream& rng) {
  check_window(t0, t1, n);
  if (!std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("sample_bridge: non-finite endpoint");
  PathGrid p = sample_bm(0.0, t0, t1, n, rng);
  p.kind = PathKind::bridge;
  const double wn = p.values[n];
  for (std::size_t i = 0; i <= n; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(n);
    p.values[i] = a + p.values[i] - frac * wn + frac * (b - a);
  }
  p.values[0] = a;
  p.values[n] = b;
  return p;
}

PathGrid sample_normalized_excursion(std::size_t n, RngStream& rng) {
  if (n < 2) throw std::invalid_argument("excursion needs n >= 2");
  PathGrid b = sample_bridge(0.0, 0.0, 0.0, 1.0, n, rng);
  std::size_t arg = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (b.values[i] < b.values[arg]) arg = i;
  PathGrid e;
  e.t0 = 0.0;
  e.t1 = 1.0;
  e.n = n;
  e.kind = PathKind::excursion;
  e.values.resize(n + 1);
  const double low = b.values[arg];
  for (std::size_t i = 0; i <= n; ++i)
    e.values[i] = b.values[(arg + i) % n] - low;
  e.values[0] = 0.0;
  e.values[n] = 0.0;
  return e;
}

PathGrid sample_bessel5(double start, double t, std::size_t n, RngStream& rng) {
  if (start < 0.0) throw std::invalid_argument("bessel5: start must be >= 0");
  check_window(0.0, t, n);
  PathGrid p;
  p.t0 = 0.0;
  p.t1 = t;
  p.n = n;
  p.kind = PathKind::bessel5;
  p.values.resize(n + 1);
  double c[5] = {start, 0.0, 0.0, 0.0, 0.0};
  p.values[0] = start;
  const double sdt = std::sqrt(t / static_cast<double>(n));
  for (std::size_t i = 1; i <= n; ++i) {
    double s = 0.0;
    for (auto& x : c) {
      x += sdt * rng.gaussian();
      s += x * x;
    }
    p.values[i] = std::sqrt(s);
  }
  return p;
}

PathGrid sample_bessel5_bridge(double start, double t, std::size_t n, RngStream& rng) {
  if (start < 0.0) throw std::invalid_argument("bessel5_bridge: start must be >= 0");
  check_window(0.0, t, n);
  PathGrid comp[5];
  comp[0] = sample_bridge(start, 0.0, 0.0, t, n, rng);
  for (int k = 1; k < 5; ++k) comp[k] = sample_bridge(0.0, 0.0, 0.0, t, n, rng);
  PathGrid p;
  p.t0 = 0.0;
  p.t1 = t;
  p.n = n;
  p.kind = PathKind::bessel5bridge;
  p.values.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    double s = 0.0;
    for (const auto& k : comp) s += k.values[i] * k.values[i];
    p.values[i] = std::sqrt(s);
  }
  p.values[0] = start;
  p.values[n] = 0.0;
  return p;
}

namespace {

// One Euler step of dR = dB - dt/R over duration h, sub-stepped when the
// drift -1/R is stiff (R small relative to sqrt of the sub-step). Reports a
// barrier crossing with a linearly interpolated offset into [0,h].
struct Neg1Step {
  double r;
  bool crossed;
  double offset;
};

Neg1Step advance_neg1(double r, double level, double h, RngStream& rng) {
  double done = 0.0;
  while (done < h) {
    double sub = h - done;
    if (sub <= 1e-14) break;  // negligible remainder of the step
    const double gap = r - level;
    // keep R - level resolved by several sub-steps of its own scale
    const double stiff = 0.01 * (gap * gap + level * level * 1e-4);
    if (stiff <= 1e-14) {
      // numerically glued to the barrier: absorb now
      return {level, true, done};
    }
    if (sub > stiff) sub = stiff;
    const double next = r - sub / r + std::sqrt(sub) * rng.gaussian();
    if (next <= level) {
      const double frac = (r - level) / (r - next);
      return {level, true, done + sub * std::max(0.0, std::min(1.0, frac))};
    }
    r = next;
    done += sub;
  }
  return {r, false, 0.0};
}

}  // namespace

AbsorbedPath sample_bessel_neg1_absorbed(double start, double level, double dt,
                                         double t_max, RngStream& rng) {
  if (!(start > level) || level < 0.0)
    throw std::invalid_argument("bessel_neg1: need start > level >= 0");
  if (!(dt > 0.0) || !(t_max > 0.0))
    throw std::invalid_argument("bessel_neg1: need dt, t_max > 0");
  AbsorbedPath out;
  out.path.t0 = 0.0;
  out.path.kind = PathKind::besselNeg1;
  out.path.values.push_back(start);
  double r = start;
  double t = 0.0;
  out.finished = false;
  out.hit_time = kInf;
  while (t < t_max) {
    const double h = std::min(dt, t_max - t);
    if (h <= dt * 1e-9) break;
    const Neg1Step s = advance_neg1(r, level, h, rng);
    if (s.crossed) {
      out.hit_time = t + s.offset;
      out.finished = true;
      out.path.values.push_back(level);
      t += h;
      break;
    }
    r = s.r;
    t += h;
    out.path.values.push_back(r);
  }
  out.path.n = out.path.values.size() - 1;
  out.path.t1 = dt * static_cast<double>(out.path.n);
  if (out.finished) out.path.values.back() = level;
  return out;
}

double neg1_hit_time(double start, double level, double dt, double t_max,
                     RngStream& rng) {
  if (!(start > level) || level < 0.0)
    throw std::invalid_argument("bessel_neg1: need start > level >= 0");
  if (!(dt > 0.0) || !(t_max > 0.0))
    throw std::invalid_argument("bessel_neg1: need dt, t_max > 0");
  double r = start;
  double t = 0.0;
  while (t < t_max) {
    const double h = std::min(dt, t_max - t);
    if (h <= dt * 1e-9) break;
    const Neg1Step s = advance_neg1(r, level, h, rng);
    if (s.crossed) return t + s.offset;
    r = s.r;
    t += h;
  }
  return kInf;
}

PathGrid sample_first_passage_bridge(double x, double eps, double t, std::size_t n,
                                     RngStream& rng, const FpBridgeOptions& opt) {
  if (!(x > eps) || eps < 0.0)
    throw std::invalid_argument("fp_bridge: need x > eps >= 0");
  if (!(t > 0.0)) throw std::invalid_argument("fp_bridge: need t > 0");
  if (n < 2) throw std::invalid_argument("fp_bridge: need n >= 2");
  const std::size_t P = opt.particles;
  const double dt = t / static_cast<double>(n);
  const double sub = dt / static_cast<double>(opt.euler_substeps);

  std::vector<std::vector<double>> paths(P, std::vector<double>(n + 1, 0.0));
  std::vector<double> w(P, 1.0 / static_cast<double>(P));
  std::vector<double> rprev(P);
  for (std::size_t p = 0; p < P; ++p) {
    paths[p][0] = x;
    rprev[p] = neg1_first_passage_density(t, x, eps);
  }

  auto resample = [&](void) {
    std::vector<std::vector<double>> np(P);
    std::vector<double> nr(P);
    const double u0 = rng.uniform() / static_cast<double>(P);
    double cum = 0.0;
    std::size_t j = 0;
    for (std::size_t p = 0; p < P; ++p) {
      const double target = u0 + static_cast<double>(p) / static_cast<double>(P);
      while (cum + w[j] < target && j + 1 < P) cum += w[j++];
      np[p] = paths[j];
      nr[p] = rprev[j];
    }
    paths.swap(np);
    rprev.swap(nr);
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(P));
  };

  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double remaining = t - dt * static_cast<double>(k + 1);
    double wsum = 0.0;
    for (std::size_t p = 0; p < P; ++p) {
      if (w[p] == 0.0) continue;
      double r = paths[p][k];
      bool dead = false;
      for (std::size_t s = 0; s < opt.euler_substeps; ++s) {
        const Neg1Step st = advance_neg1(r, eps, sub, rng);
        if (st.crossed) {
          dead = true;
          break;
        }
        r = st.r;
      }
      if (dead || r <= eps) {
        w[p] = 0.0;
        continue;
      }
      paths[p][k + 1] = r;
      const double rn = neg1_first_passage_density(remaining, r, eps);
      w[p] *= rn / rprev[p];
      rprev[p] = rn;
      wsum += w[p];
    }
    if (wsum <= 0.0)
      throw std::runtime_error("fp_bridge: particle population collapsed");
    double ess_den = 0.0;
    for (auto& wp : w) {
      wp /= wsum;
      ess_den += wp * wp;
    }
    if (1.0 / ess_den < static_cast<double>(P) / 2.0) resample();
  }

  // draw one particle by weight
  double u = rng.uniform();
  std::size_t pick = 0;
  double cum = 0.0;
  for (std::size_t p = 0; p < P; ++p) {
    cum += w[p];
    if (u <= cum) {
      pick = p;
      break;
    }
    pick = p;
  }
  PathGrid out;
  out.t0 = 0.0;
  out.t1 = t;
  out.n = n;
  out.kind = PathKind::fpbridge;
  out.values = paths[pick];
  out.values[0] = x;
  out.values[n] = eps;
  return out;
}

double tilt_functional(const PathGrid& path, double eps) {
  if (eps < 0.0) throw std::invalid_argument("tilt_functional: eps must be >= 0");
  if (std::fabs(path.t0) > 1e-12 || std::fabs(path.t1 - 1.0) > 1e-12)
    throw std::invalid_argument("tilt_functional: path window must be [0,1]");
  const std::size_t n = path.n;
  const double h = path.step();
  auto integrand = [&](double v) { return 1.0 / ((eps + v) * (eps + v)); };
  double acc = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double d = eps + path.values[i];
    if (d <= 0.0) return kInf;
    const double f = integrand(path.values[i]);
    acc += (i == 1 || i == n - 1) ? 0.5 * f : f;
  }
  // full trapezoid over [0,1]: interior half-weights above cover [h, 1-h];
  // endpoint panels use the clamped endpoint values
  const double v0 = std::max(path.values[0], 0.0);
  const double vn = std::max(path.values[n], 0.0);
  if (eps + v0 <= 0.0 || eps + vn <= 0.0) return kInf;
  acc += 0.5 * (integrand(v0) + integrand(path.values[1]));
  acc += 0.5 * (integrand(path.values[n - 1]) + integrand(vn));
  return acc * h;
}

TiltedExcursion sample_tilted_excursion(double eps, std::size_t n, RngStream& rng,
                                        std::size_t budget) {
  if (!(eps > 0.0)) throw std::invalid_argument("tilted excursion: eps must be > 0");
  for (std::size_t k = 1; k <= budget; ++k) {
    PathGrid e = sample_normalized_excursion(n, rng);
    const double tilt = tilt_functional(e, eps);
    if (std::isfinite(tilt) && rng.uniform() < std::exp(-tilt)) {
      e.kind = PathKind::tilted;
      return {std::move(e), k};
    }
  }
  throw std::runtime_error("tilted excursion: proposal budget exceeded");
}

}  // namespace bdlab
