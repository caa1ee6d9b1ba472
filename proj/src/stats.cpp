#include "bdlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bdlab {

namespace {

// Kolmogorov distribution tail 2 sum (-1)^{k-1} exp(-2 k^2 x^2).
double kolmogorov_tail(double x) {
  if (x <= 0.0) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-16) break;
  }
  return std::min(1.0, std::max(0.0, 2.0 * sum));
}

double ks_pvalue(double stat, double n_eff) {
  const double rn = std::sqrt(n_eff);
  return kolmogorov_tail((rn + 0.12 + 0.11 / rn) * stat);
}

}  // namespace

MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe out;
  out.n = xs.size();
  if (xs.empty()) return out;
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  out.mean = m;
  if (xs.size() > 1) {
    v /= static_cast<double>(xs.size() - 1);
    out.se = std::sqrt(v / static_cast<double>(xs.size()));
  }
  return out;
}

MeanSe trimmed_mean_se(std::vector<double> xs, double trim_frac) {
  if (trim_frac < 0.0 || trim_frac >= 0.5)
    throw std::invalid_argument("trimmed_mean_se: trim_frac must be in [0, 0.5)");
  const auto cut =
      static_cast<std::size_t>(trim_frac * static_cast<double>(xs.size()));
  std::sort(xs.begin(), xs.end());
  return mean_se({xs.begin() + cut, xs.end() - cut});
}

KsResult ks_one_sample(std::vector<double> samples,
                       const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max(d, std::max(std::fabs(f - lo), std::fabs(hi - f)));
  }
  return {d, ks_pvalue(d, n)};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    // consume every copy of the next value from both samples so ties do not
    // contribute a spurious mid-tie gap
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na -
                              static_cast<double>(j) / nb));
  }
  const double n_eff = na * nb / (na + nb);
  return {d, ks_pvalue(d, n_eff)};
}

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_q: bad args");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) {
    // lower series
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int k = 0; k < 500; ++k) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    const double p = sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    return 1.0 - p;
  }
  // continued fraction (Lentz)
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int k = 1; k < 500; ++k) {
    const double an = -static_cast<double>(k) * (static_cast<double>(k) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

Chi2Result chi_square(const std::vector<double>& observed,
                      const std::vector<double>& expected,
                      std::size_t constraints) {
  if (observed.size() != expected.size() || observed.empty())
    throw std::invalid_argument("chi_square: size mismatch");
  if (observed.size() <= constraints)
    throw std::invalid_argument("chi_square: no degrees of freedom");
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (!(expected[i] > 0.0))
      throw std::invalid_argument("chi_square: nonpositive expected count");
    const double d = observed[i] - expected[i];
    stat += d * d / expected[i];
  }
  const std::size_t dof = observed.size() - constraints;
  return {stat, gamma_q(0.5 * static_cast<double>(dof), 0.5 * stat), dof};
}

std::vector<double> quantile_edges(std::vector<double> sample, std::size_t k) {
  if (k < 2 || sample.size() < k)
    throw std::invalid_argument("quantile_edges: need k >= 2 and enough data");
  std::sort(sample.begin(), sample.end());
  std::vector<double> edges;
  edges.reserve(k - 1);
  const double n = static_cast<double>(sample.size());
  for (std::size_t j = 1; j < k; ++j) {
    const double q = static_cast<double>(j) / static_cast<double>(k);
    const double pos = q * (n - 1.0);
    const auto lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    const double hi_v = sample[std::min(lo + 1, sample.size() - 1)];
    edges.push_back(sample[lo] * (1.0 - frac) + hi_v * frac);
  }
  return edges;
}

double binned_l1(const std::vector<double>& a, const std::vector<double>& b,
                 const std::vector<double>& edges) {
  if (a.empty() || b.empty()) throw std::invalid_argument("binned_l1: empty sample");
  const std::size_t k = edges.size() + 1;
  auto bin_of = [&edges](double x) {
    return static_cast<std::size_t>(
        std::upper_bound(edges.begin(), edges.end(), x) - edges.begin());
  };
  std::vector<double> pa(k, 0.0);
  std::vector<double> pb(k, 0.0);
  for (double x : a) pa[bin_of(x)] += 1.0 / static_cast<double>(a.size());
  for (double x : b) pb[bin_of(x)] += 1.0 / static_cast<double>(b.size());
  double l1 = 0.0;
  for (std::size_t i = 0; i < k; ++i) l1 += std::fabs(pa[i] - pb[i]);
  return l1;
}

}  // namespace bdlab
