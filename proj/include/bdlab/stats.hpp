#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace bdlab {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

MeanSe mean_se(const std::vector<double>& xs);

// Mean/SE after dropping floor(trim_frac * n) values from each tail; for
// heavy-tailed volume statistics where the plain mean never settles.
MeanSe trimmed_mean_se(std::vector<double> xs, double trim_frac);

struct KsResult {
  double stat = 0.0;
  double p_value = 1.0;
};

// One-sample Kolmogorov-Smirnov against a continuous CDF; asymptotic p-value.
KsResult ks_one_sample(std::vector<double> samples,
                       const std::function<double(double)>& cdf);

// Two-sample Kolmogorov-Smirnov with asymptotic p-value.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct Chi2Result {
  double stat = 0.0;
  double p_value = 1.0;
  std::size_t dof = 0;
};

// Pearson chi-square of observed vs expected counts; dof = bins - constraints.
Chi2Result chi_square(const std::vector<double>& observed,
                      const std::vector<double>& expected,
                      std::size_t constraints = 1);

// Regularized upper incomplete gamma Q(a, x); Q(k/2, x/2) is the chi-square
// survival function.
double gamma_q(double a, double x);

// Interior edges splitting a sample into k equal-probability bins.
std::vector<double> quantile_edges(std::vector<double> sample, std::size_t k);

// Bin both samples by `edges` (k-1 interior edges, k bins) and return the L1
// distance between the two empirical bin-probability vectors.
double binned_l1(const std::vector<double>& a, const std::vector<double>& b,
                 const std::vector<double>& edges);

}  // namespace bdlab
