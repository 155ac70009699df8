#pragma once

#include <span>

namespace btcpanel {

// Regularized upper incomplete gamma Q(a, x), accurate to ~1e-12.
double gamma_q(double a, double x);

// Upper-tail p-value of a chi-square statistic with df degrees of freedom.
double chi2_upper_tail(double x, int df);

// Standard normal quantile (inverse CDF). Deterministic rational
// approximation refined by one Halley step; |error| < 1e-13 on (0,1).
double normal_quantile(double p);

// Two-sided standard normal p-value for a t-like statistic.
double normal_two_sided_p(double z);

// Kolmogorov-Smirnov distance between a sample and the uniform(0,1) CDF.
double ks_uniform_distance(std::span<const double> sample);

}  // namespace btcpanel
