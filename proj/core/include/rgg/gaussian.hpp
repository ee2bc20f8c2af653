#pragma once

namespace rgg {

/// Standard normal density.
double normal_pdf(double x);
/// Standard normal CDF, accurate to double precision in both tails.
double normal_cdf(double x);
/// Standard normal quantile; p in (0, 1).
double normal_quantile(double p);
/// Probabilists' Hermite polynomial He_n(x).
double hermite_he(int n, double x);

}  // namespace rgg
