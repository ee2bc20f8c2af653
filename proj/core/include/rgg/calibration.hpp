#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rgg/torus_model.hpp"

namespace rgg {

/// Moments of a single distance component U^q with U ~ Uniform(0, 1/2),
/// i.e. the law of |x - y|_C^q for independent uniform circle points.
struct CoordinateMoments {
  int q = 1;
  double mu = 0.0;      ///< E[U^q] = (1/2)^q / (q + 1)
  double sigma2 = 0.0;  ///< Var[U^q]
  /// raw[j] = E[U^{jq}] for j = 0..8 (raw[0] = 1).
  std::array<double, 9> raw{};

  double sigma() const;
  /// E[(U^q - mu)^k] for k <= 8.
  double central(int k) const;
  /// k-th cumulant of U^q, k <= 6.
  double cumulant(int k) const;
  /// cumulant(k) / sigma^k.
  double standardized_cumulant(int k) const;
};

/// Closed forms; throws InvalidArgument for q < 1.
CoordinateMoments coordinate_moments(int q);

enum class CalibrationMethod { closed_form, empirical_quantile, gaussian, edgeworth };

std::string to_string(CalibrationMethod method);
CalibrationMethod parse_calibration_method(std::string_view text);

/// A connection threshold and how well it reproduces the target p.
struct ThresholdResult {
  double tau = 0.0;
  /// (tau - mu d) / (sigma sqrt d) for finite q; NaN for L_inf.
  double tau_hat = 0.0;
  /// L_inf only: xi with (1 - xi)^d = p, so tau = (1 - xi) / 2. NaN otherwise.
  double xi = 0.0;
  CalibrationMethod method = CalibrationMethod::closed_form;
  double target_p = 0.0;
  /// Fraction of an independent validation sample with Delta <= tau
  /// (exactly p for closed forms; NaN when validation was skipped).
  double achieved_p = 0.0;
  /// Binomial standard error of achieved_p.
  double stderr_p = 0.0;
  /// Standard error of (achieved_p - target_p): validation noise combined
  /// with the quantile noise of the calibration sample itself.
  double deviation_stderr = 0.0;
  std::size_t sample_budget = 0;
  std::size_t validation_budget = 0;
};

/// Exact L_inf threshold: xi = 1 - p^{1/d}, tau = p^{1/d} / 2.
ThresholdResult calibrate_threshold_linf(std::size_t d, double p);

struct LqCalibrationOptions {
  CalibrationMethod method = CalibrationMethod::empirical_quantile;
  std::size_t sample_budget = 2'000'000;
  /// Independent pairs used to measure achieved_p; 0 skips validation.
  std::size_t validation_budget = 2'000'000;
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
};

/// Threshold for finite q.
///  - empirical_quantile: order statistic ceil(p N) of N i.i.d. pair distances
///    (requires N >= 10^4);
///  - gaussian: tau_hat = Phi^{-1}(p);
///  - edgeworth: tau_hat solves the two-term Edgeworth CDF equation F(x) = p.
ThresholdResult calibrate_threshold_lq(int q, std::size_t d, double p,
                                       const LqCalibrationOptions& options = {});

/// Dispatches on config.norm (closed form for L_inf). The seed comes from
/// config.master_seed; options.master_seed is ignored.
ThresholdResult calibrate(const ModelConfig& config, const LqCalibrationOptions& options = {});

/// tau_hat = (tau - mu d) / (sigma sqrt d) and its inverse.
double rescale(double tau, int q, std::size_t d);
double unrescale(double tau_hat, int q, std::size_t d);

/// Draws N i.i.d. copies of Delta for a uniform pair (finite q) using the
/// identity |x - y|_C ~ Uniform(0, 1/2). Chunked into fixed sub-streams, so
/// the output is independent of the thread count.
std::vector<double> sample_pair_distances(int q, std::size_t d, std::size_t count,
                                          std::uint64_t master_seed, std::uint64_t stream_id);

}  // namespace rgg
