#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace rgg {

/// Set partitions of {0, ..., r-1}, each partition a list of block bitmasks.
/// Enumerated via restricted-growth strings and cached per r (r <= 8).
const std::vector<std::vector<std::uint32_t>>& set_partitions(int r);

/// E[prod_{j in subset} X_j] for a subset given as a bitmask over [r].
using MomentOracle = std::function<double(std::uint32_t subset)>;

/// Joint cumulant kappa(X_1, ..., X_r) by Moebius inversion over set partitions:
///   sum_pi (|pi| - 1)! (-1)^{|pi| - 1} prod_{B in pi} E[prod_{j in B} X_j].
/// Throws UnsupportedOrder for r > 8.
double joint_cumulant_from_moments(const MomentOracle& moments, int r);

/// Multi-index s = (s_1, ..., s_k) of a joint cumulant kappa_s.
struct CumulantIndex {
  std::vector<int> s;

  int order() const;  ///< |s|
  /// Exactly one nonzero entry.
  bool is_pure() const;
  /// Two or more nonzero entries.
  bool is_mixed() const;
};

struct CumulantEstimate {
  double value = 0.0;
  double stderr_value = 0.0;
  /// Some column used by the index has zero sample variance; stderr is +inf.
  bool degenerate = false;
};

struct SampleCumulantOptions {
  int bootstrap_resamples = 200;
  std::uint64_t seed = 0;
};

/// Plug-in estimator of kappa_s from a trials x k sample matrix: the
/// partition formula evaluated on sample raw moments. Homogeneous of degree
/// |s| in the data. Standard error from a nonparametric bootstrap.
/// Requires trials >= 100 and |s| <= 6.
CumulantEstimate sample_cumulant(const Eigen::MatrixXd& samples, const CumulantIndex& index,
                                 const SampleCumulantOptions& options = {});

/// E[gamma(e1) gamma(e2) gamma(e3)] for a triangle of three i.i.d. uniform
/// circle points, gamma(e) = |x_u - x_v|_C^q - E|x_u - x_v|_C^q. Computed by
/// fixing one vertex at 0 and integrating the other two with nested adaptive
/// Gauss-Kronrod, split at the kinks of the wrap-around distance.
/// Throws NumericalFailure if the absolute error estimate exceeds 1e-8.
double triangle_gamma_moment(int q);

/// Monte Carlo estimate of E[prod_{j=1}^k gamma(e_j)] around a k-cycle on the
/// circle (one dimension).
struct GammaMomentEstimate {
  double value = 0.0;
  double stderr_value = 0.0;
  std::size_t samples = 0;
};
GammaMomentEstimate cycle_gamma_moment_mc(int q, int k, std::size_t samples, std::uint64_t seed);

struct CycleKappaOptions {
  /// Monte Carlo budget for k >= 4.
  std::size_t mc_samples = 10'000'000;
  std::uint64_t seed = 0;
};

struct CycleKappa {
  int q = 1;
  int k = 3;
  double zeta = 1.0;
  double gamma_moment = 0.0;  ///< E[prod gamma(e_j)]
  double rho = 0.0;           ///< (zeta sigma)^{-k} E[prod gamma(e_j)]
  double kappa_d = 0.0;       ///< d^{-(k-2)/2} rho
  double stderr_rho = 0.0;    ///< 0 when computed by quadrature
  bool from_quadrature = true;
};

/// Per-dimension mixed cumulant rho of a k-cycle and the order-k cumulant of
/// the normalized sum over d dimensions.
CycleKappa cycle_kappa(int q, int k, std::size_t d, double zeta = 1.0,
                       const CycleKappaOptions& options = {});

}  // namespace rgg
