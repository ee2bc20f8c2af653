#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rgg/signed_stats.hpp"
#include "rgg/torus_model.hpp"

namespace rgg {

struct GammaEstimate {
  double value = 0.0;
  double stderr_value = 0.0;
  std::size_t samples = 0;
};

/// gamma(x, y) = E_z[(1(Delta(x,z) <= tau) - p)(1(Delta(y,z) <= tau) - p)] by
/// plain Monte Carlo over uniform z. Requires mc_samples >= 1000.
GammaEstimate gamma_xy(std::span<const double> x, std::span<const double> y, Norm norm, double tau, double p,
                       std::size_t mc_samples, std::uint64_t master_seed, std::uint64_t stream_id);

struct K2kOptions {
  /// Uniform z per outer (x, y) draw.
  std::size_t inner_samples = 1000;
  std::uint64_t stream_id = 0;
};

/// Nested Monte Carlo for E_{x,y}[gamma(x,y)^j], j = 1..k_max. For each outer
/// draw the inner products w_i = (1_x(z_i) - p)(1_y(z_i) - p) give the
/// unbiased U-statistic e_j(w) / C(M, j) of gamma^j, so the outer average is
/// unbiased for every j. x is fixed at the origin (translation invariance).
/// Element j-1 of the result holds the estimate for j.
std::vector<StatReport> k2k_moments(const ModelConfig& config, double tau, int k_max, std::size_t trials,
                                    const K2kOptions& options = {});

/// E[Sw(K_{2,k})] = E_{x,y}[gamma(x,y)^k]. Requires k >= 1 and trials >= 10^4.
StatReport k2k_moment(const ModelConfig& config, double tau, int k, std::size_t trials,
                      const K2kOptions& options = {});

struct TvBoundReport {
  /// j = 2..truncation_k: n C(n,j) (p(1-p))^{-j} max(E[gamma^j], 0).
  std::vector<double> terms;
  std::vector<double> term_stderr;
  /// Same with the signed moment estimate (may be negative through noise).
  std::vector<double> raw_terms;
  double bound = 0.0;
  /// Geometric tail beyond truncation_k (0 if the last term is 0).
  double tail = 0.0;
  /// Last term ratio < 1/2.
  bool tail_certified = false;
  /// Last term ratio >= 1: bound is +inf.
  bool diverged = false;
  /// First j with term_j >= term_{j-1} > 0, if any.
  std::optional<int> first_diverging_j;
  int truncation_k = 0;
  std::size_t mc_budget = 0;
};

/// n sum_{j=2}^{k_max} C(n,j) (p(1-p))^{-j} E[Sw(K_{2,j})], binomials in log
/// space, plus a geometric tail estimate. Requires 2 <= k_max <= 64.
TvBoundReport tv_upper_bound(const ModelConfig& config, double tau, int k_max, std::size_t trials,
                             const K2kOptions& options = {});

}  // namespace rgg
