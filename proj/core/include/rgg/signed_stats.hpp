#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rgg/calibration.hpp"
#include "rgg/torus_model.hpp"

namespace rgg {

enum class PatternKind { cycle, chain, k2k, custom };

std::string to_string(PatternKind kind);

/// Small labeled pattern graph on vertices 0..vertices-1 (at most 16).
struct EdgePattern {
  int vertices = 0;
  std::vector<std::pair<int, int>> edges;
  PatternKind kind = PatternKind::custom;

  /// Cycle 0-1-...-(k-1)-0, k >= 3.
  static EdgePattern cycle(int k);
  /// Path 0-1-...-k with k >= 1 edges; endpoints are 0 and k.
  static EdgePattern chain(int k);
  /// K_{2,k}: vertices 0 and 1 each joined to 2, ..., k+1.
  static EdgePattern k2k(int k);
  static EdgePattern custom(int vertices, std::vector<std::pair<int, int>> edges);

  /// Throws InvalidArgument on out-of-range labels, self-loops, duplicate
  /// edges (non-custom) or a shape that does not match the kind.
  void validate() const;
};

struct StatReport {
  std::size_t trials = 0;
  double mean = 0.0;
  double stderr_value = 0.0;
  /// Comparison bound with every O(.) constant set to 1.
  std::optional<double> bound_value;
  std::map<std::string, double> extra;
};

/// prod_{e in pattern} (A[emb(e)] - p).
double signed_weight_sample(const AdjacencyMatrix& adjacency, const EdgePattern& pattern,
                            std::span<const std::size_t> embedding, double p);

/// T(G) = sum_{i<j<k} (G_ij - p)(G_ik - p)(G_jk - p), computed as tr(B^3)/6
/// with B = A - p off the diagonal and 0 on it.
double signed_triangle_count(const AdjacencyMatrix& adjacency, double p);
/// Triple loop over i < j < k.
double signed_triangle_count_bruteforce(const AdjacencyMatrix& adjacency, double p);

struct PatternMeanOptions {
  std::uint64_t stream_id = 0;
  /// Vertices whose positions are held fixed (each a d-vector) in every trial.
  std::map<int, std::vector<double>> pinned;
};

/// Signed-weight bound for cycles, chains and K_{2,k} with constants set to 1
/// and log n taken at config.n:
///   finite q, cycle:  p^k (log n / sqrt d)^{k-2}
///   finite q, chain:  p^k (log n / sqrt d)^{k-2} + p^k log^2 n (log n / sqrt d)^{k-1}
///                     (the endpoint-dependent |kappa| replaced by 1)
///   finite q, K_{2,k}: (log d log^2 n p^2 sqrt(k / d))^k
///   L_inf, cycle:     3 log n p^k (2 log(1/p) / d)^{k-2}
///   L_inf, chain:     3 log^2 n p^k (3 log(1/p) / d)^{k-1}
/// Empty for other patterns and for single edges.
std::optional<double> pattern_bound(const ModelConfig& config, const EdgePattern& pattern);

/// Monte Carlo mean of Sw(pattern) with positions drawn only for the pattern
/// vertices. extra holds:
///   p_all_present, p_all_present_stderr  (all pattern edges present)
///   identity_residual, identity_residual_stderr  (Sw - (1_all - p^|E|), paired)
StatReport estimate_pattern_mean(const ModelConfig& config, double tau, const EdgePattern& pattern,
                                 std::size_t trials, const PatternMeanOptions& options = {});

struct TriangleTestParams {
  double p = 0.5;
  std::size_t d = 1;
  int q = 2;
  /// Rescaled threshold; NaN means Phi^{-1}(p).
  double tau_hat = std::numeric_limits<double>::quiet_NaN();
  /// Frozen multiplier on the predicted RGG mean (see README).
  double scale = 1.0;
};

enum class TestDecision { rgg, gnp };

struct TriangleTestResult {
  TestDecision decision = TestDecision::gnp;
  double statistic = 0.0;
  double threshold = 0.0;
};

/// Predicted E[T] under RGG_q: C(n,3) |rho| phi(tau_hat)^3 / sqrt(d), with
/// rho the per-dimension triangle cumulant.
double predicted_triangle_mean(std::size_t n, const TriangleTestParams& params);

/// Decides RGG iff T(G) exceeds half the predicted RGG mean.
TriangleTestResult triangle_test(const AdjacencyMatrix& adjacency, const TriangleTestParams& params);

struct PowerRow {
  std::size_t d = 0;
  std::size_t trials = 0;
  double statistic_mean = 0.0;  ///< over the RGG arm
  double statistic_stderr = 0.0;
  double power = 0.0;
  double fpr = 0.0;
  double tau = 0.0;
  double tau_hat = 0.0;
};

struct PowerSweepOptions {
  /// Empirical-quantile calibration up to this d; above it the two-term Edgeworth quantile
  /// (pair sampling at huge d costs more than the trials themselves).
  std::size_t empirical_calibration_max_d = 4096;
  std::size_t calibration_budget = 2'000'000;
  double scale = 1.0;
  /// Replace the G(n,p) arm by independent RGG samples (exchangeability control).
  bool shuffled_control = false;
};

struct PowerSweep {
  std::vector<PowerRow> rows;
  /// Spearman rank correlation of power against d (NaN for a single row).
  double spearman_power_vs_d = 0.0;
};

/// Runs `trials` RGG and `trials` control graphs for every d in d_values.
PowerSweep power_sweep(const ModelConfig& base, std::span<const std::size_t> d_values, std::size_t trials,
                       const PowerSweepOptions& options = {});

/// Spearman rank correlation (average ranks for ties).
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace rgg
