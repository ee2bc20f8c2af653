#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "rgg/torus_model.hpp"

namespace rgg {

/// A - p 11^T (diagonal -p).
Eigen::MatrixXd center_adjacency(const AdjacencyMatrix& adjacency, double p);

struct SpectrumReport {
  /// Sorted descending.
  std::vector<double> eigenvalues;
  double lambda1 = 0.0;
  /// max(|lambda_2|, |lambda_n|).
  double lambda2_abs_max = 0.0;
  /// threshold -> #{i >= 2 : |lambda_i| >= threshold}
  std::map<double, std::size_t> counts;
  /// Largest relative residual ||Mv - lambda v|| / ||M||_2 over the spot checks.
  double max_relative_residual = 0.0;
};

struct SpectrumOptions {
  /// Eigenpairs checked by recomputing a vector (inverse iteration on the
  /// tridiagonal form, then back-transformed). 0 disables the check.
  std::size_t spot_checks = 5;
  double residual_tolerance = 1e-8;
  std::vector<double> count_thresholds;
};

/// Full spectrum of a symmetric matrix via Householder tridiagonalization and
/// implicit QL. Throws InvalidArgument if asymmetric beyond 1e-12 or n > 4000,
/// NumericalFailure if a spot-checked residual exceeds the tolerance.
SpectrumReport spectrum(const Eigen::MatrixXd& matrix, const SpectrumOptions& options = {});

enum class SpectralRegime { lq, linf };

/// Threshold np/(a sqrt d) (lq) or np/(a d) (linf).
double large_eigenvalue_threshold(std::size_t n, double p, std::size_t d, double a, SpectralRegime regime);

/// #{i >= 2 : |lambda_i| >= threshold}; lambda_1 is excluded.
std::size_t count_large_eigs(const SpectrumReport& report, double threshold);
std::size_t count_large_eigs(const SpectrumReport& report, std::size_t n, double p, std::size_t d, double a,
                             SpectralRegime regime);

struct ArcVector {
  /// +1 / 0 / -1 before normalization.
  std::vector<std::int8_t> entries;
  std::size_t dimension_index = 0;
  std::vector<double> centers;
  std::vector<double> half_widths;
  /// Both arcs empty.
  bool degenerate = false;

  std::size_t support_size() const;
  /// Unit-norm copy (zero vector when degenerate).
  Eigen::VectorXd normalized() const;
};

/// Arc half-width c with (2c)^q = mu_q / 2.
double default_arc_half_width(int q);

/// +1 on {|x_(i)|_C <= c}, -1 on {|x_(i)|_C >= 1/2 - c}. Requires 0 < c < 1/4.
ArcVector arc_vector_q(const Positions& positions, std::size_t i, double c);

/// floor(1/xi) vectors for dimension i. With m = floor(1/xi), the 2m arcs of
/// half-width xi/4 sit at centers j/(2m), j = 0..2m-1; vector t takes +1 on
/// the arc at t/(2m) and -1 on the opposite arc at t/(2m) + 1/2. Arcs are
/// half-open, [center - xi/4, center + xi/4), so points on opposite arcs are
/// at circle distance strictly above (1 - xi)/2. Requires 0 < xi < 1/2.
std::vector<ArcVector> arc_vectors_linf(const Positions& positions, std::size_t i, double xi);

/// Number of pairs (u, v) with u on the +1 arc and v on the -1 arc of the
/// same vector that are adjacent (0 by construction for calibrated L_inf graphs).
std::size_t inter_cluster_edges(const AdjacencyMatrix& adjacency, const ArcVector& vector);

/// y^T M y for a unit vector y (rescaled to unit norm if needed).
double rayleigh(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& vector);

/// max_{i != j} |y_i . y_j| over the normalized vectors.
double gram_offdiag(std::span<const Eigen::VectorXd> vectors);

/// Modified Gram-Schmidt in the given order; vectors that become numerically
/// zero are dropped.
std::vector<Eigen::VectorXd> gram_schmidt(std::span<const Eigen::VectorXd> vectors);

struct LiftReport {
  std::size_t above_before = 0;
  std::size_t above_after = 0;
  std::vector<double> rayleigh_before;
  std::vector<double> rayleigh_after;
};

/// Rayleigh quotients before and after orthonormalization, counted against threshold.
LiftReport gram_schmidt_lift(const Eigen::MatrixXd& matrix, std::span<const Eigen::VectorXd> vectors,
                             double threshold);

}  // namespace rgg
