#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace rgg {

/// Edgeworth approximation to the density of r = sum_i (Delta_i - mu)/(sigma sqrt d):
///   order 2: phi(x)
///   order 3: phi(x) (1 + k3/6 He3(x) / sqrt d)
///   order 4: adds (k4/24 He4(x) + k3^2/72 He6(x)) / d
/// where k3, k4 are standardized cumulants of one component U^q.
double edgeworth_marginal_density(double x, int q, std::size_t d, int order);

struct EdgeworthParams {
  std::size_t d = 1;
  int k = 2;
  /// Averaged order-(1,...,1) mixed cumulant (already includes (zeta sigma)^{-k}).
  double kappa = 0.0;
  double zeta = 1.0;
  /// Order of the marginal expansion used for the ground state.
  int order = 2;

  void validate() const;
};

/// Leading-order joint density of a k-cycle/chain distance vector:
///   f_ind(x) + (-1)^k kappa d^{-(k-2)/2} prod_j phi'(x_j),
/// with f_ind the product of Edgeworth marginals and phi'(x) = -x phi(x).
double edgeworth_joint_leading(std::span<const double> x, const EdgeworthParams& params, int q);

/// Only the correction term (-1)^k kappa d^{-(k-2)/2} prod_j phi'(x_j).
double edgeworth_joint_correction(std::span<const double> x, const EdgeworthParams& params);

/// Exact density of r by characteristic-function inversion. The sum
/// S = sum_i U_i^q lives on [0, L] with L = d 2^{-q}, so its density is the
/// Fourier series with coefficients psi(2 pi k / L)^d, psi the single-component
/// characteristic function (computed by composite Gauss-Legendre quadrature).
class MarginalDensityOracle {
 public:
  struct Value {
    double density = 0.0;
    /// |x| > 15: reported as 0 without evaluation.
    bool underflow = false;
  };

  /// Requires d <= 4096.
  MarginalDensityOracle(int q, std::size_t d);

  Value operator()(double x) const;
  /// Number of Fourier coefficients retained.
  std::size_t terms() const noexcept { return coefficients_.size(); }
  /// False if the coefficient search hit its cap before the tail decayed.
  bool converged() const noexcept { return converged_; }

  /// E[exp(i t U^q)] for U ~ Uniform(0, 1/2).
  static std::complex<double> component_cf(double t, int q);

 private:
  int q_;
  std::size_t d_;
  double length_;
  double mu_;
  double scale_;
  std::vector<std::complex<double>> coefficients_;  // k = 1, 2, ...
  bool converged_ = true;
};

double marginal_density_oracle(double x, int q, std::size_t d);

}  // namespace rgg
