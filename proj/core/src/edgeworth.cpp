#include "rgg/edgeworth.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>

#include "rgg/calibration.hpp"
#include "rgg/errors.hpp"
#include "rgg/gaussian.hpp"

namespace rgg {

namespace {

constexpr double kUnderflowX = 15.0;
// Near the quadrature roundoff level of the panel sums.
constexpr double kCoefficientFloor = 1e-14;
constexpr std::size_t kTailRun = 64;
constexpr std::size_t kMaxTerms = std::size_t{1} << 13;

void check_order(int order) {
  if (order < 2 || order > 4) throw InvalidArgument("Edgeworth order must be 2, 3 or 4");
}

}  // namespace

double edgeworth_marginal_density(double x, int q, std::size_t d, int order) {
  check_order(order);
  if (d < 1) throw InvalidArgument("edgeworth_marginal_density: d must be >= 1");
  const double base = normal_pdf(x);
  if (order == 2) return base;
  const auto m = coordinate_moments(q);
  const double k3 = m.standardized_cumulant(3);
  const double dd = static_cast<double>(d);
  double correction = k3 / 6.0 * hermite_he(3, x) / std::sqrt(dd);
  if (order == 4) {
    const double k4 = m.standardized_cumulant(4);
    correction += (k4 / 24.0 * hermite_he(4, x) + k3 * k3 / 72.0 * hermite_he(6, x)) / dd;
  }
  return base * (1.0 + correction);
}

void EdgeworthParams::validate() const {
  if (d < 1) throw InvalidArgument("EdgeworthParams: d must be >= 1");
  if (k < 2) throw InvalidArgument("EdgeworthParams: k must be >= 2");
  if (!(zeta >= 1.0) || !std::isfinite(zeta)) throw InvalidArgument("EdgeworthParams: zeta must be >= 1");
  if (!std::isfinite(kappa)) throw InvalidArgument("EdgeworthParams: kappa must be finite");
  check_order(order);
}

double edgeworth_joint_correction(std::span<const double> x, const EdgeworthParams& params) {
  params.validate();
  if (x.size() != static_cast<std::size_t>(params.k))
    throw InvalidArgument("edgeworth_joint: x must have k entries");
  double prod = 1.0;
  for (double v : x) prod *= -v * normal_pdf(v);
  const double sign = params.k % 2 == 0 ? 1.0 : -1.0;
  return sign * params.kappa * std::pow(static_cast<double>(params.d), -(params.k - 2) / 2.0) * prod;
}

double edgeworth_joint_leading(std::span<const double> x, const EdgeworthParams& params, int q) {
  const double correction = edgeworth_joint_correction(x, params);
  double f_ind = 1.0;
  for (double v : x) f_ind *= edgeworth_marginal_density(v, q, params.d, params.order);
  return f_ind + correction;
}

std::complex<double> MarginalDensityOracle::component_cf(double t, int q) {
  if (q < 1) throw InvalidArgument("component_cf: q must be >= 1");
  using Rule = boost::math::quadrature::gauss<double, 16>;
  // The phase t u^q sweeps at most |t| 2^{-q} radians over [0, 1/2]; with at
  // most 4 radians per panel the 16-point rule is accurate to roundoff.
  const auto panels = static_cast<std::size_t>(4 + std::ceil(0.25 * std::fabs(t) * std::pow(0.5, q)));
  const double width = 0.5 / static_cast<double>(panels);
  const auto& nodes = Rule::abscissa();
  const auto& weights = Rule::weights();
  auto phase_at = [&](double u) {
    double pw = 1.0;
    for (int i = 0; i < q; ++i) pw *= u;
    return std::polar(1.0, t * pw);
  };
  std::complex<double> total = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = (static_cast<double>(p) + 0.5) * width;
    const double half = 0.5 * width;
    // Even-point rules store positive abscissae only, no centre node.
    std::complex<double> panel = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      panel += weights[i] * (phase_at(mid + half * nodes[i]) + phase_at(mid - half * nodes[i]));
    }
    total += half * panel;
  }
  // Density of U is 2 on [0, 1/2].
  return 2.0 * total;
}

MarginalDensityOracle::MarginalDensityOracle(int q, std::size_t d) : q_(q), d_(d) {
  if (q < 1) throw InvalidArgument("marginal_density_oracle: q must be >= 1");
  if (d < 1 || d > 4096) throw InvalidArgument("marginal_density_oracle: d must be in [1, 4096]");
  const auto m = coordinate_moments(q);
  const double dd = static_cast<double>(d);
  length_ = dd * std::pow(0.5, q);
  mu_ = m.mu * dd;
  scale_ = m.sigma() * std::sqrt(dd);

  std::size_t small_run = 0;
  converged_ = false;
  for (std::size_t k = 1; k <= kMaxTerms; ++k) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / length_;
    const auto psi = component_cf(t, q);
    const double magnitude = std::pow(std::abs(psi), dd);
    const auto c = magnitude == 0.0 ? std::complex<double>(0.0)
                                    : std::polar(magnitude, dd * std::arg(psi));
    coefficients_.push_back(c);
    small_run = magnitude < kCoefficientFloor ? small_run + 1 : 0;
    if (small_run >= kTailRun) {
      converged_ = true;
      coefficients_.resize(coefficients_.size() - small_run);
      break;
    }
  }
}

MarginalDensityOracle::Value MarginalDensityOracle::operator()(double x) const {
  Value out;
  if (!std::isfinite(x)) throw InvalidArgument("marginal_density_oracle: x must be finite");
  if (std::fabs(x) > kUnderflowX) {
    out.underflow = true;
    return out;
  }
  const double s = mu_ + scale_ * x;
  if (s < 0.0 || s > length_) return out;
  // Real part of sum_k c_k e^{-2 pi i k s / L}, summed from the smallest terms up.
  const double omega = 2.0 * std::numbers::pi * s / length_;
  double series = 0.0;
  for (std::size_t k = coefficients_.size(); k-- > 0;) {
    const double angle = omega * static_cast<double>(k + 1);
    series += coefficients_[k].real() * std::cos(angle) + coefficients_[k].imag() * std::sin(angle);
  }
  const double f_s = (1.0 + 2.0 * series) / length_;
  out.density = std::max(0.0, scale_ * f_s);
  return out;
}

double marginal_density_oracle(double x, int q, std::size_t d) {
  return MarginalDensityOracle(q, d)(x).density;
}

}  // namespace rgg
