#include "rgg/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rgg/errors.hpp"
#include "rgg/gaussian.hpp"
#include "rgg/parallel.hpp"
#include "rgg/rng.hpp"

namespace rgg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kChunk = 1 << 16;

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

double CoordinateMoments::sigma() const { return std::sqrt(sigma2); }

double CoordinateMoments::central(int k) const {
  if (k < 0 || k > 8) throw InvalidArgument("CoordinateMoments::central: order must be in [0, 8]");
  double acc = 0.0;
  for (int i = 0; i <= k; ++i) acc += binomial(k, i) * raw[i] * std::pow(-mu, k - i);
  return acc;
}

double CoordinateMoments::cumulant(int k) const {
  const double m2 = central(2);
  switch (k) {
    case 1: return mu;
    case 2: return m2;
    case 3: return central(3);
    case 4: return central(4) - 3.0 * m2 * m2;
    case 5: return central(5) - 10.0 * central(3) * m2;
    case 6: {
      const double m3 = central(3);
      return central(6) - 15.0 * central(4) * m2 - 10.0 * m3 * m3 + 30.0 * m2 * m2 * m2;
    }
    default: throw InvalidArgument("CoordinateMoments::cumulant: order must be in [1, 6]");
  }
}

double CoordinateMoments::standardized_cumulant(int k) const {
  return cumulant(k) / std::pow(sigma(), k);
}

CoordinateMoments coordinate_moments(int q) {
  if (q < 1) throw InvalidArgument("coordinate_moments: q must be >= 1");
  CoordinateMoments m;
  m.q = q;
  for (int j = 0; j <= 8; ++j) m.raw[j] = std::pow(0.5, j * q) / (j * q + 1.0);
  m.mu = m.raw[1];
  m.sigma2 = m.raw[2] - m.mu * m.mu;
  return m;
}

std::string to_string(CalibrationMethod method) {
  switch (method) {
    case CalibrationMethod::closed_form: return "closed_form";
    case CalibrationMethod::empirical_quantile: return "empirical_quantile";
    case CalibrationMethod::gaussian: return "gaussian";
    case CalibrationMethod::edgeworth: return "edgeworth";
  }
  return "unknown";
}

CalibrationMethod parse_calibration_method(std::string_view text) {
  if (text == "closed_form") return CalibrationMethod::closed_form;
  if (text == "empirical_quantile" || text == "empirical") return CalibrationMethod::empirical_quantile;
  if (text == "gaussian") return CalibrationMethod::gaussian;
  if (text == "edgeworth") return CalibrationMethod::edgeworth;
  throw InvalidArgument("unknown calibration method '" + std::string(text) + "'");
}

ThresholdResult calibrate_threshold_linf(std::size_t d, double p) {
  if (d < 1) throw InvalidArgument("calibrate_threshold_linf: d must be >= 1");
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("calibrate_threshold_linf: p must lie in (0, 1)");
  ThresholdResult r;
  const double root = std::pow(p, 1.0 / static_cast<double>(d));
  r.xi = -std::expm1(std::log(p) / static_cast<double>(d));
  r.tau = 0.5 * root;
  r.tau_hat = kNaN;
  r.method = CalibrationMethod::closed_form;
  r.target_p = p;
  r.achieved_p = p;
  r.stderr_p = 0.0;
  r.deviation_stderr = 0.0;
  return r;
}

double rescale(double tau, int q, std::size_t d) {
  const auto m = coordinate_moments(q);
  const double dd = static_cast<double>(d);
  return (tau - m.mu * dd) / (m.sigma() * std::sqrt(dd));
}

double unrescale(double tau_hat, int q, std::size_t d) {
  const auto m = coordinate_moments(q);
  const double dd = static_cast<double>(d);
  return m.mu * dd + m.sigma() * std::sqrt(dd) * tau_hat;
}

std::vector<double> sample_pair_distances(int q, std::size_t d, std::size_t count,
                                          std::uint64_t master_seed, std::uint64_t stream_id) {
  if (q < 1) throw InvalidArgument("sample_pair_distances: q must be >= 1");
  std::vector<double> out(count);
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  const std::uint64_t base = derive_seed(master_seed, stream_id);
  parallel_for(chunks, [&](std::size_t c) {
    Rng rng(base, c);
    const std::size_t begin = c * kChunk;
    const std::size_t end = std::min(count, begin + kChunk);
    for (std::size_t s = begin; s < end; ++s) {
      double lane[4] = {0, 0, 0, 0};
      std::size_t i = 0;
      for (; i + 4 <= d; i += 4) {
        for (int j = 0; j < 4; ++j) {
          const double t = 0.5 * rng.uniform01();
          double r = t;
          for (int k = 1; k < q; ++k) r *= t;
          lane[j] += r;
        }
      }
      for (int j = 0; i < d; ++i, ++j) {
        const double t = 0.5 * rng.uniform01();
        double r = t;
        for (int k = 1; k < q; ++k) r *= t;
        lane[j] += r;
      }
      out[s] = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    }
  });
  return out;
}

namespace {

// Two-term Edgeworth CDF of the standardized sum of d i.i.d. copies of U^q.
double edgeworth_cdf(double x, double k3, double k4, double d) {
  const double he2 = x * x - 1.0;
  const double he3 = x * x * x - 3.0 * x;
  const double he5 = hermite_he(5, x);
  const double correction = k3 / (6.0 * std::sqrt(d)) * he2 + (k4 / 24.0 * he3 + k3 * k3 / 72.0 * he5) / d;
  return normal_cdf(x) - normal_pdf(x) * correction;
}

double solve_edgeworth_quantile(double p, double k3, double k4, double d) {
  double x = normal_quantile(p);
  for (int it = 0; it < 100; ++it) {
    const double f = edgeworth_cdf(x, k3, k4, d) - p;
    const double h = 1e-6;
    const double slope = (edgeworth_cdf(x + h, k3, k4, d) - edgeworth_cdf(x - h, k3, k4, d)) / (2 * h);
    if (!(slope > 0.0)) throw NumericalFailure("edgeworth quantile: non-monotone expansion", std::fabs(f));
    const double step = f / slope;
    x -= step;
    if (std::fabs(step) < 1e-13) return x;
  }
  throw NumericalFailure("edgeworth quantile: Newton iteration did not converge", kNaN);
}

}  // namespace

ThresholdResult calibrate_threshold_lq(int q, std::size_t d, double p, const LqCalibrationOptions& options) {
  if (q < 1) throw InvalidArgument("calibrate_threshold_lq: q must be >= 1");
  if (d < 1) throw InvalidArgument("calibrate_threshold_lq: d must be >= 1");
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("calibrate_threshold_lq: p must lie in (0, 1)");

  const auto moments = coordinate_moments(q);
  const double dd = static_cast<double>(d);
  ThresholdResult r;
  r.method = options.method;
  r.target_p = p;
  r.xi = kNaN;

  switch (options.method) {
    case CalibrationMethod::empirical_quantile: {
      if (options.sample_budget < 10'000)
        throw InvalidArgument("calibrate_threshold_lq: empirical_quantile needs a budget >= 10^4");
      auto sample = sample_pair_distances(q, d, options.sample_budget, options.master_seed,
                                          options.stream_id);
      const auto n = static_cast<double>(sample.size());
      auto rank = static_cast<std::size_t>(std::ceil(p * n));
      rank = std::clamp<std::size_t>(rank, 1, sample.size());
      std::nth_element(sample.begin(), sample.begin() + static_cast<std::ptrdiff_t>(rank - 1), sample.end());
      r.tau = sample[rank - 1];
      r.sample_budget = sample.size();
      break;
    }
    case CalibrationMethod::gaussian:
      r.tau = unrescale(normal_quantile(p), q, d);
      break;
    case CalibrationMethod::edgeworth:
      r.tau = unrescale(solve_edgeworth_quantile(p, moments.standardized_cumulant(3),
                                                 moments.standardized_cumulant(4), dd),
                        q, d);
      break;
    case CalibrationMethod::closed_form:
      throw InvalidArgument("calibrate_threshold_lq: no closed form exists for finite q");
  }
  r.tau = std::max(r.tau, 0.0);
  r.tau_hat = rescale(r.tau, q, d);

  if (options.validation_budget == 0) {
    r.achieved_p = kNaN;
    r.stderr_p = kNaN;
    r.deviation_stderr = kNaN;
    return r;
  }
  // The validation stream is derived from the calibration stream so the two
  // samples never overlap.
  const auto check = sample_pair_distances(q, d, options.validation_budget, options.master_seed,
                                           derive_seed(options.stream_id, 0x76616c6964617465ULL));
  const auto hits = std::count_if(check.begin(), check.end(), [&](double x) { return x <= r.tau; });
  const auto nv = static_cast<double>(check.size());
  r.validation_budget = check.size();
  r.achieved_p = static_cast<double>(hits) / nv;
  r.stderr_p = std::sqrt(r.achieved_p * (1.0 - r.achieved_p) / nv);
  double var = p * (1.0 - p) / nv;
  if (options.method == CalibrationMethod::empirical_quantile)
    var += p * (1.0 - p) / static_cast<double>(r.sample_budget);
  r.deviation_stderr = std::sqrt(var);
  return r;
}

ThresholdResult calibrate(const ModelConfig& config, const LqCalibrationOptions& options) {
  config.validate();
  if (config.norm.is_infinite()) return calibrate_threshold_linf(config.d, config.p);
  LqCalibrationOptions opts = options;
  opts.master_seed = config.master_seed;
  return calibrate_threshold_lq(config.norm.q(), config.d, config.p, opts);
}

}  // namespace rgg
