#include "rgg/tv_bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rgg/errors.hpp"
#include "rgg/parallel.hpp"
#include "rgg/rng.hpp"

namespace rgg {

namespace {

constexpr std::size_t kOuterChunk = 256;

double log_choose(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

GammaEstimate gamma_xy(std::span<const double> x, std::span<const double> y, Norm norm, double tau, double p,
                       std::size_t mc_samples, std::uint64_t master_seed, std::uint64_t stream_id) {
  if (x.size() != y.size() || x.empty()) throw InvalidArgument("gamma_xy: positions must have equal nonzero length");
  if (mc_samples < 1000) throw InvalidArgument("gamma_xy: at least 1000 samples required");
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("gamma_xy: p must lie in (0, 1)");
  std::vector<double> xs(x.size()), ys(y.size()), z(x.size());
  std::transform(x.begin(), x.end(), xs.begin(), wrap_coordinate);
  std::transform(y.begin(), y.end(), ys.begin(), wrap_coordinate);
  Rng rng(master_seed, stream_id);
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t s = 0; s < mc_samples; ++s) {
    for (auto& c : z) c = rng.torus_coordinate();
    const double a = (pair_distance(xs, z, norm) <= tau ? 1.0 : 0.0) - p;
    const double b = (pair_distance(ys, z, norm) <= tau ? 1.0 : 0.0) - p;
    sum += a * b;
    sum2 += a * b * a * b;
  }
  const double n = static_cast<double>(mc_samples);
  GammaEstimate out;
  out.samples = mc_samples;
  out.value = sum / n;
  out.stderr_value = std::sqrt(std::max(0.0, (sum2 - n * out.value * out.value) / (n - 1.0)) / n);
  return out;
}

std::vector<StatReport> k2k_moments(const ModelConfig& config, double tau, int k_max, std::size_t trials,
                                    const K2kOptions& options) {
  config.validate();
  if (k_max < 1 || k_max > 64) throw InvalidArgument("k2k_moments: k_max must be in [1, 64]");
  if (trials < 2) throw InvalidArgument("k2k_moments: at least 2 outer trials required");
  if (options.inner_samples < static_cast<std::size_t>(std::max(k_max, 2)))
    throw InvalidArgument("k2k_moments: inner budget must be at least k_max");
  const std::size_t d = config.d;
  const double p = config.p;
  const auto kk = static_cast<std::size_t>(k_max);
  const std::size_t chunks = (trials + kOuterChunk - 1) / kOuterChunk;
  std::vector<std::vector<double>> sums(chunks, std::vector<double>(kk, 0.0));
  std::vector<std::vector<double>> sums2(chunks, std::vector<double>(kk, 0.0));
  const std::uint64_t base = derive_seed(config.master_seed, options.stream_id);
  const std::vector<double> origin(d, 0.0);

  parallel_for(chunks, [&](std::size_t c) {
    Rng rng(base, c);
    std::vector<double> y(d), z(d), e(kk + 1);
    const std::size_t begin = c * kOuterChunk;
    const std::size_t end = std::min(trials, begin + kOuterChunk);
    for (std::size_t t = begin; t < end; ++t) {
      for (auto& v : y) v = rng.torus_coordinate();
      std::fill(e.begin(), e.end(), 0.0);
      e[0] = 1.0;
      // e[j] tracks e_j(w_1..w_m) / C(m, j).
      for (std::size_t m = 1; m <= options.inner_samples; ++m) {
        for (auto& v : z) v = rng.torus_coordinate();
        const double a = (pair_distance(origin, z, config.norm) <= tau ? 1.0 : 0.0) - p;
        const double b = (pair_distance(y, z, config.norm) <= tau ? 1.0 : 0.0) - p;
        const double w = a * b;
        const double mm = static_cast<double>(m);
        for (std::size_t j = std::min(m, kk); j >= 1; --j) {
          const double jj = static_cast<double>(j);
          e[j] = ((mm - jj) / mm) * e[j] + (jj / mm) * w * e[j - 1];
        }
      }
      for (std::size_t j = 1; j <= kk; ++j) {
        sums[c][j - 1] += e[j];
        sums2[c][j - 1] += e[j] * e[j];
      }
    }
  });

  std::vector<StatReport> out(kk);
  const double n = static_cast<double>(trials);
  for (std::size_t j = 0; j < kk; ++j) {
    double s = 0.0, s2 = 0.0;
    for (std::size_t c = 0; c < chunks; ++c) {
      s += sums[c][j];
      s2 += sums2[c][j];
    }
    auto& r = out[j];
    r.trials = trials;
    r.mean = s / n;
    r.stderr_value = std::sqrt(std::max(0.0, (s2 - n * r.mean * r.mean) / (n - 1.0)) / n);
    r.extra["inner_samples"] = static_cast<double>(options.inner_samples);
    if (!config.norm.is_infinite()) {
      const double k = static_cast<double>(j + 1);
      const double dd = static_cast<double>(d);
      const double logn = std::log(static_cast<double>(config.n));
      r.bound_value = std::pow(std::log(dd) * logn * logn * p * p * std::sqrt(k / dd), k);
    }
  }
  return out;
}

StatReport k2k_moment(const ModelConfig& config, double tau, int k, std::size_t trials, const K2kOptions& options) {
  if (k < 1) throw InvalidArgument("k2k_moment: k must be >= 1");
  if (trials < 10'000) throw InvalidArgument("k2k_moment: at least 10^4 outer trials required");
  return k2k_moments(config, tau, k, trials, options).back();
}

TvBoundReport tv_upper_bound(const ModelConfig& config, double tau, int k_max, std::size_t trials,
                             const K2kOptions& options) {
  if (k_max < 2 || k_max > 64) throw InvalidArgument("tv_upper_bound: k_max must be in [2, 64]");
  const auto moments = k2k_moments(config, tau, k_max, trials, options);
  const double n = static_cast<double>(config.n);
  const double p = config.p;
  TvBoundReport report;
  report.truncation_k = k_max;
  report.mc_budget = trials * options.inner_samples;
  for (int j = 2; j <= k_max; ++j) {
    const auto& m = moments[static_cast<std::size_t>(j - 1)];
    if (static_cast<double>(j) > n) {
      report.terms.push_back(0.0);
      report.raw_terms.push_back(0.0);
      report.term_stderr.push_back(0.0);
      continue;
    }
    const double log_factor = std::log(n) + log_choose(n, j) - j * std::log(p * (1.0 - p));
    const double raw = m.mean == 0.0 ? 0.0 : std::copysign(std::exp(log_factor + std::log(std::fabs(m.mean))), m.mean);
    report.raw_terms.push_back(raw);
    report.terms.push_back(std::max(raw, 0.0));
    report.term_stderr.push_back(m.stderr_value == 0.0 ? 0.0 : std::exp(log_factor + std::log(m.stderr_value)));
  }
  for (std::size_t i = 1; i < report.terms.size(); ++i) {
    if (report.terms[i - 1] > 0.0 && report.terms[i] >= report.terms[i - 1]) {
      report.first_diverging_j = static_cast<int>(i) + 2;
      break;
    }
  }
  double total = 0.0;
  for (double t : report.terms) total += t;
  const double last = report.terms.back();
  const double prev = report.terms.size() >= 2 ? report.terms[report.terms.size() - 2] : 0.0;
  if (last == 0.0) {
    report.tail = 0.0;
    report.tail_certified = true;
  } else if (prev > 0.0 && last / prev < 1.0) {
    const double ratio = last / prev;
    report.tail = last * ratio / (1.0 - ratio);
    report.tail_certified = ratio < 0.5;
  } else {
    report.diverged = true;
    report.tail = std::numeric_limits<double>::infinity();
    if (!report.first_diverging_j) report.first_diverging_j = k_max;
  }
  report.bound = report.diverged ? std::numeric_limits<double>::infinity() : total + report.tail;
  return report;
}

}  // namespace rgg
