#include "rgg/cumulants.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <mutex>

#include "rgg/calibration.hpp"
#include "rgg/errors.hpp"
#include "rgg/parallel.hpp"
#include "rgg/rng.hpp"

namespace rgg {

namespace {

constexpr int kMaxOrder = 8;
constexpr double kQuadTolerance = 1e-8;
constexpr std::size_t kMaxEvaluations = 10'000'000;
constexpr std::size_t kChunk = 1 << 16;

std::vector<std::vector<std::uint32_t>> enumerate_partitions(int r) {
  std::vector<std::vector<std::uint32_t>> out;
  if (r == 0) {
    out.emplace_back();
    return out;
  }
  // a[i] is the block of element i; a[0] = 0 and a[i] <= 1 + max(a[0..i-1]).
  std::vector<int> a(r, 0), prefix_max(r, 0);
  while (true) {
    const int blocks = prefix_max[r - 1] + 1;
    std::vector<std::uint32_t> partition(blocks, 0);
    for (int i = 0; i < r; ++i) partition[a[i]] |= 1U << i;
    out.push_back(std::move(partition));

    int i = r - 1;
    while (i > 0 && a[i] == prefix_max[i - 1] + 1) --i;
    if (i == 0) break;
    ++a[i];
    prefix_max[i] = std::max(prefix_max[i - 1], a[i]);
    for (int j = i + 1; j < r; ++j) {
      a[j] = 0;
      prefix_max[j] = prefix_max[i];
    }
  }
  return out;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Partition sum over pre-computed subset means.
double cumulant_from_subset_means(const std::vector<double>& means, int r) {
  double total = 0.0;
  for (const auto& partition : set_partitions(r)) {
    const int b = static_cast<int>(partition.size());
    double term = (b % 2 == 1 ? 1.0 : -1.0) * factorial(b - 1);
    for (std::uint32_t block : partition) term *= means[block];
    total += term;
  }
  return total;
}

}  // namespace

const std::vector<std::vector<std::uint32_t>>& set_partitions(int r) {
  if (r < 0 || r > kMaxOrder) throw UnsupportedOrder("set_partitions: order must be in [0, 8]");
  static std::array<std::vector<std::vector<std::uint32_t>>, kMaxOrder + 1> cache;
  static std::array<std::once_flag, kMaxOrder + 1> once;
  std::call_once(once[r], [r] { cache[r] = enumerate_partitions(r); });
  return cache[r];
}

double joint_cumulant_from_moments(const MomentOracle& moments, int r) {
  if (r > kMaxOrder) throw UnsupportedOrder("joint_cumulant_from_moments: order must be <= 8");
  if (r < 1) throw InvalidArgument("joint_cumulant_from_moments: order must be >= 1");
  std::vector<double> means(std::size_t{1} << r, 1.0);
  for (std::uint32_t mask = 1; mask < means.size(); ++mask) means[mask] = moments(mask);
  return cumulant_from_subset_means(means, r);
}

int CumulantIndex::order() const {
  int total = 0;
  for (int v : s) total += v;
  return total;
}

bool CumulantIndex::is_pure() const {
  return std::count_if(s.begin(), s.end(), [](int v) { return v != 0; }) == 1;
}

bool CumulantIndex::is_mixed() const {
  return std::count_if(s.begin(), s.end(), [](int v) { return v != 0; }) >= 2;
}

CumulantEstimate sample_cumulant(const Eigen::MatrixXd& samples, const CumulantIndex& index,
                                 const SampleCumulantOptions& options) {
  const auto trials = static_cast<std::size_t>(samples.rows());
  if (trials < 100) throw InvalidArgument("sample_cumulant: at least 100 trials required");
  if (static_cast<Eigen::Index>(index.s.size()) != samples.cols())
    throw InvalidArgument("sample_cumulant: index length must equal the number of columns");
  for (int v : index.s)
    if (v < 0) throw InvalidArgument("sample_cumulant: index entries must be non-negative");
  const int r = index.order();
  if (r < 1 || r > 6) throw UnsupportedOrder("sample_cumulant: |s| must be in [1, 6]");
  if (options.bootstrap_resamples < 200)
    throw InvalidArgument("sample_cumulant: at least 200 bootstrap resamples required");

  // Variable j of the joint cumulant is column column_of[j].
  std::vector<Eigen::Index> column_of;
  for (std::size_t c = 0; c < index.s.size(); ++c)
    for (int t = 0; t < index.s[c]; ++t) column_of.push_back(static_cast<Eigen::Index>(c));

  const std::size_t subsets = std::size_t{1} << r;
  // Per-trial products over every subset, built by peeling the lowest bit.
  Eigen::MatrixXd products(static_cast<Eigen::Index>(trials), static_cast<Eigen::Index>(subsets));
  products.col(0).setOnes();
  for (std::size_t mask = 1; mask < subsets; ++mask) {
    const int low = std::countr_zero(static_cast<unsigned>(mask));
    products.col(static_cast<Eigen::Index>(mask)) =
        products.col(static_cast<Eigen::Index>(mask & (mask - 1))).cwiseProduct(samples.col(column_of[low]));
  }

  auto estimate = [&](const std::vector<std::uint32_t>* weights) {
    std::vector<double> means(subsets, 0.0);
    for (std::size_t mask = 0; mask < subsets; ++mask) {
      const double* column = products.col(static_cast<Eigen::Index>(mask)).data();
      double acc = 0.0;
      if (weights == nullptr) {
        for (std::size_t t = 0; t < trials; ++t) acc += column[t];
      } else {
        for (std::size_t t = 0; t < trials; ++t) acc += (*weights)[t] * column[t];
      }
      means[mask] = acc / static_cast<double>(trials);
    }
    return cumulant_from_subset_means(means, r);
  };

  CumulantEstimate out;
  out.value = estimate(nullptr);

  for (std::size_t c = 0; c < index.s.size(); ++c) {
    if (index.s[c] == 0) continue;
    const auto col = samples.col(static_cast<Eigen::Index>(c));
    if ((col.array() == col(0)).all()) out.degenerate = true;
  }
  if (out.degenerate) {
    out.stderr_value = std::numeric_limits<double>::infinity();
    return out;
  }

  // Bootstrap through multiplicity weights so the product table is reused.
  Rng rng(options.seed, 0x626f6f74ULL);
  std::vector<std::uint32_t> weights(trials);
  double sum = 0.0, sum2 = 0.0;
  for (int b = 0; b < options.bootstrap_resamples; ++b) {
    std::fill(weights.begin(), weights.end(), 0U);
    for (std::size_t t = 0; t < trials; ++t)
      ++weights[static_cast<std::size_t>(rng.uniform01() * static_cast<double>(trials))];
    const double v = estimate(&weights);
    sum += v;
    sum2 += v * v;
  }
  const double nb = options.bootstrap_resamples;
  const double mean = sum / nb;
  out.stderr_value = std::sqrt(std::max(0.0, (sum2 - nb * mean * mean) / (nb - 1.0)));
  return out;
}

double triangle_gamma_moment(int q) {
  if (q < 1) throw InvalidArgument("triangle_gamma_moment: q must be >= 1");
  using boost::math::quadrature::gauss_kronrod;
  const double mu = coordinate_moments(q).mu;
  auto power = [q](double t) {
    double r = 1.0;
    for (int i = 0; i < q; ++i) r *= t;
    return r;
  };

  std::size_t evaluations = 0;
  double worst_error = 0.0;
  // Vertex 1 sits at 0. By the reflection (y, z) -> (-y, -z) it suffices to
  // integrate y over [0, 1/2] and double. For fixed y the integrand in z is
  // polynomial between the breakpoints -1/2, y - 1/2, 0, y, 1/2.
  auto inner = [&](double y) {
    const double gy = power(y) - mu;
    auto integrand = [&](double z) {
      ++evaluations;
      const double t = std::fabs(y - z);
      const double yz = std::min(t, 1.0 - t);
      return gy * (power(std::fabs(z)) - mu) * (power(yz) - mu);
    };
    const double breaks[] = {-0.5, y - 0.5, 0.0, y, 0.5};
    double total = 0.0;
    for (int i = 0; i < 4; ++i) {
      if (breaks[i + 1] <= breaks[i]) continue;
      double err = 0.0;
      total += gauss_kronrod<double, 31>::integrate(integrand, breaks[i], breaks[i + 1], 15,
                                                    kQuadTolerance * 1e-2, &err);
      worst_error = std::max(worst_error, err);
    }
    if (evaluations > kMaxEvaluations)
      throw NumericalFailure("triangle_gamma_moment: evaluation budget exhausted", worst_error);
    return total;
  };
  double outer_error = 0.0;
  const double half = gauss_kronrod<double, 31>::integrate(inner, 0.0, 0.5, 15, kQuadTolerance * 1e-2,
                                                           &outer_error);
  const double achieved = 2.0 * (outer_error + 0.5 * worst_error);
  if (!(achieved <= kQuadTolerance) || !std::isfinite(half))
    throw NumericalFailure("triangle_gamma_moment: quadrature did not converge", achieved);
  return 2.0 * half;
}

GammaMomentEstimate cycle_gamma_moment_mc(int q, int k, std::size_t samples, std::uint64_t seed) {
  if (q < 1) throw InvalidArgument("cycle_gamma_moment_mc: q must be >= 1");
  if (k < 3 || k > 16) throw InvalidArgument("cycle_gamma_moment_mc: k must be in [3, 16]");
  if (samples < 2) throw InvalidArgument("cycle_gamma_moment_mc: at least 2 samples required");
  const double mu = coordinate_moments(q).mu;
  const std::size_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<double> sums(chunks), sums2(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    Rng rng(derive_seed(seed, 0x6379636c65ULL), c);
    const std::size_t begin = c * kChunk;
    const std::size_t end = std::min(samples, begin + kChunk);
    double s = 0.0, s2 = 0.0;
    std::array<double, 16> x{};
    for (std::size_t t = begin; t < end; ++t) {
      for (int j = 0; j < k; ++j) x[j] = rng.uniform01();
      double prod = 1.0;
      for (int j = 0; j < k; ++j) {
        const double g = std::fabs(x[j] - x[(j + 1) % k]);
        double dist = std::min(g, 1.0 - g);
        double pw = dist;
        for (int i = 1; i < q; ++i) pw *= dist;
        prod *= pw - mu;
      }
      s += prod;
      s2 += prod * prod;
    }
    sums[c] = s;
    sums2[c] = s2;
  });
  double s = 0.0, s2 = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    s += sums[c];
    s2 += sums2[c];
  }
  const double n = static_cast<double>(samples);
  GammaMomentEstimate out;
  out.samples = samples;
  out.value = s / n;
  const double var = std::max(0.0, (s2 - n * out.value * out.value) / (n - 1.0));
  out.stderr_value = std::sqrt(var / n);
  return out;
}

CycleKappa cycle_kappa(int q, int k, std::size_t d, double zeta, const CycleKappaOptions& options) {
  if (q < 1) throw InvalidArgument("cycle_kappa: q must be >= 1");
  if (k < 3) throw InvalidArgument("cycle_kappa: k must be >= 3");
  if (d < 1) throw InvalidArgument("cycle_kappa: d must be >= 1");
  if (!(zeta >= 1.0) || !std::isfinite(zeta)) throw InvalidArgument("cycle_kappa: zeta must be >= 1");
  CycleKappa out;
  out.q = q;
  out.k = k;
  out.zeta = zeta;
  const double scale = std::pow(zeta * coordinate_moments(q).sigma(), -k);
  if (k == 3) {
    out.gamma_moment = triangle_gamma_moment(q);
    out.from_quadrature = true;
    out.stderr_rho = 0.0;
  } else {
    const auto mc = cycle_gamma_moment_mc(q, k, options.mc_samples, options.seed);
    out.gamma_moment = mc.value;
    out.from_quadrature = false;
    out.stderr_rho = scale * mc.stderr_value;
  }
  out.rho = scale * out.gamma_moment;
  out.kappa_d = std::pow(static_cast<double>(d), -(k - 2) / 2.0) * out.rho;
  return out;
}

}  // namespace rgg
