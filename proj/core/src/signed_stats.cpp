#include "rgg/signed_stats.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "rgg/cumulants.hpp"
#include "rgg/errors.hpp"
#include "rgg/gaussian.hpp"
#include "rgg/parallel.hpp"
#include "rgg/rng.hpp"

namespace rgg {

namespace {

constexpr std::size_t kTrialChunk = 8192;
constexpr int kMaxPatternVertices = 16;

constexpr std::uint64_t kRggArm = 0x7267672d61726dULL;
constexpr std::uint64_t kControlArm = 0x676e702d61726dULL;
constexpr std::uint64_t kCalibrationArm = 0x63616c6962ULL;

double choose3(std::size_t n) {
  const double x = static_cast<double>(n);
  return x * (x - 1.0) * (x - 2.0) / 6.0;
}

struct Moments {
  double sum = 0.0;
  double sum2 = 0.0;
  void add(double x) {
    sum += x;
    sum2 += x * x;
  }
  void merge(const Moments& o) {
    sum += o.sum;
    sum2 += o.sum2;
  }
  double mean(double n) const { return sum / n; }
  double stderr_of_mean(double n) const {
    if (n < 2.0) return 0.0;
    const double m = sum / n;
    return std::sqrt(std::max(0.0, (sum2 - n * m * m) / (n - 1.0)) / n);
  }
};

}  // namespace

std::string to_string(PatternKind kind) {
  switch (kind) {
    case PatternKind::cycle: return "cycle";
    case PatternKind::chain: return "chain";
    case PatternKind::k2k: return "K2k";
    case PatternKind::custom: return "custom";
  }
  return "unknown";
}

EdgePattern EdgePattern::cycle(int k) {
  if (k < 3 || k > kMaxPatternVertices) throw InvalidArgument("EdgePattern::cycle: k must be in [3, 16]");
  EdgePattern p;
  p.kind = PatternKind::cycle;
  p.vertices = k;
  for (int i = 0; i < k; ++i) p.edges.emplace_back(i, (i + 1) % k);
  return p;
}

EdgePattern EdgePattern::chain(int k) {
  if (k < 1 || k + 1 > kMaxPatternVertices) throw InvalidArgument("EdgePattern::chain: k must be in [1, 15]");
  EdgePattern p;
  p.kind = PatternKind::chain;
  p.vertices = k + 1;
  for (int i = 0; i < k; ++i) p.edges.emplace_back(i, i + 1);
  return p;
}

EdgePattern EdgePattern::k2k(int k) {
  if (k < 1 || k + 2 > kMaxPatternVertices) throw InvalidArgument("EdgePattern::k2k: k must be in [1, 14]");
  EdgePattern p;
  p.kind = PatternKind::k2k;
  p.vertices = k + 2;
  for (int j = 0; j < k; ++j) {
    p.edges.emplace_back(0, j + 2);
    p.edges.emplace_back(1, j + 2);
  }
  return p;
}

EdgePattern EdgePattern::custom(int vertices, std::vector<std::pair<int, int>> edges) {
  EdgePattern p;
  p.kind = PatternKind::custom;
  p.vertices = vertices;
  p.edges = std::move(edges);
  p.validate();
  return p;
}

void EdgePattern::validate() const {
  if (vertices < 0 || vertices > kMaxPatternVertices)
    throw InvalidArgument("EdgePattern: vertex count must be in [0, 16]");
  std::set<std::pair<int, int>> seen;
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= vertices || v >= vertices)
      throw InvalidArgument("EdgePattern: edge endpoint out of range");
    if (u == v) throw InvalidArgument("EdgePattern: self-loops are not allowed");
    if (!seen.insert(std::minmax(u, v)).second && kind != PatternKind::custom)
      throw InvalidArgument("EdgePattern: duplicate edge");
  }
  std::vector<int> degree(vertices, 0);
  for (auto [u, v] : edges) {
    ++degree[u];
    ++degree[v];
  }
  auto all_of_degree = [&](auto pred) { return std::all_of(degree.begin(), degree.end(), pred); };
  switch (kind) {
    case PatternKind::cycle:
      if (vertices < 3 || static_cast<int>(edges.size()) != vertices || !all_of_degree([](int x) { return x == 2; }))
        throw InvalidArgument("EdgePattern: not a cycle");
      break;
    case PatternKind::chain:
      if (static_cast<int>(edges.size()) != vertices - 1 || vertices < 2 ||
          std::count(degree.begin(), degree.end(), 1) != 2 || !all_of_degree([](int x) { return x == 1 || x == 2; }))
        throw InvalidArgument("EdgePattern: not a chain");
      break;
    case PatternKind::k2k:
      if (vertices < 3 || static_cast<int>(edges.size()) != 2 * (vertices - 2))
        throw InvalidArgument("EdgePattern: not a K_{2,k}");
      break;
    case PatternKind::custom: break;
  }
}

double signed_weight_sample(const AdjacencyMatrix& adjacency, const EdgePattern& pattern,
                            std::span<const std::size_t> embedding, double p) {
  if (embedding.size() != static_cast<std::size_t>(pattern.vertices))
    throw InvalidArgument("signed_weight_sample: embedding must map every pattern vertex");
  std::set<std::size_t> image;
  for (std::size_t v : embedding) {
    if (v >= adjacency.size()) throw InvalidArgument("signed_weight_sample: embedding out of range");
    if (!image.insert(v).second) throw InvalidArgument("signed_weight_sample: embedding is not injective");
  }
  double w = 1.0;
  for (auto [u, v] : pattern.edges) w *= (adjacency(embedding[u], embedding[v]) ? 1.0 : 0.0) - p;
  return w;
}

namespace {

Eigen::MatrixXd centered_zero_diagonal(const AdjacencyMatrix& adjacency, double p) {
  const auto n = static_cast<Eigen::Index>(adjacency.size());
  Eigen::MatrixXd b(n, n);
  for (Eigen::Index u = 0; u < n; ++u)
    for (Eigen::Index v = 0; v < n; ++v)
      b(u, v) = u == v ? 0.0 : (adjacency(static_cast<std::size_t>(u), static_cast<std::size_t>(v)) ? 1.0 : 0.0) - p;
  return b;
}

}  // namespace

double signed_triangle_count(const AdjacencyMatrix& adjacency, double p) {
  const std::size_t n = adjacency.size();
  if (n < 3) throw InvalidArgument("signed_triangle_count: n must be >= 3");
  // tr(B^3)/6 regrouped by the number of edges e in each triple, each group
  // weighted by (1-p)^e (-p)^(3-e). The counts come from 0/1 products, which
  // are exact in double, so no cancellation builds up across the C(n,3) terms.
  const Eigen::MatrixXd a = centered_zero_diagonal(adjacency, 0.0);
  const Eigen::MatrixXd a2 = a * a;
  const double nn = static_cast<double>(n);
  const double n3 = std::round(a2.cwiseProduct(a).sum() / 6.0);
  const Eigen::VectorXd deg = a.rowwise().sum();
  const double edges = deg.sum() / 2.0;
  const double wedges = (deg.array() * (deg.array() - 1.0)).sum() / 2.0;
  const double n2 = wedges - 3.0 * n3;
  const double n1 = edges * (nn - 2.0) - 2.0 * n2 - 3.0 * n3;
  const double n0 = nn * (nn - 1.0) * (nn - 2.0) / 6.0 - n1 - n2 - n3;
  const double q = 1.0 - p;
  return n3 * q * q * q - n2 * q * q * p + n1 * q * p * p - n0 * p * p * p;
}

double signed_triangle_count_bruteforce(const AdjacencyMatrix& adjacency, double p) {
  const std::size_t n = adjacency.size();
  if (n < 3) throw InvalidArgument("signed_triangle_count: n must be >= 3");
  auto w = [&](std::size_t a, std::size_t b) { return (adjacency(a, b) ? 1.0L : 0.0L) - p; };
  long double total = 0.0L;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) total += w(i, j) * w(i, k) * w(j, k);
  return static_cast<double>(total);
}

std::optional<double> pattern_bound(const ModelConfig& config, const EdgePattern& pattern) {
  const double p = config.p;
  const double d = static_cast<double>(config.d);
  const double logn = std::log(static_cast<double>(config.n));
  const int k = static_cast<int>(pattern.edges.size());
  if (config.norm.is_infinite()) {
    const double l = std::log(1.0 / p);
    if (pattern.kind == PatternKind::cycle) return 3.0 * logn * std::pow(p, k) * std::pow(2.0 * l / d, k - 2);
    if (pattern.kind == PatternKind::chain && k >= 2)
      return 3.0 * logn * logn * std::pow(p, k) * std::pow(3.0 * l / d, k - 1);
    return std::nullopt;
  }
  const double r = logn / std::sqrt(d);
  switch (pattern.kind) {
    case PatternKind::cycle: return std::pow(p, k) * std::pow(r, k - 2);
    case PatternKind::chain:
      if (k < 2) return std::nullopt;
      return std::pow(p, k) * std::pow(r, k - 2) + std::pow(p, k) * logn * logn * std::pow(r, k - 1);
    case PatternKind::k2k: {
      const int j = pattern.vertices - 2;
      return std::pow(std::log(d) * logn * logn * p * p * std::sqrt(j / d), j);
    }
    case PatternKind::custom: return std::nullopt;
  }
  return std::nullopt;
}

StatReport estimate_pattern_mean(const ModelConfig& config, double tau, const EdgePattern& pattern,
                                 std::size_t trials, const PatternMeanOptions& options) {
  config.validate();
  pattern.validate();
  if (trials < 100) throw InvalidArgument("estimate_pattern_mean: at least 100 trials required");
  if (!(tau >= 0.0)) throw InvalidArgument("estimate_pattern_mean: tau must be >= 0");
  const std::size_t d = config.d;
  const int nv = pattern.vertices;
  for (const auto& [v, pos] : options.pinned) {
    if (v < 0 || v >= nv) throw InvalidArgument("estimate_pattern_mean: pinned vertex out of range");
    if (pos.size() != d) throw InvalidArgument("estimate_pattern_mean: pinned position must have d entries");
  }
  std::vector<std::vector<double>> pinned(nv);
  for (const auto& [v, pos] : options.pinned) {
    pinned[v].resize(d);
    std::transform(pos.begin(), pos.end(), pinned[v].begin(), wrap_coordinate);
  }

  const double p = config.p;
  const double p_all = std::pow(p, static_cast<double>(pattern.edges.size()));
  const std::size_t chunks = (trials + kTrialChunk - 1) / kTrialChunk;
  std::vector<Moments> sw(chunks), all(chunks), resid(chunks);
  const std::uint64_t base = derive_seed(config.master_seed, options.stream_id);

  parallel_for(chunks, [&](std::size_t c) {
    Rng rng(base, c);
    std::vector<std::vector<double>> pos(nv, std::vector<double>(d));
    for (int v = 0; v < nv; ++v)
      if (!pinned[v].empty()) pos[v] = pinned[v];
    const std::size_t begin = c * kTrialChunk;
    const std::size_t end = std::min(trials, begin + kTrialChunk);
    for (std::size_t t = begin; t < end; ++t) {
      for (int v = 0; v < nv; ++v) {
        if (!pinned[v].empty()) continue;
        for (auto& x : pos[v]) x = rng.torus_coordinate();
      }
      double w = 1.0;
      bool every = true;
      for (auto [a, b] : pattern.edges) {
        const bool present = pair_distance(pos[a], pos[b], config.norm) <= tau;
        every = every && present;
        w *= (present ? 1.0 : 0.0) - p;
      }
      const double ind = every ? 1.0 : 0.0;
      sw[c].add(w);
      all[c].add(ind);
      resid[c].add(w - (ind - p_all));
    }
  });

  Moments s, a, r;
  for (std::size_t c = 0; c < chunks; ++c) {
    s.merge(sw[c]);
    a.merge(all[c]);
    r.merge(resid[c]);
  }
  const double n = static_cast<double>(trials);
  StatReport out;
  out.trials = trials;
  out.mean = s.mean(n);
  out.stderr_value = s.stderr_of_mean(n);
  out.bound_value = pattern_bound(config, pattern);
  out.extra["p_all_present"] = a.mean(n);
  out.extra["p_all_present_stderr"] = a.stderr_of_mean(n);
  out.extra["identity_residual"] = r.mean(n);
  out.extra["identity_residual_stderr"] = r.stderr_of_mean(n);
  return out;
}

double predicted_triangle_mean(std::size_t n, const TriangleTestParams& params) {
  if (!(params.p > 0.0 && params.p < 1.0)) throw InvalidArgument("triangle_test: p must lie in (0, 1)");
  if (params.d < 1) throw InvalidArgument("triangle_test: d must be >= 1");
  const double tau_hat = std::isnan(params.tau_hat) ? normal_quantile(params.p) : params.tau_hat;
  const double rho = cycle_kappa(params.q, 3, params.d).rho;
  const double phi = normal_pdf(tau_hat);
  return choose3(n) * std::fabs(rho) * phi * phi * phi / std::sqrt(static_cast<double>(params.d));
}

TriangleTestResult triangle_test(const AdjacencyMatrix& adjacency, const TriangleTestParams& params) {
  TriangleTestResult out;
  out.statistic = signed_triangle_count(adjacency, params.p);
  out.threshold = 0.5 * params.scale * predicted_triangle_mean(adjacency.size(), params);
  out.decision = out.statistic > out.threshold ? TestDecision::rgg : TestDecision::gnp;
  return out;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("spearman: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  auto ranks = [n](std::span<const double> v) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

PowerSweep power_sweep(const ModelConfig& base, std::span<const std::size_t> d_values, std::size_t trials,
                       const PowerSweepOptions& options) {
  base.validate();
  if (base.norm.is_infinite()) throw InvalidArgument("power_sweep: the triangle test needs a finite q");
  if (trials < 50) throw InvalidArgument("power_sweep: at least 50 trials per cell required");
  if (d_values.empty()) throw InvalidArgument("power_sweep: no dimensions given");
  PowerSweep sweep;
  for (std::size_t d : d_values) {
    ModelConfig cfg = base;
    cfg.d = d;
    cfg.validate();
    LqCalibrationOptions cal;
    cal.validation_budget = 0;
    cal.stream_id = derive_seed(kCalibrationArm, d);
    if (d <= options.empirical_calibration_max_d) {
      cal.method = CalibrationMethod::empirical_quantile;
      cal.sample_budget = options.calibration_budget;
    } else {
      cal.method = CalibrationMethod::edgeworth;
    }
    const auto threshold = calibrate(cfg, cal);

    TriangleTestParams params;
    params.p = cfg.p;
    params.d = d;
    params.q = cfg.norm.q();
    params.tau_hat = threshold.tau_hat;
    params.scale = options.scale;
    const double cutoff = 0.5 * params.scale * predicted_triangle_mean(cfg.n, params);

    std::vector<double> rgg_stat(trials), control_stat(trials);
    parallel_for(2 * trials, [&](std::size_t job) {
      const bool control = job >= trials;
      const std::size_t t = control ? job - trials : job;
      AdjacencyMatrix g;
      if (!control) {
        g = sample_rgg(cfg, threshold.tau, derive_seed(derive_seed(kRggArm, d), t));
        rgg_stat[t] = signed_triangle_count(g, cfg.p);
      } else if (options.shuffled_control) {
        g = sample_rgg(cfg, threshold.tau, derive_seed(derive_seed(kControlArm, d), t));
        control_stat[t] = signed_triangle_count(g, cfg.p);
      } else {
        g = sample_gnp(cfg, derive_seed(derive_seed(kControlArm, d), t));
        control_stat[t] = signed_triangle_count(g, cfg.p);
      }
    });

    Moments m;
    std::size_t hits = 0, false_hits = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      m.add(rgg_stat[t]);
      hits += rgg_stat[t] > cutoff ? 1 : 0;
      false_hits += control_stat[t] > cutoff ? 1 : 0;
    }
    PowerRow row;
    row.d = d;
    row.trials = trials;
    row.statistic_mean = m.mean(static_cast<double>(trials));
    row.statistic_stderr = m.stderr_of_mean(static_cast<double>(trials));
    row.power = static_cast<double>(hits) / static_cast<double>(trials);
    row.fpr = static_cast<double>(false_hits) / static_cast<double>(trials);
    row.tau = threshold.tau;
    row.tau_hat = threshold.tau_hat;
    sweep.rows.push_back(row);
  }
  std::vector<double> ds, power;
  for (const auto& r : sweep.rows) {
    ds.push_back(static_cast<double>(r.d));
    power.push_back(r.power);
  }
  sweep.spearman_power_vs_d = spearman(ds, power);
  return sweep;
}

}  // namespace rgg
