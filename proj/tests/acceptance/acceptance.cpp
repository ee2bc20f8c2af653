// End-to-end checks of the headline behaviours at desk scale. Prints one
// PASS/FAIL line per criterion; exits non-zero only with --strict.
#include <CLI11.hpp>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rgg/calibration.hpp"
#include "rgg/cumulants.hpp"
#include "rgg/edgeworth.hpp"
#include "rgg/gaussian.hpp"
#include "rgg/rng.hpp"
#include "rgg/signed_stats.hpp"
#include "rgg/spectral.hpp"
#include "rgg/torus_model.hpp"
#include "rgg/trace_core.hpp"
#include "rgg/tv_bound.hpp"

using namespace rgg;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double var_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double lq_tau(const ModelConfig& c) {
  LqCalibrationOptions o;
  o.validation_budget = 0;
  return calibrate(c, o).tau;
}

// ---------------------------------------------------------------------------

void moments(Outcome& out) {
  using boost::math::quadrature::gauss_kronrod;
  auto expect = [](auto g) {
    return gauss_kronrod<double, 31>::integrate([&](double u) { return 2.0 * g(u); }, 0.0, 0.5, 10, 1e-15);
  };
  double worst = 0.0;
  for (int q = 1; q <= 6; ++q) {
    const auto m = coordinate_moments(q);
    const double mu = expect([&](double u) { return std::pow(u, q); });
    const double s2 = expect([&](double u) { return std::pow(std::pow(u, q) - mu, 2); });
    worst = std::max({worst, std::fabs(m.mu - mu), std::fabs(m.sigma2 - s2)});
  }
  out.require(worst <= 1e-12, "quadrature agreement");
  const auto m1 = coordinate_moments(1);
  out.require(m1.mu == 0.25 && std::fabs(m1.sigma2 - 1.0 / 48.0) <= 1e-15, "q=1 closed form");
  out.detail << "max |lib - quad| = " << worst;
}

void calibration(Outcome& out) {
  for (int q : {1, 2}) {
    for (double p : {0.1, 0.5}) {
      double dev[2];
      double noise[2];
      int idx = 0;
      for (std::size_t d : {64u, 1024u}) {
        LqCalibrationOptions o;
        o.master_seed = 1000 + static_cast<std::uint64_t>(q);
        o.stream_id = d;
        const auto r = calibrate_threshold_lq(q, d, p, o);
        const double gap = std::fabs(r.achieved_p - p);
        out.require(gap <= 3.0 * r.deviation_stderr, "achieved p at q=" + std::to_string(q) + " d=" +
                                                         std::to_string(d) + " p=" + std::to_string(p));
        dev[idx] = std::fabs(r.tau_hat - normal_quantile(p));
        // Quantile noise of the empirical threshold in tau_hat units.
        noise[idx] = std::sqrt(p * (1 - p) / static_cast<double>(o.sample_budget)) / normal_pdf(normal_quantile(p));
        ++idx;
      }
      out.require(dev[1] <= dev[0] + 3.0 * std::hypot(noise[0], noise[1]),
                  "tau_hat deviation decay q=" + std::to_string(q) + " p=" + std::to_string(p));
      out.detail << "q" << q << "p" << p << ": " << dev[0] << "->" << dev[1] << " ";
    }
  }
}

// Plain Monte Carlo with the standard library engine, sharing no code with the library.
void triangle_cumulant(Outcome& out) {
  for (int q : {1, 2, 3}) {
    const double g = triangle_gamma_moment(q);
    std::mt19937_64 engine(4242 + static_cast<std::uint64_t>(q));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double mu = std::pow(0.5, q) / (q + 1);
    auto gamma = [&](double a, double b) {
      double t = std::fabs(a - b);
      t = std::min(t, 1.0 - t);
      double r = t;
      for (int j = 1; j < q; ++j) r *= t;
      return r - mu;
    };
    const std::size_t samples = 100'000'000;
    long double s = 0.0L, s2 = 0.0L;
    for (std::size_t i = 0; i < samples; ++i) {
      const double x = unif(engine), y = unif(engine), z = unif(engine);
      const double w = gamma(x, y) * gamma(y, z) * gamma(z, x);
      s += w;
      s2 += static_cast<long double>(w) * w;
    }
    const double n = static_cast<double>(samples);
    const double mc = static_cast<double>(s / n);
    const double se = std::sqrt(static_cast<double>(s2 / n) - mc * mc) / std::sqrt(n);
    out.require(g < 0.0, "negative at q=" + std::to_string(q));
    out.require(std::fabs(g - mc) <= 3.0 * se, "MC agreement at q=" + std::to_string(q));
    out.detail << "q" << q << ": quad " << g << " mc " << mc << "+-" << se << " ";
  }
}

void signed_triangle_identities(Outcome& out) {
  Rng rng(5150);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 3 + rng() % 62;
    const double p = 0.05 + 0.9 * rng.uniform01();
    const auto g = sample_gnp(n, rng.uniform01(), 99, static_cast<std::uint64_t>(i));
    worst = std::max(worst, std::fabs(signed_triangle_count(g, p) - signed_triangle_count_bruteforce(g, p)));
  }
  out.require(worst <= 1e-9, "matrix path vs brute force");
  const std::size_t n = 100;
  const double p = 0.5;
  std::vector<double> t;
  for (std::uint64_t s = 0; s < 500; ++s) t.push_back(signed_triangle_count(sample_gnp(n, p, 7, s), p));
  const double m = mean_of(t), v = var_of(t);
  const double expected_var = (n * (n - 1.0) * (n - 2.0) / 6.0) * std::pow(p * (1 - p), 3);
  out.require(std::fabs(m) <= 3.0 * std::sqrt(v / 500.0), "G(n,p) mean");
  out.require(std::fabs(v / expected_var - 1.0) <= 0.2, "G(n,p) variance");
  out.detail << "max diff " << worst << ", mean " << m << ", var ratio " << v / expected_var;
}

void detection_scaling(Outcome& out) {
  std::vector<StatReport> r;
  for (std::size_t d : {64u, 256u, 1024u}) {
    ModelConfig c;
    c.n = 1000;
    c.d = d;
    c.p = 0.3;
    c.norm = Norm::lq(1);
    c.master_seed = 31;
    PatternMeanOptions po;
    po.stream_id = d;
    r.push_back(estimate_pattern_mean(c, lq_tau(c), EdgePattern::cycle(3), 1'000'000, po));
    out.require(r.back().mean > 3.0 * r.back().stderr_value, "positive at d=" + std::to_string(d));
  }
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    const double ratio = r[i].mean / r[i + 1].mean;
    out.require(ratio >= 2.0 * 0.7 && ratio <= 2.0 * 1.3, "ratio " + std::to_string(i));
    out.detail << "ratio " << ratio << " ";
  }
}

void test_power(Outcome& out) {
  ModelConfig c;
  c.n = 200;
  c.p = 0.5;
  c.norm = Norm::lq(2);
  c.master_seed = 2024;
  const std::vector<std::size_t> shallow{64};
  const auto a = power_sweep(c, shallow, 100);
  out.require(a.rows[0].power >= 0.9, "power at d=64");
  out.require(a.rows[0].fpr <= 0.1, "FPR at d=64");
  const std::vector<std::size_t> deep{200'000};
  const auto b = power_sweep(c, deep, 50);
  const double pw = b.rows[0].power, fp = b.rows[0].fpr;
  const double pooled = 0.5 * (pw + fp);
  const double se = std::sqrt(2.0 * pooled * (1.0 - pooled) / 50.0);
  out.require(std::fabs(pw - fp) <= 3.0 * se, "power ~ FPR at d=2e5");
  out.detail << "d=64 power " << a.rows[0].power << " fpr " << a.rows[0].fpr << "; d=2e5 power " << pw << " fpr "
             << fp << " (3se " << 3.0 * se << ")";
}

void spectral_crossover(Outcome& out) {
  auto lambda2 = [](std::size_t d, std::size_t trials, std::uint64_t stream) {
    ModelConfig c;
    c.n = 2000;
    c.d = d;
    c.p = 0.5;
    c.norm = Norm::lq(2);
    c.master_seed = 77;
    const double tau = lq_tau(c);
    std::vector<double> v;
    for (std::size_t t = 0; t < trials; ++t)
      v.push_back(spectrum(center_adjacency(sample_rgg(c, tau, stream + t), c.p)).lambda2_abs_max);
    return median(v);
  };
  const double lo = lambda2(16, 10, 0), hi = lambda2(4096, 10, 100);
  out.require(lo >= 3.0 * hi, "median crossover factor 3");
  out.detail << "median lambda2 d=16 " << lo << " d=4096 " << hi << " factor " << lo / hi << "; ";

  ModelConfig c;
  c.n = 2000;
  c.d = 32;
  c.p = 0.5;
  c.norm = Norm::lq(2);
  c.master_seed = 78;
  const double tau = lq_tau(c);
  int ok = 0;
  std::size_t lo_count = SIZE_MAX, hi_count = 0;
  for (std::uint64_t t = 0; t < 20; ++t) {
    const auto r = spectrum(center_adjacency(sample_rgg(c, tau, t), c.p));
    const auto k = count_large_eigs(r, c.n, c.p, c.d, 2.0, SpectralRegime::lq);
    lo_count = std::min(lo_count, k);
    hi_count = std::max(hi_count, k);
    ok += (k >= c.d / 4 && k <= 4 * c.d) ? 1 : 0;
  }
  out.require(ok >= 18, "large-eigenvalue count in [d/4, 4d]");
  out.detail << "count in range " << ok << "/20 (min " << lo_count << ", max " << hi_count << ")";
}

void linf_spectral(Outcome& out) {
  auto config = [](std::size_t d) {
    ModelConfig c;
    c.n = 2000;
    c.d = d;
    c.p = 0.5;
    c.norm = Norm::infinity();
    c.master_seed = 88;
    return c;
  };
  const auto c = config(8);
  const auto th = calibrate(c);
  std::size_t crossings = 0;
  int ok = 0;
  std::vector<double> l2_low;
  for (std::uint64_t t = 0; t < 10; ++t) {
    const auto pos = sample_positions(c, t);
    const auto g = build_rgg(pos, th.tau, c.norm);
    for (std::size_t i = 0; i < c.d; ++i)
      for (const auto& v : arc_vectors_linf(pos, i, th.xi)) crossings += inter_cluster_edges(g, v);
    const auto r = spectrum(center_adjacency(g, c.p));
    const double thr = c.n * c.p / (2.0 * c.d);
    ok += count_large_eigs(r, thr) >= c.d * c.d / 4 ? 1 : 0;
    l2_low.push_back(r.lambda2_abs_max);
  }
  out.require(crossings == 0, "zero inter-cluster edges");
  out.require(ok >= 8, ">= d^2/4 large eigenvalues");
  const auto ch = config(1024);
  const auto thh = calibrate(ch);
  std::vector<double> l2_high;
  for (std::uint64_t t = 0; t < 10; ++t)
    l2_high.push_back(spectrum(center_adjacency(sample_rgg(ch, thh.tau, 100 + t), ch.p)).lambda2_abs_max);
  const double factor = median(l2_low) / median(l2_high);
  out.require(factor >= 3.0, "crossover factor 3");
  out.detail << "inter-cluster edges " << crossings << ", count ok " << ok << "/10, median lambda2 d=8 "
             << median(l2_low) << " d=1024 " << median(l2_high) << " factor " << factor;
}

void arc_vectors(Outcome& out) {
  ModelConfig c;
  c.n = 2000;
  c.d = 16;
  c.p = 0.5;
  c.norm = Norm::lq(2);
  c.master_seed = 99;
  const double tau = lq_tau(c);
  const auto pos = sample_positions(c, 0);
  const auto m = center_adjacency(build_rgg(pos, tau, c.norm), c.p);
  std::vector<Eigen::VectorXd> ys;
  double sum = 0.0, least = INFINITY;
  for (std::size_t i = 0; i < c.d; ++i) {
    ys.push_back(arc_vector_q(pos, i, default_arc_half_width(2)).normalized());
    const double r = rayleigh(m, ys.back());
    sum += r;
    least = std::min(least, r);
  }
  const double mean = sum / static_cast<double>(c.d);
  const double target = 0.1 * c.n * c.p / std::sqrt(static_cast<double>(c.d));
  const double gram = gram_offdiag(ys);
  const double gram_cap = 5.0 * std::log(static_cast<double>(c.n)) / std::sqrt(static_cast<double>(c.n));
  out.require(least > 0.0, "all Rayleigh quotients positive");
  out.require(mean >= target, "mean Rayleigh quotient");
  out.require(gram <= gram_cap, "Gram off-diagonal");
  out.detail << "min " << least << ", mean " << mean << " (>= " << target << "), gram " << gram << " (<= " << gram_cap
             << ")";
}

void trace_combinatorics(Outcome& out) {
  Rng rng(321);
  int bad_identity = 0, bad_degree = 0, bad_euler = 0, bad_idem = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 12);
    const int m = 2 + static_cast<int>(rng() % 15);
    std::vector<int> walk(static_cast<std::size_t>(m) + 1);
    for (int j = 0; j < m; ++j) walk[static_cast<std::size_t>(j)] = static_cast<int>(rng() % static_cast<unsigned>(n));
    walk.back() = walk.front();
    const auto r = contract_core(walk_to_multigraph(walk));
    bad_identity += r.counting_identity_holds() ? 0 : 1;
    if (!r.trivial())
      for (int v : r.core.vertices()) bad_degree += r.core.degree(v) >= 4 ? 0 : 1;
    bad_euler += r.core.is_eulerian() ? 0 : 1;
    bad_idem += contract_core(r.core).core == r.core ? 0 : 1;
  }
  out.require(bad_identity == 0, "counting identity");
  out.require(bad_degree == 0, "core min degree");
  out.require(bad_euler == 0, "Eulerian core");
  out.require(bad_idem == 0, "idempotence");
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const std::size_t n = 1 + rng() % 5;
    const double p = rng.uniform01();
    AdjacencyMatrix g(n);
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v)
        if (rng() & 1) g.set_edge(u, v);
    for (int m : {2, 4})
      worst = std::max(worst, std::fabs(trace_power(center_adjacency(g, p), m) - brute_walk_sum(g, p, m)));
  }
  out.require(worst <= 1e-9, "trace_power vs brute force");
  out.detail << "violations " << bad_identity + bad_degree + bad_euler + bad_idem << ", max trace diff " << worst;
}

void tv_bound(Outcome& out) {
  auto k2 = [](std::size_t d, std::size_t trials) {
    ModelConfig c;
    c.n = 50;
    c.d = d;
    c.p = 0.3;
    c.norm = Norm::lq(2);
    c.master_seed = 11;
    K2kOptions o;
    o.stream_id = d;
    return k2k_moment(c, lq_tau(c), 2, trials, o);
  };
  const auto a = k2(256, 20'000), b = k2(1024, 40'000);
  const double ratio = a.mean / b.mean;
  const double rel = std::hypot(a.stderr_value / a.mean, b.stderr_value / b.mean);
  out.require(a.mean > 0.0 && b.mean > 0.0, "positive k=2 moments");
  out.require(ratio - 3.0 * ratio * rel >= 2.4 && ratio + 3.0 * ratio * rel <= 5.6, "1/d law");
  out.detail << "ratio " << ratio << " +- " << ratio * rel << "; ";

  std::vector<TvBoundReport> reps;
  for (std::size_t d : {256u, 1024u, 4096u}) {
    ModelConfig c;
    c.n = 50;
    c.d = d;
    c.p = 0.2;
    c.norm = Norm::lq(2);
    c.master_seed = 12;
    K2kOptions o;
    o.stream_id = d;
    reps.push_back(tv_upper_bound(c, lq_tau(c), 4, 2'000, o));
  }
  for (std::size_t i = 0; i + 1 < reps.size(); ++i)
    for (std::size_t j = 0; j < reps[i].terms.size(); ++j) {
      const double se = std::hypot(reps[i].term_stderr[j], reps[i + 1].term_stderr[j]);
      out.require(reps[i + 1].terms[j] <= reps[i].terms[j] + 3.0 * se,
                  "term " + std::to_string(j + 2) + " step " + std::to_string(i));
    }
  out.detail << "bounds " << reps[0].bound << " " << reps[1].bound << " " << reps[2].bound;
}

void edgeworth_density(Outcome& out) {
  auto dev = [](std::size_t d) {
    const MarginalDensityOracle oracle(2, d);
    double worst = 0.0;
    for (double x = -4.0; x <= 4.0 + 1e-12; x += 0.01)
      worst = std::max(worst, std::fabs(edgeworth_marginal_density(x, 2, d, 3) - oracle(x).density));
    return worst;
  };
  const double a = dev(16), b = dev(256);
  out.require(b < a, "deviation shrinks");
  bool exact = true;
  for (double x = -4.0; x <= 4.0 + 1e-12; x += 0.01)
    for (std::size_t d : {16u, 256u}) exact = exact && edgeworth_marginal_density(x, 1, d, 3) == normal_pdf(x);
  out.require(exact, "q=1 equals Gaussian");
  out.detail << "max deviation d=16 " << a << " d=256 " << b;
}

struct Criterion {
  std::string name;
  std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  bool strict = false;
  std::vector<std::string> only;
  app.add_flag("--strict", strict, "Exit 1 if any criterion fails");
  app.add_option("--only", only, "Run only the named criteria");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {"Moments", moments},
      {"Calibration", calibration},
      {"Triangle cumulant sign", triangle_cumulant},
      {"Signed-triangle identities", signed_triangle_identities},
      {"Detection scaling", detection_scaling},
      {"Test power", test_power},
      {"Spectral crossover", spectral_crossover},
      {"Linf spectral", linf_spectral},
      {"Arc vectors", arc_vectors},
      {"Trace combinatorics", trace_combinatorics},
      {"TV bound", tv_bound},
      {"Edgeworth density", edgeworth_density},
  };
  const std::set<std::string> selected(only.begin(), only.end());
  int failures = 0, ran = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.name)) continue;
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(out);
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ++ran;
    failures += out.pass ? 0 : 1;
    std::printf("%s %s (%.1f s): %s\n", out.pass ? "PASS" : "FAIL", c.name.c_str(), secs, out.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("acceptance: %d/%d passed\n", ran - failures, ran);
  return strict && failures > 0 ? 1 : 0;
}
