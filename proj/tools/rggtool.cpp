#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <utility>
#include <vector>

#include "experiment_spec.hpp"
#include "rgg/calibration.hpp"
#include "rgg/cumulants.hpp"
#include "rgg/errors.hpp"
#include "rgg/parallel.hpp"
#include "rgg/signed_stats.hpp"
#include "rgg/spectral.hpp"
#include "rgg/torus_model.hpp"
#include "rgg/trace_core.hpp"
#include "rgg/tv_bound.hpp"

#ifndef RGG_VERSION
#define RGG_VERSION "unknown"
#endif

using namespace rggtool;
namespace fs = std::filesystem;

namespace {

constexpr int kExitInvalidSpec = 2;
constexpr int kExitNumerical = 3;

struct Output {
  json summary;
  std::vector<std::pair<std::string, std::string>> files;
  json streams = json::object();
};

// Fixed 17-digit formatting keeps CSV output byte-stable.
std::string num(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw rgg::InvalidArgument("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

template <class T>
T param(const ExperimentSpec& s, const char* key) {
  return s.params.at(key).get<T>();
}

bool has(const ExperimentSpec& s, const char* key) { return !s.params.at(key).is_null(); }

struct Threshold {
  double tau = 0.0;
  double xi = std::nan("");
  double tau_hat = std::nan("");
  bool calibrated = false;
};

// tau from params if given, otherwise calibrated on stream 0 without validation.
Threshold threshold_for(const ExperimentSpec& s, Output& out) {
  Threshold t;
  if (s.params.contains("tau") && has(s, "tau")) {
    t.tau = param<double>(s, "tau");
    if (s.model.norm.is_infinite()) t.xi = 1.0 - 2.0 * t.tau;
    else t.tau_hat = rgg::rescale(t.tau, s.model.norm.q(), s.model.d);
    return t;
  }
  rgg::LqCalibrationOptions o;
  o.validation_budget = 0;
  const auto r = rgg::calibrate(s.model, o);
  out.streams["calibration"] = 0;
  t.tau = r.tau;
  t.xi = r.xi;
  t.tau_hat = r.tau_hat;
  t.calibrated = true;
  return t;
}

json threshold_json(const Threshold& t) {
  return {{"tau", t.tau}, {"tau_hat", t.tau_hat}, {"xi", t.xi}, {"calibrated", t.calibrated}};
}

json norm_label(const rgg::Norm& n) { return n.is_infinite() ? json("inf") : json(n.q()); }

// ------------------------------------------------------------------ commands

Output run_calibrate(const ExperimentSpec& s) {
  Output out;
  rgg::ThresholdResult r;
  if (s.model.norm.is_infinite()) {
    r = rgg::calibrate_threshold_linf(s.model.d, s.model.p);
  } else {
    rgg::LqCalibrationOptions o;
    o.method = rgg::parse_calibration_method(param<std::string>(s, "method"));
    o.sample_budget = param<std::size_t>(s, "sample_budget");
    o.validation_budget = param<std::size_t>(s, "validation_budget");
    o.master_seed = s.model.master_seed;
    r = rgg::calibrate_threshold_lq(s.model.norm.q(), s.model.d, s.model.p, o);
    out.streams["calibration"] = 0;
    out.streams["validation"] = "derived from calibration";
  }
  out.summary = {{"q", norm_label(s.model.norm)},
                 {"d", s.model.d},
                 {"p", s.model.p},
                 {"tau", r.tau},
                 {"tau_hat", r.tau_hat},
                 {"xi", r.xi},
                 {"method", rgg::to_string(r.method)},
                 {"achieved_p", r.achieved_p},
                 {"stderr", r.stderr_p},
                 {"deviation_stderr", r.deviation_stderr},
                 {"sample_budget", r.sample_budget},
                 {"validation_budget", r.validation_budget}};
  out.files.emplace_back("calibrate.json", out.summary.dump(2) + "\n");
  return out;
}

Output run_sample(const ExperimentSpec& s) {
  Output out;
  const auto th = threshold_for(s, out);
  const auto stream = param<std::uint64_t>(s, "stream");
  const auto pos = rgg::sample_positions(s.model, stream);
  const auto g = rgg::build_rgg(pos, th.tau, s.model.norm);
  out.streams["positions"] = stream;
  std::ostringstream edges;
  g.write_edge_list(edges);
  out.files.emplace_back("graph.edgelist", edges.str());
  if (param<bool>(s, "write_positions")) {
    std::ostringstream p;
    for (std::size_t v = 0; v < pos.n(); ++v) {
      const auto row = pos.row(v);
      for (std::size_t i = 0; i < row.size(); ++i) p << (i ? "," : "") << num(row[i]);
      p << '\n';
    }
    out.files.emplace_back("positions.csv", p.str());
  }
  const double pairs = 0.5 * static_cast<double>(s.model.n) * static_cast<double>(s.model.n - 1);
  out.summary = {{"model", model_to_json(s.model)},
                 {"threshold", threshold_json(th)},
                 {"edge_count", g.edge_count()},
                 {"edge_density", static_cast<double>(g.edge_count()) / pairs}};
  out.files.emplace_back("sample.json", out.summary.dump(2) + "\n");
  return out;
}

const char* kPowerHeader = "norm,q,n,d,p,trials,statistic_mean,statistic_stderr,power,fpr,seed\n";

std::string power_csv(const ExperimentSpec& s, const rgg::PowerSweep& sweep) {
  std::ostringstream csv;
  csv << kPowerHeader;
  for (const auto& r : sweep.rows)
    csv << "lq," << s.model.norm.q() << ',' << s.model.n << ',' << r.d << ',' << num(s.model.p) << ',' << r.trials
        << ',' << num(r.statistic_mean) << ',' << num(r.statistic_stderr) << ',' << num(r.power) << ','
        << num(r.fpr) << ',' << s.model.master_seed << '\n';
  return csv.str();
}

json power_rows(const rgg::PowerSweep& sweep) {
  json rows = json::array();
  for (const auto& r : sweep.rows)
    rows.push_back({{"d", r.d},
                    {"trials", r.trials},
                    {"statistic_mean", r.statistic_mean},
                    {"statistic_stderr", r.statistic_stderr},
                    {"power", r.power},
                    {"fpr", r.fpr},
                    {"tau", r.tau},
                    {"tau_hat", r.tau_hat}});
  return rows;
}

void require_finite_q(const ExperimentSpec& s) {
  if (s.model.norm.is_infinite()) throw rgg::InvalidArgument(s.command + " requires a finite q");
}

Output run_sweep(const ExperimentSpec& s, std::vector<std::size_t> d_values, const char* csv_name) {
  require_finite_q(s);
  Output out;
  rgg::PowerSweepOptions o;
  o.scale = param<double>(s, "scale");
  o.calibration_budget = param<std::size_t>(s, "calibration_budget");
  if (s.params.contains("shuffled_control")) o.shuffled_control = param<bool>(s, "shuffled_control");
  const auto sweep = rgg::power_sweep(s.model, d_values, param<std::size_t>(s, "trials"), o);
  out.streams["rgg_arm"] = "derive_seed(rgg-arm, d) per trial";
  out.streams["control_arm"] = "derive_seed(gnp-arm, d) per trial";
  out.streams["calibration"] = "derive_seed(calibration-arm, d)";
  out.files.emplace_back(csv_name, power_csv(s, sweep));
  out.summary = {{"rows", power_rows(sweep)}, {"spearman_power_vs_d", sweep.spearman_power_vs_d}};
  return out;
}

Output run_triangle_test(const ExperimentSpec& s) {
  require_finite_q(s);
  if (!has(s, "input")) return run_sweep(s, {s.model.d}, "triangle_test.csv");
  Output out;
  std::istringstream in(read_file(param<std::string>(s, "input")));
  const auto g = rgg::AdjacencyMatrix::read_edge_list(in, s.model.n);
  rgg::TriangleTestParams tp;
  tp.p = s.model.p;
  tp.d = s.model.d;
  tp.q = s.model.norm.q();
  tp.scale = param<double>(s, "scale");
  const auto r = rgg::triangle_test(g, tp);
  out.summary = {{"statistic", r.statistic},
                 {"threshold", r.threshold},
                 {"decision", r.decision == rgg::TestDecision::rgg ? "rgg" : "gnp"}};
  out.files.emplace_back("triangle_test.json", out.summary.dump(2) + "\n");
  return out;
}

Output run_sweep_power(const ExperimentSpec& s) {
  return run_sweep(s, param<std::vector<std::size_t>>(s, "d_values"), "sweep_power.csv");
}

rgg::AdjacencyMatrix graph_for(const ExperimentSpec& s, Output& out, Threshold* th_out) {
  if (s.params.contains("input") && has(s, "input")) {
    std::istringstream in(read_file(param<std::string>(s, "input")));
    return rgg::AdjacencyMatrix::read_edge_list(in, s.model.n);
  }
  const auto th = threshold_for(s, out);
  if (th_out) *th_out = th;
  const auto stream = param<std::uint64_t>(s, "stream");
  out.streams["graph"] = stream;
  return rgg::sample_rgg(s.model, th.tau, stream);
}

Output run_spectrum(const ExperimentSpec& s) {
  Output out;
  const auto g = graph_for(s, out, nullptr);
  const auto regime = s.model.norm.is_infinite() ? rgg::SpectralRegime::linf : rgg::SpectralRegime::lq;
  rgg::SpectrumOptions o;
  const auto as = param<std::vector<double>>(s, "a");
  for (double a : as) o.count_thresholds.push_back(rgg::large_eigenvalue_threshold(s.model.n, s.model.p, s.model.d, a, regime));
  const auto r = rgg::spectrum(rgg::center_adjacency(g, s.model.p), o);
  std::ostringstream csv;
  csv << "index,eigenvalue\n";
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) csv << i + 1 << ',' << num(r.eigenvalues[i]) << '\n';
  out.files.emplace_back("eigenvalues.csv", csv.str());
  json counts = json::array();
  for (std::size_t i = 0; i < as.size(); ++i)
    counts.push_back({{"a", as[i]}, {"threshold", o.count_thresholds[i]}, {"count", r.counts.at(o.count_thresholds[i])}});
  out.summary = {{"lambda1", r.lambda1},
                 {"lambda2_abs_max", r.lambda2_abs_max},
                 {"counts", counts},
                 {"max_relative_residual", r.max_relative_residual}};
  out.files.emplace_back("spectrum.json", out.summary.dump(2) + "\n");
  return out;
}

Output run_arc_vectors(const ExperimentSpec& s) {
  Output out;
  const auto th = threshold_for(s, out);
  const auto stream = param<std::uint64_t>(s, "stream");
  out.streams["positions"] = stream;
  const auto pos = rgg::sample_positions(s.model, stream);
  const auto g = rgg::build_rgg(pos, th.tau, s.model.norm);
  const auto m = rgg::center_adjacency(g, s.model.p);
  std::vector<rgg::ArcVector> vecs;
  if (s.model.norm.is_infinite()) {
    for (std::size_t i = 0; i < s.model.d; ++i)
      for (auto& v : rgg::arc_vectors_linf(pos, i, th.xi)) vecs.push_back(std::move(v));
  } else {
    const double c = has(s, "half_width") ? param<double>(s, "half_width") : rgg::default_arc_half_width(s.model.norm.q());
    for (std::size_t i = 0; i < s.model.d; ++i) vecs.push_back(rgg::arc_vector_q(pos, i, c));
  }
  std::ostringstream csv;
  csv << "dimension,vector,support,rayleigh,inter_cluster_edges\n";
  std::vector<Eigen::VectorXd> ys;
  std::size_t index = 0, crossings = 0;
  double sum = 0.0, least = INFINITY;
  for (const auto& v : vecs) {
    const std::size_t cross = rgg::inter_cluster_edges(g, v);
    crossings += cross;
    csv << v.dimension_index << ',' << index++ << ',' << v.support_size() << ',';
    if (v.degenerate) {
      csv << ",";
    } else {
      ys.push_back(v.normalized());
      const double r = rgg::rayleigh(m, ys.back());
      sum += r;
      least = std::min(least, r);
      csv << num(r);
    }
    csv << ',' << cross << '\n';
  }
  out.files.emplace_back("arc_vectors.csv", csv.str());
  out.summary = {{"vectors", vecs.size()},
                 {"degenerate", vecs.size() - ys.size()},
                 {"rayleigh_mean", ys.empty() ? std::nan("") : sum / static_cast<double>(ys.size())},
                 {"rayleigh_min", ys.empty() ? std::nan("") : least},
                 {"gram_offdiag_max", ys.size() >= 2 ? rgg::gram_offdiag(ys) : std::nan("")},
                 {"inter_cluster_edges", crossings},
                 {"threshold", threshold_json(th)}};
  out.files.emplace_back("arc_vectors.json", out.summary.dump(2) + "\n");
  return out;
}

json edge_multiset(const std::map<rgg::Multigraph::Edge, int>& edges) {
  json a = json::array();
  for (const auto& [e, m] : edges) a.push_back({e.first, e.second, m});
  return a;
}

Output run_core_contract(const ExperimentSpec& s) {
  Output out;
  rgg::Multigraph h;
  if (has(s, "input")) {
    std::istringstream in(read_file(param<std::string>(s, "input")));
    h = rgg::Multigraph::read(in);
  } else if (has(s, "walk")) {
    h = rgg::walk_to_multigraph(param<std::vector<int>>(s, "walk"));
  } else {
    throw rgg::InvalidArgument("core-contract needs params.input or params.walk");
  }
  const auto r = rgg::contract_core(h);
  json cycles = json::array(), chains = json::array();
  for (const auto& c : r.removed_cycles)
    cycles.push_back({{"anchor", c.anchor}, {"removed", c.removed}, {"edge_count", c.edge_count}, {"degenerate", c.degenerate}});
  for (const auto& c : r.contracted_chains)
    chains.push_back({{"first", c.first}, {"last", c.last}, {"interior", c.interior}, {"length", c.length}});
  out.summary = {{"input_vertices", r.input_vertices},
                 {"input_edges", r.input_edges},
                 {"skeleton_edges", r.skeleton_edges},
                 {"s", r.s},
                 {"s_d", r.s_d},
                 {"trivial", r.trivial()},
                 {"counting_identity_holds", r.counting_identity_holds()},
                 {"core", {{"vertices", r.core.vertices()}, {"edges", edge_multiset(r.core.edges())}}},
                 {"removed_cycles", cycles},
                 {"contracted_chains", chains},
                 {"non_contracted_edges", edge_multiset(r.non_contracted_edges)},
                 {"contracted_edges", edge_multiset(r.contracted_edges)}};
  out.files.emplace_back("core_report.json", out.summary.dump(2) + "\n");
  return out;
}

Output run_trace_moment(const ExperimentSpec& s) {
  Output out;
  rgg::TraceMomentOptions o;
  o.gnp = param<bool>(s, "gnp");
  o.stream_id = param<std::uint64_t>(s, "stream");
  const double tau = o.gnp ? 0.0 : threshold_for(s, out).tau;
  out.streams["graphs"] = o.stream_id;
  std::ostringstream csv;
  csv << "m,d,mean,stderr,regime_prediction\n";
  json rows = json::array();
  for (int m : param<std::vector<int>>(s, "m_values")) {
    const auto r = rgg::empirical_trace_moment(s.model, tau, m, param<std::size_t>(s, "trials"), o);
    const double pred = o.gnp ? rgg::gnp_second_trace_moment(s.model.n, s.model.p) : *r.bound_value;
    const bool show_pred = !o.gnp || m == 2;
    csv << m << ',' << s.model.d << ',' << num(r.mean) << ',' << num(r.stderr_value) << ','
        << (show_pred ? num(pred) : "") << '\n';
    rows.push_back({{"m", m}, {"mean", r.mean}, {"stderr", r.stderr_value}, {"regime_prediction", show_pred ? json(pred) : json()}});
  }
  out.files.emplace_back("trace_moment.csv", csv.str());
  out.summary = {{"rows", rows}};
  return out;
}

Output run_moments(const ExperimentSpec& s) {
  require_finite_q(s);
  Output out;
  const int q = s.model.norm.q();
  const int k = param<int>(s, "k");
  rgg::CycleKappaOptions o;
  o.mc_samples = param<std::size_t>(s, "mc_samples");
  o.seed = s.model.master_seed;
  json at = json::object();
  rgg::CycleKappa last;
  for (std::size_t d : param<std::vector<std::size_t>>(s, "d_values")) {
    last = rgg::cycle_kappa(q, k, d, 1.0, o);
    at[std::to_string(d)] = last.kappa_d;
  }
  if (at.empty()) last = rgg::cycle_kappa(q, k, 1, 1.0, o);
  out.summary = {{"q", q},
                 {"k", k},
                 {"gamma_moment", last.gamma_moment},
                 {"rho", last.rho},
                 {"rho_stderr", last.stderr_rho},
                 {"from_quadrature", last.from_quadrature},
                 {"kappa_d_at", at}};
  out.files.emplace_back("moments.json", out.summary.dump(2) + "\n");
  return out;
}

Output run_tv_bound(const ExperimentSpec& s) {
  Output out;
  const auto th = threshold_for(s, out);
  rgg::K2kOptions o;
  o.inner_samples = param<std::size_t>(s, "inner_samples");
  o.stream_id = param<std::uint64_t>(s, "stream");
  out.streams["k2k"] = o.stream_id;
  const auto r = rgg::tv_upper_bound(s.model, th.tau, param<int>(s, "k_max"), param<std::size_t>(s, "trials"), o);
  out.summary = {{"terms", r.terms},
                 {"term_stderr", r.term_stderr},
                 {"raw_terms", r.raw_terms},
                 {"bound", r.bound},
                 {"bound_is_finite", std::isfinite(r.bound)},
                 {"tail", r.tail},
                 {"tail_certified", r.tail_certified},
                 {"diverged", r.diverged},
                 {"first_diverging_j", r.first_diverging_j ? json(*r.first_diverging_j) : json()},
                 {"truncation_k", r.truncation_k},
                 {"mc_budget", r.mc_budget},
                 {"threshold", threshold_json(th)}};
  out.files.emplace_back("tv_bound.json", out.summary.dump(2) + "\n");
  return out;
}

Output dispatch(const ExperimentSpec& s) {
  if (s.command == "calibrate") return run_calibrate(s);
  if (s.command == "sample") return run_sample(s);
  if (s.command == "triangle-test") return run_triangle_test(s);
  if (s.command == "sweep-power") return run_sweep_power(s);
  if (s.command == "spectrum") return run_spectrum(s);
  if (s.command == "arc-vectors") return run_arc_vectors(s);
  if (s.command == "core-contract") return run_core_contract(s);
  if (s.command == "trace-moment") return run_trace_moment(s);
  if (s.command == "moments") return run_moments(s);
  if (s.command == "tv-bound") return run_tv_bound(s);
  throw rgg::InvalidArgument("unknown command '" + s.command + "'");
}

int fail(int code, const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}}.dump() << '\n';
  return code;
}

// "sample_budget" -> "--sample-budget"
std::string flag_name(std::string key) {
  for (auto& c : key)
    if (c == '_') c = '-';
  return "--" + key;
}

// One flag per default parameter, typed after the default value; writes into `sink` only when given.
void add_param_flags(CLI::App* sub, const std::string& command, json& sink) {
  const json defaults = default_params(command);
  for (const auto& [key, v] : defaults.items()) {
    const std::string name = flag_name(key);
    auto store = [&sink, key = key](auto value) { sink[key] = value; };
    if (v.is_boolean()) {
      sub->add_flag_function(name, [store](std::int64_t c) { store(c > 0); }, key);
    } else if (v.is_number_integer()) {
      sub->add_option_function<std::uint64_t>(name, store, key);
    } else if (v.is_number_float() || key == "tau" || key == "half_width") {
      sub->add_option_function<double>(name, store, key);
    } else if (v.is_string() || key == "input") {
      sub->add_option_function<std::string>(name, store, key);
    } else if (key == "walk" || key == "m_values") {
      sub->add_option_function<std::vector<int>>(name, store, key);
    } else if (key == "a") {
      sub->add_option_function<std::vector<double>>(name, store, key);
    } else if (v.is_array()) {
      sub->add_option_function<std::vector<std::uint64_t>>(name, store, key);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random geometric graphs on the torus: simulation and statistics"};
  app.set_version_flag("--version", RGG_VERSION);
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string config_path, output_dir;
  bool to_stdout = false;
  unsigned threads = 0;
  json model_flags = json::object();
  app.add_option("--config", config_path, "JSON experiment spec");
  app.add_option("--output-dir", output_dir, "Directory for results and manifest.json");
  app.add_flag("--stdout", to_stdout, "Also print the result JSON on standard output");
  app.add_option("--threads", threads, "Worker threads (0 = all cores)");
  app.add_option_function<std::size_t>("--n", [&](std::size_t v) { model_flags["n"] = v; }, "Vertices");
  app.add_option_function<std::size_t>("--d", [&](std::size_t v) { model_flags["d"] = v; }, "Dimension");
  app.add_option_function<double>("--p", [&](double v) { model_flags["p"] = v; }, "Edge probability");
  app.add_option_function<std::string>("--norm", [&](const std::string& v) { model_flags["norm"] = v; },
                                       "q >= 1 or inf");
  app.add_option_function<std::uint64_t>("--seed", [&](std::uint64_t v) { model_flags["master_seed"] = v; },
                                         "Master seed (beats RGG_SEED and the config)");

  json param_flags = json::object();
  for (const char* name : {"calibrate", "sample", "triangle-test", "sweep-power", "spectrum", "arc-vectors",
                           "core-contract", "trace-moment", "moments", "tv-bound"}) {
    auto* sub = app.add_subcommand(name);
    add_param_flags(sub, name, param_flags);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kExitInvalidSpec, "invalid_spec", e.what());
  }

  ExperimentSpec spec;
  try {
    json config = json::object();
    if (!config_path.empty()) config = json::parse(read_file(config_path));
    std::optional<std::string> command;
    if (!app.get_subcommands().empty()) command = app.get_subcommands().front()->get_name();
    spec = resolve_spec(command, config, model_flags, param_flags, std::getenv("RGG_SEED"));
    if (!output_dir.empty()) spec.output_dir = output_dir;
    spec.to_stdout = to_stdout;
    spec.threads = threads;
    fs::create_directories(spec.output_dir);
  } catch (const std::exception& e) {
    return fail(kExitInvalidSpec, "invalid_spec", e.what());
  }

  rgg::set_thread_count(spec.threads);
  const auto t0 = std::chrono::steady_clock::now();
  Output out;
  try {
    std::cerr << "rggtool: " << spec.command << '\n';
    out = dispatch(spec);
  } catch (const rgg::NumericalFailure& e) {
    return fail(kExitNumerical, "numerical_failure", e.what());
  } catch (const rgg::InvalidArgument& e) {
    return fail(kExitInvalidSpec, "invalid_spec", e.what());
  } catch (const rgg::UnsupportedOrder& e) {
    return fail(kExitInvalidSpec, "invalid_spec", e.what());
  } catch (const json::exception& e) {
    return fail(kExitInvalidSpec, "invalid_spec", e.what());
  } catch (const std::exception& e) {
    return fail(1, "error", e.what());
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json outputs = json::array();
  for (const auto& [name, content] : out.files) {
    std::ofstream f(fs::path(spec.output_dir) / name, std::ios::binary);
    f << content;
    if (!f) return fail(1, "io", "cannot write " + name);
    outputs.push_back(name);
  }
  const json manifest = {{"tool", "rggtool"},
                         {"version", RGG_VERSION},
                         {"spec", spec.to_json()},
                         {"master_seed", spec.model.master_seed},
                         {"streams", out.streams},
                         {"threads", rgg::thread_count()},
                         {"outputs", outputs},
                         {"timing", {{"wall_seconds", wall}}}};
  std::ofstream(fs::path(spec.output_dir) / "manifest.json") << manifest.dump(2) << '\n';
  if (spec.to_stdout) std::cout << out.summary.dump(2) << '\n';
  return 0;
}
