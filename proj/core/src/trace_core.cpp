#include "rgg/trace_core.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>

#include "rgg/errors.hpp"
#include "rgg/parallel.hpp"
#include "rgg/rng.hpp"
#include "rgg/spectral.hpp"

namespace rgg {

void Multigraph::add_edge(int u, int v, int multiplicity) {
  if (u == v) throw InvalidArgument("Multigraph: self-loops are not allowed");
  if (multiplicity <= 0) throw InvalidArgument("Multigraph: multiplicity must be positive");
  vertices_.insert(u);
  vertices_.insert(v);
  edges_[std::minmax(u, v)] += multiplicity;
  adjacency_[u][v] += multiplicity;
  adjacency_[v][u] += multiplicity;
}

void Multigraph::remove_edge(int u, int v, int multiplicity) {
  const auto key = std::minmax(u, v);
  auto it = edges_.find(key);
  if (it == edges_.end()) return;
  const int take = multiplicity < 0 ? it->second : std::min(multiplicity, it->second);
  it->second -= take;
  adjacency_[u][v] -= take;
  adjacency_[v][u] -= take;
  if (it->second == 0) {
    edges_.erase(it);
    adjacency_[u].erase(v);
    adjacency_[v].erase(u);
  }
}

void Multigraph::remove_vertex(int v) {
  for (int u : neighbors(v)) remove_edge(u, v);
  adjacency_.erase(v);
  vertices_.erase(v);
}

int Multigraph::multiplicity(int u, int v) const {
  const auto it = edges_.find(std::minmax(u, v));
  return it == edges_.end() ? 0 : it->second;
}

std::size_t Multigraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& [e, m] : edges_) total += static_cast<std::size_t>(m);
  return total;
}

int Multigraph::degree(int v) const {
  const auto it = adjacency_.find(v);
  if (it == adjacency_.end()) return 0;
  int total = 0;
  for (const auto& [u, m] : it->second) total += m;
  return total;
}

std::vector<int> Multigraph::neighbors(int v) const {
  std::vector<int> out;
  const auto it = adjacency_.find(v);
  if (it == adjacency_.end()) return out;
  for (const auto& [u, m] : it->second) out.push_back(u);
  return out;
}

bool Multigraph::is_eulerian() const {
  return std::all_of(vertices_.begin(), vertices_.end(), [this](int v) { return degree(v) % 2 == 0; });
}

bool Multigraph::is_connected() const {
  if (vertices_.empty()) return true;
  std::set<int> seen{*vertices_.begin()};
  std::vector<int> stack{*vertices_.begin()};
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int u : neighbors(v))
      if (seen.insert(u).second) stack.push_back(u);
  }
  return seen.size() == vertices_.size();
}

Multigraph Multigraph::read(std::istream& in) {
  Multigraph g;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    int u = 0, v = 0, m = 1;
    if (!(fields >> u)) continue;
    if (!(fields >> v)) throw InvalidArgument("Multigraph::read: line " + std::to_string(line_no) + " needs two vertices");
    if (!(fields >> m)) m = 1;
    std::string rest;
    if (fields >> rest) throw InvalidArgument("Multigraph::read: trailing data on line " + std::to_string(line_no));
    g.add_edge(u, v, m);
  }
  return g;
}

Multigraph walk_to_multigraph(std::span<const int> walk) {
  if (walk.size() < 2) throw InvalidArgument("walk_to_multigraph: walk needs length >= 1");
  if (walk.front() != walk.back()) throw InvalidArgument("walk_to_multigraph: walk is not closed");
  Multigraph g;
  for (int v : walk) g.add_vertex(v);
  for (std::size_t j = 0; j + 1 < walk.size(); ++j)
    if (walk[j] != walk[j + 1]) g.add_edge(walk[j], walk[j + 1]);
  return g;
}

namespace {

using Key = std::tuple<int, int, int>;

// Degree 2 with two distinct neighbours: an interior vertex of a cycle or chain.
bool is_pass_through(const Multigraph& g, int v) {
  return g.degree(v) == 2 && g.neighbors(v).size() == 2;
}

struct Run {
  std::vector<int> path;  // pass-through vertices in order
  int left = 0;
  int right = 0;
  bool closed = false;
};

std::vector<Run> pass_through_runs(const Multigraph& g) {
  std::vector<Run> runs;
  std::set<int> visited;
  for (int v : g.vertices()) {
    if (visited.count(v) || !is_pass_through(g, v)) continue;
    const auto nb = g.neighbors(v);
    Run run;
    visited.insert(v);
    // Walk right from v through nb[1].
    std::vector<int> right_part;
    int prev = v, cur = nb[1];
    while (cur != v && is_pass_through(g, cur)) {
      right_part.push_back(cur);
      visited.insert(cur);
      const auto cn = g.neighbors(cur);
      const int next = cn[0] == prev ? cn[1] : cn[0];
      prev = cur;
      cur = next;
    }
    if (cur == v) {
      run.closed = true;
      run.path.push_back(v);
      run.path.insert(run.path.end(), right_part.begin(), right_part.end());
      runs.push_back(std::move(run));
      continue;
    }
    run.right = cur;
    std::vector<int> left_part;
    prev = v;
    cur = nb[0];
    while (is_pass_through(g, cur)) {
      left_part.push_back(cur);
      visited.insert(cur);
      const auto cn = g.neighbors(cur);
      const int next = cn[0] == prev ? cn[1] : cn[0];
      prev = cur;
      cur = next;
    }
    run.left = cur;
    run.path.assign(left_part.rbegin(), left_part.rend());
    run.path.push_back(v);
    run.path.insert(run.path.end(), right_part.begin(), right_part.end());
    runs.push_back(std::move(run));
  }
  return runs;
}

int min_of(const std::vector<int>& v) { return *std::min_element(v.begin(), v.end()); }

std::optional<RemovedCycle> next_cycle(const Multigraph& g) {
  std::optional<RemovedCycle> best;
  Key best_key{};
  auto offer = [&](RemovedCycle c, Key key) {
    if (!best || key < best_key) {
      best = std::move(c);
      best_key = key;
    }
  };
  if (g.vertex_count() >= 2) {
    for (int v : g.vertices()) {
      const auto nb = g.neighbors(v);
      if (nb.size() != 1) continue;
      RemovedCycle c;
      c.anchor = nb[0];
      c.removed = {v};
      c.edge_count = g.multiplicity(v, nb[0]);
      c.degenerate = true;
      offer(c, {std::min(v, nb[0]), nb[0], v});
    }
  }
  for (const auto& run : pass_through_runs(g)) {
    RemovedCycle c;
    if (run.closed) {
      const auto it = std::min_element(run.path.begin(), run.path.end());
      c.anchor = *it;
      c.removed.assign(it + 1, run.path.end());
      c.removed.insert(c.removed.end(), run.path.begin(), it);
      c.edge_count = static_cast<int>(run.path.size());
      offer(c, {c.anchor, c.anchor, min_of(c.removed)});
    } else if (run.left == run.right) {
      c.anchor = run.left;
      c.removed = run.path;
      c.edge_count = static_cast<int>(run.path.size()) + 1;
      const int low = min_of(run.path);
      offer(c, {std::min(c.anchor, low), c.anchor, low});
    }
  }
  return best;
}

std::optional<ContractedChain> next_chain(const Multigraph& g) {
  std::optional<ContractedChain> best;
  Key best_key{};
  for (const auto& run : pass_through_runs(g)) {
    if (run.closed || run.left == run.right) continue;
    ContractedChain c;
    c.first = std::min(run.left, run.right);
    c.last = std::max(run.left, run.right);
    c.interior = run.path;
    if (run.left != c.first) std::reverse(c.interior.begin(), c.interior.end());
    c.length = static_cast<int>(run.path.size()) + 1;
    const Key key{std::min(c.first, min_of(run.path)), c.first, min_of(run.path)};
    if (!best || key < best_key) {
      best = std::move(c);
      best_key = key;
    }
  }
  return best;
}

}  // namespace

bool CoreReport::counting_identity_holds() const {
  const auto lhs = static_cast<long long>(input_vertices);
  const auto rhs = static_cast<long long>(skeleton_edges) - static_cast<long long>(s) -
                   static_cast<long long>(core.edge_count()) + static_cast<long long>(core.vertex_count());
  return lhs == rhs;
}

CoreReport contract_core(const Multigraph& graph) {
  if (graph.vertex_count() == 0) throw InvalidArgument("contract_core: empty multigraph");
  if (!graph.is_eulerian()) throw InvalidArgument("contract_core: multigraph is not Eulerian");
  if (!graph.is_connected()) throw InvalidArgument("contract_core: multigraph is not connected");

  CoreReport report;
  report.input_vertices = graph.vertex_count();
  report.input_edges = graph.edge_count();
  Multigraph g = graph;
  // Per-edge split of multiplicity into original and contracted copies.
  std::map<Multigraph::Edge, std::pair<int, int>> origin;
  for (const auto& [e, m] : graph.edges()) origin[e] = {m, 0};
  auto drop_vertex = [&](int v) {
    for (int u : g.neighbors(v)) origin.erase(std::minmax(u, v));
    g.remove_vertex(v);
  };

  std::size_t excess = 0;
  while (true) {
    if (auto cycle = next_cycle(g)) {
      for (int v : cycle->removed) drop_vertex(v);
      if (cycle->degenerate) {
        ++report.s_d;
        excess += static_cast<std::size_t>(cycle->edge_count - 2);
      }
      report.removed_cycles.push_back(std::move(*cycle));
      continue;
    }
    if (auto chain = next_chain(g)) {
      for (int v : chain->interior) drop_vertex(v);
      g.add_edge(chain->first, chain->last);
      origin[std::minmax(chain->first, chain->last)].second += 1;
      report.contracted_chains.push_back(std::move(*chain));
      continue;
    }
    break;
  }
  report.s = report.removed_cycles.size();
  report.skeleton_edges = report.input_edges - excess;
  for (const auto& [e, counts] : origin) {
    if (counts.first > 0) report.non_contracted_edges[e] = counts.first;
    if (counts.second > 0) report.contracted_edges[e] = counts.second;
  }
  report.core = std::move(g);
  return report;
}

double trace_power(const Eigen::MatrixXd& centered, int m) {
  if (m < 2 || m % 2 != 0) throw InvalidArgument("trace_power: m must be even and >= 2");
  if (centered.rows() != centered.cols()) throw InvalidArgument("trace_power: matrix must be square");
  if (centered.rows() > 4000) throw InvalidArgument("trace_power: n must be <= 4000");
  Eigen::MatrixXd power = centered;
  for (int j = 1; j < m / 2; ++j) power = power * centered;
  return power.squaredNorm();
}

double brute_walk_sum(const AdjacencyMatrix& adjacency, double p, int m) {
  if (m < 1) throw InvalidArgument("brute_walk_sum: m must be >= 1");
  const std::size_t n = adjacency.size();
  if (n == 0) throw InvalidArgument("brute_walk_sum: empty graph");
  if (std::pow(static_cast<double>(n), m) > 1e7) throw UnsupportedOrder("brute_walk_sum: n^m exceeds 10^7");
  std::vector<double> w(n * n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) w[u * n + v] = u == v ? -p : (adjacency(u, v) ? 1.0 : 0.0) - p;
  // Odometer over (v_2, ..., v_m) for every start v_1.
  double total = 0.0;
  std::vector<std::size_t> walk(static_cast<std::size_t>(m));
  for (std::size_t start = 0; start < n; ++start) {
    walk[0] = start;
    std::fill(walk.begin() + 1, walk.end(), 0);
    while (true) {
      double prod = 1.0;
      for (int j = 0; j < m; ++j) prod *= w[walk[j] * n + walk[(j + 1) % m]];
      total += prod;
      int pos = m - 1;
      while (pos >= 1 && ++walk[pos] == n) walk[pos--] = 0;
      if (pos < 1) break;
    }
  }
  return total;
}

double trace_regime_prediction(const ModelConfig& config, int m) {
  const double np = static_cast<double>(config.n) * config.p;
  const double d = static_cast<double>(config.d);
  const double bulk = static_cast<double>(config.n) * std::pow(np, m / 2.0);
  if (config.norm.is_infinite()) return d * d * std::pow(np / d, m) + bulk;
  return d * std::pow(np / std::sqrt(d), m) + bulk;
}

double gnp_second_trace_moment(std::size_t n, double p) {
  const double nn = static_cast<double>(n);
  return nn * (nn - 1.0) * p * (1.0 - p) + nn * p * p;
}

StatReport empirical_trace_moment(const ModelConfig& config, double tau, int m, std::size_t trials,
                                  const TraceMomentOptions& options) {
  config.validate();
  if (m < 2 || m % 2 != 0) throw InvalidArgument("empirical_trace_moment: m must be even and >= 2");
  if (config.n > 2000) throw InvalidArgument("empirical_trace_moment: n must be <= 2000");
  if (trials < 2) throw InvalidArgument("empirical_trace_moment: at least 2 trials required");
  std::vector<double> values(trials);
  const std::uint64_t base = derive_seed(options.stream_id, options.gnp ? 1 : 0);
  parallel_for(trials, [&](std::size_t t) {
    const auto g = options.gnp ? sample_gnp(config, derive_seed(base, t)) : sample_rgg(config, tau, derive_seed(base, t));
    values[t] = trace_power(center_adjacency(g, config.p), m);
  });
  double sum = 0.0, sum2 = 0.0;
  for (double v : values) {
    sum += v;
    sum2 += v * v;
  }
  const double n = static_cast<double>(trials);
  StatReport out;
  out.trials = trials;
  out.mean = sum / n;
  out.stderr_value = std::sqrt(std::max(0.0, (sum2 - n * out.mean * out.mean) / (n - 1.0)) / n);
  out.bound_value = trace_regime_prediction(config, m);
  return out;
}

}  // namespace rgg
