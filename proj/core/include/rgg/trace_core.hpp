#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "rgg/signed_stats.hpp"
#include "rgg/torus_model.hpp"

namespace rgg {

/// Vertex set plus an edge multiset (no self-loops). Edge keys are (u, v) with u < v.
class Multigraph {
 public:
  using Edge = std::pair<int, int>;

  void add_vertex(int v) { vertices_.insert(v); }
  void add_edge(int u, int v, int multiplicity = 1);
  /// Removes `multiplicity` copies (all copies when multiplicity < 0).
  void remove_edge(int u, int v, int multiplicity = -1);
  void remove_vertex(int v);  ///< also drops incident edges

  const std::set<int>& vertices() const noexcept { return vertices_; }
  const std::map<Edge, int>& edges() const noexcept { return edges_; }
  int multiplicity(int u, int v) const;
  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t edge_count() const;  ///< with multiplicity
  int degree(int v) const;
  /// Distinct neighbors in increasing order.
  std::vector<int> neighbors(int v) const;
  bool is_eulerian() const;  ///< every degree even
  bool is_connected() const;

  /// "u v multiplicity" lines; blank lines and '#' comments ignored.
  static Multigraph read(std::istream& in);

  friend bool operator==(const Multigraph& a, const Multigraph& b) {
    return a.vertices_ == b.vertices_ && a.edges_ == b.edges_;
  }

 private:
  std::set<int> vertices_;
  std::map<Edge, int> edges_;
  std::map<int, std::map<int, int>> adjacency_;
};

/// Closed walk (v_1, ..., v_{m+1}) with v_1 = v_{m+1} to its multigraph: one
/// edge per step with v_j != v_{j+1}; self-steps are dropped.
Multigraph walk_to_multigraph(std::span<const int> walk);

struct RemovedCycle {
  int anchor = 0;
  std::vector<int> removed;  ///< removed vertices in cycle order
  int edge_count = 0;        ///< edges on the cycle (with multiplicity)
  bool degenerate = false;   ///< length 2: a single vertex with one neighbor
};

struct ContractedChain {
  int first = 0;
  int last = 0;
  std::vector<int> interior;
  int length = 0;  ///< edges replaced by the single contracted edge
};

struct CoreReport {
  Multigraph core;
  std::vector<RemovedCycle> removed_cycles;
  std::size_t s = 0;    ///< removed cycles
  std::size_t s_d = 0;  ///< of which degenerate
  std::vector<ContractedChain> contracted_chains;
  /// Core edges that are original edges of H (E_U) and that came from contractions (E_C).
  std::map<Multigraph::Edge, int> non_contracted_edges;
  std::map<Multigraph::Edge, int> contracted_edges;
  /// |E(H)| with every degenerate cycle counted as exactly two edges.
  std::size_t skeleton_edges = 0;
  std::size_t input_vertices = 0;
  std::size_t input_edges = 0;

  bool trivial() const { return core.vertex_count() == 1 && core.edge_count() == 0; }
  /// |V(H)| = |E~(H)| - s - |E(H°)| + |V(H°)| with E~ the skeleton edge count.
  bool counting_identity_holds() const;
};

/// Reduces an Eulerian connected multigraph to its core: removes cycles (a
/// run of degree-2 vertices returning to one anchor, or a vertex with a single
/// neighbour), then contracts maximal chains of degree-2 vertices into single
/// edges, repeating until neither step applies. Candidates are processed in
/// order of their smallest vertex label; an all-degree-2 cycle is anchored at
/// its smallest label. Throws InvalidArgument for non-Eulerian or disconnected input.
CoreReport contract_core(const Multigraph& graph);

/// tr(M^m) for symmetric M and even m >= 2, as ||M^{m/2}||_F^2.
double trace_power(const Eigen::MatrixXd& centered, int m);

/// Sum over all closed walks of length m of prod_j w(v_j, v_{j+1}), where
/// w(u, v) = A_uv - p and self-steps contribute -p. Throws UnsupportedOrder if
/// n^m > 10^7.
double brute_walk_sum(const AdjacencyMatrix& adjacency, double p, int m);

struct TraceMomentOptions {
  std::uint64_t stream_id = 0;
  /// Sample G(n, p) instead of the geometric model.
  bool gnp = false;
};

/// Regime prediction with constants 1: d (np/sqrt d)^m + n (np)^{m/2} for
/// finite q, d^2 (np/d)^m + n (np)^{m/2} for L_inf.
double trace_regime_prediction(const ModelConfig& config, int m);

/// n(n-1)p(1-p) + n p^2, the exact E tr((A - p11^T)^2) under G(n, p).
double gnp_second_trace_moment(std::size_t n, double p);

/// Monte Carlo mean of tr((A - p11^T)^m) over fresh graphs; bound_value holds
/// trace_regime_prediction.
StatReport empirical_trace_moment(const ModelConfig& config, double tau, int m, std::size_t trials,
                                  const TraceMomentOptions& options = {});

}  // namespace rgg
