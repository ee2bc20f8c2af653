#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rgg {

/// The distance used on the torus: L_q for a finite integer q >= 1, or L_inf.
class Norm {
 public:
  static Norm lq(int q);
  static Norm infinity() noexcept { return Norm{}; }
  /// Accepts "1", "2", ... or "inf" / "infinity".
  static Norm parse(std::string_view text);

  bool is_infinite() const noexcept { return q_ == 0; }
  /// Exponent for finite norms; throws for L_inf.
  int q() const;
  std::string to_string() const;

  friend bool operator==(const Norm&, const Norm&) = default;

 private:
  Norm() = default;
  int q_ = 0;  // 0 encodes infinity
};

/// One experiment: RGG_q(n, d, p) or G(n, p) with a master seed.
struct ModelConfig {
  std::size_t n = 2;
  std::size_t d = 1;
  double p = 0.5;
  Norm norm = Norm::lq(2);
  std::uint64_t master_seed = 0;

  /// Throws InvalidArgument unless n >= 2, d >= 1 and 0 < p < 1.
  void validate() const;
};

/// n x d latent coordinates, row-major, every entry in [-1/2, 1/2).
class Positions {
 public:
  Positions() = default;
  Positions(std::size_t n, std::size_t d);
  /// Copies `values` (row-major) and wraps every entry into [-1/2, 1/2).
  Positions(std::size_t n, std::size_t d, std::vector<double> values);

  std::size_t n() const noexcept { return n_; }
  std::size_t d() const noexcept { return d_; }
  std::span<const double> row(std::size_t v) const { return {data_.data() + v * d_, d_}; }
  double operator()(std::size_t v, std::size_t i) const { return data_[v * d_ + i]; }
  /// Assigns a coordinate, wrapping it into range.
  void set(std::size_t v, std::size_t i, double x);
  /// Coordinates of every vertex in latent dimension i.
  std::vector<double> column(std::size_t i) const;
  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const Positions&, const Positions&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> data_;
};

/// Symmetric boolean adjacency with zero diagonal.
class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;
  explicit AdjacencyMatrix(std::size_t n) : n_(n), bits_(n * n, 0) {}

  std::size_t size() const noexcept { return n_; }
  bool operator()(std::size_t u, std::size_t v) const { return bits_[u * n_ + v] != 0; }
  /// Sets both A[u][v] and A[v][u]; u == v is rejected.
  void set_edge(std::size_t u, std::size_t v, bool present = true);
  std::size_t edge_count() const;
  /// Edges as (u, v) with u < v in lexicographic order.
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

  /// Edge-list text: one "u v" line per edge, 0-indexed, u < v.
  void write_edge_list(std::ostream& out) const;
  static AdjacencyMatrix read_edge_list(std::istream& in, std::size_t n);

  friend bool operator==(const AdjacencyMatrix&, const AdjacencyMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Maps any finite real onto the canonical circle interval [-1/2, 1/2).
double wrap_coordinate(double x);

/// Wrap-around distance min(|a-b|, 1-|a-b|) on the unit circle.
double circle_distance(double a, double b);

/// Finite q: sum_i |u_i - v_i|_C^q (the q-th power, no root).
/// L_inf: max_i |u_i - v_i|_C.
double pair_distance(std::span<const double> u, std::span<const double> v, Norm norm);

/// i.i.d. uniform coordinates; vertex v draws from its own sub-stream of
/// (master_seed, stream_id), so the result is reproducible in isolation.
Positions sample_positions(const ModelConfig& config, std::uint64_t stream_id);

/// A[u][v] = pair_distance(u, v) <= tau.
AdjacencyMatrix build_rgg(const Positions& positions, double tau, Norm norm);

/// Same graph as build_rgg(sample_positions(config, stream_id), tau, norm),
/// but streams coordinates in blocks and never materializes the n x d matrix.
AdjacencyMatrix sample_rgg(const ModelConfig& config, double tau, std::uint64_t stream_id);

/// Erdos-Renyi G(n, p); p may be 0 or 1 here.
AdjacencyMatrix sample_gnp(std::size_t n, double p, std::uint64_t master_seed,
                           std::uint64_t stream_id);
AdjacencyMatrix sample_gnp(const ModelConfig& config, std::uint64_t stream_id);

}  // namespace rgg
