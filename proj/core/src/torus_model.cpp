#include "rgg/torus_model.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "distance_kernel.hpp"
#include "rgg/errors.hpp"
#include "rgg/rng.hpp"

namespace rgg {

// ---------------------------------------------------------------- Norm

Norm Norm::lq(int q) {
  if (q < 1) throw InvalidArgument("Norm::lq: q must be >= 1");
  Norm n;
  n.q_ = q;
  return n;
}

Norm Norm::parse(std::string_view text) {
  if (text == "inf" || text == "infinity" || text == "INF" || text == "Infinity") return infinity();
  int q = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), q);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw InvalidArgument("Norm::parse: expected a positive integer or 'inf', got '" +
                          std::string(text) + "'");
  }
  return lq(q);
}

int Norm::q() const {
  if (is_infinite()) throw InvalidArgument("Norm::q: L_inf has no finite exponent");
  return q_;
}

std::string Norm::to_string() const { return is_infinite() ? "inf" : std::to_string(q_); }

void ModelConfig::validate() const {
  if (n < 2) throw InvalidArgument("ModelConfig: n must be >= 2");
  if (d < 1) throw InvalidArgument("ModelConfig: d must be >= 1");
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("ModelConfig: p must lie in (0, 1)");
}

// ---------------------------------------------------------------- Positions

Positions::Positions(std::size_t n, std::size_t d) : n_(n), d_(d), data_(n * d, 0.0) {}

Positions::Positions(std::size_t n, std::size_t d, std::vector<double> values)
    : n_(n), d_(d), data_(std::move(values)) {
  if (data_.size() != n * d) throw InvalidArgument("Positions: value count does not match n*d");
  for (double& x : data_) x = wrap_coordinate(x);
}

void Positions::set(std::size_t v, std::size_t i, double x) { data_[v * d_ + i] = wrap_coordinate(x); }

std::vector<double> Positions::column(std::size_t i) const {
  std::vector<double> out(n_);
  for (std::size_t v = 0; v < n_; ++v) out[v] = data_[v * d_ + i];
  return out;
}

// ---------------------------------------------------------------- AdjacencyMatrix

void AdjacencyMatrix::set_edge(std::size_t u, std::size_t v, bool present) {
  if (u == v) throw InvalidArgument("AdjacencyMatrix: self-loops are not allowed");
  if (u >= n_ || v >= n_) throw InvalidArgument("AdjacencyMatrix: vertex out of range");
  bits_[u * n_ + v] = present ? 1 : 0;
  bits_[v * n_ + u] = present ? 1 : 0;
}

std::size_t AdjacencyMatrix::edge_count() const {
  std::size_t total = 0;
  for (std::size_t u = 0; u < n_; ++u)
    for (std::size_t v = u + 1; v < n_; ++v) total += bits_[u * n_ + v];
  return total;
}

std::vector<std::pair<std::size_t, std::size_t>> AdjacencyMatrix::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t u = 0; u < n_; ++u)
    for (std::size_t v = u + 1; v < n_; ++v)
      if (bits_[u * n_ + v]) out.emplace_back(u, v);
  return out;
}

void AdjacencyMatrix::write_edge_list(std::ostream& out) const {
  for (const auto& [u, v] : edges()) out << u << ' ' << v << '\n';
}

AdjacencyMatrix AdjacencyMatrix::read_edge_list(std::istream& in, std::size_t n) {
  AdjacencyMatrix a(n);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::size_t u = 0, v = 0;
    if (!(fields >> u >> v)) throw InvalidArgument("edge list: malformed line '" + line + "'");
    a.set_edge(u, v);
  }
  return a;
}

// ---------------------------------------------------------------- distances

double wrap_coordinate(double x) {
  if (!std::isfinite(x)) throw InvalidArgument("wrap_coordinate: non-finite coordinate");
  if (x >= -0.5 && x < 0.5) return x;
  double y = x - std::floor(x + 0.5);
  // floor rounding can land exactly on +1/2
  if (y >= 0.5) y -= 1.0;
  return y;
}

double circle_distance(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b))
    throw InvalidArgument("circle_distance: non-finite input");
  return detail::circle_gap(wrap_coordinate(a), wrap_coordinate(b));
}

double pair_distance(std::span<const double> u, std::span<const double> v, Norm norm) {
  if (u.size() != v.size()) throw InvalidArgument("pair_distance: length mismatch");
  if (norm.is_infinite()) return detail::block_max(u.data(), v.data(), u.size());
  const int q = norm.q();
  detail::CascadeSum cascade(detail::cascade_levels(u.size()));
  std::size_t block = 0;
  for (std::size_t c0 = 0; c0 < u.size(); c0 += detail::kBlock, ++block) {
    const std::size_t len = std::min(detail::kBlock, u.size() - c0);
    cascade.push(block, detail::block_power_sum(u.data() + c0, v.data() + c0, len, q));
  }
  return cascade.total(block);
}

// ---------------------------------------------------------------- sampling

namespace {

std::uint64_t vertex_seed(std::uint64_t master_seed, std::uint64_t stream_id, std::size_t v) {
  return derive_seed(derive_seed(master_seed, stream_id), v);
}

/// Shared block-streaming builder. `fill(c0, len, chunk)` writes coordinates
/// [c0, c0 + len) of every vertex into chunk (vertex-major, stride len).
template <class Fill>
AdjacencyMatrix build_streaming(std::size_t n, std::size_t d, double tau, Norm norm, Fill&& fill) {
  const std::size_t pairs = n * (n - 1) / 2;
  const std::size_t blocks = (d + detail::kBlock - 1) / detail::kBlock;
  std::vector<double> chunk(n * detail::kBlock);

  AdjacencyMatrix a(n);
  if (norm.is_infinite()) {
    std::vector<double> worst(pairs, 0.0);
    for (std::size_t b = 0, c0 = 0; b < blocks; ++b, c0 += detail::kBlock) {
      const std::size_t len = std::min(detail::kBlock, d - c0);
      fill(c0, len, chunk);
      std::size_t k = 0;
      for (std::size_t u = 0; u < n; ++u) {
        const double* pu = chunk.data() + u * len;
        for (std::size_t v = u + 1; v < n; ++v, ++k) {
          worst[k] = std::max(worst[k], detail::block_max(pu, chunk.data() + v * len, len));
        }
      }
    }
    std::size_t k = 0;
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v, ++k)
        if (worst[k] <= tau) a.set_edge(u, v);
    return a;
  }

  const int q = norm.q();
  const std::size_t levels = detail::cascade_levels(d);
  detail::CascadeBank bank(pairs, levels);
  for (std::size_t b = 0, c0 = 0; b < blocks; ++b, c0 += detail::kBlock) {
    const std::size_t len = std::min(detail::kBlock, d - c0);
    fill(c0, len, chunk);
    std::size_t k = 0;
    for (std::size_t u = 0; u < n; ++u) {
      const double* pu = chunk.data() + u * len;
      for (std::size_t v = u + 1; v < n; ++v, ++k) {
        bank.push(k, b, detail::block_power_sum(pu, chunk.data() + v * len, len, q));
      }
    }
  }
  std::size_t k = 0;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v, ++k)
      if (bank.total(k, blocks) <= tau) a.set_edge(u, v);
  return a;
}

}  // namespace

Positions sample_positions(const ModelConfig& config, std::uint64_t stream_id) {
  config.validate();
  Positions out(config.n, config.d);
  std::vector<double> values(config.n * config.d);
  for (std::size_t v = 0; v < config.n; ++v) {
    Rng rng(vertex_seed(config.master_seed, stream_id, v));
    double* row = values.data() + v * config.d;
    for (std::size_t i = 0; i < config.d; ++i) row[i] = rng.torus_coordinate();
  }
  return Positions(config.n, config.d, std::move(values));
}

AdjacencyMatrix build_rgg(const Positions& positions, double tau, Norm norm) {
  if (!(tau >= 0.0)) throw InvalidArgument("build_rgg: tau must be >= 0");
  const std::size_t n = positions.n();
  const std::size_t d = positions.d();
  if (n < 2 || d == 0) return AdjacencyMatrix(n);
  const auto data = positions.data();
  return build_streaming(n, d, tau, norm, [&](std::size_t c0, std::size_t len, std::vector<double>& chunk) {
    for (std::size_t v = 0; v < n; ++v)
      std::copy_n(data.data() + v * d + c0, len, chunk.data() + v * len);
  });
}

AdjacencyMatrix sample_rgg(const ModelConfig& config, double tau, std::uint64_t stream_id) {
  config.validate();
  if (!(tau >= 0.0)) throw InvalidArgument("sample_rgg: tau must be >= 0");
  std::vector<Rng> rngs;
  rngs.reserve(config.n);
  for (std::size_t v = 0; v < config.n; ++v)
    rngs.emplace_back(vertex_seed(config.master_seed, stream_id, v));
  return build_streaming(config.n, config.d, tau, config.norm,
                         [&](std::size_t, std::size_t len, std::vector<double>& chunk) {
                           for (std::size_t v = 0; v < config.n; ++v) {
                             double* dst = chunk.data() + v * len;
                             for (std::size_t i = 0; i < len; ++i) dst[i] = rngs[v].torus_coordinate();
                           }
                         });
}

AdjacencyMatrix sample_gnp(std::size_t n, double p, std::uint64_t master_seed, std::uint64_t stream_id) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("sample_gnp: p must lie in [0, 1]");
  Rng rng(master_seed, stream_id);
  AdjacencyMatrix a(n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      if (rng.uniform01() < p) a.set_edge(u, v);
  return a;
}

AdjacencyMatrix sample_gnp(const ModelConfig& config, std::uint64_t stream_id) {
  return sample_gnp(config.n, config.p, config.master_seed, stream_id);
}

}  // namespace rgg
