#pragma once

// Internal: blocked distance accumulation shared by every code path that
// computes Delta, so that pair_distance, build_rgg and the streaming sampler
// agree bit for bit.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <vector>

namespace rgg::detail {

inline constexpr std::size_t kBlock = 256;
inline constexpr std::size_t kLanes = 8;

/// Circle distance for coordinates already in [-1/2, 1/2).
inline double circle_gap(double a, double b) {
  const double t = std::fabs(a - b);
  return std::min(t, 1.0 - t);
}

template <int Q>
inline double ipow(double t, int q) {
  if constexpr (Q == 1) {
    return t;
  } else if constexpr (Q == 2) {
    return t * t;
  } else if constexpr (Q == 3) {
    return t * t * t;
  } else if constexpr (Q == 4) {
    const double s = t * t;
    return s * s;
  } else {
    double r = t;
    for (int k = 1; k < q; ++k) r *= t;
    return r;
  }
}

template <int Q>
inline double block_power_sum_impl(const double* a, const double* b, std::size_t len, int q) {
  double lane[kLanes] = {0, 0, 0, 0, 0, 0, 0, 0};
  std::size_t i = 0;
  for (; i + kLanes <= len; i += kLanes) {
    for (std::size_t j = 0; j < kLanes; ++j) lane[j] += ipow<Q>(circle_gap(a[i + j], b[i + j]), q);
  }
  for (std::size_t j = 0; i < len; ++i, ++j) lane[j] += ipow<Q>(circle_gap(a[i], b[i]), q);
  return ((lane[0] + lane[1]) + (lane[2] + lane[3])) + ((lane[4] + lane[5]) + (lane[6] + lane[7]));
}

/// sum_i |a_i - b_i|_C^q over one block (len <= kBlock).
inline double block_power_sum(const double* a, const double* b, std::size_t len, int q) {
  switch (q) {
    case 1: return block_power_sum_impl<1>(a, b, len, q);
    case 2: return block_power_sum_impl<2>(a, b, len, q);
    case 3: return block_power_sum_impl<3>(a, b, len, q);
    case 4: return block_power_sum_impl<4>(a, b, len, q);
    default: return block_power_sum_impl<0>(a, b, len, q);
  }
}

inline double block_max(const double* a, const double* b, std::size_t len) {
  double worst = 0.0;
  for (std::size_t i = 0; i < len; ++i) worst = std::max(worst, circle_gap(a[i], b[i]));
  return worst;
}

/// Number of cascade levels needed for a d-coordinate distance.
inline std::size_t cascade_levels(std::size_t d) {
  const std::size_t blocks = std::max<std::size_t>(1, (d + kBlock - 1) / kBlock);
  return static_cast<std::size_t>(std::bit_width(blocks));
}

/// Streaming pairwise (tree) summation: pushing block sums 0, 1, 2, ... in
/// order and calling total(count) yields the same value as a balanced
/// binary-tree sum over the blocks.
inline void cascade_push(double* levels, std::size_t index, double value) {
  double carry = value;
  std::size_t level = 0;
  while ((index >> level) & 1U) {
    carry = levels[level] + carry;
    ++level;
  }
  levels[level] = carry;
}

inline double cascade_total(const double* levels, std::size_t count) {
  double result = 0.0;
  bool have = false;
  for (std::size_t l = 0; (count >> l) != 0; ++l) {
    if ((count >> l) & 1U) {
      result = have ? levels[l] + result : levels[l];
      have = true;
    }
  }
  return result;
}

class CascadeSum {
 public:
  explicit CascadeSum(std::size_t levels) : levels_(levels + 1, 0.0) {}
  void push(std::size_t index, double value) { cascade_push(levels_.data(), index, value); }
  double total(std::size_t count) const { return cascade_total(levels_.data(), count); }

 private:
  std::vector<double> levels_;
};

/// One cascade per pair, stored contiguously.
class CascadeBank {
 public:
  CascadeBank(std::size_t slots, std::size_t levels) : stride_(levels + 1), levels_(slots * stride_, 0.0) {}
  void push(std::size_t slot, std::size_t index, double value) {
    cascade_push(levels_.data() + slot * stride_, index, value);
  }
  double total(std::size_t slot, std::size_t count) const {
    return cascade_total(levels_.data() + slot * stride_, count);
  }

 private:
  std::size_t stride_;
  std::vector<double> levels_;
};

}  // namespace rgg::detail
