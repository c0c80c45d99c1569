#pragma once

// Hand-rolled generators for property tests. Every generator is driven by an
// RngStream so failures are reproducible from the case index.

#include "slicematch/measures.hpp"
#include "slicematch/randgeom.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

namespace slicematch::pt {

inline RngStream case_stream(std::uint64_t test_tag, int case_index) {
  return RngStream(0xC0FFEE, test_tag).substream(static_cast<std::uint64_t>(case_index));
}

inline int uniform_int(RngStream& rng, int lo, int hi) {
  return lo + std::min(hi - lo, static_cast<int>(rng.uniform() * (hi - lo + 1)));
}

inline std::vector<double> random_values(RngStream& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = scale * rng.normal();
  return v;
}

// Integer-valued samples: plenty of ties.
inline std::vector<double> tied_values(RngStream& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = static_cast<double>(uniform_int(rng, -2, 2));
  return v;
}

inline PointMatrix random_points(RngStream& rng, Index n, Index d, double scale = 1.0, double shift = 0.0) {
  PointMatrix x(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) x(i, j) = shift + scale * rng.normal();
  return x;
}

inline Matrix random_symmetric(RngStream& rng, Index d) {
  Matrix g(d, d);
  for (Index c = 0; c < d; ++c)
    for (Index r = 0; r < d; ++r) g(r, c) = rng.normal();
  return 0.5 * (g + g.transpose());
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

}  // namespace slicematch::pt
