#pragma once

// Block-parallel Monte-Carlo means with standard errors.
//
// Sample j belongs to block j / kMcBlockSize and draws from
// rng.substream(block). Blocks run under OpenMP and their statistics are merged
// in block order, so estimates are identical for any thread count.

#include "slicematch/randgeom.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace slicematch {

struct McEstimate {
  double value = 0.0;
  double sem = 0.0;  // standard error of the mean
};

inline constexpr std::int64_t kMcBlockSize = 256;

inline std::int64_t mc_block_count(std::int64_t samples) {
  return (samples + kMcBlockSize - 1) / kMcBlockSize;
}

namespace detail {

struct BlockStats {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x) {
    count += 1.0;
    const double delta = x - mean;
    mean += delta / count;
    m2 += delta * (x - mean);
  }

  void merge(const BlockStats& o) {
    if (o.count == 0.0) return;
    const double n = count + o.count;
    const double delta = o.mean - mean;
    mean += delta * o.count / n;
    m2 += o.m2 + delta * delta * count * o.count / n;
    count = n;
  }
};

}  // namespace detail

/// Mean of sample(RngStream&) -> double over `samples` draws.
template <class Sample>
McEstimate mc_mean(std::int64_t samples, const RngStream& rng, Sample&& sample) {
  if (samples < 1) throw std::invalid_argument("mc_mean: need at least one sample");
  const std::int64_t blocks = mc_block_count(samples);
  std::vector<detail::BlockStats> stats(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < blocks; ++b) {
    RngStream local = rng.substream(static_cast<std::uint64_t>(b));
    const std::int64_t end = std::min(samples, (b + 1) * kMcBlockSize);
    detail::BlockStats s;
    for (std::int64_t j = b * kMcBlockSize; j < end; ++j) s.push(sample(local));
    stats[static_cast<std::size_t>(b)] = s;
  }
  detail::BlockStats total;
  for (const auto& s : stats) total.merge(s);
  McEstimate out{total.mean, 0.0};
  if (total.count > 1.0) out.sem = std::sqrt(total.m2 / (total.count - 1.0) / total.count);
  return out;
}

struct MatrixMcEstimate {
  Matrix value;
  Matrix sem;  // entrywise
};

/// Entrywise mean of sample(RngStream&, Matrix& out) over `samples` draws.
template <class Sample>
MatrixMcEstimate mc_mean_matrix(std::int64_t samples, Index rows, Index cols, const RngStream& rng,
                                Sample&& sample) {
  if (samples < 1) throw std::invalid_argument("mc_mean_matrix: need at least one sample");
  const std::int64_t blocks = mc_block_count(samples);
  std::vector<Matrix> sums(static_cast<std::size_t>(blocks));
  std::vector<Matrix> squares(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < blocks; ++b) {
    RngStream local = rng.substream(static_cast<std::uint64_t>(b));
    const std::int64_t end = std::min(samples, (b + 1) * kMcBlockSize);
    Matrix s = Matrix::Zero(rows, cols);
    Matrix q = Matrix::Zero(rows, cols);
    Matrix x(rows, cols);
    for (std::int64_t j = b * kMcBlockSize; j < end; ++j) {
      sample(local, x);
      s += x;
      q += x.cwiseProduct(x);
    }
    sums[static_cast<std::size_t>(b)] = std::move(s);
    squares[static_cast<std::size_t>(b)] = std::move(q);
  }
  Matrix s = Matrix::Zero(rows, cols);
  Matrix q = Matrix::Zero(rows, cols);
  for (std::size_t b = 0; b < sums.size(); ++b) {
    s += sums[b];
    q += squares[b];
  }
  const double n = static_cast<double>(samples);
  MatrixMcEstimate out{s / n, Matrix::Zero(rows, cols)};
  if (samples > 1) {
    const Matrix var = ((q / n - out.value.cwiseProduct(out.value)) * (n / (n - 1.0))).cwiseMax(0.0);
    out.sem = (var / n).cwiseSqrt();
  }
  return out;
}

}  // namespace slicematch
