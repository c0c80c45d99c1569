#include "slicematch/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace slicematch::reference {

namespace {

// Serial walk over the same blocks mc_mean uses.
template <class Sample>
McEstimate serial_mean(std::int64_t samples, const RngStream& rng, Sample&& sample) {
  double sum = 0.0;
  double sq = 0.0;
  for (std::int64_t b = 0; b < mc_block_count(samples); ++b) {
    RngStream local = rng.substream(static_cast<std::uint64_t>(b));
    const std::int64_t end = std::min(samples, (b + 1) * kMcBlockSize);
    for (std::int64_t j = b * kMcBlockSize; j < end; ++j) {
      const double x = sample(local);
      sum += x;
      sq += x * x;
    }
  }
  const double n = static_cast<double>(samples);
  McEstimate out{sum / n, 0.0};
  if (samples > 1) out.sem = std::sqrt(std::max(0.0, (sq - n * out.value * out.value) / (n - 1.0)) / n);
  return out;
}

std::vector<double> projections(const PointMatrix& x, const Vector& theta) {
  std::vector<double> out(static_cast<std::size_t>(x.rows()));
  for (Index i = 0; i < x.rows(); ++i) {
    double s = 0.0;
    for (Index j = 0; j < x.cols(); ++j) s += x(i, j) * theta(j);
    out[static_cast<std::size_t>(i)] = s;
  }
  return out;
}

}  // namespace

Vector project(const ParticleCloud& cloud, const Direction& dir) {
  const auto p = projections(cloud.points(), dir.vec());
  return Eigen::Map<const Vector>(p.data(), static_cast<Index>(p.size()));
}

double w2sq_1d(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

McEstimate sw2sq_mc(const ParticleCloud& a, const ParticleCloud& b, std::int64_t directions,
                    const RngStream& rng) {
  return serial_mean(directions, rng, [&](RngStream& local) {
    const Direction theta = sample_sphere(a.dim(), local);
    return w2sq_1d(projections(a.points(), theta.vec()), projections(b.points(), theta.vec()));
  });
}

McEstimate sw2sq_gaussian_mc(const Matrix& sigma, const Matrix& lambda, std::int64_t directions,
                             const RngStream& rng) {
  return serial_mean(directions, rng, [&](RngStream& local) {
    const Vector t = sample_sphere(sigma.rows(), local).vec();
    const double diff = std::sqrt(t.dot(sigma * t)) - std::sqrt(t.dot(lambda * t));
    return diff * diff;
  });
}

Matrix gradient_matrix_mc(const Matrix& sigma, const Matrix& lambda, std::int64_t directions,
                          const RngStream& rng) {
  const Index d = sigma.rows();
  Matrix acc = Matrix::Zero(d, d);
  for (std::int64_t b = 0; b < mc_block_count(directions); ++b) {
    RngStream local = rng.substream(static_cast<std::uint64_t>(b));
    const std::int64_t end = std::min(directions, (b + 1) * kMcBlockSize);
    for (std::int64_t j = b * kMcBlockSize; j < end; ++j) {
      const Vector t = sample_sphere(d, local).vec();
      const double tau = std::sqrt(t.dot(lambda * t) / t.dot(sigma * t));
      for (Index c = 0; c < d; ++c)
        for (Index r = 0; r < d; ++r) acc(r, c) += static_cast<double>(d) * (1.0 - tau) * t(r) * t(c);
    }
  }
  return acc / static_cast<double>(directions);
}

double quartic_moment_mc(const Matrix& gamma, std::int64_t directions, const RngStream& rng) {
  return serial_mean(directions, rng, [&](RngStream& local) {
    const Vector t = sample_sphere(gamma.rows(), local).vec();
    const double q = t.dot(gamma * t);
    return q * q;
  }).value;
}

ParticleCloud slice_map_basis(const ParticleCloud& src, const ParticleCloud& tgt, const OrthoBasis& basis) {
  const PointMatrix& x = src.points();
  const Index n = x.rows();
  const Index d = x.cols();
  PointMatrix out = PointMatrix::Zero(n, d);
  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  for (Index l = 0; l < d; ++l) {
    const Vector theta = basis.cols().col(l);
    const auto ps = projections(x, theta);
    auto pt = projections(tgt.points(), theta);
    std::sort(pt.begin(), pt.end());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return ps[i] < ps[j]; });
    for (std::size_t r = 0; r < order.size(); ++r) {
      const auto i = static_cast<Index>(order[r]);
      for (Index c = 0; c < d; ++c) out(i, c) += pt[r] * theta(c);
    }
  }
  return ParticleCloud(std::move(out));
}

}  // namespace slicematch::reference
