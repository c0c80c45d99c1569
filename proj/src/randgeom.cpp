#include "slicematch/randgeom.hpp"

#include <cmath>
#include <stdexcept>

namespace slicematch {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32)};
  return std::mt19937_64(seq);
}

constexpr double kRedrawNorm = 1e-300;
constexpr double kRedrawPivot = 1e-12;

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id)) {}

RngStream RngStream::substream(std::uint64_t child) const {
  return RngStream(seed_, splitmix64(stream_id_ ^ splitmix64(child + 0x632BE59BD9B4E019ULL)));
}

OrthoBasis::OrthoBasis(Matrix cols) : cols_(std::move(cols)) {
  if (cols_.rows() < 1 || cols_.rows() != cols_.cols()) {
    throw DimensionError("OrthoBasis: matrix must be square and non-empty");
  }
  const Matrix gram = cols_.transpose() * cols_;
  if ((gram - Matrix::Identity(dim(), dim())).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("OrthoBasis: columns are not orthonormal");
  }
}

Direction sample_sphere(Index d, RngStream& rng) {
  if (d < 1) throw std::invalid_argument("sample_sphere: d must be >= 1");
  Vector v(d);
  while (true) {
    for (Index i = 0; i < d; ++i) v(i) = rng.normal();
    const double n = v.norm();
    if (n >= kRedrawNorm) return make_trusted_direction(v / n);
  }
}

OrthoBasis sample_haar_basis(Index d, RngStream& rng) {
  if (d < 1) throw std::invalid_argument("sample_haar_basis: d must be >= 1");
  Matrix g(d, d);
  while (true) {
    for (Index j = 0; j < d; ++j)
      for (Index i = 0; i < d; ++i) g(i, j) = rng.normal();
    Eigen::HouseholderQR<Matrix> qr(g);
    const auto& packed = qr.matrixQR();
    bool singular = false;
    for (Index j = 0; j < d; ++j) singular |= std::abs(packed(j, j)) < kRedrawPivot;
    if (singular) continue;
    Matrix q = qr.householderQ() * Matrix::Identity(d, d);
    for (Index j = 0; j < d; ++j) {
      if (packed(j, j) < 0.0) q.col(j) = -q.col(j);
    }
    return OrthoBasis(std::move(q), OrthoBasis::Trusted{});
  }
}

Matrix random_spd(Index d, double lo, double hi, RngStream& rng) {
  if (!(lo > 0.0 && hi >= lo)) throw std::invalid_argument("random_spd: need 0 < lo <= hi");
  const Matrix q = sample_haar_basis(d, rng).cols();
  Vector s(d);
  const double log_lo = std::log(lo);
  const double log_hi = std::log(hi);
  for (Index i = 0; i < d; ++i) s(i) = std::exp(log_lo + (log_hi - log_lo) * rng.uniform());
  const Matrix m = q * s.asDiagonal() * q.transpose();
  return 0.5 * (m + m.transpose());
}

}  // namespace slicematch
