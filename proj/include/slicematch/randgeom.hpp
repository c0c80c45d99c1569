#pragma once

// Seedable sampling of sphere directions and Haar-distributed orthonormal bases.

#include "slicematch/measures.hpp"

#include <cstdint>
#include <random>

namespace slicematch {

/// A reproducible random stream identified by (seed, stream_id).
///
/// Two streams constructed from the same pair produce the same draws bit for
/// bit. Independent work (runs, Monte-Carlo blocks, evaluation of a loss that
/// must not perturb a trajectory) takes its own `substream`.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Fresh stream whose id is a hash of (stream_id, child). Does not advance *this.
  RngStream substream(std::uint64_t child) const;

  double normal() { return normal_(engine_); }
  // Uniform on [0, 1).
  double uniform() { return std::generate_canonical<double, 64>(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

/// d×d matrix P with PᵀP = I; its columns are projection directions.
class OrthoBasis {
 public:
  /// Throws unless PᵀP = I within 1e-10 entrywise.
  explicit OrthoBasis(Matrix cols);

  Index dim() const { return cols_.rows(); }
  const Matrix& cols() const { return cols_; }
  Direction column(Index i) const { return make_trusted_direction(cols_.col(i)); }

 private:
  struct Trusted {};
  OrthoBasis(Matrix cols, Trusted) : cols_(std::move(cols)) {}
  friend OrthoBasis sample_haar_basis(Index d, RngStream& rng);

  Matrix cols_;
};

// Uniform direction: normalized vector of d standard normals.
Direction sample_sphere(Index d, RngStream& rng);

// Haar-distributed orthogonal matrix via Householder QR of a Gaussian matrix,
// with the columns of Q multiplied by sign(R_jj).
OrthoBasis sample_haar_basis(Index d, RngStream& rng);

// Q diag(s) Qᵀ with Q Haar and s log-uniform on [lo, hi].
Matrix random_spd(Index d, double lo, double hi, RngStream& rng);

}  // namespace slicematch
