#pragma once

// Empirical and Gaussian measures, projections and moments.

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <stdexcept>

namespace slicematch {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
// One point per row.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// n points in R^d representing the uniform empirical measure on them.
class ParticleCloud {
 public:
  explicit ParticleCloud(PointMatrix points);

  Index size() const { return points_.rows(); }
  Index dim() const { return points_.cols(); }
  const PointMatrix& points() const { return points_; }

 private:
  PointMatrix points_;
};

/// Unit vector on the sphere S^{d-1}.
class Direction {
 public:
  /// Throws std::invalid_argument unless |‖v‖ - 1| ≤ 1e-12.
  explicit Direction(Vector v);

  /// Rescales v to unit norm; v must be non-zero.
  static Direction normalized(const Vector& v);
  static Direction axis(Index dim, Index i);

  Index dim() const { return vec_.size(); }
  const Vector& vec() const { return vec_; }

 private:
  struct Trusted {};
  Direction(Vector v, Trusted) : vec_(std::move(v)) {}
  friend Direction make_trusted_direction(Vector v);

  Vector vec_;
};

// Skips the norm check; for vectors that are unit by construction.
Direction make_trusted_direction(Vector v);

/// Centered Gaussian N(0, cov) with cov symmetric positive definite.
class GaussianState {
 public:
  explicit GaussianState(Matrix cov);

  Index dim() const { return cov_.rows(); }
  const Matrix& cov() const { return cov_; }

 private:
  Matrix cov_;
};

// ⟨x_i, θ⟩ for every point.
Vector project(const ParticleCloud& cloud, const Direction& dir);

// (1/n) Σ ‖x_i‖²
double second_moment(const ParticleCloud& cloud);

Vector mean(const ParticleCloud& cloud);

// (1/n) Σ x_i x_iᵀ, taken about the origin (no mean subtraction).
Matrix empirical_covariance(const ParticleCloud& cloud);

// Headerless CSV, one point per row, '.' decimal separator.
ParticleCloud read_cloud_csv(std::istream& in);
ParticleCloud read_cloud_csv(const std::filesystem::path& path);
void write_cloud_csv(std::ostream& out, const ParticleCloud& cloud);
void write_cloud_csv(const std::filesystem::path& path, const ParticleCloud& cloud);

}  // namespace slicematch
