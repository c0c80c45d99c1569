#include "slicematch/measures.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace slicematch {

namespace {

constexpr Index kParallelRows = 4096;

void write_double(std::ostream& out, double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, end - buf);
}

}  // namespace

ParticleCloud::ParticleCloud(PointMatrix points) : points_(std::move(points)) {
  if (points_.rows() < 1 || points_.cols() < 1) {
    throw std::invalid_argument("ParticleCloud: need at least one point and one dimension");
  }
  if (!points_.allFinite()) {
    throw std::invalid_argument("ParticleCloud: non-finite coordinate");
  }
}

Direction::Direction(Vector v) : vec_(std::move(v)) {
  if (vec_.size() < 1) throw std::invalid_argument("Direction: empty vector");
  if (std::abs(vec_.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("Direction: vector is not unit norm");
  }
}

Direction Direction::normalized(const Vector& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw std::invalid_argument("Direction: cannot normalize a zero or non-finite vector");
  }
  return Direction(v / n, Trusted{});
}

Direction Direction::axis(Index dim, Index i) {
  if (i < 0 || i >= dim) throw std::out_of_range("Direction::axis: index out of range");
  return Direction(Vector::Unit(dim, i), Trusted{});
}

Direction make_trusted_direction(Vector v) { return Direction(std::move(v), Direction::Trusted{}); }

GaussianState::GaussianState(Matrix cov) : cov_(std::move(cov)) {
  if (cov_.rows() < 1 || cov_.rows() != cov_.cols()) {
    throw DimensionError("GaussianState: covariance must be square and non-empty");
  }
  const double scale = cov_.cwiseAbs().maxCoeff();
  if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("GaussianState: covariance is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov_, Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues()(0) > 0.0)) {
    throw DegenerateError("GaussianState: covariance is not positive definite");
  }
}

Vector project(const ParticleCloud& cloud, const Direction& dir) {
  if (dir.dim() != cloud.dim()) throw DimensionError("project: dimension mismatch");
  const PointMatrix& x = cloud.points();
  const Vector& theta = dir.vec();
  const Index n = x.rows();
  Vector out(n);
#pragma omp parallel for schedule(static) if (n >= kParallelRows)
  for (Index i = 0; i < n; ++i) out(i) = x.row(i).dot(theta);
  return out;
}

double second_moment(const ParticleCloud& cloud) {
  return cloud.points().rowwise().squaredNorm().sum() / static_cast<double>(cloud.size());
}

Vector mean(const ParticleCloud& cloud) {
  return cloud.points().colwise().sum().transpose() / static_cast<double>(cloud.size());
}

Matrix empirical_covariance(const ParticleCloud& cloud) {
  const PointMatrix& x = cloud.points();
  Matrix c = Matrix::Zero(x.cols(), x.cols());
  c.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
  c = c.selfadjointView<Eigen::Lower>();
  return c / static_cast<double>(x.rows());
}

ParticleCloud read_cloud_csv(std::istream& in) {
  std::vector<double> values;
  Index cols = -1;
  Index rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    Index fields = 0;
    const char* p = line.data();
    const char* end = p + line.size();
    while (true) {
      double v = 0.0;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc()) {
        throw std::invalid_argument("read_cloud_csv: bad number on row " + std::to_string(rows + 1));
      }
      values.push_back(v);
      ++fields;
      if (next == end) break;
      if (*next != ',') {
        throw std::invalid_argument("read_cloud_csv: expected ',' on row " + std::to_string(rows + 1));
      }
      p = next + 1;
    }
    if (cols < 0) cols = fields;
    if (fields != cols) {
      throw DimensionError("read_cloud_csv: ragged row " + std::to_string(rows + 1));
    }
    ++rows;
  }
  if (rows == 0) throw std::invalid_argument("read_cloud_csv: no points");
  PointMatrix pts = Eigen::Map<PointMatrix>(values.data(), rows, cols);
  return ParticleCloud(std::move(pts));
}

ParticleCloud read_cloud_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_cloud_csv: cannot open " + path.string());
  return read_cloud_csv(in);
}

void write_cloud_csv(std::ostream& out, const ParticleCloud& cloud) {
  const PointMatrix& x = cloud.points();
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) {
      if (j > 0) out.put(',');
      write_double(out, x(i, j));
    }
    out.put('\n');
  }
}

void write_cloud_csv(const std::filesystem::path& path, const ParticleCloud& cloud) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_cloud_csv: cannot open " + path.string());
  write_cloud_csv(out, cloud);
}

}  // namespace slicematch
