#include "slicematch/measures.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace slicematch;
using slicematch::pt::case_stream;

namespace {

PointMatrix pts(std::initializer_list<std::initializer_list<double>> rows) {
  PointMatrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace

TEST(ParticleCloud, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(ParticleCloud(PointMatrix(0, 2)), std::invalid_argument);
  EXPECT_THROW(ParticleCloud(PointMatrix(2, 0)), std::invalid_argument);
  PointMatrix bad = pts({{1, 2}, {3, 4}});
  bad(1, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(ParticleCloud{bad}, std::invalid_argument);
  bad(1, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(ParticleCloud{bad}, std::invalid_argument);
}

TEST(Direction, RequiresUnitNorm) {
  EXPECT_NO_THROW(Direction(Vector::Unit(3, 1)));
  EXPECT_THROW(Direction(Vector::Constant(2, 1.0)), std::invalid_argument);
  EXPECT_THROW(Direction::normalized(Vector::Zero(2)), std::invalid_argument);
  EXPECT_NEAR(Direction::normalized(Vector::Constant(2, 3.0)).vec().norm(), 1.0, 1e-15);
}

TEST(GaussianState, Validates) {
  EXPECT_NO_THROW(GaussianState(Matrix::Identity(3, 3)));
  Matrix asym = Matrix::Identity(2, 2);
  asym(0, 1) = 0.1;
  EXPECT_THROW(GaussianState{asym}, std::invalid_argument);
  Matrix singular = Matrix::Zero(2, 2);
  singular(0, 0) = 1.0;
  EXPECT_THROW(GaussianState{singular}, DegenerateError);
  EXPECT_THROW(GaussianState(Matrix(2, 3)), DimensionError);
}

TEST(Project, Examples) {
  const ParticleCloud axis(pts({{1, 0}, {0, 1}}));
  const Vector p = project(axis, Direction::axis(2, 0));
  EXPECT_EQ(p(0), 1.0);
  EXPECT_EQ(p(1), 0.0);

  Vector t(2);
  t << 0.6, 0.8;
  EXPECT_NEAR(project(ParticleCloud(pts({{3, 4}})), Direction::normalized(t))(0), 5.0, 1e-15);

  auto rng = case_stream(1, 0);
  const ParticleCloud c(pt::random_points(rng, 50, 4));
  const Vector first = project(c, Direction::axis(4, 0));
  for (Index i = 0; i < 50; ++i) EXPECT_EQ(first(i), c.points()(i, 0));
  EXPECT_THROW(project(c, Direction::axis(3, 0)), DimensionError);
}

TEST(Project, LinearInScale) {
  for (int c = 0; c < 50; ++c) {
    auto rng = case_stream(2, c);
    const Index d = pt::uniform_int(rng, 1, 8);
    const PointMatrix x = pt::random_points(rng, 30, d);
    const Direction theta = sample_sphere(d, rng);
    const Vector base = project(ParticleCloud(x), theta);
    const Vector scaled = project(ParticleCloud(PointMatrix(4.0 * x)), theta);
    for (Index i = 0; i < 30; ++i) EXPECT_EQ(scaled(i), 4.0 * base(i));  // power-of-two scale is exact
  }
}

TEST(Project, LargeCloudUsesSameValues) {
  auto rng = case_stream(3, 0);
  const PointMatrix x = pt::random_points(rng, 10000, 3);
  const Direction theta = sample_sphere(3, rng);
  const Vector p = project(ParticleCloud(x), theta);
  for (Index i = 0; i < x.rows(); i += 997) EXPECT_EQ(p(i), x.row(i).dot(theta.vec()));
}

TEST(SecondMoment, Examples) {
  EXPECT_EQ(second_moment(ParticleCloud(pts({{0, 0}}))), 0.0);
  EXPECT_EQ(second_moment(ParticleCloud(pts({{1, 0}, {0, 1}}))), 1.0);
  EXPECT_EQ(second_moment(ParticleCloud(pts({{1, 2}, {3, 4}}))), 15.0);
}

TEST(EmpiricalCovariance, Examples) {
  const Matrix c = empirical_covariance(ParticleCloud(pts({{1, 0}, {-1, 0}})));
  EXPECT_EQ(c(0, 0), 1.0);
  EXPECT_EQ(c(0, 1), 0.0);
  EXPECT_EQ(c(1, 1), 0.0);
  EXPECT_EQ(empirical_covariance(ParticleCloud(pts({{0, 0}}))).norm(), 0.0);
}

TEST(EmpiricalCovariance, MonteCarloOracle) {
  // Entrywise SE of (1/n)Σ x_i x_j for independent normals: sqrt(Var(x_i x_j)/n).
  auto rng = case_stream(4, 0);
  const Index n = 100000;
  PointMatrix x(n, 2);
  for (Index i = 0; i < n; ++i) {
    x(i, 0) = rng.normal();
    x(i, 1) = 2.0 * rng.normal();
  }
  const Matrix c = empirical_covariance(ParticleCloud(x));
  const double nn = static_cast<double>(n);
  EXPECT_NEAR(c(0, 0), 1.0, 5.0 * std::sqrt(2.0 / nn));
  EXPECT_NEAR(c(1, 1), 4.0, 5.0 * std::sqrt(32.0 / nn));
  EXPECT_NEAR(c(0, 1), 0.0, 5.0 * std::sqrt(4.0 / nn));
}

TEST(EmpiricalCovariance, TraceIdentityAndPsd) {
  for (int k = 0; k < 100; ++k) {
    auto rng = case_stream(5, k);
    const Index n = pt::uniform_int(rng, 1, 40);
    const Index d = pt::uniform_int(rng, 1, 7);
    const ParticleCloud c(pt::random_points(rng, n, d, 3.0, 1.0));
    const Matrix cov = empirical_covariance(c);
    EXPECT_LE(pt::rel_diff(second_moment(c), cov.trace()), 1e-12);
    EXPECT_EQ((cov - cov.transpose()).norm(), 0.0);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    EXPECT_GE(eig.eigenvalues()(0), -1e-10);
  }
}

TEST(Mean, Simple) {
  const Vector m = mean(ParticleCloud(pts({{1, 2}, {3, 6}})));
  EXPECT_EQ(m(0), 2.0);
  EXPECT_EQ(m(1), 4.0);
}

TEST(CloudCsv, RoundTripsBitExact) {
  auto rng = case_stream(6, 0);
  const ParticleCloud c(pt::random_points(rng, 25, 3, 1e3));
  std::stringstream s;
  write_cloud_csv(s, c);
  const ParticleCloud back = read_cloud_csv(s);
  EXPECT_EQ(back.points(), c.points());
}

TEST(CloudCsv, ParsesAndRejects) {
  std::istringstream ok("1,2\n3.5,-4e1\n");
  const ParticleCloud c = read_cloud_csv(ok);
  EXPECT_EQ(c.size(), 2);
  EXPECT_EQ(c.points()(1, 1), -40.0);
  std::istringstream ragged("1,2\n3\n");
  EXPECT_THROW(read_cloud_csv(ragged), std::invalid_argument);
  std::istringstream junk("1,abc\n");
  EXPECT_THROW(read_cloud_csv(junk), std::invalid_argument);
  std::istringstream empty("");
  EXPECT_THROW(read_cloud_csv(empty), std::invalid_argument);
}
