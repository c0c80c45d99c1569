#include "slicematch/diagnostics.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace slicematch;
using slicematch::pt::case_stream;

namespace {

Matrix diag(std::initializer_list<double> v) {
  Vector d(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) d(i++) = x;
  return d.asDiagonal();
}

std::vector<RunRecord> synthetic_series(double c, double power, std::int64_t k_max) {
  std::vector<RunRecord> out;
  for (std::int64_t k = 0; k <= k_max; k += 10) {
    RunRecord r;
    r.k = k;
    r.sw2sq = k == 0 ? c : c / std::pow(static_cast<double>(k), power);
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST(FormatReport, TabSeparated) {
  const CheckReport r{"demo", true, 0.5, 0.25, 1e-3, "ignored"};
  EXPECT_EQ(format_report(r), "demo\t1\t0.5\t0.25\t0.001");
  const CheckReport f{"other", false, 1.0, 2.0, 0.0, ""};
  EXPECT_EQ(format_report(f).substr(0, 8), "other\t0\t");
}

TEST(SwW2Bound, Constant) { EXPECT_DOUBLE_EQ(sw_w2_constant(2, 1.0, 4.0), 1.0 / 32.0); }

TEST(SwW2Bound, EqualCovariancesPass) {
  Vector s(3);
  s << 1.0, 2.0, 3.0;
  const CheckReport r = check_sw_w2_bound(s, s, 1.0, 4.0, 100, RngStream(1, 1));
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_EQ(r.rhs, 0.0);
}

TEST(SwW2Bound, Preconditions) {
  Vector s(2), l(2);
  s << 1.0, 5.0;
  l << 1.0, 2.0;
  EXPECT_THROW(check_sw_w2_bound(s, l, 1.0, 4.0, 10, RngStream(1, 1)), std::invalid_argument);
  EXPECT_THROW(check_sw_w2_bound(l, l, 0.0, 4.0, 10, RngStream(1, 1)), std::invalid_argument);
  EXPECT_THROW(check_sw_w2_bound(l, Vector::Ones(3), 1.0, 4.0, 10, RngStream(1, 1)), DimensionError);
}

TEST(SwW2Bound, SmallCampaign) {
  const std::vector<Index> dims{2, 5, 10};
  const auto res = run_sw_w2_campaign(60, dims, 1.0, 4.0, 2000, RngStream(2, 0));
  EXPECT_EQ(res.reports.size(), 60u);
  EXPECT_TRUE(res.summary.passed);
  EXPECT_EQ(res.summary.lhs, 0.0);
}

TEST(GradientMatrix, ExactCases) {
  auto rng = case_stream(70, 0);
  const Matrix s = random_spd(3, 0.5, 2.0, rng);
  EXPECT_EQ(gradient_matrix_mc(s, s, 500, RngStream(3, 0)).value.norm(), 0.0);

  const Matrix id = Matrix::Identity(4, 4);
  const auto a = gradient_matrix_mc(4.0 * id, id, 20000, RngStream(3, 1));
  EXPECT_NEAR(a.value.trace(), 2.0, 1e-12);  // Tr = d·0.5·mean‖θ‖² exactly
  for (Index r = 0; r < 4; ++r)
    for (Index c = 0; c < 4; ++c) EXPECT_LE(std::abs(a.value(r, c) - 0.5 * id(r, c)), 5.0 * a.sem(r, c) + 1e-15);
  EXPECT_EQ((a.value - a.value.transpose()).norm(), 0.0);
}

TEST(GradientMatrix, MatchesCircleQuadrature) {
  const Matrix s = diag({1, 4});
  const Matrix l = Matrix::Identity(2, 2);
  Matrix quad = Matrix::Zero(2, 2);
  const int points = 100000;
  for (int i = 0; i < points; ++i) {
    const double t = 2.0 * std::numbers::pi * (i + 0.5) / points;
    Vector th(2);
    th << std::cos(t), std::sin(t);
    const double tau = std::sqrt(th.dot(l * th) / th.dot(s * th));
    quad += 2.0 * (1.0 - tau) * th * th.transpose();
  }
  quad /= points;
  const auto a = gradient_matrix_mc(s, l, 1000000, RngStream(4, 0));
  for (Index r = 0; r < 2; ++r)
    for (Index c = 0; c < 2; ++c) EXPECT_LE(std::abs(a.value(r, c) - quad(r, c)), 4.0 * a.sem(r, c) + 1e-12);
}

TEST(GradientMatrix, StandardErrorHalvesWithFourTimesTheSamples) {
  const Matrix s = diag({1, 3, 0.5});
  const Matrix l = Matrix::Identity(3, 3);
  const auto small = gradient_matrix_mc(s, l, 40000, RngStream(5, 0));
  const auto big = gradient_matrix_mc(s, l, 160000, RngStream(5, 1));
  const double ratio = big.sem.norm() / small.sem.norm();
  EXPECT_NEAR(ratio, 0.5, 0.05);
}

TEST(GradientNorm, IsotropicClosedForm) {
  const double a = 2.25;
  const Index d = 3;
  const Matrix id = Matrix::Identity(d, d);
  const McEstimate g = gradient_norm_sq_mc(a * id, id, 100000, RngStream(6, 0));
  const double exact = d * std::pow(std::sqrt(a) - 1.0, 2);
  EXPECT_NEAR(g.value, exact, 1e-2 * exact);
}

TEST(PlInequality, ExactCasesAndPreconditions) {
  auto rng = case_stream(71, 0);
  const Matrix q = sample_haar_basis(3, rng).cols();
  const Matrix s = q * diag({0.6, 1.0, 1.8}) * q.transpose();
  const Matrix sym = 0.5 * (s + s.transpose());
  const CheckReport same = check_pl_inequality(sym, sym, 0.5, 2.0, 1000, RngStream(7, 0));
  EXPECT_TRUE(same.passed);
  EXPECT_EQ(same.lhs, 0.0);

  const Matrix id = Matrix::Identity(3, 3);
  const CheckReport iso = check_pl_inequality(1.8 * id, id, 0.5, 2.0, 5000, RngStream(7, 1));
  EXPECT_TRUE(iso.passed);
  const McEstimate grad = gradient_norm_sq_mc(1.8 * id, id, 5000, RngStream(7, 1).substream(2));
  EXPECT_NEAR(iso.lhs / grad.value, 0.5, 0.01);

  EXPECT_THROW(check_pl_inequality(diag({1, 2}), sym.topLeftCorner(2, 2), 0.5, 2.0, 10, RngStream(7, 2)),
               std::invalid_argument);
  EXPECT_THROW(check_pl_inequality(diag({1, 3}), diag({1, 1}), 0.5, 2.0, 10, RngStream(7, 3)), std::invalid_argument);
}

TEST(PlInequality, SmallCampaign) {
  const std::vector<Index> dims{2, 5, 10};
  const auto res = run_pl_campaign(15, dims, 0.5, 2.0, 5000, RngStream(8, 0));
  EXPECT_TRUE(res.summary.passed);
}

TEST(Decomposition, ExactCases) {
  auto rng = case_stream(72, 0);
  const Matrix s = random_spd(3, 0.5, 2.0, rng);
  const CheckReport same = check_decomposition(s, s, 500, 500, RngStream(9, 0));
  EXPECT_TRUE(same.passed);
  EXPECT_EQ(same.lhs, 0.0);
  EXPECT_NEAR(same.rhs, 0.0, 1e-25);

  const Matrix id = Matrix::Identity(3, 3);
  const CheckReport iso = check_decomposition(2.0 * id, id, 2000, 2000, RngStream(9, 1));
  EXPECT_TRUE(iso.passed) << iso.detail;
  // Variance term vanishes: every T_P equals I/√2.
  EXPECT_NEAR(iso.lhs, iso.rhs, 1e-12);
}

TEST(Decomposition, DiagonalInstance) {
  const CheckReport r = check_decomposition(diag({1, 2, 4}), Matrix::Identity(3, 3), 100000, 100000, RngStream(10, 0));
  EXPECT_TRUE(r.passed) << r.lhs << " vs " << r.rhs << " slack " << r.slack;
  EXPECT_THROW(check_decomposition(diag({1, 2}), diag({1, 2}), 1, 10, RngStream(10, 1)), std::invalid_argument);
}

TEST(QuarticMoment, ClosedFormAndExactCases) {
  EXPECT_DOUBLE_EQ(quartic_moment_closed_form(Matrix::Identity(2, 2)), 1.0);
  const CheckReport id = sphere_quartic_moment_check(Matrix::Identity(2, 2), 1000, RngStream(11, 0));
  EXPECT_TRUE(id.passed);
  EXPECT_NEAR(id.lhs, 1.0, 1e-14);
  const CheckReport zero = sphere_quartic_moment_check(Matrix::Zero(4, 4), 1000, RngStream(11, 1));
  EXPECT_TRUE(zero.passed);
  EXPECT_EQ(zero.lhs, 0.0);
  EXPECT_EQ(zero.rhs, 0.0);
  Matrix asym = Matrix::Identity(2, 2);
  asym(0, 1) = 1.0;
  EXPECT_THROW(sphere_quartic_moment_check(asym, 10, RngStream(11, 2)), std::invalid_argument);
}

TEST(QuarticMoment, RandomSixDimensional) {
  auto rng = case_stream(73, 0);
  const Matrix g = pt::random_symmetric(rng, 6);
  EXPECT_TRUE(sphere_quartic_moment_check(g, 1000000, RngStream(12, 0)).passed);
}

TEST(QuarticMoment, ClosedFormAgainstGaussianMoments) {
  // Independent oracle: for z ~ N(0, I), E[(zᵀΓz)²] = 2Tr Γ² + (Tr Γ)², and
  // E‖z‖⁴ = d(d+2); θ = z/‖z‖ is independent of ‖z‖.
  for (int c = 0; c < 20; ++c) {
    auto rng = case_stream(74, c);
    const Index d = pt::uniform_int(rng, 1, 10);
    const Matrix g = pt::random_symmetric(rng, d);
    const double gauss = 2.0 * (g * g).trace() + g.trace() * g.trace();
    EXPECT_NEAR(quartic_moment_closed_form(g), gauss / (d * (d + 2.0)), 1e-12 * (1 + gauss));
  }
}

TEST(WeightedGradientBound, FixedPointAndMissingLogs) {
  const Matrix id = Matrix::Identity(3, 3);
  FlowConfig cfg{{0.9, 1.0}, 50, SamplingMode::OrthonormalBasis, 1, 50};
  std::vector<std::vector<RunRecord>> runs{trace_gradient_flow(GaussianState(id), GaussianState(id), cfg, RngStream(13, 0), 50)};
  ASSERT_EQ(runs[0].size(), 51u);
  const CheckReport r = check_weighted_gradient_bound(runs, cfg.schedule, 3.0, 0.0);
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(r.lhs, 0.0, 1e-25);
  EXPECT_GT(r.rhs, 0.0);

  runs[0][7].grad_norm2.reset();
  EXPECT_THROW(check_weighted_gradient_bound(runs, cfg.schedule, 3.0, 0.0), std::invalid_argument);
  runs[0].erase(runs[0].begin() + 7);
  EXPECT_THROW(check_weighted_gradient_bound(runs, cfg.schedule, 3.0, 0.0), std::invalid_argument);
}

TEST(WeightedGradientBound, IsotropicRuns) {
  constexpr Index d = 5;
  const GaussianState lambda(Matrix::Identity(d, d));
  for (double alpha : {0.9, 0.51}) {
    FlowConfig cfg{{alpha, 1.0}, 2000, SamplingMode::OrthonormalBasis, 1, 500};
    std::vector<std::vector<RunRecord>> runs;
    double f0 = 0.0;
    for (int seed = 0; seed < 10; ++seed) {
      RngStream init(14, static_cast<std::uint64_t>(seed));
      const GaussianState s0(random_spd(d, 0.1, 10.0, init));
      runs.push_back(trace_gradient_flow(s0, lambda, cfg, init.substream(1), 200));
      f0 += 0.5 * d * runs.back().front().sw2sq / 10.0;
    }
    const CheckReport r = check_weighted_gradient_bound(runs, cfg.schedule, static_cast<double>(d), f0);
    EXPECT_TRUE(r.passed) << "alpha " << alpha << ": " << r.lhs << " > " << r.rhs;
  }
}

TEST(MomentBound, IgnoresInitialRecord) {
  std::vector<RunRecord> recs(3);
  recs[0].k = 0;
  recs[0].m2 = 10.0;
  recs[1].k = 1;
  recs[1].m2 = 2.0;
  recs[2].k = 2;
  recs[2].m2 = 2.0 + 5e-10;
  EXPECT_TRUE(check_moment_bound(recs, 2.0).passed);
  recs[2].m2 = 2.0 + 1e-8;
  EXPECT_FALSE(check_moment_bound(recs, 2.0).passed);
}

TEST(EigenRecursion, HoldsAlongRandomFlows) {
  for (int c = 0; c < 5; ++c) {
    auto rng = case_stream(75, c);
    const Index d = pt::uniform_int(rng, 2, 6);
    const GaussianState s0(random_spd(d, 0.1, 10.0, rng));
    const GaussianState l(random_spd(d, 0.5, 2.0, rng));
    const FlowConfig cfg{{0.51, 1.0}, 300, SamplingMode::OrthonormalBasis, 300, 8};
    run_gaussian_flow(s0, l, cfg, RngStream(15, c), [](const FlowStep& st) {
      const CheckReport r = check_eigen_recursion(st);
      EXPECT_TRUE(r.passed) << r.detail << " lhs " << r.lhs;
    });
  }
}

TEST(EigenRecursion, RejectsSingleDirectionSteps) {
  const FlowConfig cfg{{0.51, 1.0}, 1, SamplingMode::SingleDirection, 1, 8};
  run_gaussian_flow(GaussianState(diag({1, 2})), GaussianState(diag({1, 1})), cfg, RngStream(16, 0),
                    [](const FlowStep& st) { EXPECT_THROW(check_eigen_recursion(st), std::invalid_argument); });
}

TEST(Accumulator, IsotropicStartHasNonPositiveTerms) {
  const Matrix id = Matrix::Identity(4, 4);
  const FlowConfig cfg{{0.51, 1.0}, 100, SamplingMode::OrthonormalBasis, 100, 8};
  const auto traj = collect_trajectory(GaussianState(id), GaussianState(id), cfg, RngStream(17, 0));
  ASSERT_EQ(traj.size(), 101u);
  const auto acc = sufficient_condition_accumulator(traj, id, 1.0, 500, RngStream(17, 1));
  for (std::size_t i = 1; i < acc.term.size(); ++i) EXPECT_LE(acc.term[i], 1e-12);
  EXPECT_NEAR(acc.partial_sum.back(), 0.0, 1e-10);
  EXPECT_THROW(sufficient_condition_accumulator(traj, id, 0.5, 10, RngStream(17, 2)), std::invalid_argument);
}

TEST(Accumulator, TraceBoundKeepsTermsNonPositiveForIsotropicTarget) {
  // E_θ[θᵀΣ_kθ] - 1 = Tr Σ_k / d - 1 ≤ 0 for k ≥ 1.
  auto rng = case_stream(76, 0);
  const Matrix id = Matrix::Identity(5, 5);
  const FlowConfig cfg{{0.51, 1.0}, 200, SamplingMode::OrthonormalBasis, 200, 8};
  const auto traj = collect_trajectory(GaussianState(random_spd(5, 0.1, 10.0, rng)), GaussianState(id), cfg, RngStream(18, 0));
  const auto acc = sufficient_condition_accumulator(traj, id, 1.0, 20000, RngStream(18, 1));
  for (std::size_t i = 1; i < acc.term.size(); ++i) EXPECT_LE(acc.term[i], 4.0 * acc.sem[i] + 1e-12);
  for (std::size_t i = 1; i < acc.term.size(); ++i) EXPECT_LE(traj[i].sigma.trace(), 5.0 + 1e-9);
}

TEST(LogLogSlope, SyntheticSeries) {
  const std::vector<std::vector<RunRecord>> one{synthetic_series(3.0, 1.0, 5000)};
  EXPECT_NEAR(loglog_slope(one, 500, 5000), -1.0, 1e-6);
  const std::vector<std::vector<RunRecord>> two{synthetic_series(1.0, 0.8, 5000), synthetic_series(2.0, 0.8, 5000)};
  EXPECT_NEAR(loglog_slope(two, 500, 5000), -0.8, 1e-6);
  EXPECT_THROW(loglog_slope(one, 500, 550), std::invalid_argument);
  auto bad = one;
  bad[0][100].sw2sq = 0.0;
  EXPECT_THROW(loglog_slope(bad, 500, 5000), std::domain_error);
}

TEST(LambdaMinVariance, PopulationVariance) {
  std::vector<RunRecord> recs(4);
  const double vals[] = {1.0, 2.0, 3.0, 100.0};
  for (int i = 0; i < 4; ++i) {
    recs[i].k = i;
    recs[i].lambda_min = vals[i];
  }
  EXPECT_DOUBLE_EQ(lambda_min_window_variance(recs, 0, 2), 2.0 / 3.0);
  EXPECT_THROW(lambda_min_window_variance(recs, 3, 3), std::invalid_argument);
}

TEST(Campaigns, ReproducibleFromSeed) {
  const std::vector<Index> dims{2, 3};
  const auto a = run_quartic_campaign(6, dims, 5000, RngStream(19, 0));
  const auto b = run_quartic_campaign(6, dims, 5000, RngStream(19, 0));
  for (std::size_t i = 0; i < a.reports.size(); ++i) {
    EXPECT_EQ(a.reports[i].lhs, b.reports[i].lhs);
    EXPECT_EQ(a.reports[i].rhs, b.reports[i].rhs);
  }
  const auto dec = run_decomposition_campaign(3, dims, 2000, 2000, RngStream(19, 1));
  EXPECT_EQ(dec.reports.size(), 3u);
  EXPECT_TRUE(dec.summary.passed);
}
