#include "slicematch/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace slicematch {

namespace {

constexpr double kRoundoff = 1e-12;

double roundoff_floor(double a, double b) { return kRoundoff * std::max(std::abs(a), std::abs(b)); }

bool commute(const Matrix& a, const Matrix& b) {
  return (a * b - b * a).norm() <= 1e-10 * a.norm() * b.norm();
}

void require_spectrum_in(const Matrix& m, double lo, double hi, const char* what) {
  const Vector ev = symmetric_eigs(m);
  if (ev(0) < lo * (1.0 - 1e-12) || ev(ev.size() - 1) > hi * (1.0 + 1e-12)) {
    throw std::invalid_argument(std::string(what) + ": spectrum outside [m, M]");
  }
}

// T_P = P diag(τ) Pᵀ for a fresh Haar basis.
auto basis_map_sampler(const Matrix& sigma, const Matrix& lambda) {
  return [&sigma, &lambda](RngStream& local, Matrix& out) {
    const OrthoBasis p = sample_haar_basis(sigma.rows(), local);
    const Vector t = basis_taus(p, sigma, lambda);
    out.noalias() = p.cols() * t.asDiagonal() * p.cols().transpose();
  };
}

double sigma_norm_sq(const Matrix& m, const Matrix& sigma) { return (m * sigma * m.transpose()).trace(); }

CheckReport campaign_summary(std::string name, const std::vector<CheckReport>& reports) {
  int failures = 0;
  for (const auto& r : reports) failures += r.passed ? 0 : 1;
  CheckReport s;
  s.name = std::move(name);
  s.passed = failures == 0;
  s.lhs = failures;
  s.rhs = 0.0;
  s.slack = 0.0;
  s.detail = std::to_string(reports.size()) + " instances";
  return s;
}

Index dim_for(std::span<const Index> dims, int i) {
  if (dims.empty()) throw std::invalid_argument("campaign: no dimensions given");
  return dims[static_cast<std::size_t>(i) % dims.size()];
}

Vector uniform_vector(Index d, double lo, double hi, RngStream& rng) {
  Vector v(d);
  for (Index i = 0; i < d; ++i) v(i) = lo + (hi - lo) * rng.uniform();
  return v;
}

}  // namespace

std::string format_report(const CheckReport& r) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "\t%d\t%.12g\t%.12g\t%.6g", r.passed ? 1 : 0, r.lhs, r.rhs, r.slack);
  return r.name + buf;
}

double sw_w2_constant(Index d, double m, double M) {
  const double dd = static_cast<double>(d);
  return m / (M * dd * (dd + 2.0));
}

CheckReport check_sw_w2_bound(const Vector& sigma_diag, const Vector& lambda_diag, double m, double M,
                              std::int64_t directions, const RngStream& rng) {
  if (sigma_diag.size() < 1 || sigma_diag.size() != lambda_diag.size()) {
    throw DimensionError("check_sw_w2_bound: dimension mismatch");
  }
  if (!(m > 0.0 && M >= m)) throw std::invalid_argument("check_sw_w2_bound: need 0 < m <= M");
  const auto in_range = [&](const Vector& v) {
    return v.minCoeff() >= m * (1.0 - 1e-12) && v.maxCoeff() <= M * (1.0 + 1e-12);
  };
  if (!in_range(sigma_diag) || !in_range(lambda_diag)) {
    throw std::invalid_argument("check_sw_w2_bound: diagonal entries outside [m, M]");
  }
  const Matrix sigma = sigma_diag.asDiagonal();
  const Matrix lambda = lambda_diag.asDiagonal();
  const McEstimate sw = sw2sq_gaussian_mc(sigma, lambda, directions, rng);
  CheckReport r;
  r.name = "sw_w2_bound";
  r.lhs = sw.value;
  r.rhs = sw_w2_constant(sigma.rows(), m, M) * w2sq_gaussian(sigma, lambda);
  r.slack = 4.0 * sw.sem + roundoff_floor(r.lhs, r.rhs);
  r.passed = r.lhs + r.slack >= r.rhs;
  r.detail = "d=" + std::to_string(sigma.rows());
  return r;
}

MatrixMcEstimate gradient_matrix_mc(const Matrix& sigma, const Matrix& lambda, std::int64_t directions,
                                    const RngStream& rng) {
  const Index d = sigma.rows();
  if (lambda.rows() != d) throw DimensionError("gradient_matrix_mc: dimension mismatch");
  const double dd = static_cast<double>(d);
  return mc_mean_matrix(directions, d, d, rng, [&](RngStream& local, Matrix& out) {
    const Direction theta = sample_sphere(d, local);
    const double t = tau(theta, sigma, lambda);
    out.noalias() = (dd * (1.0 - t)) * theta.vec() * theta.vec().transpose();
  });
}

McEstimate gradient_norm_sq_mc(const Matrix& sigma, const Matrix& lambda, std::int64_t directions,
                               const RngStream& rng) {
  const Index d = sigma.rows();
  const double dd = static_cast<double>(d);
  const Matrix a = gradient_matrix_mc(sigma, lambda, directions, rng).value;
  const Matrix a_sigma = a * sigma;
  // Second pass over the same directions: linearization 2 Tr(ÂΣ X_j) of Tr(ÂΣÂᵀ).
  const McEstimate lin = mc_mean(directions, rng, [&](RngStream& local) {
    const Direction theta = sample_sphere(d, local);
    const double t = tau(theta, sigma, lambda);
    return 2.0 * dd * (1.0 - t) * theta.vec().dot(a_sigma * theta.vec());
  });
  return {sigma_norm_sq(a, sigma), lin.sem};
}

CheckReport check_pl_inequality(const Matrix& sigma, const Matrix& lambda, double m, double M,
                                std::int64_t directions, const RngStream& rng) {
  if (sigma.rows() != lambda.rows()) throw DimensionError("check_pl_inequality: dimension mismatch");
  if (!(m > 0.0 && M >= m)) throw std::invalid_argument("check_pl_inequality: need 0 < m <= M");
  if (!commute(sigma, lambda)) throw std::invalid_argument("check_pl_inequality: covariances do not commute");
  require_spectrum_in(sigma, m, M, "check_pl_inequality");
  require_spectrum_in(lambda, m, M, "check_pl_inequality");
  const double d = static_cast<double>(sigma.rows());
  const McEstimate sw = sw2sq_gaussian_mc(sigma, lambda, directions, rng.substream(1));
  const McEstimate grad = gradient_norm_sq_mc(sigma, lambda, directions, rng.substream(2));
  const double c_d = d * (d + 2.0) * M / m;
  const double constant = 0.5 * c_d * (1.0 + M / m);
  CheckReport r;
  r.name = "pl_inequality";
  r.lhs = 0.5 * d * sw.value;
  r.rhs = constant * grad.value;
  const double f_sem = 0.5 * d * sw.sem;
  r.slack = 4.0 * std::hypot(f_sem, constant * grad.sem) + roundoff_floor(r.lhs, r.rhs);
  r.passed = r.lhs <= r.rhs + r.slack;
  r.detail = "d=" + std::to_string(sigma.rows());
  return r;
}

CheckReport check_decomposition(const Matrix& sigma, const Matrix& lambda, std::int64_t bases,
                                std::int64_t directions, const RngStream& rng) {
  const Index d = sigma.rows();
  if (lambda.rows() != d) throw DimensionError("check_decomposition: dimension mismatch");
  if (bases < 2) throw std::invalid_argument("check_decomposition: need at least two bases");
  const Matrix id = Matrix::Identity(d, d);
  const auto sampler = basis_map_sampler(sigma, lambda);

  // 2F = d SW₂²
  const McEstimate sw = sw2sq_gaussian_mc(sigma, lambda, directions, rng.substream(1));
  const double two_f = static_cast<double>(d) * sw.value;
  const double two_f_sem = static_cast<double>(d) * sw.sem;

  // ‖Id - T̄‖²_σ from one set of bases, delta-method SEM from a second pass.
  const RngStream set_a = rng.substream(2);
  const Matrix tbar_a = mc_mean_matrix(bases, d, d, set_a, sampler).value;
  const Matrix grad = id - tbar_a;
  const Matrix grad_sigma = grad * sigma;
  const McEstimate lin = mc_mean(bases, set_a, [&](RngStream& local) {
    Matrix t(d, d);
    sampler(local, t);
    return -2.0 * (grad_sigma * (t - tbar_a).transpose()).trace();
  });

  // E_P‖T̄ - T_P‖²_σ from an independent set.
  const RngStream set_b = rng.substream(3);
  const Matrix tbar_b = mc_mean_matrix(bases, d, d, set_b, sampler).value;
  const McEstimate spread = mc_mean(bases, set_b, [&](RngStream& local) {
    Matrix t(d, d);
    sampler(local, t);
    return sigma_norm_sq(t - tbar_b, sigma);
  });
  const double nb = static_cast<double>(bases);
  const double variance_term = spread.value * nb / (nb - 1.0);
  const double variance_sem = spread.sem * nb / (nb - 1.0);
  // The plug-in gradient norm is biased upwards by variance_term / L.
  const double gradient_term = sigma_norm_sq(grad, sigma) - variance_term / nb;

  CheckReport r;
  r.name = "gradient_variance_decomposition";
  r.lhs = two_f;
  r.rhs = gradient_term + variance_term;
  // Products of ~1e-16 rounding in T_P leave residues of order 1e-32·Tr Σ.
  r.slack = 5.0 * std::sqrt(two_f_sem * two_f_sem + lin.sem * lin.sem + variance_sem * variance_sem) +
            roundoff_floor(r.lhs, r.rhs) + 1e-24 * sigma.trace();
  r.passed = std::abs(r.lhs - r.rhs) <= r.slack;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "d=%ld grad=%.6g var=%.6g", static_cast<long>(d), gradient_term, variance_term);
  r.detail = buf;
  return r;
}

double quartic_moment_closed_form(const Matrix& gamma) {
  const double d = static_cast<double>(gamma.rows());
  const double tr = gamma.trace();
  return (2.0 * (gamma * gamma).trace() + tr * tr) / (d * (d + 2.0));
}

CheckReport sphere_quartic_moment_check(const Matrix& gamma, std::int64_t directions, const RngStream& rng) {
  if (gamma.rows() < 1 || gamma.rows() != gamma.cols()) throw DimensionError("sphere_quartic_moment_check: not square");
  if ((gamma - gamma.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, gamma.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("sphere_quartic_moment_check: matrix is not symmetric");
  }
  const Index d = gamma.rows();
  const McEstimate mc = mc_mean(directions, rng, [&](RngStream& local) {
    const Direction theta = sample_sphere(d, local);
    const double q = theta.vec().dot(gamma * theta.vec());
    return q * q;
  });
  CheckReport r;
  r.name = "sphere_quartic_moment";
  r.lhs = mc.value;
  r.rhs = quartic_moment_closed_form(gamma);
  r.slack = 4.0 * mc.sem + roundoff_floor(r.lhs, r.rhs);
  r.passed = std::abs(r.lhs - r.rhs) <= r.slack;
  r.detail = "d=" + std::to_string(d);
  return r;
}

std::vector<RunRecord> trace_gradient_flow(const GaussianState& sigma0, const GaussianState& lambda,
                                           const FlowConfig& cfg, const RngStream& rng,
                                           std::int64_t gradient_directions) {
  FlowConfig every = cfg;
  every.eval_every = 1;
  const RngStream grad_stream = rng.substream(kGradientStream);
  std::vector<double> grads;
  Matrix last = sigma0.cov();
  auto records = run_gaussian_flow(sigma0, lambda, every, rng, [&](const FlowStep& step) {
    grads.push_back(gradient_norm_sq_mc(step.sigma_before, lambda.cov(), gradient_directions,
                                        grad_stream.substream(static_cast<std::uint64_t>(step.k)))
                        .value);
    last = step.sigma_after;
  });
  grads.push_back(gradient_norm_sq_mc(last, lambda.cov(), gradient_directions,
                                      grad_stream.substream(static_cast<std::uint64_t>(cfg.iterations)))
                      .value);
  for (std::size_t i = 0; i < records.size(); ++i) records[i].grad_norm2 = grads[i];
  return records;
}

CheckReport check_weighted_gradient_bound(std::span<const std::vector<RunRecord>> runs,
                                          const StepSchedule& schedule, double m2_target, double f0) {
  if (runs.empty()) throw std::invalid_argument("check_weighted_gradient_bound: no runs");
  const std::size_t steps = runs.front().size();
  if (steps == 0) throw std::invalid_argument("check_weighted_gradient_bound: empty run");
  double sum_gamma = 0.0;
  double sum_gamma_sq = 0.0;
  std::vector<double> gammas(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    gammas[k] = step_size(schedule, static_cast<std::int64_t>(k));
    sum_gamma += gammas[k];
    sum_gamma_sq += gammas[k] * gammas[k];
  }
  std::vector<double> weighted;
  for (const auto& run : runs) {
    if (run.size() != steps) throw std::invalid_argument("check_weighted_gradient_bound: runs differ in length");
    double acc = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
      if (run[k].k != static_cast<std::int64_t>(k) || !run[k].grad_norm2) {
        throw std::invalid_argument("check_weighted_gradient_bound: missing gradient log at k = " + std::to_string(k));
      }
      acc += gammas[k] * *run[k].grad_norm2;
    }
    weighted.push_back(acc / sum_gamma);
  }
  const double n = static_cast<double>(weighted.size());
  double mean = 0.0;
  for (double w : weighted) mean += w;
  mean /= n;
  double sem = 0.0;
  if (weighted.size() > 1) {
    double ss = 0.0;
    for (double w : weighted) ss += (w - mean) * (w - mean);
    sem = std::sqrt(ss / (n - 1.0) / n);
  }
  CheckReport r;
  r.name = "weighted_gradient_bound";
  r.lhs = mean;
  r.rhs = (f0 + 4.0 * m2_target * sum_gamma_sq) / sum_gamma;
  r.slack = 4.0 * sem + roundoff_floor(r.lhs, r.rhs);
  r.passed = r.lhs <= r.rhs + r.slack;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "alpha=%g K=%zu runs=%zu", schedule.alpha, steps - 1, runs.size());
  r.detail = buf;
  return r;
}

CheckReport check_moment_bound(std::span<const RunRecord> records, double m2_target, double slack) {
  CheckReport r;
  r.name = "moment_bound";
  r.lhs = -std::numeric_limits<double>::infinity();
  for (const auto& rec : records) {
    if (rec.k >= 1) r.lhs = std::max(r.lhs, rec.m2);
  }
  r.rhs = m2_target;
  r.slack = slack;
  r.passed = r.lhs <= r.rhs + r.slack;
  return r;
}

CheckReport check_eigen_recursion(const FlowStep& step, double slack) {
  const Index d = step.sigma_before.rows();
  if (step.directions.cols() != d) throw std::invalid_argument("check_eigen_recursion: needs a full basis step");
  const Vector before = symmetric_eigs(step.sigma_before);
  const Vector after = symmetric_eigs(step.sigma_after);
  const Vector factors = ((1.0 - step.gamma) + step.gamma * step.taus.array()).matrix();
  const double lower = factors.minCoeff() * std::sqrt(before(0)) - std::sqrt(after(0));
  const double upper = std::sqrt(after(d - 1)) - factors.maxCoeff() * std::sqrt(before(d - 1));
  CheckReport r;
  r.name = "eigen_recursion";
  r.lhs = std::max(lower, upper);
  r.rhs = 0.0;
  r.slack = slack;
  r.passed = r.lhs <= r.slack;
  r.detail = "k=" + std::to_string(step.k);
  return r;
}

std::vector<TrajectoryPoint> collect_trajectory(const GaussianState& sigma0, const GaussianState& lambda,
                                                const FlowConfig& cfg, const RngStream& rng) {
  std::vector<TrajectoryPoint> out;
  Matrix last = sigma0.cov();
  run_gaussian_flow(sigma0, lambda, cfg, rng, [&](const FlowStep& step) {
    out.push_back({step.k, step.gamma, step.sigma_before});
    last = step.sigma_after;
  });
  out.push_back({cfg.iterations, step_size(cfg.schedule, cfg.iterations), std::move(last)});
  return out;
}

AccumulatorSeries sufficient_condition_accumulator(std::span<const TrajectoryPoint> trajectory,
                                                   const Matrix& lambda, double p,
                                                   std::int64_t directions, const RngStream& rng) {
  if (!(p >= 1.0)) throw std::invalid_argument("sufficient_condition_accumulator: p must be >= 1");
  AccumulatorSeries s;
  double partial = 0.0;
  for (const auto& pt : trajectory) {
    const Index d = pt.sigma.rows();
    if (lambda.rows() != d) throw DimensionError("sufficient_condition_accumulator: dimension mismatch");
    const McEstimate e = mc_mean(directions, rng.substream(static_cast<std::uint64_t>(pt.k)), [&](RngStream& local) {
      const Direction theta = sample_sphere(d, local);
      const Vector& t = theta.vec();
      return std::pow(t.dot(pt.sigma * t) / t.dot(lambda * t), p) - 1.0;
    });
    const double term = pt.gamma * e.value;
    partial += term;
    s.k.push_back(pt.k);
    s.term.push_back(term);
    s.sem.push_back(pt.gamma * e.sem);
    s.partial_sum.push_back(partial);
  }
  return s;
}

double loglog_slope(std::span<const std::vector<RunRecord>> runs, std::int64_t k_lo, std::int64_t k_hi) {
  if (runs.empty()) throw std::invalid_argument("loglog_slope: no runs");
  std::vector<double> xs;
  std::vector<double> ys;
  const auto& grid = runs.front();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::int64_t k = grid[i].k;
    if (k < k_lo || k > k_hi) continue;
    if (k < 1) throw std::invalid_argument("loglog_slope: window must start at k >= 1");
    double mean = 0.0;
    for (const auto& run : runs) {
      if (run.size() != grid.size() || run[i].k != k) throw std::invalid_argument("loglog_slope: runs use different k grids");
      mean += run[i].sw2sq;
    }
    mean /= static_cast<double>(runs.size());
    if (!(mean > 0.0)) throw std::domain_error("loglog_slope: non-positive loss in window");
    xs.push_back(std::log(static_cast<double>(k)));
    ys.push_back(std::log(mean));
  }
  if (xs.size() < 10) throw std::invalid_argument("loglog_slope: fewer than 10 records in window");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

double lambda_min_window_variance(std::span<const RunRecord> records, std::int64_t k_lo, std::int64_t k_hi) {
  std::vector<double> v;
  for (const auto& r : records) {
    if (r.k >= k_lo && r.k <= k_hi && r.lambda_min) v.push_back(*r.lambda_min);
  }
  if (v.size() < 2) throw std::invalid_argument("lambda_min_window_variance: fewer than two records in window");
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size());
}

CampaignResult run_sw_w2_campaign(int instances, std::span<const Index> dims, double lo, double hi,
                                  std::int64_t directions, const RngStream& rng) {
  std::vector<CheckReport> reports(static_cast<std::size_t>(instances));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < instances; ++i) {
    const RngStream inst = rng.substream(static_cast<std::uint64_t>(i));
    RngStream gen = inst.substream(0);
    const Index d = dim_for(dims, i);
    const Vector s = uniform_vector(d, lo, hi, gen);
    const Vector l = uniform_vector(d, lo, hi, gen);
    reports[static_cast<std::size_t>(i)] = check_sw_w2_bound(s, l, lo, hi, directions, inst.substream(1));
  }
  return {campaign_summary("sw_w2_bound_campaign", reports), std::move(reports)};
}

CampaignResult run_pl_campaign(int instances, std::span<const Index> dims, double lo, double hi,
                               std::int64_t directions, const RngStream& rng) {
  std::vector<CheckReport> reports(static_cast<std::size_t>(instances));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < instances; ++i) {
    const RngStream inst = rng.substream(static_cast<std::uint64_t>(i));
    RngStream gen = inst.substream(0);
    const Index d = dim_for(dims, i);
    const Matrix q = sample_haar_basis(d, gen).cols();
    const Vector s = uniform_vector(d, lo, hi, gen);
    const Vector l = uniform_vector(d, lo, hi, gen);
    Matrix sigma = q * s.asDiagonal() * q.transpose();
    Matrix lambda = q * l.asDiagonal() * q.transpose();
    sigma = 0.5 * (sigma + sigma.transpose()).eval();
    lambda = 0.5 * (lambda + lambda.transpose()).eval();
    reports[static_cast<std::size_t>(i)] = check_pl_inequality(sigma, lambda, lo, hi, directions, inst.substream(1));
  }
  return {campaign_summary("pl_inequality_campaign", reports), std::move(reports)};
}

CampaignResult run_decomposition_campaign(int instances, std::span<const Index> dims, std::int64_t bases,
                                          std::int64_t directions, const RngStream& rng) {
  std::vector<CheckReport> reports(static_cast<std::size_t>(instances));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < instances; ++i) {
    const RngStream inst = rng.substream(static_cast<std::uint64_t>(i));
    RngStream gen = inst.substream(0);
    const Index d = dim_for(dims, i);
    const Matrix sigma = random_spd(d, 0.25, 4.0, gen);
    const Matrix lambda = random_spd(d, 0.25, 4.0, gen);
    reports[static_cast<std::size_t>(i)] = check_decomposition(sigma, lambda, bases, directions, inst.substream(1));
  }
  return {campaign_summary("decomposition_campaign", reports), std::move(reports)};
}

CampaignResult run_quartic_campaign(int instances, std::span<const Index> dims, std::int64_t directions,
                                    const RngStream& rng) {
  std::vector<CheckReport> reports(static_cast<std::size_t>(instances));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < instances; ++i) {
    const RngStream inst = rng.substream(static_cast<std::uint64_t>(i));
    RngStream gen = inst.substream(0);
    const Index d = dim_for(dims, i);
    Matrix g(d, d);
    for (Index c = 0; c < d; ++c)
      for (Index r = 0; r < d; ++r) g(r, c) = gen.normal();
    const Matrix gamma = 0.5 * (g + g.transpose());
    reports[static_cast<std::size_t>(i)] = sphere_quartic_moment_check(gamma, directions, inst.substream(1));
  }
  return {campaign_summary("quartic_moment_campaign", reports), std::move(reports)};
}

namespace {

// Isotropic-target flows in d = 5: eigenvalue recursion at every step, plus the
// trace and λ_min bounds implied by moment matching.
std::vector<CheckReport> isotropic_flow_checks(const SuiteSizes& sizes, const RngStream& rng) {
  constexpr Index d = 5;
  const GaussianState lambda(Matrix::Identity(d, d));
  FlowConfig cfg;
  cfg.schedule = {0.51, 1.0};
  cfg.iterations = sizes.flow_iterations;
  cfg.eval_every = sizes.flow_iterations;
  cfg.sw_directions = 16;

  CheckReport recursion{"eigen_recursion", true, -std::numeric_limits<double>::infinity(), 0.0, 1e-8, ""};
  CheckReport trace{"isotropic_trace_bound", true, -std::numeric_limits<double>::infinity(), double(d), 1e-9, ""};
  CheckReport lmin{"isotropic_lambda_min_bound", true, -std::numeric_limits<double>::infinity(), 1.0, 1e-9, ""};
  for (int run = 0; run < sizes.flow_runs; ++run) {
    const RngStream stream = rng.substream(static_cast<std::uint64_t>(run));
    RngStream init = stream.substream(0);
    const GaussianState sigma0(random_spd(d, 0.1, 10.0, init));
    run_gaussian_flow(sigma0, lambda, cfg, stream.substream(1), [&](const FlowStep& step) {
      const CheckReport r = check_eigen_recursion(step);
      recursion.lhs = std::max(recursion.lhs, r.lhs);
      trace.lhs = std::max(trace.lhs, step.sigma_after.trace());
      lmin.lhs = std::max(lmin.lhs, symmetric_eigs(step.sigma_after)(0));
    });
  }
  for (auto* r : {&recursion, &trace, &lmin}) {
    r->passed = r->lhs <= r->rhs + r->slack;
    r->detail = "d=5 alpha=0.51 runs=" + std::to_string(sizes.flow_runs);
  }
  return {recursion, trace, lmin};
}

CheckReport particle_moment_check(const SuiteSizes& sizes, const RngStream& rng) {
  constexpr Index d = 3;
  constexpr Index n = 500;
  SchemeConfig cfg;
  cfg.schedule = {0.1, 1.0};
  cfg.iterations = 200;
  cfg.eval_every = 1;
  cfg.sw_directions = 8;
  CheckReport worst{"particle_moment_bound", true, -std::numeric_limits<double>::infinity(), 0.0, 1e-9, ""};
  double margin = -std::numeric_limits<double>::infinity();
  for (int run = 0; run < sizes.flow_runs; ++run) {
    const RngStream stream = rng.substream(static_cast<std::uint64_t>(run));
    RngStream gen = stream.substream(0);
    const auto sample = [&](double shift) {
      const Matrix root = psd_sqrt(random_spd(d, 0.1, 10.0, gen));
      const Vector offset = shift * uniform_vector(d, -1.0, 1.0, gen);
      PointMatrix x(n, d);
      for (Index i = 0; i < n; ++i) {
        Vector z(d);
        for (Index j = 0; j < d; ++j) z(j) = gen.normal();
        x.row(i) = (root * z + offset).transpose();
      }
      return ParticleCloud(std::move(x));
    };
    const ParticleCloud src = sample(5.0);
    const ParticleCloud tgt = sample(5.0);
    const auto result = run_scheme(src, tgt, cfg, stream.substream(1));
    const CheckReport r = check_moment_bound(result.records, second_moment(tgt));
    if (r.lhs - r.rhs > margin) {
      margin = r.lhs - r.rhs;
      worst = r;
    }
  }
  worst.name = "particle_moment_bound";
  worst.detail = "d=3 n=500 K=200 runs=" + std::to_string(sizes.flow_runs);
  return worst;
}

CheckReport weighted_gradient_check(const SuiteSizes& sizes, double alpha, const RngStream& rng) {
  constexpr Index d = 5;
  const GaussianState lambda(Matrix::Identity(d, d));
  FlowConfig cfg;
  cfg.schedule = {alpha, 1.0};
  cfg.iterations = sizes.flow_iterations;
  cfg.sw_directions = 500;
  std::vector<std::vector<RunRecord>> runs(static_cast<std::size_t>(sizes.flow_runs));
  double f0 = 0.0;
  for (int run = 0; run < sizes.flow_runs; ++run) {
    const RngStream stream = rng.substream(static_cast<std::uint64_t>(run));
    RngStream init = stream.substream(0);
    const GaussianState sigma0(random_spd(d, 0.1, 10.0, init));
    runs[static_cast<std::size_t>(run)] =
        trace_gradient_flow(sigma0, lambda, cfg, stream.substream(1), sizes.gradient_directions);
    f0 += 0.5 * static_cast<double>(d) * runs[static_cast<std::size_t>(run)].front().sw2sq;
  }
  f0 /= static_cast<double>(sizes.flow_runs);
  return check_weighted_gradient_bound(runs, cfg.schedule, static_cast<double>(d), f0);
}

}  // namespace

std::vector<CheckReport> run_diagnostics_suite(const SuiteSizes& sizes) {
  const RngStream root(sizes.seed, 0xD1A6);
  std::vector<CheckReport> out;
  const std::vector<Index> bound_dims{2, 5, 10};
  const std::vector<Index> small_dims{2, 3, 4};
  const std::vector<Index> quartic_dims{2, 4, 6, 8, 10};

  out.push_back(run_sw_w2_campaign(sizes.sw_w2_instances, bound_dims, 1.0, 4.0, sizes.sw_w2_directions,
                                   root.substream(1)).summary);
  out.push_back(run_pl_campaign(sizes.pl_instances, bound_dims, 0.5, 2.0, sizes.pl_directions,
                                root.substream(2)).summary);
  out.push_back(run_decomposition_campaign(sizes.decomposition_instances, small_dims,
                                           sizes.decomposition_samples, sizes.decomposition_samples,
                                           root.substream(3)).summary);
  out.push_back(run_quartic_campaign(sizes.quartic_instances, quartic_dims, sizes.quartic_directions,
                                     root.substream(4)).summary);
  for (auto& r : isotropic_flow_checks(sizes, root.substream(5))) out.push_back(std::move(r));
  out.push_back(particle_moment_check(sizes, root.substream(6)));
  out.push_back(weighted_gradient_check(sizes, 0.9, root.substream(7)));
  out.back().name = "weighted_gradient_bound_alpha0.9";
  out.push_back(weighted_gradient_check(sizes, 0.51, root.substream(8)));
  out.back().name = "weighted_gradient_bound_alpha0.51";
  return out;
}

}  // namespace slicematch
