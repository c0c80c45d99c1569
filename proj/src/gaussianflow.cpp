#include "slicematch/gaussianflow.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace slicematch {

namespace {

constexpr double kDegenerateVariance = 1e-300;
constexpr double kMinEigen = 1e-12;

void require_square(const Matrix& m, const char* what) {
  if (m.rows() < 1 || m.rows() != m.cols()) throw DimensionError(std::string(what) + ": matrix must be square");
}

void require_same_dim(const Matrix& a, const Matrix& b, const char* what) {
  require_square(a, what);
  require_square(b, what);
  if (a.rows() != b.rows()) throw DimensionError(std::string(what) + ": dimension mismatch");
}

double tau_from_quadratics(double sigma_q, double lambda_q) {
  if (!(sigma_q > kDegenerateVariance)) throw DegenerateError("tau: degenerate projected covariance");
  return std::sqrt(lambda_q / sigma_q);
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Vector quadratic_forms(const Matrix& dirs, const Matrix& m) {
  return (dirs.array() * (m * dirs).array()).colwise().sum().transpose();
}

Vector taus_for(const Matrix& dirs, const Matrix& sigma, const Matrix& lambda) {
  const Vector sq = quadratic_forms(dirs, sigma);
  const Vector lq = quadratic_forms(dirs, lambda);
  Vector t(dirs.cols());
  for (Index i = 0; i < t.size(); ++i) t(i) = tau_from_quadratics(sq(i), lq(i));
  return t;
}

Matrix apply_step(const Matrix& sigma, const Matrix& dirs, const Vector& taus, double gamma) {
  const Index d = sigma.rows();
  Matrix a(d, d);
  if (dirs.cols() == d) {
    // A = (1-γ)I + γ P D Pᵀ
    a.noalias() = gamma * (dirs * taus.asDiagonal() * dirs.transpose());
    a.diagonal().array() += 1.0 - gamma;
  } else {
    // A = I + γ Σ_ℓ (τ_ℓ - 1) θ_ℓθ_ℓᵀ; directions outside the span are untouched.
    a.noalias() = gamma * (dirs * (taus.array() - 1.0).matrix().asDiagonal() * dirs.transpose());
    a.diagonal().array() += 1.0;
  }
  return symmetrized(a * sigma * a.transpose());
}

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("covariance update: gamma must lie in (0, 1]");
}

RunRecord flow_record(std::int64_t k, double gamma, const Matrix& sigma, const Matrix& lambda,
                      std::int64_t sw_directions, const RngStream& eval) {
  const Vector ev = symmetric_eigs(sigma);
  RunRecord r;
  r.k = k;
  r.gamma = gamma;
  r.sw2sq = sw2sq_gaussian_mc(sigma, lambda, sw_directions, eval.substream(static_cast<std::uint64_t>(k))).value;
  r.lambda_min = ev(0);
  r.lambda_max = ev(ev.size() - 1);
  r.m2 = sigma.trace();
  return r;
}

void guard_positive(const Matrix& sigma, std::int64_t k) {
  const Index d = sigma.rows();
  Eigen::LLT<Matrix> llt(sigma - kMinEigen * Matrix::Identity(d, d));
  if (llt.info() == Eigen::Success) return;
  throw DegenerateError("run_gaussian_flow: lambda_min(Sigma_k) < 1e-12 at k = " + std::to_string(k));
}

}  // namespace

double tau(const Direction& dir, const Matrix& sigma, const Matrix& lambda) {
  require_same_dim(sigma, lambda, "tau");
  if (dir.dim() != sigma.rows()) throw DimensionError("tau: direction dimension mismatch");
  const Vector& t = dir.vec();
  return tau_from_quadratics(t.dot(sigma * t), t.dot(lambda * t));
}

Vector basis_taus(const OrthoBasis& basis, const Matrix& sigma, const Matrix& lambda) {
  require_same_dim(sigma, lambda, "basis_taus");
  if (basis.dim() != sigma.rows()) throw DimensionError("basis_taus: basis dimension mismatch");
  return taus_for(basis.cols(), sigma, lambda);
}

Matrix update_covariance_basis(const Matrix& sigma, const Matrix& lambda, const OrthoBasis& basis,
                               double gamma) {
  check_gamma(gamma);
  return apply_step(sigma, basis.cols(), basis_taus(basis, sigma, lambda), gamma);
}

Matrix update_covariance_single(const Matrix& sigma, const Matrix& lambda, const Direction& dir,
                                double gamma) {
  check_gamma(gamma);
  Vector t(1);
  t(0) = tau(dir, sigma, lambda);
  return apply_step(sigma, dir.vec(), t, gamma);
}

std::vector<RunRecord> run_gaussian_flow(const GaussianState& sigma0, const GaussianState& lambda,
                                         const FlowConfig& cfg, const RngStream& rng,
                                         const FlowObserver& observer) {
  if (sigma0.dim() != lambda.dim()) throw DimensionError("run_gaussian_flow: dimension mismatch");
  cfg.schedule.validate();
  if (cfg.iterations < 1) throw std::invalid_argument("run_gaussian_flow: iterations must be >= 1");
  if (cfg.eval_every < 1) throw std::invalid_argument("run_gaussian_flow: eval_every must be >= 1");
  if (cfg.sw_directions < 1) throw std::invalid_argument("run_gaussian_flow: sw_directions must be >= 1");

  RngStream traj = rng.substream(kTrajectoryStream);
  const RngStream eval = rng.substream(kEvalStream);
  const Index d = sigma0.dim();
  const Matrix& lam = lambda.cov();
  Matrix sigma = sigma0.cov();

  std::vector<RunRecord> records;
  for (std::int64_t k = 0; k < cfg.iterations; ++k) {
    const double gamma = step_size(cfg.schedule, k);
    if (k % cfg.eval_every == 0) records.push_back(flow_record(k, gamma, sigma, lam, cfg.sw_directions, eval));
    Matrix dirs;
    if (cfg.mode == SamplingMode::OrthonormalBasis) {
      dirs = sample_haar_basis(d, traj).cols();
    } else {
      dirs = sample_sphere(d, traj).vec();
    }
    const Vector taus = taus_for(dirs, sigma, lam);
    Matrix next = apply_step(sigma, dirs, taus, gamma);
    guard_positive(next, k + 1);
    if (observer) observer(FlowStep{k, gamma, sigma, next, dirs, taus});
    sigma = std::move(next);
  }
  const std::int64_t last = cfg.iterations;
  records.push_back(flow_record(last, step_size(cfg.schedule, last), sigma, lam, cfg.sw_directions, eval));
  return records;
}

McEstimate sw2sq_gaussian_mc(const Matrix& sigma, const Matrix& lambda, std::int64_t directions,
                             const RngStream& rng) {
  require_same_dim(sigma, lambda, "sw2sq_gaussian_mc");
  if (directions < 1) throw std::invalid_argument("sw2sq_gaussian_mc: need at least one direction");
  const Index d = sigma.rows();
  return mc_mean(directions, rng, [&](RngStream& local) {
    const Direction theta = sample_sphere(d, local);
    const Vector& t = theta.vec();
    const double diff = std::sqrt(t.dot(sigma * t)) - std::sqrt(t.dot(lambda * t));
    return diff * diff;
  });
}

Vector symmetric_eigs(const Matrix& m) {
  require_square(m, "symmetric_eigs");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument("symmetric_eigs: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw std::runtime_error("symmetric_eigs: solver did not converge");
  return eig.eigenvalues();
}

Matrix psd_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(m));
  const Vector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

double w2sq_gaussian(const Matrix& sigma, const Matrix& lambda) {
  require_same_dim(sigma, lambda, "w2sq_gaussian");
  if (symmetric_eigs(sigma)(0) <= 0.0 || symmetric_eigs(lambda)(0) <= 0.0) {
    throw DegenerateError("w2sq_gaussian: covariance is not positive definite");
  }
  const Matrix root_sigma = psd_sqrt(sigma);
  const Matrix root_lambda = psd_sqrt(lambda);
  const double commutator = (sigma * lambda - lambda * sigma).norm();
  if (commutator < 1e-10 * sigma.norm() * lambda.norm()) {
    return (root_sigma - root_lambda).squaredNorm();
  }
  const Matrix cross = psd_sqrt(root_lambda * sigma * root_lambda);
  return std::max(0.0, sigma.trace() + lambda.trace() - 2.0 * cross.trace());
}

}  // namespace slicematch
