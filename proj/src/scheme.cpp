#include "slicematch/scheme.hpp"

#include "slicematch/ot1d.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace slicematch {

namespace {

void check_pair(const ParticleCloud& a, const ParticleCloud& b, const char* what) {
  if (a.dim() != b.dim()) throw DimensionError(std::string(what) + ": dimension mismatch");
  if (a.size() != b.size()) throw DimensionError(std::string(what) + ": sample sizes differ");
}

std::span<const double> column(const Matrix& m, Index j) { return {m.col(j).data(), static_cast<std::size_t>(m.rows())}; }
std::span<double> column(Matrix& m, Index j) { return {m.col(j).data(), static_cast<std::size_t>(m.rows())}; }

// Δ with Δ(i, ℓ) = t_ℓ(θ_ℓᵀx_i) - θ_ℓᵀx_i, one column per direction.
Matrix basis_displacements(const PointMatrix& x, const PointMatrix& y, const Matrix& dirs) {
  const Matrix px = x * dirs;
  const Matrix py = y * dirs;
  Matrix disp(px.rows(), px.cols());
#pragma omp parallel
  {
    ot1d::Workspace ws;
#pragma omp for schedule(static)
    for (Index l = 0; l < dirs.cols(); ++l) {
      ot1d::sorted_match_displacement(column(px, l), column(py, l), column(disp, l), ws);
    }
  }
  return disp;
}

void step_particles(PointMatrix& x, const PointMatrix& y, const Matrix& dirs, double gamma) {
  const Matrix disp = basis_displacements(x, y, dirs);
  x.noalias() += gamma * (disp * dirs.transpose());
}

RunRecord make_record(std::int64_t k, double gamma, const PointMatrix& x, const ParticleCloud& tgt,
                      std::int64_t sw_directions, const RngStream& eval) {
  const ParticleCloud cur(x);
  RunRecord r;
  r.k = k;
  r.gamma = gamma;
  r.sw2sq = sw2sq_mc(cur, tgt, sw_directions, eval.substream(static_cast<std::uint64_t>(k))).value;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(empirical_covariance(cur), Eigen::EigenvaluesOnly);
  r.lambda_min = eig.eigenvalues()(0);
  r.lambda_max = eig.eigenvalues()(eig.eigenvalues().size() - 1);
  r.m2 = second_moment(cur);
  return r;
}

}  // namespace

void StepSchedule::validate() const {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("StepSchedule: alpha must lie in [0, 1)");
  if (!(offset >= 1.0)) throw std::invalid_argument("StepSchedule: offset must be >= 1");
}

double step_size(const StepSchedule& s, std::int64_t k) {
  if (k < 0) throw std::invalid_argument("step_size: k must be >= 0");
  if (s.alpha == 0.0) return 1.0;
  return std::pow(static_cast<double>(k) + s.offset, -s.alpha);
}

std::string_view to_string(SamplingMode mode) {
  return mode == SamplingMode::OrthonormalBasis ? "basis" : "single";
}

SamplingMode parse_sampling_mode(std::string_view text) {
  if (text == "basis") return SamplingMode::OrthonormalBasis;
  if (text == "single") return SamplingMode::SingleDirection;
  throw std::invalid_argument("unknown sampling mode '" + std::string(text) + "'");
}

ParticleCloud slice_map_basis(const ParticleCloud& src, const ParticleCloud& tgt,
                              const OrthoBasis& basis) {
  check_pair(src, tgt, "slice_map_basis");
  if (basis.dim() != src.dim()) throw DimensionError("slice_map_basis: basis dimension mismatch");
  PointMatrix x = src.points();
  step_particles(x, tgt.points(), basis.cols(), 1.0);
  return ParticleCloud(std::move(x));
}

ParticleCloud slice_map_single(const ParticleCloud& src, const ParticleCloud& tgt,
                               const Direction& dir) {
  check_pair(src, tgt, "slice_map_single");
  if (dir.dim() != src.dim()) throw DimensionError("slice_map_single: direction dimension mismatch");
  PointMatrix x = src.points();
  step_particles(x, tgt.points(), dir.vec(), 1.0);
  return ParticleCloud(std::move(x));
}

McEstimate sw2sq_mc(const ParticleCloud& a, const ParticleCloud& b, std::int64_t directions,
                    const RngStream& rng) {
  check_pair(a, b, "sw2sq_mc");
  if (directions < 1) throw std::invalid_argument("sw2sq_mc: need at least one direction");
  const PointMatrix& x = a.points();
  const PointMatrix& y = b.points();
  const Index d = a.dim();
  return mc_mean(directions, rng, [&](RngStream& local) {
    thread_local ot1d::Workspace ws;
    thread_local Vector px, py;
    const Direction theta = sample_sphere(d, local);
    px.noalias() = x * theta.vec();
    py.noalias() = y * theta.vec();
    return ot1d::w2sq({px.data(), static_cast<std::size_t>(px.size())},
                      {py.data(), static_cast<std::size_t>(py.size())}, ws);
  });
}

SchemeResult run_scheme(const ParticleCloud& src, const ParticleCloud& tgt, const SchemeConfig& cfg,
                        const RngStream& rng, const ParticleObserver& observer) {
  check_pair(src, tgt, "run_scheme");
  cfg.schedule.validate();
  if (cfg.iterations < 1) throw std::invalid_argument("run_scheme: iterations must be >= 1");
  if (cfg.eval_every < 1) throw std::invalid_argument("run_scheme: eval_every must be >= 1");
  if (cfg.sw_directions < 1) throw std::invalid_argument("run_scheme: sw_directions must be >= 1");

  RngStream traj = rng.substream(kTrajectoryStream);
  const RngStream eval = rng.substream(kEvalStream);
  const Index d = src.dim();
  PointMatrix x = src.points();
  const PointMatrix& y = tgt.points();

  std::vector<RunRecord> records;
  for (std::int64_t k = 0; k < cfg.iterations; ++k) {
    const double gamma = step_size(cfg.schedule, k);
    if (observer) observer(k, x);
    if (k % cfg.eval_every == 0) records.push_back(make_record(k, gamma, x, tgt, cfg.sw_directions, eval));
    if (cfg.mode == SamplingMode::OrthonormalBasis) {
      const OrthoBasis basis = sample_haar_basis(d, traj);
      step_particles(x, y, basis.cols(), gamma);
    } else {
      const Direction theta = sample_sphere(d, traj);
      step_particles(x, y, theta.vec(), gamma);
    }
  }
  const std::int64_t last = cfg.iterations;
  if (observer) observer(last, x);
  records.push_back(make_record(last, step_size(cfg.schedule, last), x, tgt, cfg.sw_directions, eval));
  return SchemeResult{std::move(records), ParticleCloud(std::move(x))};
}

}  // namespace slicematch
