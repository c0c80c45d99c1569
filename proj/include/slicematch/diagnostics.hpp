#pragma once

// Executable checks for the identities and inequalities behind the
// slice-matching analysis. Statistical checks carry a Monte-Carlo slack
// (a multiple of the combined standard error) plus a round-off floor of
// 1e-12 relative to the compared magnitudes.

#include "slicematch/gaussianflow.hpp"
#include "slicematch/montecarlo.hpp"
#include "slicematch/scheme.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace slicematch {

struct CheckReport {
  std::string name;
  bool passed = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  std::string detail;
};

// "name\tpassed\tlhs\trhs\tslack", passed written as 1 or 0.
std::string format_report(const CheckReport& r);

inline constexpr std::uint64_t kGradientStream = 3;

// m / (M d (d+2))
double sw_w2_constant(Index d, double m, double M);

/// SW₂²(Σ, Λ) ≥ m/(M d(d+2)) W₂²(Σ, Λ) for diagonal covariances with entries in
/// [m, M]. Passes iff SW₂²_MC + 4·SEM ≥ rhs.
CheckReport check_sw_w2_bound(const Vector& sigma_diag, const Vector& lambda_diag, double m, double M,
                              std::int64_t directions, const RngStream& rng);

/// Â = (d/L) Σ_j (1 - τ_{θ_j}) θ_jθ_jᵀ, the matrix of the Wasserstein gradient
/// x ↦ Ax of F = (d/2) SW₂²(·, N(0, Λ)) at N(0, Σ). Symmetric by construction.
MatrixMcEstimate gradient_matrix_mc(const Matrix& sigma, const Matrix& lambda, std::int64_t directions,
                                    const RngStream& rng);

/// ‖∇F‖²_σ = Tr(ÂΣÂᵀ) with a delta-method standard error.
McEstimate gradient_norm_sq_mc(const Matrix& sigma, const Matrix& lambda, std::int64_t directions,
                               const RngStream& rng);

/// F ≤ (C_d/2)(1 + M/m) ‖∇F‖²_σ with C_d = d(d+2)M/m, for commuting Σ, Λ with
/// spectra in [m, M].
CheckReport check_pl_inequality(const Matrix& sigma, const Matrix& lambda, double m, double M,
                                std::int64_t directions, const RngStream& rng);

/// 2F = ‖∇F‖²_σ + E_P‖T̄ - T_P‖²_σ, each side estimated independently.
/// Passes iff the residual is within 5·combined SEM.
CheckReport check_decomposition(const Matrix& sigma, const Matrix& lambda, std::int64_t bases,
                                std::int64_t directions, const RngStream& rng);

// (2 Tr(Γ²) + Tr(Γ)²) / (d(d+2))
double quartic_moment_closed_form(const Matrix& gamma);

/// E[(θᵀΓθ)²] by Monte Carlo against the closed form, within 4·SEM.
CheckReport sphere_quartic_moment_check(const Matrix& gamma, std::int64_t directions, const RngStream& rng);

/// Gaussian flow whose records cover every k = 0..K and carry ‖∇F(σ_k)‖²_σ.
std::vector<RunRecord> trace_gradient_flow(const GaussianState& sigma0, const GaussianState& lambda,
                                           const FlowConfig& cfg, const RngStream& rng,
                                           std::int64_t gradient_directions);

/// Σ_k ω_k E‖∇F(σ_k)‖² ≤ (F(σ₀) + 4 M₂(μ) Σγ_k²) / Σγ_k with ω_k = γ_k / Σγ_j,
/// sums over k = 0..K. The left side is the mean over runs; slack is 4·SEM
/// across runs. Throws if a run misses a k or a gradient entry.
CheckReport check_weighted_gradient_bound(std::span<const std::vector<RunRecord>> runs,
                                          const StepSchedule& schedule, double m2_target, double f0);

/// max_{k≥1} m2(σ_k) ≤ M₂(μ) + slack.
CheckReport check_moment_bound(std::span<const RunRecord> records, double m2_target, double slack = 1e-9);

/// min_j(1-γ+γτ_j)√λ_min(Σ_k) ≤ √λ_min(Σ_{k+1}) and
/// √λ_max(Σ_{k+1}) ≤ max_j(1-γ+γτ_j)√λ_max(Σ_k). Basis steps only.
CheckReport check_eigen_recursion(const FlowStep& step, double slack = 1e-8);

struct TrajectoryPoint {
  std::int64_t k;
  double gamma;
  Matrix sigma;
};

// Σ_0..Σ_K of a Gaussian flow, each with γ_k.
std::vector<TrajectoryPoint> collect_trajectory(const GaussianState& sigma0, const GaussianState& lambda,
                                                const FlowConfig& cfg, const RngStream& rng);

struct AccumulatorSeries {
  std::vector<std::int64_t> k;
  std::vector<double> term;  // γ_k E_θ[(θᵀΣ_kθ / θᵀΛθ)^p - 1]
  std::vector<double> sem;
  std::vector<double> partial_sum;
};

/// Partial sums of the sufficient condition for bounded E[λ_min(Σ_k)^{-p}].
/// Informational: no verdict.
AccumulatorSeries sufficient_condition_accumulator(std::span<const TrajectoryPoint> trajectory,
                                                   const Matrix& lambda, double p,
                                                   std::int64_t directions, const RngStream& rng);

/// Least-squares slope of log(mean over runs of sw2sq) against log k on
/// [k_lo, k_hi]. Runs must share the same k grid.
double loglog_slope(std::span<const std::vector<RunRecord>> runs, std::int64_t k_lo, std::int64_t k_hi);

// Population variance of λ_min over records with k in [k_lo, k_hi].
double lambda_min_window_variance(std::span<const RunRecord> records, std::int64_t k_lo, std::int64_t k_hi);

struct CampaignResult {
  CheckReport summary;  // lhs = failures, rhs = 0
  std::vector<CheckReport> reports;
};

/// Random diagonal pairs with entries uniform in [lo, hi], d cycling over dims.
CampaignResult run_sw_w2_campaign(int instances, std::span<const Index> dims, double lo, double hi,
                                  std::int64_t directions, const RngStream& rng);

/// Random co-diagonal pairs QSQᵀ, QLQᵀ with spectra uniform in [lo, hi].
CampaignResult run_pl_campaign(int instances, std::span<const Index> dims, double lo, double hi,
                               std::int64_t directions, const RngStream& rng);

/// Random (non-commuting) SPD pairs with spectra log-uniform in [1/4, 4].
CampaignResult run_decomposition_campaign(int instances, std::span<const Index> dims, std::int64_t bases,
                                          std::int64_t directions, const RngStream& rng);

/// Random symmetric Γ with standard normal entries.
CampaignResult run_quartic_campaign(int instances, std::span<const Index> dims, std::int64_t directions,
                                    const RngStream& rng);

struct SuiteSizes {
  std::uint64_t seed = 0;
  int sw_w2_instances = 1000;
  std::int64_t sw_w2_directions = 2000;
  int pl_instances = 100;
  std::int64_t pl_directions = 20000;
  int decomposition_instances = 4;
  std::int64_t decomposition_samples = 20000;
  int quartic_instances = 10;
  std::int64_t quartic_directions = 100000;
  int flow_runs = 10;
  std::int64_t flow_iterations = 2000;
  std::int64_t gradient_directions = 500;
};

/// Every inequality and identity check at the given sizes, one report each.
std::vector<CheckReport> run_diagnostics_suite(const SuiteSizes& sizes);

}  // namespace slicematch
