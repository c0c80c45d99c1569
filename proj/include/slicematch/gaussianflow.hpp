#pragma once

// Closed-form slice-matching flow on covariance matrices.
//
// Between centered Gaussians every 1D map is linear, t_θ(s) = τ_θ s with
// τ_θ = √(θᵀΛθ / θᵀΣθ), so one step of the scheme maps Σ to AΣAᵀ with
// A = (1-γ)I + γ P diag(τ) Pᵀ (or A = I + γ(τ_θ - 1)θθᵀ for one direction).

#include "slicematch/measures.hpp"
#include "slicematch/montecarlo.hpp"
#include "slicematch/randgeom.hpp"
#include "slicematch/scheme.hpp"

#include <functional>
#include <vector>

namespace slicematch {

// √(θᵀΛθ / θᵀΣθ); throws DegenerateError when θᵀΣθ ≤ 1e-300.
double tau(const Direction& dir, const Matrix& sigma, const Matrix& lambda);

// τ for every column of the basis.
Vector basis_taus(const OrthoBasis& basis, const Matrix& sigma, const Matrix& lambda);

Matrix update_covariance_basis(const Matrix& sigma, const Matrix& lambda, const OrthoBasis& basis,
                               double gamma);
Matrix update_covariance_single(const Matrix& sigma, const Matrix& lambda, const Direction& dir,
                                double gamma);

struct FlowConfig {
  StepSchedule schedule;
  std::int64_t iterations = 1;
  SamplingMode mode = SamplingMode::OrthonormalBasis;
  std::int64_t eval_every = 10;
  std::int64_t sw_directions = 500;
};

/// One transition Σ_k → Σ_{k+1}. `directions` holds the d basis columns (or
/// the single direction) and `taus` their τ values.
struct FlowStep {
  std::int64_t k;
  double gamma;
  const Matrix& sigma_before;
  const Matrix& sigma_after;
  const Matrix& directions;
  const Vector& taus;
};

using FlowObserver = std::function<void(const FlowStep&)>;

/// Iterates the covariance recursion. Records follow run_scheme's cadence and
/// carry λ_min, λ_max, Tr(Σ_k) and a Monte-Carlo SW₂² to N(0, Λ). Throws
/// DegenerateError if λ_min(Σ_k) drops below 1e-12.
std::vector<RunRecord> run_gaussian_flow(const GaussianState& sigma0, const GaussianState& lambda,
                                         const FlowConfig& cfg, const RngStream& rng,
                                         const FlowObserver& observer = {});

/// E_θ[(√θᵀΣθ - √θᵀΛθ)²] over L uniform directions, with its standard error.
McEstimate sw2sq_gaussian_mc(const Matrix& sigma, const Matrix& lambda, std::int64_t directions,
                             const RngStream& rng);

/// Bures–Wasserstein W₂² between N(0, Σ) and N(0, Λ).
double w2sq_gaussian(const Matrix& sigma, const Matrix& lambda);

/// Eigenvalues in ascending order. Throws on input that is not symmetric
/// within 1e-10 (relative to its largest entry).
Vector symmetric_eigs(const Matrix& m);

// Principal square root of a symmetric PSD matrix (negative round-off clamped).
Matrix psd_sqrt(const Matrix& m);

}  // namespace slicematch
