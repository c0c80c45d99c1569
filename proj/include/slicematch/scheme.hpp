#pragma once

// Slice-matching maps on particle clouds and the stochastic iterative scheme
//   x ← (1 - γ_k) x + γ_k T(x)
// with T the slice-matching map along a fresh Haar basis (or a fresh uniform
// direction) at every step.

#include "slicematch/measures.hpp"
#include "slicematch/montecarlo.hpp"
#include "slicematch/randgeom.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace slicematch {

/// γ_k = (k + offset)^(-alpha).
struct StepSchedule {
  double alpha = 0.0;
  double offset = 1.0;

  // Throws unless alpha ∈ [0, 1) and offset ≥ 1.
  void validate() const;
};

double step_size(const StepSchedule& s, std::int64_t k);

enum class SamplingMode { OrthonormalBasis, SingleDirection };

// "basis" / "single", as written to CSV logs.
std::string_view to_string(SamplingMode mode);
SamplingMode parse_sampling_mode(std::string_view text);

struct RunRecord {
  std::int64_t k = 0;
  double gamma = 0.0;  // γ_k, the step taken from this state
  double sw2sq = 0.0;  // Monte-Carlo SW₂² to the target
  std::optional<double> lambda_min;
  std::optional<double> lambda_max;
  double m2 = 0.0;
  std::optional<double> grad_norm2;  // ‖∇F(σ_k)‖²_σ when logged
};

// Substream ids taken from the run stream. Particle and Gaussian runs share
// them, so equal run streams drive both with the same direction sequence.
inline constexpr std::uint64_t kTrajectoryStream = 1;
inline constexpr std::uint64_t kEvalStream = 2;

/// x_i' = Σ_ℓ t_ℓ(θ_ℓᵀx_i) θ_ℓ, with t_ℓ the sorted-match map between the
/// projections of src and tgt on column ℓ of the basis.
ParticleCloud slice_map_basis(const ParticleCloud& src, const ParticleCloud& tgt,
                              const OrthoBasis& basis);

/// x_i' = x_i + (t_θ(θᵀx_i) - θᵀx_i) θ.
ParticleCloud slice_map_single(const ParticleCloud& src, const ParticleCloud& tgt,
                               const Direction& dir);

/// Unbiased estimate of SW₂²(a, b) from L uniform directions. Reads `rng`
/// without advancing it; pass distinct streams for independent estimates.
McEstimate sw2sq_mc(const ParticleCloud& a, const ParticleCloud& b, std::int64_t directions,
                    const RngStream& rng);

struct SchemeConfig {
  StepSchedule schedule;
  std::int64_t iterations = 1;
  SamplingMode mode = SamplingMode::OrthonormalBasis;
  std::int64_t eval_every = 10;
  std::int64_t sw_directions = 500;
};

struct SchemeResult {
  std::vector<RunRecord> records;
  ParticleCloud final_cloud;
};

// Sees the iterate σ_k for k = 0..K.
using ParticleObserver = std::function<void(std::int64_t k, const PointMatrix& points)>;

/// Runs K steps from src towards tgt. Records are taken at k = 0, every
/// eval_every steps, and at k = K. Directions come from
/// rng.substream(kTrajectoryStream); loss evaluation from kEvalStream.
SchemeResult run_scheme(const ParticleCloud& src, const ParticleCloud& tgt, const SchemeConfig& cfg,
                        const RngStream& rng, const ParticleObserver& observer = {});

}  // namespace slicematch
