#pragma once

// Plain serial versions of the parallel kernels. They draw exactly the same
// directions (same block substreams, same order) and exist so tests and the
// benchmark can compare the fast paths against straightforward loops.

#include "slicematch/measures.hpp"
#include "slicematch/montecarlo.hpp"
#include "slicematch/randgeom.hpp"

#include <vector>

namespace slicematch::reference {

Vector project(const ParticleCloud& cloud, const Direction& dir);

// Sort both projections, average squared gaps.
double w2sq_1d(std::vector<double> a, std::vector<double> b);

McEstimate sw2sq_mc(const ParticleCloud& a, const ParticleCloud& b, std::int64_t directions,
                    const RngStream& rng);

McEstimate sw2sq_gaussian_mc(const Matrix& sigma, const Matrix& lambda, std::int64_t directions,
                             const RngStream& rng);

// Value only; no standard error.
Matrix gradient_matrix_mc(const Matrix& sigma, const Matrix& lambda, std::int64_t directions,
                          const RngStream& rng);

double quartic_moment_mc(const Matrix& gamma, std::int64_t directions, const RngStream& rng);

// x' = Σ_ℓ t_ℓ(θ_ℓᵀx) θ_ℓ, summed direction by direction.
ParticleCloud slice_map_basis(const ParticleCloud& src, const ParticleCloud& tgt, const OrthoBasis& basis);

}  // namespace slicematch::reference
