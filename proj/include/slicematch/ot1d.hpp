#pragma once

// One-dimensional optimal transport between projected empirical measures.

#include <span>
#include <vector>

namespace slicematch {

/// Values of a measure pushed onto a line; `is_sorted` marks non-decreasing order.
class ProjectedSample {
 public:
  explicit ProjectedSample(std::vector<double> values);
  /// Throws unless `values` is non-decreasing.
  static ProjectedSample sorted(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  bool is_sorted() const { return sorted_; }
  std::span<const double> values() const { return values_; }

 private:
  ProjectedSample(std::vector<double> values, bool sorted)
      : values_(std::move(values)), sorted_(sorted) {}

  std::vector<double> values_;
  bool sorted_;
};

/// δ[i] = t(src[i]) - src[i] for the monotone rearrangement t pairing the
/// rank-r order statistic of src with that of tgt. Ranks come from a stable
/// sort of src, so ties keep their original index order.
std::vector<double> sorted_match_displacement(const ProjectedSample& src, const ProjectedSample& tgt);

/// F̂_tgt⁻¹(F̂_src(q)) for every query: right-continuous CDF of src, left-continuous
/// quantile of tgt (index ⌈u·m⌉ clamped to [1, m]). Sizes may differ.
std::vector<double> quantile_map(const ProjectedSample& src, const ProjectedSample& tgt,
                                 std::span<const double> queries);

/// (1/n) Σ_r (src_(r) - tgt_(r))² for equal sizes.
double w2sq_1d(const ProjectedSample& src, const ProjectedSample& tgt);

namespace ot1d {

// Allocation-reusing kernels behind the functions above.
struct Workspace {
  std::vector<std::size_t> order;
  std::vector<double> sorted_tgt;
  std::vector<double> sorted_src;
};

void sorted_match_displacement(std::span<const double> src, std::span<const double> tgt,
                               std::span<double> out, Workspace& ws);

// As above with tgt already sorted ascending.
void sorted_match_displacement_presorted(std::span<const double> src,
                                         std::span<const double> sorted_tgt,
                                         std::span<double> out, Workspace& ws);

double w2sq(std::span<const double> src, std::span<const double> tgt, Workspace& ws);

}  // namespace ot1d

}  // namespace slicematch
