#include "slicematch/ot1d.hpp"

#include "slicematch/measures.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace slicematch {

ProjectedSample::ProjectedSample(std::vector<double> values)
    : values_(std::move(values)), sorted_(std::is_sorted(values_.begin(), values_.end())) {}

ProjectedSample ProjectedSample::sorted(std::vector<double> values) {
  if (!std::is_sorted(values.begin(), values.end())) {
    throw std::invalid_argument("ProjectedSample::sorted: values are not non-decreasing");
  }
  return ProjectedSample(std::move(values), true);
}

namespace ot1d {

namespace {

void stable_order(std::span<const double> v, std::vector<std::size_t>& order) {
  order.resize(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&v](std::size_t a, std::size_t b) { return v[a] < v[b]; });
}

}  // namespace

void sorted_match_displacement_presorted(std::span<const double> src,
                                         std::span<const double> sorted_tgt,
                                         std::span<double> out, Workspace& ws) {
  if (src.size() != sorted_tgt.size() || out.size() != src.size()) {
    throw DimensionError("sorted_match_displacement: sample sizes differ");
  }
  stable_order(src, ws.order);
  for (std::size_t r = 0; r < src.size(); ++r) {
    const std::size_t i = ws.order[r];
    out[i] = sorted_tgt[r] - src[i];
  }
}

void sorted_match_displacement(std::span<const double> src, std::span<const double> tgt,
                               std::span<double> out, Workspace& ws) {
  if (src.size() != tgt.size()) throw DimensionError("sorted_match_displacement: sample sizes differ");
  ws.sorted_tgt.assign(tgt.begin(), tgt.end());
  std::sort(ws.sorted_tgt.begin(), ws.sorted_tgt.end());
  sorted_match_displacement_presorted(src, ws.sorted_tgt, out, ws);
}

double w2sq(std::span<const double> src, std::span<const double> tgt, Workspace& ws) {
  if (src.size() != tgt.size()) throw DimensionError("w2sq_1d: sample sizes differ");
  if (src.empty()) throw std::invalid_argument("w2sq_1d: empty samples");
  std::vector<double>& a = ws.sorted_src;
  std::vector<double>& b = ws.sorted_tgt;
  a.assign(src.begin(), src.end());
  b.assign(tgt.begin(), tgt.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double acc = 0.0;
  for (std::size_t r = 0; r < a.size(); ++r) {
    const double diff = a[r] - b[r];
    acc += diff * diff;
  }
  return acc / static_cast<double>(a.size());
}

}  // namespace ot1d

std::vector<double> sorted_match_displacement(const ProjectedSample& src, const ProjectedSample& tgt) {
  std::vector<double> out(src.size());
  ot1d::Workspace ws;
  if (tgt.is_sorted()) {
    ot1d::sorted_match_displacement_presorted(src.values(), tgt.values(), out, ws);
  } else {
    ot1d::sorted_match_displacement(src.values(), tgt.values(), out, ws);
  }
  return out;
}

std::vector<double> quantile_map(const ProjectedSample& src, const ProjectedSample& tgt,
                                 std::span<const double> queries) {
  if (src.size() == 0 || tgt.size() == 0) throw std::invalid_argument("quantile_map: empty samples");
  std::vector<double> s(src.values().begin(), src.values().end());
  std::vector<double> t(tgt.values().begin(), tgt.values().end());
  if (!src.is_sorted()) std::sort(s.begin(), s.end());
  if (!tgt.is_sorted()) std::sort(t.begin(), t.end());
  const std::size_t n = s.size();
  const std::size_t m = t.size();
  std::vector<double> out;
  out.reserve(queries.size());
  for (double q : queries) {
    // F̂_src(q) = c/n with c = #{src ≤ q}; ⌈(c/n)·m⌉ in integer arithmetic.
    const auto c = static_cast<std::size_t>(std::upper_bound(s.begin(), s.end(), q) - s.begin());
    std::size_t idx = (c * m + n - 1) / n;
    idx = std::clamp<std::size_t>(idx, 1, m);
    out.push_back(t[idx - 1]);
  }
  return out;
}

double w2sq_1d(const ProjectedSample& src, const ProjectedSample& tgt) {
  ot1d::Workspace ws;
  return ot1d::w2sq(src.values(), tgt.values(), ws);
}

}  // namespace slicematch
