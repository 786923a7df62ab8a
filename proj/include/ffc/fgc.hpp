// SPDX-License-Identifier: Apache-2.0

#ifndef FFC_FGC_HPP
#define FFC_FGC_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <unordered_set>
#include <vector>

#include "ffc/common.hpp"
#include "ffc/grid_index.hpp"
#include "ffc/sparse_tensor.hpp"
#include "ffc/vec3.hpp"

namespace ffc {

//============================================================================
// Fine-grained compression: keep only the steep tail of the per-channel
// sorted activation curve (the object region), union the selections of two
// channels, then re-admit near misses within a distance threshold.

struct FgcParams {
  double k_th = 0.02;  // slope threshold, feature units per sorted index
  double d_p = 0.0;    // post-processing distance threshold, grid units
  std::size_t channel_a = 0;
  std::size_t channel_b = 1;
};

struct SelectionResult {
  std::vector<Vec3i> selected;        // final coordinate set
  std::size_t suffix_start_a = 0;     // first selected sorted position, channel a
  std::size_t suffix_start_b = 0;
  std::size_t count_a = 0;            // per-channel selection sizes
  std::size_t count_b = 0;
  std::size_t count_union = 0;
  std::size_t count_final = 0;
};

//============================================================================
// slope_select: sort values ascending (ties by original index), define the
// slope at sorted position i >= 1 as v[i] - v[i-1], and walk from the right
// keeping positions while the slope stays >= k_th. The result is the original
// indices of that contiguous suffix; the point below the first qualifying
// jump is treated as background and left out.

struct SlopeSelection {
  std::vector<std::size_t> indices;  // original indices of the selected suffix
  std::size_t suffix_start = 0;      // first selected sorted position (== n when empty)
};

inline SlopeSelection slope_select(const std::vector<double>& values, double k_th)
{
  const std::size_t n = values.size();
  SlopeSelection sel;
  sel.suffix_start = n;
  if (n == 0)
    return sel;

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; i++)
    order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::size_t start = n;
  for (std::size_t i = n; i-- > 1;) {
    if (values[order[i]] - values[order[i - 1]] < k_th)
      break;
    start = i;
  }
  sel.suffix_start = start;
  sel.indices.assign(order.begin() + std::ptrdiff_t(start), order.end());
  return sel;
}

// channel_compensate: exact union of the two per-channel coordinate sets.
inline std::vector<Vec3i> channel_compensate(const std::vector<Vec3i>& s1,
                                             const std::vector<Vec3i>& s2)
{
  std::vector<Vec3i> out = s1;
  std::unordered_set<Vec3i, Vec3iHash> seen(s1.begin(), s1.end());
  for (const Vec3i& c : s2)
    if (seen.insert(c).second)
      out.push_back(c);
  return out;
}

//============================================================================
// post_process: keep every point of the full set whose distance to the
// selection is at most d_p. With d_p = 0 this is exactly the selection; with
// an empty selection it returns the empty set.

inline std::vector<Vec3i> post_process(const std::vector<Vec3i>& full,
                                       const std::vector<Vec3i>& selected, double d_p)
{
  if (d_p < 0)
    throw InputError("post_process: d_p must be >= 0");
  if (selected.empty())
    return {};

  GridIndex index{std::span<const Vec3i>(selected)};
  std::vector<Vec3i> out;
  const double limit = d_p * d_p;
  for (const Vec3i& p : full)
    if (double(index.min_sq_distance_scaled(p, 1)) <= limit)
      out.push_back(p);
  return out;
}

//============================================================================
// fgc: the full stage. Selection runs on two feature channels, the survivors
// keep their complete feature rows, and coordinates stay at the input stride.
// An empty selection is a legal outcome, not an error.

inline std::pair<SparseTensor, SelectionResult> fgc(const SparseTensor& t, const FgcParams& params)
{
  if (t.channels() < 2)
    throw InputError("fgc: tensor needs at least 2 channels for channel compensation");
  if (params.channel_a >= t.channels() || params.channel_b >= t.channels())
    throw InputError("fgc: selection channel out of range");
  if (params.k_th < 0)
    throw InputError("fgc: k_th must be >= 0");

  std::vector<double> va(t.size()), vb(t.size());
  for (std::size_t i = 0; i < t.size(); i++) {
    va[i] = t.feat(i, params.channel_a);
    vb[i] = t.feat(i, params.channel_b);
  }

  const SlopeSelection sa = slope_select(va, params.k_th);
  const SlopeSelection sb = slope_select(vb, params.k_th);

  auto coords_of = [&](const std::vector<std::size_t>& idx) {
    std::vector<Vec3i> cs;
    cs.reserve(idx.size());
    for (std::size_t i : idx)
      cs.push_back(t.coord(i));
    return cs;
  };

  const std::vector<Vec3i> united = channel_compensate(coords_of(sa.indices), coords_of(sb.indices));
  const std::vector<Vec3i> final_set = post_process(t.coords(), united, params.d_p);

  std::unordered_set<Vec3i, Vec3iHash> keep(final_set.begin(), final_set.end());
  SparseTensor out(t.stride(), t.channels());
  out.reserve(keep.size());
  for (std::size_t i = 0; i < t.size(); i++)
    if (keep.count(t.coord(i)))
      out.push_row(t.coord(i), t.row(i));

  SelectionResult res;
  res.selected = final_set;
  res.suffix_start_a = sa.suffix_start;
  res.suffix_start_b = sb.suffix_start;
  res.count_a = sa.indices.size();
  res.count_b = sb.indices.size();
  res.count_union = united.size();
  res.count_final = final_set.size();
  return {std::move(out), std::move(res)};
}

}  // namespace ffc

#endif  // FFC_FGC_HPP
