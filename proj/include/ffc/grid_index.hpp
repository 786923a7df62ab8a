// SPDX-License-Identifier: Apache-2.0

#ifndef FFC_GRID_INDEX_HPP
#define FFC_GRID_INDEX_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include "ffc/common.hpp"
#include "ffc/vec3.hpp"

namespace ffc {

//============================================================================
// GridIndex: hash grid over integer points with cell size 1. Distance queries
// are exact: the search expands Chebyshev shells around the query cell and
// only stops once no farther shell can hold a closer point. Any point whose
// cell sits on shell r is at Euclidean distance > r - 1 from the query, so
// the search ends as soon as best <= r - 1.

class GridIndex {
public:
  GridIndex() = default;

  explicit GridIndex(std::span<const Vec3i> points)
  {
    for (std::size_t i = 0; i < points.size(); i++)
      insert(points[i], std::uint32_t(i));
  }

  void insert(const Vec3i& p, std::uint32_t id)
  {
    cells_[p].push_back(id);
    if (size_ == 0) {
      bounds_ = {p, p};
    } else {
      bounds_.min.x = std::min(bounds_.min.x, p.x);
      bounds_.min.y = std::min(bounds_.min.y, p.y);
      bounds_.min.z = std::min(bounds_.min.z, p.z);
      bounds_.max.x = std::max(bounds_.max.x, p.x);
      bounds_.max.y = std::max(bounds_.max.y, p.y);
      bounds_.max.z = std::max(bounds_.max.z, p.z);
    }
    size_++;
  }

  bool empty() const { return size_ == 0; }
  std::size_t size() const { return size_; }
  const Box3i& bounds() const { return bounds_; }

  bool contains(const Vec3i& p) const { return cells_.find(p) != cells_.end(); }

  const std::vector<std::uint32_t>* ids_at(const Vec3i& p) const
  {
    auto it = cells_.find(p);
    return it == cells_.end() ? nullptr : &it->second;
  }

  // Exact minimum Euclidean distance from q to the indexed set.
  double min_distance(const Vec3d& q) const
  {
    if (empty())
      throw InputError("GridIndex: distance query on empty index");

    const Vec3i c0{std::int32_t(std::floor(q.x)), std::int32_t(std::floor(q.y)),
                   std::int32_t(std::floor(q.z))};
    const std::int32_t rmax = max_shell(c0);

    double best_sq = std::numeric_limits<double>::infinity();
    for (std::int32_t r = 0; r <= rmax; r++) {
      if (r >= 1 && best_sq <= double(r - 1) * double(r - 1))
        break;
      visit_shell(c0, r, [&](const Vec3i& cell) {
        if (cells_.find(cell) != cells_.end())
          best_sq = std::min(best_sq, squared_distance(to_vec3d(cell), q));
      });
    }
    return std::sqrt(best_sq);
  }

  // Exact minimum squared distance, in units scaled by `scale`, between the
  // rational point q_scaled/scale and the indexed integer set. All arithmetic
  // is integral, so results are platform-stable for fractional candidates.
  std::int64_t min_sq_distance_scaled(const Vec3i& q_scaled, std::int32_t scale) const
  {
    if (empty())
      throw InputError("GridIndex: distance query on empty index");
    if (scale < 1)
      throw InputError("GridIndex: scale must be >= 1");

    const Vec3i c0 = floor_div(q_scaled, scale);
    const std::int32_t rmax = max_shell(c0);

    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (std::int32_t r = 0; r <= rmax; r++) {
      if (r >= 1) {
        const std::int64_t bound = std::int64_t(r - 1) * scale;
        if (best <= bound * bound)
          break;
      }
      visit_shell(c0, r, [&](const Vec3i& cell) {
        if (cells_.find(cell) != cells_.end())
          best = std::min(best, squared_distance_i64(cell * scale, q_scaled));
      });
    }
    return best;
  }

private:
  std::int32_t max_shell(const Vec3i& c0) const
  {
    const std::int32_t dx = std::max(std::abs(c0.x - bounds_.min.x), std::abs(c0.x - bounds_.max.x));
    const std::int32_t dy = std::max(std::abs(c0.y - bounds_.min.y), std::abs(c0.y - bounds_.max.y));
    const std::int32_t dz = std::max(std::abs(c0.z - bounds_.min.z), std::abs(c0.z - bounds_.max.z));
    return std::max({dx, dy, dz});
  }

  template<typename Fn>
  static void visit_shell(const Vec3i& c, std::int32_t r, Fn&& fn)
  {
    if (r == 0) {
      fn(c);
      return;
    }
    for (std::int32_t dx = -r; dx <= r; dx++) {
      const bool x_face = std::abs(dx) == r;
      for (std::int32_t dy = -r; dy <= r; dy++) {
        const bool y_face = std::abs(dy) == r;
        if (x_face || y_face) {
          for (std::int32_t dz = -r; dz <= r; dz++)
            fn(Vec3i{c.x + dx, c.y + dy, c.z + dz});
        } else {
          fn(Vec3i{c.x + dx, c.y + dy, c.z - r});
          fn(Vec3i{c.x + dx, c.y + dy, c.z + r});
        }
      }
    }
  }

  std::unordered_map<Vec3i, std::vector<std::uint32_t>, Vec3iHash> cells_;
  Box3i bounds_;
  std::size_t size_ = 0;
};

}  // namespace ffc

#endif  // FFC_GRID_INDEX_HPP
