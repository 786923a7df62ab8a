// SPDX-License-Identifier: Apache-2.0

#ifndef FFC_AFFC_HPP
#define FFC_AFFC_HPP

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "ffc/common.hpp"
#include "ffc/sparse_tensor.hpp"
#include "ffc/transforms.hpp"
#include "ffc/vec3.hpp"

namespace ffc {

//============================================================================
// A-FFC assembly: two extra multi-scale branches ride along with the basic
// tensor. Branch coordinates are never transmitted; the decoder re-derives
// them from the basic geometry, so the branch tensors are built on the full
// guided-cube lattice (cells the guide covers but the source tensor does not
// occupy carry zero features).

struct AffcSeeds {
  std::uint64_t c7 = 0;
  std::uint64_t c8 = 0;
  std::uint64_t c9 = 0;
  std::uint64_t c10 = 0;
};

struct AffcPayload {
  SparseTensor basic;    // F_4^f, pooled stride, 4 channels
  SparseTensor branch3;  // stride 4, 2 channels
  SparseTensor branch4;  // stride 8, 2 channels
};

//============================================================================
// backward_map: keep exactly the target points whose floor-divided coordinate
// lies in the guide set (background removal folded in). The guide must live
// on a coarser, divisible stride.

inline SparseTensor backward_map(const std::vector<Vec3i>& guide_coords,
                                 std::int32_t guide_stride, const SparseTensor& target)
{
  if (guide_stride < target.stride() || guide_stride % target.stride() != 0)
    throw InputError("backward_map: guide stride " + std::to_string(guide_stride)
                     + " is not a multiple of target stride " + std::to_string(target.stride()));
  const std::int32_t ratio = guide_stride / target.stride();

  std::unordered_set<Vec3i, Vec3iHash> guide(guide_coords.begin(), guide_coords.end());
  SparseTensor out(target.stride(), target.channels());
  for (std::size_t i = 0; i < target.size(); i++)
    if (guide.count(floor_div(target.coord(i), ratio)))
      out.push_row(target.coord(i), target.row(i));
  return out;
}

namespace detail {

// Lexicographic enumeration of every target-stride cell under the guide set;
// occupied cells take their mapped features, the rest are zero-filled. This
// lattice is what the decoder reconstructs from the basic geometry alone.
inline SparseTensor expand_to_guided_cubes(const std::vector<Vec3i>& guide_coords,
                                           std::int32_t ratio, const SparseTensor& mapped)
{
  std::unordered_map<Vec3i, std::size_t, Vec3iHash> occupied;
  occupied.reserve(mapped.size() * 2);
  for (std::size_t i = 0; i < mapped.size(); i++)
    occupied.emplace(mapped.coord(i), i);

  std::vector<Vec3i> guide = guide_coords;
  std::sort(guide.begin(), guide.end());

  SparseTensor out(mapped.stride(), mapped.channels());
  out.reserve(guide.size() * std::size_t(ratio) * ratio * ratio);
  const std::vector<double> zeros(mapped.channels(), 0.0);
  for (const Vec3i& g : guide) {
    const Vec3i base = g * ratio;
    for (std::int32_t dx = 0; dx < ratio; dx++)
      for (std::int32_t dy = 0; dy < ratio; dy++)
        for (std::int32_t dz = 0; dz < ratio; dz++) {
          const Vec3i cell{base.x + dx, base.y + dy, base.z + dz};
          auto it = occupied.find(cell);
          out.push_row(cell, it == occupied.end() ? zeros.data() : mapped.row(it->second));
        }
  }
  return out;
}

}  // namespace detail

// Decoder-side derivation of a branch coordinate lattice from basic geometry.
inline std::vector<Vec3i> derive_branch_coords(const std::vector<Vec3i>& basic_coords,
                                               std::int32_t basic_stride,
                                               std::int32_t branch_stride)
{
  if (basic_stride < branch_stride || basic_stride % branch_stride != 0)
    throw InputError("derive_branch_coords: stride mismatch");
  const std::int32_t ratio = basic_stride / branch_stride;

  std::vector<Vec3i> guide = basic_coords;
  std::sort(guide.begin(), guide.end());

  std::vector<Vec3i> out;
  out.reserve(guide.size() * std::size_t(ratio) * ratio * ratio);
  for (const Vec3i& g : guide) {
    const Vec3i base = g * ratio;
    for (std::int32_t dx = 0; dx < ratio; dx++)
      for (std::int32_t dy = 0; dy < ratio; dy++)
        for (std::int32_t dz = 0; dz < ratio; dz++)
          out.push_back(Vec3i{base.x + dx, base.y + dy, base.z + dz});
  }
  return out;
}

//============================================================================
// build_affc: project both source tensors down to 2 channels, map them under
// the basic tensor's coordinates, and expand onto the guided-cube lattices.

inline AffcPayload build_affc(const SparseTensor& f3, const SparseTensor& f4,
                              const SparseTensor& f4f, const AffcSeeds& seeds)
{
  if (f3.stride() != 4)
    throw InputError("build_affc: F_3 must be at stride 4");
  if (f4.stride() != 8)
    throw InputError("build_affc: F_4 must be at stride 8");
  if (f4f.stride() % 8 != 0)
    throw InputError("build_affc: basic tensor stride must be a multiple of 8");

  const SparseTensor p3 = channel_project(channel_project(f3, 16, seeds.c7), 2, seeds.c8);
  const SparseTensor p4 = channel_project(channel_project(f4, 16, seeds.c9), 2, seeds.c10);

  const SparseTensor m3 = backward_map(f4f.coords(), f4f.stride(), p3);
  const SparseTensor m4 = backward_map(f4f.coords(), f4f.stride(), p4);

  AffcPayload payload;
  payload.basic = f4f;
  payload.branch3 = detail::expand_to_guided_cubes(f4f.coords(), f4f.stride() / 4, m3);
  payload.branch4 = detail::expand_to_guided_cubes(f4f.coords(), f4f.stride() / 8, m4);

  // Containment invariant: every branch cell floor-maps into the basic set.
  std::unordered_set<Vec3i, Vec3iHash> basic(f4f.coords().begin(), f4f.coords().end());
  auto check = [&](const SparseTensor& branch, const char* name) {
    const std::int32_t ratio = f4f.stride() / branch.stride();
    for (const Vec3i& c : branch.coords())
      if (!basic.count(floor_div(c, ratio)))
        throw CodecError(std::string("build_affc: ") + name
                         + " coordinate escapes the basic set");
  };
  check(payload.branch3, "branch3");
  check(payload.branch4, "branch4");
  return payload;
}

}  // namespace ffc

#endif  // FFC_AFFC_HPP
