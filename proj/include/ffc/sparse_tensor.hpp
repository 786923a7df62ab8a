// SPDX-License-Identifier: Apache-2.0

#ifndef FFC_SPARSE_TENSOR_HPP
#define FFC_SPARSE_TENSOR_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "ffc/common.hpp"
#include "ffc/vec3.hpp"

namespace ffc {

//============================================================================
// SparseTensor: occupied integer coordinates at a given stride, each carrying
// a C-channel feature vector. Coordinates are cell indices in the stride's
// own grid (a cell at coordinate c covers base cells [c*stride, (c+1)*stride)
// per axis). This is the currency passed between all pipeline stages.

class SparseTensor {
public:
  SparseTensor() = default;

  SparseTensor(std::int32_t stride, std::size_t channels)
    : stride_(stride), channels_(channels)
  {
    if (stride < 1)
      throw InputError("SparseTensor: stride must be >= 1");
    if (channels < 1)
      throw InputError("SparseTensor: channel count must be >= 1");
  }

  std::int32_t stride() const { return stride_; }
  std::size_t channels() const { return channels_; }
  std::size_t size() const { return coords_.size(); }
  bool empty() const { return coords_.empty(); }

  const std::vector<Vec3i>& coords() const { return coords_; }
  const std::vector<double>& feats() const { return feats_; }
  std::vector<double>& feats() { return feats_; }

  const Vec3i& coord(std::size_t i) const { return coords_[i]; }
  double feat(std::size_t i, std::size_t c) const { return feats_[i * channels_ + c]; }
  double& feat(std::size_t i, std::size_t c) { return feats_[i * channels_ + c]; }

  const double* row(std::size_t i) const { return feats_.data() + i * channels_; }

  void reserve(std::size_t n)
  {
    coords_.reserve(n);
    feats_.reserve(n * channels_);
  }

  void push_row(const Vec3i& c, const double* f)
  {
    coords_.push_back(c);
    feats_.insert(feats_.end(), f, f + channels_);
  }

  void push_row(const Vec3i& c, const std::vector<double>& f)
  {
    if (f.size() != channels_)
      throw InputError("SparseTensor: feature row has wrong channel count");
    push_row(c, f.data());
  }

  // Throws if coordinates are not pairwise distinct.
  void validate_unique() const
  {
    std::unordered_set<Vec3i, Vec3iHash> seen;
    seen.reserve(coords_.size() * 2);
    for (const auto& c : coords_)
      if (!seen.insert(c).second)
        throw InputError("SparseTensor: duplicate coordinate ("
                         + std::to_string(c.x) + "," + std::to_string(c.y) + ","
                         + std::to_string(c.z) + ")");
  }

private:
  std::int32_t stride_ = 1;
  std::size_t channels_ = 1;
  std::vector<Vec3i> coords_;
  std::vector<double> feats_;  // row-major N x C
};

//============================================================================
// rescale_coords: move a tensor to a finer grid. Coordinates are multiplied
// by the ratio (each cell keeps its low corner) and the stride divides by it.

inline SparseTensor rescale_coords(const SparseTensor& t, std::int32_t ratio)
{
  if (ratio < 1)
    throw InputError("rescale_coords: ratio must be >= 1");
  if (t.stride() % ratio != 0)
    throw InputError("rescale_coords: ratio " + std::to_string(ratio)
                     + " does not divide stride " + std::to_string(t.stride()));

  SparseTensor out(t.stride() / ratio, t.channels());
  out.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); i++)
    out.push_row(t.coord(i) * ratio, t.row(i));
  return out;
}

}  // namespace ffc

#endif  // FFC_SPARSE_TENSOR_HPP
