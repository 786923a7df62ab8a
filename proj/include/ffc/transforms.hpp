// SPDX-License-Identifier: Apache-2.0

#ifndef FFC_TRANSFORMS_HPP
#define FFC_TRANSFORMS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ffc/common.hpp"
#include "ffc/sparse_tensor.hpp"
#include "ffc/vec3.hpp"
#include "ffc/voxel_scene.hpp"

namespace ffc {

//============================================================================
// Deterministic stand-ins for the learned layers of the detection backbone.
// The codec's contracts depend only on coordinate and channel shapes, so all
// transforms here are seeded, reproducible reference implementations.

enum class TransformKind : std::uint8_t {
  kMaxpool,
  kChannelProject,
  kSpatialUpsample,
  kCascadeStage,
};

inline const char* to_string(TransformKind k)
{
  switch (k) {
  case TransformKind::kMaxpool: return "maxpool";
  case TransformKind::kChannelProject: return "channel_project";
  case TransformKind::kSpatialUpsample: return "spatial_upsample";
  case TransformKind::kCascadeStage: return "cascade_stage";
  }
  return "?";
}

inline TransformKind transform_kind_from_string(const std::string& s)
{
  if (s == "maxpool")
    return TransformKind::kMaxpool;
  if (s == "channel_project")
    return TransformKind::kChannelProject;
  if (s == "spatial_upsample")
    return TransformKind::kSpatialUpsample;
  if (s == "cascade_stage")
    return TransformKind::kCascadeStage;
  throw ConfigError("unknown transform kind: " + s);
}

struct TransformSpec {
  TransformKind kind = TransformKind::kChannelProject;
  std::size_t in_channels = 1;   // ignored by maxpool
  std::size_t out_channels = 1;  // ignored by maxpool
  int kernel = 1;                // ignored by channel_project
  int stride = 1;
  int padding = 0;
  int dilation = 1;
  std::uint64_t seed = 0;
};

//============================================================================
// sparse_maxpool: cells merge by floor(c/k); every output channel takes the
// max over the points that landed in the cell.

namespace detail {

// Canonical row order (lexicographic by coordinate). Aggregations iterate in
// this order so results are permutation-invariant in floating point too.
inline std::vector<std::size_t> sorted_row_order(const std::vector<Vec3i>& coords)
{
  std::vector<std::size_t> order(coords.size());
  for (std::size_t i = 0; i < order.size(); i++)
    order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return coords[a] < coords[b]; });
  return order;
}

}  // namespace detail

inline SparseTensor sparse_maxpool(const SparseTensor& t, int k)
{
  if (k < 1)
    throw InputError("sparse_maxpool: kernel must be >= 1");

  SparseTensor out(t.stride() * k, t.channels());
  const auto order = detail::sorted_row_order(t.coords());

  std::size_t i = 0;
  while (i < order.size()) {
    const Vec3i cell = floor_div(t.coord(order[i]), k);
    std::vector<double> acc(t.row(order[i]), t.row(order[i]) + t.channels());
    std::size_t j = i + 1;
    while (j < order.size() && floor_div(t.coord(order[j]), k) == cell) {
      const double* row = t.row(order[j]);
      for (std::size_t c = 0; c < t.channels(); c++)
        acc[c] = std::max(acc[c], row[c]);
      j++;
    }
    out.push_row(cell, acc);
    i = j;
  }
  return out;
}

// Mean-aggregating sibling used by the cascade stages.
inline SparseTensor sparse_avgpool(const SparseTensor& t, int k)
{
  if (k < 1)
    throw InputError("sparse_avgpool: kernel must be >= 1");

  SparseTensor out(t.stride() * k, t.channels());
  const auto order = detail::sorted_row_order(t.coords());

  std::size_t i = 0;
  while (i < order.size()) {
    const Vec3i cell = floor_div(t.coord(order[i]), k);
    std::vector<double> acc(t.row(order[i]), t.row(order[i]) + t.channels());
    std::size_t j = i + 1;
    while (j < order.size() && floor_div(t.coord(order[j]), k) == cell) {
      const double* row = t.row(order[j]);
      for (std::size_t c = 0; c < t.channels(); c++)
        acc[c] += row[c];
      j++;
    }
    const double inv = 1.0 / double(j - i);
    for (double& v : acc)
      v *= inv;
    out.push_row(cell, acc);
    i = j;
  }
  return out;
}

//============================================================================
// channel_project: per-point linear map W f + b. W and b are drawn from the
// seed, uniform in [-1, 1] scaled by 1/sqrt(C_in); W is generated row-major,
// then b. Seed 0 is reserved for the exact identity (W = I truncated or
// padded when shapes differ, b = 0).

constexpr std::uint64_t kIdentitySeed = 0;

struct ProjectionWeights {
  std::vector<double> w;  // out x in, row-major
  std::vector<double> b;  // out
};

inline ProjectionWeights projection_weights(std::size_t in_channels, std::size_t out_channels,
                                            std::uint64_t seed)
{
  ProjectionWeights pw;
  pw.w.assign(in_channels * out_channels, 0.0);
  pw.b.assign(out_channels, 0.0);
  if (seed == kIdentitySeed) {
    for (std::size_t i = 0; i < std::min(in_channels, out_channels); i++)
      pw.w[i * in_channels + i] = 1.0;
    return pw;
  }
  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(double(in_channels));
  for (auto& v : pw.w)
    v = rng.next_range(-1.0, 1.0) * scale;
  for (auto& v : pw.b)
    v = rng.next_range(-1.0, 1.0) * scale;
  return pw;
}

inline SparseTensor channel_project(const SparseTensor& t, std::size_t out_channels,
                                    std::uint64_t seed)
{
  if (out_channels < 1)
    throw InputError("channel_project: out_channels must be >= 1");

  const auto pw = projection_weights(t.channels(), out_channels, seed);
  SparseTensor out(t.stride(), out_channels);
  out.reserve(t.size());

  std::vector<double> row(out_channels);
  for (std::size_t i = 0; i < t.size(); i++) {
    const double* f = t.row(i);
    for (std::size_t o = 0; o < out_channels; o++) {
      double acc = pw.b[o];
      const double* wrow = pw.w.data() + o * t.channels();
      for (std::size_t c = 0; c < t.channels(); c++)
        acc += wrow[c] * f[c];
      row[o] = acc;
    }
    out.push_row(t.coord(i), row);
  }
  return out;
}

//============================================================================
// spatial_upsample_ref: halve the stride, expanding every point into its
// eight child cells with the features split evenly (mass preserving). The
// learned layer this replaces is a transposed conv (kernel 3, stride 1,
// padding 2, dilation 2); that config is kept in TransformSpec for the run
// records, not reproduced here.

inline SparseTensor spatial_upsample_ref(const SparseTensor& t)
{
  if (t.stride() % 2 != 0)
    throw InputError("spatial_upsample_ref: stride " + std::to_string(t.stride())
                     + " is odd, cannot halve");

  SparseTensor out(t.stride() / 2, t.channels());
  out.reserve(t.size() * 8);

  std::unordered_map<Vec3i, std::size_t, Vec3iHash> slot;
  std::vector<double> row(t.channels());
  for (std::size_t i = 0; i < t.size(); i++) {
    const double* f = t.row(i);
    for (std::size_t c = 0; c < t.channels(); c++)
      row[c] = f[c] / 8.0;
    const Vec3i base = t.coord(i) * 2;
    for (int dx = 0; dx <= 1; dx++)
      for (int dy = 0; dy <= 1; dy++)
        for (int dz = 0; dz <= 1; dz++) {
          const Vec3i child{base.x + dx, base.y + dy, base.z + dz};
          auto [it, fresh] = slot.try_emplace(child, out.size());
          if (fresh) {
            out.push_row(child, row);
          } else {
            for (std::size_t c = 0; c < t.channels(); c++)
              out.feat(it->second, c) += row[c];
          }
        }
  }
  return out;
}

//============================================================================
// FeatureTransform: a TransformSpec plus its deterministic application. The
// cascade_stage kind is mean pooling by `kernel` followed by the seeded
// channel projection, which is one reference backbone block.

class FeatureTransform {
public:
  explicit FeatureTransform(TransformSpec spec) : spec_(spec) {}

  const TransformSpec& spec() const { return spec_; }

  SparseTensor apply(const SparseTensor& t) const
  {
    switch (spec_.kind) {
    case TransformKind::kMaxpool:
      return sparse_maxpool(t, spec_.kernel);
    case TransformKind::kChannelProject:
      return channel_project(t, spec_.out_channels, spec_.seed);
    case TransformKind::kSpatialUpsample:
      return spatial_upsample_ref(t);
    case TransformKind::kCascadeStage: {
      const SparseTensor pooled = spec_.kernel > 1 ? sparse_avgpool(t, spec_.kernel) : t;
      return channel_project(pooled, spec_.out_channels, spec_.seed);
    }
    }
    throw InputError("FeatureTransform: unknown kind");
  }

private:
  TransformSpec spec_;
};

//============================================================================
// extract_cascade_ref: the four-stage reference backbone. Strides 1/2/4/8,
// channel widths 16/32/64/64; returns the stage-3 and stage-4 outputs.

struct CascadeConfig {
  std::uint64_t seed = 0x7f3a1c9605b8d2e4ULL;
};

struct CascadeOutput {
  SparseTensor f3;  // stride 4, 64 channels
  SparseTensor f4;  // stride 8, 64 channels
};

inline SparseTensor scene_to_tensor(const VoxelScene& scene)
{
  SparseTensor t(1, kSceneChannels);
  t.reserve(scene.size());
  std::vector<double> row(kSceneChannels);
  for (std::size_t i = 0; i < scene.size(); i++) {
    const float* a = scene.attr_row(i);
    for (std::size_t c = 0; c < kSceneChannels; c++)
      row[c] = a[c];
    t.push_row(scene.coords[i], row);
  }
  return t;
}

inline CascadeOutput extract_cascade_ref(const VoxelScene& scene, const CascadeConfig& cfg = {})
{
  constexpr std::size_t widths[4] = {16, 32, 64, 64};

  SparseTensor cur = scene_to_tensor(scene);
  CascadeOutput out;
  out.f3 = SparseTensor(4, 64);
  out.f4 = SparseTensor(8, 64);
  if (cur.empty())
    return out;

  for (int stage = 0; stage < 4; stage++) {
    TransformSpec spec;
    spec.kind = TransformKind::kCascadeStage;
    spec.kernel = stage == 0 ? 1 : 2;
    spec.in_channels = cur.channels();
    spec.out_channels = widths[stage];
    spec.seed = derive_seed(cfg.seed, std::uint64_t(stage));
    cur = FeatureTransform(spec).apply(cur);
    if (stage == 2)
      out.f3 = cur;
  }
  out.f4 = cur;
  return out;
}

}  // namespace ffc

#endif  // FFC_TRANSFORMS_HPP
