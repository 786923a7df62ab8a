// SPDX-License-Identifier: Apache-2.0

#ifndef FFC_VOXEL_SCENE_HPP
#define FFC_VOXEL_SCENE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ffc/common.hpp"
#include "ffc/vec3.hpp"

namespace ffc {

constexpr std::size_t kSceneChannels = 8;   // x y z r R G B f
constexpr int kVoxelPointCap = 5;           // fixed slot count per voxel
constexpr std::int32_t kMaxCoord = 1 << 21; // octree depth cap

//============================================================================
// RawPoint: one multimodal input point. f = 2 marks a captured LiDAR point
// (colorless), f = 1 a virtual point lifted from the image (no reflectance).

struct RawPoint {
  double x = 0, y = 0, z = 0;
  double r = 0;           // reflectance, [0,1]
  double R = 0, G = 0, B = 0;  // color, [0,1]
  int f = 2;              // source flag

  std::array<double, kSceneChannels> attrs() const { return {x, y, z, r, R, G, B, double(f)}; }
};

//============================================================================
// VoxelScene: unique non-negative base-grid coordinates with the 8-channel
// averaged attributes of the points that fell into each voxel.

struct VoxelScene {
  Vec3d origin;
  double voxel_size = 1.0;
  std::vector<Vec3i> coords;
  std::vector<float> attrs;  // row-major N x 8

  std::size_t size() const { return coords.size(); }
  bool empty() const { return coords.empty(); }

  const float* attr_row(std::size_t i) const { return attrs.data() + i * kSceneChannels; }
};

namespace detail {

inline bool finite_point(const RawPoint& p)
{
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z) && std::isfinite(p.r)
      && std::isfinite(p.R) && std::isfinite(p.G) && std::isfinite(p.B);
}

inline void validate_point(const RawPoint& p, std::size_t idx)
{
  if (!finite_point(p))
    throw InputError("voxelize: non-finite value in point " + std::to_string(idx));
  if (p.f != 1 && p.f != 2)
    throw InputError("voxelize: point " + std::to_string(idx) + " has flag "
                     + std::to_string(p.f) + ", expected 1 or 2");
  if (p.f == 2 && (p.R != 0 || p.G != 0 || p.B != 0))
    throw InputError("voxelize: captured point " + std::to_string(idx) + " must have zero color");
  if (p.f == 1 && p.r != 0)
    throw InputError("voxelize: virtual point " + std::to_string(idx)
                     + " must have zero reflectance");
}

// Canonical within-voxel order: (x, y, z, f) first, remaining attributes as
// tie breakers, so the survivor draw is independent of input order.
inline bool point_less(const RawPoint& a, const RawPoint& b)
{
  auto key = [](const RawPoint& p) {
    return std::array<double, 8>{p.x, p.y, p.z, double(p.f), p.r, p.R, p.G, p.B};
  };
  return key(a) < key(b);
}

}  // namespace detail

//============================================================================
// voxelize: bucket points into voxels of side voxel_size anchored at origin.
// Each voxel holds a fixed buffer of 5 point slots: when more than 5 points
// fall in, a seeded draw keeps 5; when fewer, the empty slots stay all-zero.
// The stored attributes are the mean over the 5 slots.

inline VoxelScene voxelize(const std::vector<RawPoint>& points, double voxel_size,
                           const Vec3d& origin, std::uint64_t seed = 0)
{
  if (!(voxel_size > 0) || !std::isfinite(voxel_size))
    throw InputError("voxelize: voxel_size must be positive and finite");

  std::map<Vec3i, std::vector<RawPoint>> buckets;
  for (std::size_t i = 0; i < points.size(); i++) {
    const RawPoint& p = points[i];
    detail::validate_point(p, i);
    const Vec3i c{std::int32_t(std::floor((p.x - origin.x) / voxel_size)),
                  std::int32_t(std::floor((p.y - origin.y) / voxel_size)),
                  std::int32_t(std::floor((p.z - origin.z) / voxel_size))};
    if (c.x < 0 || c.y < 0 || c.z < 0)
      throw InputError("voxelize: point " + std::to_string(i)
                       + " falls below the origin; shift the origin to the scene minimum");
    if (c.x >= kMaxCoord || c.y >= kMaxCoord || c.z >= kMaxCoord)
      throw InputError("voxelize: scene exceeds 2^21 voxels per axis");
    buckets[c].push_back(p);
  }

  VoxelScene scene;
  scene.origin = origin;
  scene.voxel_size = voxel_size;
  scene.coords.reserve(buckets.size());
  scene.attrs.reserve(buckets.size() * kSceneChannels);

  for (auto& [coord, pts] : buckets) {
    std::sort(pts.begin(), pts.end(), detail::point_less);
    if (pts.size() > std::size_t(kVoxelPointCap)) {
      // Fisher-Yates over the canonically sorted bucket, seeded per voxel.
      Rng rng(derive_seed(seed, std::uint64_t(std::uint32_t(coord.x)),
                          std::uint64_t(std::uint32_t(coord.y)),
                          std::uint64_t(std::uint32_t(coord.z))));
      for (std::size_t i = pts.size() - 1; i > 0; i--)
        std::swap(pts[i], pts[rng.next_below(i + 1)]);
      pts.resize(kVoxelPointCap);
    }

    std::array<double, kSceneChannels> sum{};
    for (const RawPoint& p : pts) {
      const auto a = p.attrs();
      for (std::size_t c = 0; c < kSceneChannels; c++)
        sum[c] += a[c];
    }
    scene.coords.push_back(coord);
    for (std::size_t c = 0; c < kSceneChannels; c++)
      scene.attrs.push_back(float(sum[c] / kVoxelPointCap));
  }
  return scene;
}

//============================================================================
// Scene file format "FVSC": little-endian binary.
//   magic "FVSC" | version u8 = 1 | origin 3 x f64 | voxel_size f64 |
//   N u32 | N x { coord 3 x i32, attrs 8 x f32 }

namespace detail {

template<typename T>
void write_le(std::string& out, T v)
{
  for (std::size_t i = 0; i < sizeof(T); i++)
    out.push_back(char((std::uint64_t(v) >> (8 * i)) & 0xff));
}

inline void write_f32(std::string& out, float v)
{
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  write_le(out, bits);
}

inline void write_f64(std::string& out, double v)
{
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  write_le(out, bits);
}

class ByteParser {
public:
  ByteParser(const std::uint8_t* data, std::size_t size, std::string what)
    : data_(data), size_(size), what_(std::move(what))
  {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return size_ - pos_; }

  void require(std::size_t n, const char* field) const
  {
    if (remaining() < n)
      throw FormatError(what_ + ": truncated while reading " + field + " at byte "
                        + std::to_string(pos_) + " (need " + std::to_string(n) + ", have "
                        + std::to_string(remaining()) + ")");
  }

  template<typename T>
  T read_le(const char* field)
  {
    require(sizeof(T), field);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); i++)
      v |= std::uint64_t(data_[pos_ + i]) << (8 * i);
    pos_ += sizeof(T);
    return T(v);
  }

  float read_f32(const char* field)
  {
    const std::uint32_t bits = read_le<std::uint32_t>(field);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }

  double read_f64(const char* field)
  {
    const std::uint64_t bits = read_le<std::uint64_t>(field);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }

  const std::uint8_t* bytes(std::size_t n, const char* field)
  {
    require(n, field);
    const std::uint8_t* p = data_ + pos_;
    pos_ += n;
    return p;
  }

private:
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
  std::string what_;
};

}  // namespace detail

inline std::string serialize_scene(const VoxelScene& scene)
{
  if (scene.attrs.size() != scene.coords.size() * kSceneChannels)
    throw InputError("serialize_scene: attribute rows do not match coordinate rows");

  std::string out;
  out.append("FVSC");
  out.push_back(char(1));
  detail::write_f64(out, scene.origin.x);
  detail::write_f64(out, scene.origin.y);
  detail::write_f64(out, scene.origin.z);
  detail::write_f64(out, scene.voxel_size);
  detail::write_le(out, std::uint32_t(scene.coords.size()));
  for (std::size_t i = 0; i < scene.coords.size(); i++) {
    detail::write_le(out, std::uint32_t(scene.coords[i].x));
    detail::write_le(out, std::uint32_t(scene.coords[i].y));
    detail::write_le(out, std::uint32_t(scene.coords[i].z));
    for (std::size_t c = 0; c < kSceneChannels; c++)
      detail::write_f32(out, scene.attrs[i * kSceneChannels + c]);
  }
  return out;
}

inline VoxelScene parse_scene(const std::uint8_t* data, std::size_t size)
{
  detail::ByteParser p(data, size, "scene");
  const std::uint8_t* magic = p.bytes(4, "magic");
  if (std::memcmp(magic, "FVSC", 4) != 0)
    throw FormatError("scene: bad magic, not an FVSC file");
  const auto version = p.read_le<std::uint8_t>("version");
  if (version != 1)
    throw FormatError("scene: unsupported version " + std::to_string(version));

  VoxelScene scene;
  scene.origin.x = p.read_f64("origin.x");
  scene.origin.y = p.read_f64("origin.y");
  scene.origin.z = p.read_f64("origin.z");
  scene.voxel_size = p.read_f64("voxel_size");
  const auto n = p.read_le<std::uint32_t>("count");
  scene.coords.reserve(n);
  scene.attrs.reserve(std::size_t(n) * kSceneChannels);
  for (std::uint32_t i = 0; i < n; i++) {
    Vec3i c;
    c.x = p.read_le<std::int32_t>("coord.x");
    c.y = p.read_le<std::int32_t>("coord.y");
    c.z = p.read_le<std::int32_t>("coord.z");
    scene.coords.push_back(c);
    for (std::size_t ch = 0; ch < kSceneChannels; ch++)
      scene.attrs.push_back(p.read_f32("attr"));
  }
  if (p.remaining() != 0)
    throw FormatError("scene: " + std::to_string(p.remaining()) + " trailing bytes");
  return scene;
}

inline VoxelScene parse_scene(const std::string& bytes)
{
  return parse_scene(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size());
}

inline void save_scene(const VoxelScene& scene, const std::string& path)
{
  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw InputError("cannot open for writing: " + path);
  const std::string bytes = serialize_scene(scene);
  f.write(bytes.data(), std::streamsize(bytes.size()));
  if (!f)
    throw InputError("write failed: " + path);
}

inline VoxelScene load_scene(const std::string& path)
{
  std::ifstream f(path, std::ios::binary);
  if (!f)
    throw InputError("cannot open: " + path);
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return parse_scene(bytes);
}

//============================================================================
// Line-oriented raw point import: "x y z r R G B f" per line. Blank lines and
// lines starting with '#' are skipped.

inline std::vector<RawPoint> read_raw_points(std::istream& in)
{
  std::vector<RawPoint> points;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    if (line.empty() || line[0] == '#')
      continue;
    std::istringstream ls(line);
    RawPoint p;
    if (!(ls >> p.x >> p.y >> p.z >> p.r >> p.R >> p.G >> p.B >> p.f))
      throw FormatError("raw points: malformed line " + std::to_string(lineno));
    points.push_back(p);
  }
  return points;
}

inline std::vector<RawPoint> load_raw_points(const std::string& path)
{
  std::ifstream f(path);
  if (!f)
    throw InputError("cannot open: " + path);
  return read_raw_points(f);
}

}  // namespace ffc

#endif  // FFC_VOXEL_SCENE_HPP
