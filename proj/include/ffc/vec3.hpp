// SPDX-License-Identifier: Apache-2.0

#ifndef FFC_VEC3_HPP
#define FFC_VEC3_HPP

#include <cmath>
#include <cstdint>
#include <functional>

namespace ffc {

struct Vec3i {
  std::int32_t x = 0;
  std::int32_t y = 0;
  std::int32_t z = 0;

  friend bool operator==(const Vec3i&, const Vec3i&) = default;

  // Lexicographic (x, y, z); the canonical ordering used throughout.
  friend bool operator<(const Vec3i& a, const Vec3i& b)
  {
    if (a.x != b.x)
      return a.x < b.x;
    if (a.y != b.y)
      return a.y < b.y;
    return a.z < b.z;
  }
};

struct Vec3d {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3d&, const Vec3d&) = default;

  Vec3d operator+(const Vec3d& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3d operator-(const Vec3d& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3d operator*(double s) const { return {x * s, y * s, z * s}; }
};

inline Vec3d to_vec3d(const Vec3i& v)
{
  return {double(v.x), double(v.y), double(v.z)};
}

inline double squared_norm(const Vec3d& v)
{
  return v.x * v.x + v.y * v.y + v.z * v.z;
}

inline double squared_distance(const Vec3d& a, const Vec3d& b)
{
  return squared_norm(a - b);
}

// Mathematical floor division (rounds toward -inf, unlike C++ '/').
inline std::int32_t floor_div(std::int32_t a, std::int32_t b)
{
  std::int32_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0)))
    q--;
  return q;
}

inline Vec3i floor_div(const Vec3i& v, std::int32_t d)
{
  return {floor_div(v.x, d), floor_div(v.y, d), floor_div(v.z, d)};
}

inline Vec3i operator*(const Vec3i& v, std::int32_t s)
{
  return {v.x * s, v.y * s, v.z * s};
}

inline Vec3i operator+(const Vec3i& a, const Vec3i& b)
{
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}

inline Vec3i operator-(const Vec3i& a, const Vec3i& b)
{
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}

inline std::int64_t squared_distance_i64(const Vec3i& a, const Vec3i& b)
{
  const std::int64_t dx = std::int64_t(a.x) - b.x;
  const std::int64_t dy = std::int64_t(a.y) - b.y;
  const std::int64_t dz = std::int64_t(a.z) - b.z;
  return dx * dx + dy * dy + dz * dz;
}

// Inclusive integer bounding box.
struct Box3i {
  Vec3i min;
  Vec3i max;

  friend bool operator==(const Box3i&, const Box3i&) = default;

  bool contains(const Vec3i& p) const
  {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z
        && p.z <= max.z;
  }
};

struct Vec3iHash {
  std::size_t operator()(const Vec3i& v) const
  {
    std::uint64_t h = std::uint64_t(std::uint32_t(v.x)) * 0x9e3779b97f4a7c15ULL;
    h ^= std::uint64_t(std::uint32_t(v.y)) * 0xc2b2ae3d27d4eb4fULL;
    h ^= std::uint64_t(std::uint32_t(v.z)) * 0x165667b19e3779f9ULL;
    h ^= h >> 29;
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 32;
    return std::size_t(h);
  }
};

}  // namespace ffc

#endif  // FFC_VEC3_HPP
