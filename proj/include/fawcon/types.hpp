#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fawcon {

/// Dense point identifier, assigned consecutively from 0 in insertion order.
enum class PointId : std::uint32_t {};

constexpr std::size_t index_of(PointId id) noexcept { return static_cast<std::size_t>(id); }
constexpr PointId point_id(std::size_t index) noexcept {
  return static_cast<PointId>(static_cast<std::uint32_t>(index));
}

using Vec3 = std::array<double, 3>;
using Feature = std::vector<float>;

enum class Axis : int { X = 0, Y = 1, Z = 2 };

inline constexpr std::array<Axis, 3> kAxes{Axis::X, Axis::Y, Axis::Z};

inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }

inline double squared_norm(const Vec3& v) { return v[0] * v[0] + v[1] * v[1] + v[2] * v[2]; }
inline double norm(const Vec3& v) { return std::sqrt(squared_norm(v)); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

inline bool is_finite(const Vec3& v) {
  return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
}

// Error hierarchy. Everything derives from Error so callers can catch broadly.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionError : Error {
  using Error::Error;
};
struct NotFoundError : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct AlreadyInsertedError : Error {
  using Error::Error;
};
struct OrderingError : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

}  // namespace fawcon
