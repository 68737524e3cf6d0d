#pragma once

#include <array>
#include <cmath>

namespace phaseless {

/// Point or displacement in R^3 (length units).
struct Vec3 {
  double x{0.0};
  double y{0.0};
  double z{0.0};

  constexpr Vec3& operator+=(Vec3 const& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(Vec3 const& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }
  friend constexpr bool operator==(Vec3 const&, Vec3 const&) = default;
};

constexpr Vec3 operator+(Vec3 a, Vec3 const& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, Vec3 const& b) { return a -= b; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator-(Vec3 const& a) { return {-a.x, -a.y, -a.z}; }

constexpr double dot(Vec3 const& a, Vec3 const& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
constexpr Vec3 cross(Vec3 const& a, Vec3 const& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 const& a) { return std::sqrt(dot(a, a)); }
inline double distance(Vec3 const& a, Vec3 const& b) { return norm(a - b); }

/// Row-major 3x3 matrix; rows are accessed as Vec3.
using Mat3 = std::array<Vec3, 3>;

/// Row vector times matrix, v * M.
constexpr Vec3 row_times(Vec3 const& v, Mat3 const& m) {
  return v.x * m[0] + v.y * m[1] + v.z * m[2];
}

constexpr double pi = 3.14159265358979323846;
constexpr double two_pi = 2.0 * pi;

}  // namespace phaseless
