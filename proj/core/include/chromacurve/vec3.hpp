#pragma once

#include <cmath>

namespace chromacurve {

// Three-component real vector. Used both for colors (r, g, b in RGB units)
// and for directions in RGB space.
struct Vec3 {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  constexpr double operator[](int i) const { return i == 0 ? r : (i == 1 ? g : b); }
  constexpr double& operator[](int i) { return i == 0 ? r : (i == 1 ? g : b); }

  constexpr Vec3& operator+=(const Vec3& o) {
    r += o.r;
    g += o.g;
    b += o.b;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    r -= o.r;
    g -= o.g;
    b -= o.b;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    r *= s;
    g *= s;
    b *= s;
    return *this;
  }

  friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
  friend constexpr Vec3 operator-(const Vec3& a) { return {-a.r, -a.g, -a.b}; }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

// A color sample in the RGB cube. Points read from images have channels in
// [0, 255]; derived points (curve extrapolation) may leave the cube.
using RgbPoint = Vec3;

constexpr double dot(const Vec3& a, const Vec3& b) { return a.r * b.r + a.g * b.g + a.b * b.b; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.g * b.b - a.b * b.g, a.b * b.r - a.r * b.b, a.r * b.g - a.g * b.r};
}

constexpr double squared_norm(const Vec3& a) { return dot(a, a); }

inline double norm(const Vec3& a) { return std::sqrt(squared_norm(a)); }

inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

constexpr double squared_distance(const Vec3& a, const Vec3& b) { return squared_norm(a - b); }

inline Vec3 normalized(const Vec3& a) {
  const double n = norm(a);
  return n > 0.0 ? a * (1.0 / n) : a;
}

// Angle between two nonzero vectors in degrees.
double angle_degrees(const Vec3& a, const Vec3& b);

constexpr bool inside_cube(const Vec3& p, double lo, double hi) {
  return p.r >= lo && p.r <= hi && p.g >= lo && p.g <= hi && p.b >= lo && p.b <= hi;
}

}  // namespace chromacurve
