#pragma once
/**
 * @file vec2.hpp
 * @brief Plane vectors, identified with complex numbers where convenient.
 *
 * `rot90(z)` is multiplication by i (counterclockwise quarter turn).
 */

#include <cmath>

namespace anisoag {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

  double norm() const { return std::hypot(x, y); }
  constexpr double norm2() const { return x * x + y * y; }
};

constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

/// a ∧ b = a.x b.y - a.y b.x
constexpr double wedge(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

/// Multiplication by i.
constexpr Vec2 rot90(const Vec2& z) { return {-z.y, z.x}; }

inline Vec2 unit_at(double angle) { return {std::cos(angle), std::sin(angle)}; }

inline double angle_of(const Vec2& z) { return std::atan2(z.y, z.x); }

inline double dist(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

}  // namespace anisoag
