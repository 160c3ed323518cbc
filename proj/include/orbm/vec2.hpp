// Minimal 2D vector type used throughout the toolkit.

#ifndef ORBM_VEC2_HPP_
#define ORBM_VEC2_HPP_

#include <cmath>

namespace orbm {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double c) const { return {x * c, y * c}; }
  constexpr Vec2 operator/(double c) const { return {x / c, y / c}; }
  constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  constexpr bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
  constexpr bool operator!=(const Vec2& o) const { return !(*this == o); }

  constexpr double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  constexpr double norm2() const { return x * x + y * y; }
};

constexpr inline Vec2 operator*(double c, const Vec2& v) { return v * c; }

}  // namespace orbm

#endif  // ORBM_VEC2_HPP_
