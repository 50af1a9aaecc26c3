#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace fracac {

// Small fixed-capacity vector; dimension 1 to 3.
struct Point {
  std::array<double, 3> v{};
  int dim = 1;

  Point() = default;
  explicit Point(int d) : dim(d) {
    if (d < 1 || d > 3) throw std::invalid_argument("Point: dimension must be 1..3");
  }
  static Point scalar(double x) {
    Point p(1);
    p.v[0] = x;
    return p;
  }
  static Point xy(double x, double y) {
    Point p(2);
    p.v[0] = x;
    p.v[1] = y;
    return p;
  }

  double& operator[](int i) { return v[i]; }
  double operator[](int i) const { return v[i]; }

  Point& operator+=(const Point& o) {
    for (int i = 0; i < dim; ++i) v[i] += o.v[i];
    return *this;
  }
  Point operator+(const Point& o) const { return Point(*this) += o; }
  Point operator-(const Point& o) const {
    Point r = *this;
    for (int i = 0; i < dim; ++i) r.v[i] -= o.v[i];
    return r;
  }
  Point operator*(double s) const {
    Point r = *this;
    for (int i = 0; i < dim; ++i) r.v[i] *= s;
    return r;
  }
  Point operator-() const { return *this * -1.0; }

  double norm() const {
    double s = 0;
    for (int i = 0; i < dim; ++i) s += v[i] * v[i];
    return std::sqrt(s);
  }
  double dot(const Point& o) const {
    double s = 0;
    for (int i = 0; i < dim; ++i) s += v[i] * o.v[i];
    return s;
  }
  bool operator==(const Point& o) const {
    if (dim != o.dim) return false;
    for (int i = 0; i < dim; ++i)
      if (v[i] != o.v[i]) return false;
    return true;
  }
};

}  // namespace fracac
