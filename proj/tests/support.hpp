#pragma once

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "wgdmp/mesh.hpp"
#include "wgdmp/tensor.hpp"

namespace testing_support {

using wgdmp::Mat2;
using wgdmp::Point;

// Counterclockwise triangle with vertices in [-1, 1]^2 and no angle below ~5 degrees.
inline std::array<Point, 3> random_triangle(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    std::array<Point, 3> t{Point(u(rng), u(rng)), Point(u(rng), u(rng)), Point(u(rng), u(rng))};
    const Point a = t[1] - t[0], b = t[2] - t[0];
    double cross = a.x() * b.y() - a.y() * b.x();
    if (cross < 0) {
      std::swap(t[1], t[2]);
      cross = -cross;
    }
    const double h2 = std::max({a.squaredNorm(), b.squaredNorm(), (t[2] - t[1]).squaredNorm()});
    if (cross > 0.1 * h2) return t;
  }
}

inline Mat2 random_spd(std::mt19937& rng, double max_ratio = 50.0) {
  std::uniform_real_distribution<double> angle(0.0, 3.141592653589793);
  std::uniform_real_distribution<double> scale(1.0, max_ratio);
  const double th = angle(rng);
  Mat2 q;
  q << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  const Mat2 a = q * Eigen::Vector2d(1.0, scale(rng)).asDiagonal() * q.transpose();
  return 0.5 * (a + a.transpose());
}

inline wgdmp::TriMesh single_triangle(const std::array<Point, 3>& t) {
  return wgdmp::TriMesh({t[0], t[1], t[2]}, {{0, 1, 2}});
}

inline std::array<Point, 3> unit_right_triangle() {
  return {Point(0, 0), Point(1, 0), Point(0, 1)};
}

// Structured mesh with interior vertices moved by up to `fraction` of a cell.
inline wgdmp::TriMesh jittered_mesh(wgdmp::MeshKind kind, int n, std::mt19937& rng,
                                    double fraction = 0.2) {
  const wgdmp::TriMesh base = wgdmp::generate_structured(kind, n, n, wgdmp::Rect{});
  std::uniform_real_distribution<double> u(-fraction / n, fraction / n);
  std::vector<Point> v(base.vertices().begin(), base.vertices().end());
  for (Point& p : v) {
    const bool boundary = p.x() == 0.0 || p.x() == 1.0 || p.y() == 0.0 || p.y() == 1.0;
    if (!boundary) p += Point(u(rng), u(rng));
  }
  return wgdmp::TriMesh(std::move(v), {base.triangles().begin(), base.triangles().end()});
}

// Smooth SPD field with O(1) variation over the unit square.
inline wgdmp::TensorField smooth_field(double strength) {
  return wgdmp::TensorField::functional([strength](const Point& x) {
    const double th = 2.0 * x.x() + std::sin(3.0 * x.y());
    const double c = std::cos(th), s = std::sin(th);
    Mat2 q;
    q << c, -s, s, c;
    const Mat2 a = q * Eigen::Vector2d(1.0, 1.0 + strength * (1.0 + x.x() * x.y())).asDiagonal() *
                   q.transpose();
    return Mat2(0.5 * (a + a.transpose()));
  });
}

}  // namespace testing_support
