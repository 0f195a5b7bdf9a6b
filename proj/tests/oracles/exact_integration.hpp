#pragma once

// Reference integration on triangles, independent of the library's rules:
// Gauss-Legendre on the unit square pulled back through the Duffy map, and
// closed-form monomial moments of the unit right triangle.

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Core>

namespace oracle {

using Vec2 = Eigen::Vector2d;

struct GaussLegendre {
  std::vector<double> nodes;    // on [0, 1]
  std::vector<double> weights;  // sum to 1
};

// Newton iteration on P_n; exact for polynomials of degree 2n - 1.
inline GaussLegendre gauss_legendre(int n) {
  GaussLegendre g;
  for (int i = 1; i <= n; ++i) {
    double x = std::cos(std::numbers::pi * (i - 0.25) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    g.nodes.push_back(0.5 * (1.0 - x));
    g.weights.push_back(1.0 / ((1.0 - x * x) * dp * dp));
  }
  return g;
}

// Integral of f over the triangle (a, b, c). The Duffy map
// (u, v) -> a + u (b - a) + u v (c - b) has Jacobian 2|K| u, so an n-point
// rule per direction integrates polynomials of degree <= 2n - 2 exactly.
template <typename F>
auto integrate(const std::array<Vec2, 3>& t, F&& f, int n = 8) {
  const GaussLegendre g = gauss_legendre(n);
  const Vec2 ab = t[1] - t[0];
  const Vec2 bc = t[2] - t[1];
  const double two_area = std::abs(ab.x() * bc.y() - ab.y() * bc.x());
  using R = decltype(f(t[0]));
  R sum = f(t[0]) * 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const double u = g.nodes[i];
    for (std::size_t j = 0; j < g.nodes.size(); ++j) {
      const double v = g.nodes[j];
      const Vec2 x = t[0] + u * ab + u * v * bc;
      sum += (g.weights[i] * g.weights[j] * two_area * u) * f(x);
    }
  }
  return sum;
}

inline double factorial(int n) {
  double r = 1.0;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

// Integral of x^a y^b over {(0,0), (1,0), (0,1)}: a! b! / (a + b + 2)!.
inline double unit_triangle_monomial(int a, int b) {
  return factorial(a) * factorial(b) / factorial(a + b + 2);
}

}  // namespace oracle
