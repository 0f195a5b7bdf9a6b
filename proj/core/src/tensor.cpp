#include "wgdmp/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/LU>

#include "wgdmp/error.hpp"

namespace wgdmp {

void require_spd(const Mat2& a, const std::string& where) {
  if (!a.allFinite()) throw FieldValidityError(where + ": non-finite diffusion tensor");
  const double scale = a.cwiseAbs().maxCoeff();
  if (std::abs(a(0, 1) - a(1, 0)) > 1e-12 * scale) {
    throw FieldValidityError(where + ": diffusion tensor is not symmetric");
  }
  // A symmetric 2x2 matrix is positive definite iff a11 > 0 and det > 0.
  if (!(a(0, 0) > 0.0) || !(a.determinant() > 0.0)) {
    throw FieldValidityError(where + ": diffusion tensor is not positive definite");
  }
}

std::array<double, 2> symmetric_eigenvalues(const Mat2& a) {
  const double mean = 0.5 * (a(0, 0) + a(1, 1));
  const double half_diff = 0.5 * (a(0, 0) - a(1, 1));
  const double radius = std::hypot(half_diff, 0.5 * (a(0, 1) + a(1, 0)));
  return {mean - radius, mean + radius};
}

TensorField TensorField::constant(const Mat2& a) {
  require_spd(a, "constant field");
  return TensorField(Constant{a});
}

TensorField TensorField::piecewise_constant(std::vector<Mat2> per_element) {
  if (per_element.empty()) throw InvalidArgument("piecewise-constant field has no elements");
  for (std::size_t k = 0; k < per_element.size(); ++k) {
    require_spd(per_element[k], "element " + std::to_string(k));
  }
  return TensorField(PiecewiseConstant{std::move(per_element)});
}

TensorField TensorField::functional(Evaluator eval, std::optional<double> lipschitz_bound) {
  if (!eval) throw InvalidArgument("functional field needs an evaluator");
  if (lipschitz_bound && !(*lipschitz_bound >= 0.0)) {
    throw InvalidArgument("Lipschitz bound must be nonnegative");
  }
  return TensorField(Functional{std::move(eval), lipschitz_bound});
}

TensorField::Kind TensorField::kind() const {
  switch (data_.index()) {
    case 0: return Kind::kConstant;
    case 1: return Kind::kPiecewiseConstant;
    default: return Kind::kFunctional;
  }
}

std::optional<double> TensorField::lipschitz_bound() const {
  if (const auto* f = std::get_if<Functional>(&data_)) return f->lipschitz;
  return 0.0;
}

int TensorField::num_elements() const {
  if (const auto* p = std::get_if<PiecewiseConstant>(&data_)) {
    return static_cast<int>(p->values.size());
  }
  return 0;
}

Mat2 TensorField::evaluate(int element, const Point& x) const {
  return std::visit(
      [&](const auto& d) -> Mat2 {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return d.value;
        } else if constexpr (std::is_same_v<T, PiecewiseConstant>) {
          if (element < 0 || element >= static_cast<int>(d.values.size())) {
            throw InvalidArgument("piecewise-constant field has no value for element " +
                                  std::to_string(element));
          }
          return d.values[static_cast<std::size_t>(element)];
        } else {
          Mat2 a = d.eval(x);
          require_spd(a, "field at (" + std::to_string(x.x()) + ", " + std::to_string(x.y()) + ")");
          return a;
        }
      },
      data_);
}

TensorField read_piecewise_field(std::istream& in, int expected_elements) {
  std::vector<Mat2> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    ss.imbue(std::locale::classic());
    double a11 = 0, a12 = 0, a22 = 0;
    std::string rest;
    if (!(ss >> a11 >> a12 >> a22) || (ss >> rest)) {
      throw ParseError("field line " + std::to_string(line_no) + ": expected 'a11 a12 a22'");
    }
    Mat2 a;
    a << a11, a12, a12, a22;
    values.push_back(a);
  }
  if (static_cast<int>(values.size()) != expected_elements) {
    throw ParseError("field file has " + std::to_string(values.size()) + " entries, mesh has " +
                     std::to_string(expected_elements) + " elements");
  }
  return TensorField::piecewise_constant(std::move(values));
}

TensorField load_piecewise_field(const std::string& path, int expected_elements) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open field file '" + path + "'");
  return read_piecewise_field(in, expected_elements);
}

Point QuadratureRule::point(const ElementGeometry& g, std::size_t q) const {
  const auto& b = barycentric[q];
  return b[0] * g.vertices[0] + b[1] * g.vertices[1] + b[2] * g.vertices[2];
}

QuadratureRule quadrature(int degree) {
  QuadratureRule rule;
  rule.degree = degree;
  auto add_orbit3 = [&rule](double a, double b, double w) {
    rule.barycentric.push_back({b, a, a});
    rule.barycentric.push_back({a, b, a});
    rule.barycentric.push_back({a, a, b});
    rule.weights.insert(rule.weights.end(), 3, w);
  };
  switch (degree) {
    case 1:
      rule.barycentric.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
      rule.weights.push_back(1.0);
      break;
    case 2:
      add_orbit3(1.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0);
      break;
    case 4: {
      // Dunavant's 6-point rule.
      constexpr double a1 = 0.445948490915964886318329253883;
      constexpr double w1 = 0.223381589678011465695007008433;
      constexpr double a2 = 0.091576213509770743459571463402;
      constexpr double w2 = 0.109951743655321867638326324900;
      add_orbit3(a1, 1.0 - 2.0 * a1, w1);
      add_orbit3(a2, 1.0 - 2.0 * a2, w2);
      break;
    }
    default:
      throw InvalidArgument("unsupported quadrature degree " + std::to_string(degree) +
                            " (supported: 1, 2, 4)");
  }
  return rule;
}

ElementMoments element_moments(const ElementGeometry& geom, const TensorField& field, int element,
                               const QuadratureRule& rule) {
  ElementMoments mom;
  const double area = geom.area;

  if (field.elementwise_constant()) {
    const Mat2 a = field.evaluate(element, geom.centroid);
    mom.a_avg = a;
    // tr(A J) with J the exact second moment about the centroid.
    mom.s_a = (a.cwiseProduct(geom.second_moment)).sum();
    mom.m = {0.0, 0.0, 0.0};
    const auto eig = symmetric_eigenvalues(a);
    mom.lam_min = eig[0];
    mom.lam_max = eig[1];
    mom.lip = 0.0;
  } else {
    if (rule.degree < 2) {
      throw InvalidArgument("functional diffusion fields need a quadrature rule of degree >= 2");
    }
    std::vector<Point> points(rule.size());
    std::vector<Mat2> values(rule.size());
    mom.lam_min = std::numeric_limits<double>::infinity();
    mom.lam_max = -std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      points[q] = rule.point(geom, q);
      values[q] = field.evaluate(element, points[q]);
      const double w = rule.weights[q];
      const Point d = points[q] - geom.centroid;
      const Point ad = values[q] * d;
      mom.a_avg += w * values[q];
      mom.s_a += w * d.dot(ad);
      for (int i = 0; i < 3; ++i) {
        mom.m[static_cast<std::size_t>(i)] += w * ad.dot(geom.normals[static_cast<std::size_t>(i)]);
      }
      const auto eig = symmetric_eigenvalues(values[q]);
      mom.lam_min = std::min(mom.lam_min, eig[0]);
      mom.lam_max = std::max(mom.lam_max, eig[1]);
    }
    for (const Point& v : geom.vertices) {
      const auto eig = symmetric_eigenvalues(field.evaluate(element, v));
      mom.lam_min = std::min(mom.lam_min, eig[0]);
      mom.lam_max = std::max(mom.lam_max, eig[1]);
    }
    mom.s_a *= area;
    for (double& mi : mom.m) mi *= area;

    if (auto bound = field.lipschitz_bound()) {
      mom.lip = *bound;
    } else {
      for (std::size_t p = 0; p < points.size(); ++p) {
        for (std::size_t q = p + 1; q < points.size(); ++q) {
          const double dist = (points[p] - points[q]).norm();
          if (dist > 0.0) {
            mom.lip = std::max(mom.lip, (values[p] - values[q]).norm() / dist);
          }
        }
      }
    }
  }

  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      mom.n_mat(i, j) = area * geom.normals[static_cast<std::size_t>(i)].dot(
                                   mom.a_avg * geom.normals[static_cast<std::size_t>(j)]);
    }
  }
  // Force exact symmetry; a_avg is symmetric only to rounding.
  mom.n_mat = 0.5 * (mom.n_mat + mom.n_mat.transpose()).eval();
  return mom;
}

Mat2 example51_tensor() {
  Mat2 a;
  a << 500.5, 499.5, 499.5, 500.5;
  return a;
}

double example51_boundary(const Point& p) {
  constexpr double tol = 1e-9;
  const double x = p.x(), y = p.y();
  const bool top = std::abs(y - 16.0) <= tol;
  const bool left = std::abs(x) <= tol;
  if (top && x <= 14.0) return 1.0;
  if (top && x < 16.0) return 8.0 - 0.5 * x;
  if (left && y >= 2.0) return 1.0;
  if (left && y > 0.0) return 0.5 * y;
  return 0.0;
}

Problem example51() {
  Problem p{.name = "example51",
            .field = TensorField::constant(example51_tensor()),
            .source = [](const Point&) { return 0.0; },
            .boundary = example51_boundary,
            .domain = Rect{0.0, 16.0, 0.0, 16.0}};
  return p;
}

Mat2 example52_tensor(double gamma, const Point& p, RotationConvention rotation) {
  const double dx = p.x() + 0.1;
  const double dy = p.y() - 0.5;
  const double r = std::hypot(dx, dy);
  const double c = r > 0.0 ? dx / r : 1.0;
  const double s = r > 0.0 ? dy / r : 0.0;
  constexpr double k1 = 1.0;
  const double k2 = 1.0 + gamma * std::exp(-200.0 * (r - 0.5) * (r - 0.5));
  Mat2 q;
  if (rotation == RotationConvention::kAsDisplayed) {
    q << c, s, -s, c;
  } else {
    q << c, -s, s, c;
  }
  const Mat2 a = q * Eigen::Vector2d(k1, k2).asDiagonal() * q.transpose();
  return 0.5 * (a + a.transpose());
}

Problem example52(double gamma, RotationConvention rotation) {
  if (!(gamma > 0.0)) throw InvalidArgument("example52 needs gamma > 0");
  Problem p{.name = rotation == RotationConvention::kAsDisplayed ? "example52" : "example52-tangential",
            .field = TensorField::functional(
                [gamma, rotation](const Point& x) { return example52_tensor(gamma, x, rotation); }),
            .source = [](const Point&) { return 0.0; },
            .boundary = [](const Point& x) { return std::sin(std::numbers::pi * (x.x() + 0.5)); },
            .domain = Rect{0.0, 1.0, 0.0, 1.0}};
  return p;
}

}  // namespace wgdmp
