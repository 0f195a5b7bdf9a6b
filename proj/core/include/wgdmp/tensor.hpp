#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "wgdmp/mesh.hpp"

namespace wgdmp {

using Mat2 = Eigen::Matrix2d;

/// Throws FieldValidityError unless `a` is symmetric with both eigenvalues > 0.
void require_spd(const Mat2& a, const std::string& where);

/// Eigenvalues of a symmetric 2x2 matrix, ascending.
std::array<double, 2> symmetric_eigenvalues(const Mat2& a);

/// Diffusion tensor A(x).
///
/// Constant and piecewise-constant fields are validated on construction;
/// functional fields are validated at every evaluation.
class TensorField {
 public:
  using Evaluator = std::function<Mat2(const Point&)>;

  enum class Kind { kConstant, kPiecewiseConstant, kFunctional };

  static TensorField constant(const Mat2& a);
  static TensorField piecewise_constant(std::vector<Mat2> per_element);
  /// `lipschitz_bound`, when given, replaces the sampled estimate of L_{A,K}.
  static TensorField functional(Evaluator eval, std::optional<double> lipschitz_bound = {});

  Kind kind() const;
  bool elementwise_constant() const { return kind() != Kind::kFunctional; }
  std::optional<double> lipschitz_bound() const;

  /// Number of per-element values (piecewise-constant only, else 0).
  int num_elements() const;

  /// A at point x of element `element`. Validated SPD.
  Mat2 evaluate(int element, const Point& x) const;

 private:
  struct Constant {
    Mat2 value;
  };
  struct PiecewiseConstant {
    std::vector<Mat2> values;
  };
  struct Functional {
    Evaluator eval;
    std::optional<double> lipschitz;
  };
  explicit TensorField(std::variant<Constant, PiecewiseConstant, Functional> data)
      : data_(std::move(data)) {}

  std::variant<Constant, PiecewiseConstant, Functional> data_;
};

/// Piecewise-constant field file: one line per element, `a11 a12 a22`.
TensorField read_piecewise_field(std::istream& in, int expected_elements);
TensorField load_piecewise_field(const std::string& path, int expected_elements);

/// Symmetric triangle rule in barycentric coordinates; weights sum to 1 and
/// are scaled by |K| at use.
struct QuadratureRule {
  int degree = 0;
  std::vector<std::array<double, 3>> barycentric;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  Point point(const ElementGeometry& g, std::size_t q) const;
};

/// Rules exact through total degree 1 (centroid), 2 (3 points) or 4 (6 points).
QuadratureRule quadrature(int degree);

/// Per-element integrals consumed by every matrix entry.
struct ElementMoments {
  /// A_K = |K|^{-1} int_K A.
  Mat2 a_avg = Mat2::Zero();
  /// ||x - x_K||^2_{A,K} = (A(x - x_K), x - x_K)_K.
  double s_a = 0.0;
  /// m_i = (A(x - x_K), n_i)_K per local edge.
  std::array<double, 3> m{};
  /// N_ij = (A n_i, n_j)_K.
  Eigen::Matrix3d n_mat = Eigen::Matrix3d::Zero();
  /// Smallest / largest sampled eigenvalue of A over K.
  double lam_min = 0.0;
  double lam_max = 0.0;
  /// Lipschitz constant of A over K (0 for elementwise-constant fields).
  double lip = 0.0;
};

/// Elementwise-constant fields are integrated exactly from the triangle's
/// second-moment tensor (any rule degree accepted); functional fields need a
/// rule of degree >= 2.
ElementMoments element_moments(const ElementGeometry& geom, const TensorField& field,
                               int element, const QuadratureRule& rule);

using ScalarFunction = std::function<double(const Point&)>;

/// A complete boundary-value problem -div(A grad u) = f on `domain`, u = g on
/// the boundary.
struct Problem {
  std::string name;
  TensorField field;
  ScalarFunction source;
  ScalarFunction boundary;
  Rect domain;
  /// f <= 0 everywhere (enables the upper DMP bound).
  bool source_nonpositive = true;
  /// f >= 0 everywhere (enables the lower DMP bound).
  bool source_nonnegative = true;
};

/// How the rotation in the second example field is applied.
///   kAsDisplayed - A = [c s; -s c] diag(k1, k2) [c -s; s c]
///   kTangential  - A = [c -s; s c] diag(k1, k2) [c s; -s c] (k2 along circles)
enum class RotationConvention { kAsDisplayed, kTangential };

/// Constant strongly anisotropic diffusion on (0,16)^2 with piecewise-linear
/// boundary data.
Problem example51();

/// Rotating Gaussian-ring anisotropy on (0,1)^2, pole (-0.1, 0.5),
/// k1 = 1, k2 = 1 + gamma exp(-200 (r - 0.5)^2), g = sin(pi (x + 0.5)).
Problem example52(double gamma, RotationConvention rotation = RotationConvention::kAsDisplayed);

Mat2 example51_tensor();
double example51_boundary(const Point& p);
Mat2 example52_tensor(double gamma, const Point& p,
                      RotationConvention rotation = RotationConvention::kAsDisplayed);

}  // namespace wgdmp
