#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace wgdmp {

using Point = Eigen::Vector2d;

/// Axis-aligned rectangle [x_min, x_max] x [y_min, y_max].
struct Rect {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;
};

/// Structured triangulations of a rectangle.
///   kMesh45  - each cell split by the lower-left to upper-right diagonal
///   kMesh135 - each cell split by the lower-right to upper-left diagonal
///   kMesh90  - cell center added, both diagonals drawn (4 triangles per cell)
enum class MeshKind { kMesh45, kMesh90, kMesh135 };

const char* to_string(MeshKind kind);
MeshKind parse_mesh_kind(const std::string& name);

enum class EdgeKind { kInterior, kBoundary };

/// Reference from an element to one of its edges. `index` counts within the
/// edge's own class (interior or boundary). `reversed` is set when the
/// counterclockwise traversal of the element runs against the stored
/// (low vertex -> high vertex) direction of the edge.
struct EdgeRef {
  EdgeKind kind = EdgeKind::kInterior;
  int index = -1;
  bool reversed = false;

  bool interior() const { return kind == EdgeKind::kInterior; }
  friend bool operator==(const EdgeRef&, const EdgeRef&) = default;
};

/// Elements incident to an edge together with the local edge slot the edge
/// occupies in each. Boundary edges have count == 1.
struct EdgeAdjacency {
  std::array<int, 2> elements{-1, -1};
  std::array<int, 2> local{-1, -1};
  int count = 0;
};

/// Conforming triangular mesh with derived edge topology.
///
/// Triangles are stored counterclockwise; local edge i of a triangle is the
/// edge opposite its local vertex i, traversed from vertex i+1 to vertex i+2.
/// Interior edges are numbered before boundary edges, each class sorted by
/// (min vertex, max vertex). Immutable after construction.
class TriMesh {
 public:
  using Triangle = std::array<int, 3>;
  using EdgeVertices = std::array<int, 2>;

  /// Validates connectivity and builds edges. Clockwise triangles are
  /// reoriented in place and counted (see reoriented_count()).
  TriMesh(std::vector<Point> vertices, std::vector<Triangle> triangles);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_elements() const { return static_cast<int>(triangles_.size()); }
  int num_interior_edges() const { return static_cast<int>(interior_edges_.size()); }
  int num_boundary_edges() const { return static_cast<int>(boundary_edges_.size()); }
  int num_edges() const { return num_interior_edges() + num_boundary_edges(); }

  std::span<const Point> vertices() const { return vertices_; }
  std::span<const Triangle> triangles() const { return triangles_; }
  std::span<const EdgeVertices> interior_edges() const { return interior_edges_; }
  std::span<const EdgeVertices> boundary_edges() const { return boundary_edges_; }

  const Point& vertex(int v) const { return vertices_[static_cast<std::size_t>(v)]; }
  const Triangle& triangle(int k) const { return triangles_[static_cast<std::size_t>(k)]; }
  std::array<Point, 3> triangle_points(int k) const;

  const std::array<EdgeRef, 3>& element_edges(int k) const {
    return element_edges_[static_cast<std::size_t>(k)];
  }
  const EdgeAdjacency& edge_elements(EdgeRef edge) const;
  const EdgeVertices& edge_vertices(EdgeRef edge) const;

  /// Number of input triangles that arrived clockwise and were flipped.
  int reoriented_count() const { return reoriented_; }

 private:
  void build_topology();

  std::vector<Point> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<EdgeVertices> interior_edges_;
  std::vector<EdgeVertices> boundary_edges_;
  std::vector<EdgeAdjacency> interior_adjacency_;
  std::vector<EdgeAdjacency> boundary_adjacency_;
  std::vector<std::array<EdgeRef, 3>> element_edges_;
  int reoriented_ = 0;
};

/// Geometric data of one triangle. Local edge i is opposite vertex i.
struct ElementGeometry {
  std::array<Point, 3> vertices;
  double area = 0.0;
  Point centroid = Point::Zero();
  std::array<double, 3> edge_lengths{};
  /// Unit outward normals per local edge.
  std::array<Point, 3> normals;
  /// Longest edge length h_K.
  double diameter = 0.0;
  /// Integral over K of (x - x_K)(x - x_K)^T, exact.
  Eigen::Matrix2d second_moment = Eigen::Matrix2d::Zero();
  /// ||x - x_K||^2 over K, i.e. the trace of second_moment.
  double centroid_moment = 0.0;
  /// C_K = 2|K| / ||x - x_K||^2_K.
  double c_k = 0.0;

  /// |e_i| n_i, the scaled outward normal of local edge i.
  Point scaled_normal(int i) const {
    return edge_lengths[static_cast<std::size_t>(i)] * normals[static_cast<std::size_t>(i)];
  }
  /// Unit direction of local edge i in counterclockwise traversal.
  Point edge_direction(int i) const;
};

/// Geometry of a counterclockwise triangle. Throws DegenerateElement when the
/// area is below 1e-14 h_K^2 or the orientation is clockwise.
ElementGeometry triangle_geometry(const std::array<Point, 3>& vertices, int element = -1);
ElementGeometry element_geometry(const TriMesh& mesh, int element);

TriMesh generate_structured(MeshKind kind, int nx, int ny, const Rect& domain);

/// Text mesh format: `V T`, then V lines `x y`, then T lines `i j k`
/// (0-based). Lines starting with '#' are comments.
TriMesh read_mesh(std::istream& in);
TriMesh import_mesh(const std::string& path);
void write_mesh(const TriMesh& mesh, std::ostream& out);
void export_mesh(const TriMesh& mesh, const std::string& path);

}  // namespace wgdmp
