#include "wgdmp/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "wgdmp/error.hpp"

namespace wgdmp {
namespace {

constexpr double kDegenerateRatio = 1e-14;

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

double longest_edge_squared(const Point& a, const Point& b, const Point& c) {
  return std::max({(b - a).squaredNorm(), (c - b).squaredNorm(), (a - c).squaredNorm()});
}

std::string element_label(int element) {
  return element < 0 ? std::string("triangle") : "element " + std::to_string(element);
}

}  // namespace

const char* to_string(MeshKind kind) {
  switch (kind) {
    case MeshKind::kMesh45: return "mesh45";
    case MeshKind::kMesh90: return "mesh90";
    case MeshKind::kMesh135: return "mesh135";
  }
  return "unknown";
}

MeshKind parse_mesh_kind(const std::string& name) {
  if (name == "mesh45") return MeshKind::kMesh45;
  if (name == "mesh90") return MeshKind::kMesh90;
  if (name == "mesh135") return MeshKind::kMesh135;
  throw InvalidArgument("unknown mesh kind '" + name + "' (expected mesh45, mesh90 or mesh135)");
}

TriMesh::TriMesh(std::vector<Point> vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  if (vertices_.empty() || triangles_.empty()) {
    throw ValidationError("mesh needs at least one vertex and one triangle");
  }
  const int nv = num_vertices();
  std::set<Triangle> seen;
  for (std::size_t k = 0; k < triangles_.size(); ++k) {
    Triangle& t = triangles_[k];
    for (int v : t) {
      if (v < 0 || v >= nv) {
        throw ValidationError("triangle " + std::to_string(k) + " references vertex " +
                              std::to_string(v) + " outside [0, " + std::to_string(nv) + ")");
      }
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw ValidationError("triangle " + std::to_string(k) + " repeats a vertex");
    }
    Triangle key = t;
    std::sort(key.begin(), key.end());
    if (!seen.insert(key).second) {
      throw ValidationError("triangle " + std::to_string(k) + " duplicates an earlier triangle");
    }
    const Point& a = vertices_[static_cast<std::size_t>(t[0])];
    const Point& b = vertices_[static_cast<std::size_t>(t[1])];
    const Point& c = vertices_[static_cast<std::size_t>(t[2])];
    const double area = signed_area(a, b, c);
    if (std::abs(area) < kDegenerateRatio * longest_edge_squared(a, b, c)) {
      throw DegenerateElement(static_cast<int>(k),
                              "element " + std::to_string(k) + " has (near) zero area");
    }
    if (area < 0.0) {
      std::swap(t[1], t[2]);
      ++reoriented_;
    }
  }
  build_topology();
}

void TriMesh::build_topology() {
  std::map<EdgeVertices, EdgeAdjacency> incidence;
  for (int k = 0; k < num_elements(); ++k) {
    const Triangle& t = triangle(k);
    for (int i = 0; i < 3; ++i) {
      const int a = t[static_cast<std::size_t>((i + 1) % 3)];
      const int b = t[static_cast<std::size_t>((i + 2) % 3)];
      EdgeAdjacency& adj = incidence[{std::min(a, b), std::max(a, b)}];
      if (adj.count == 2) {
        throw ValidationError("edge (" + std::to_string(std::min(a, b)) + ", " +
                              std::to_string(std::max(a, b)) +
                              ") is shared by more than two triangles");
      }
      adj.elements[static_cast<std::size_t>(adj.count)] = k;
      adj.local[static_cast<std::size_t>(adj.count)] = i;
      ++adj.count;
    }
  }

  // std::map iterates in lexicographic (min, max) order, which fixes the
  // numbering within each class.
  std::map<EdgeVertices, EdgeRef> refs;
  for (const auto& [key, adj] : incidence) {
    if (adj.count == 2) {
      refs[key] = {EdgeKind::kInterior, num_interior_edges(), false};
      interior_edges_.push_back(key);
      interior_adjacency_.push_back(adj);
    } else {
      refs[key] = {EdgeKind::kBoundary, num_boundary_edges(), false};
      boundary_edges_.push_back(key);
      boundary_adjacency_.push_back(adj);
    }
  }

  element_edges_.resize(triangles_.size());
  for (int k = 0; k < num_elements(); ++k) {
    const Triangle& t = triangle(k);
    for (int i = 0; i < 3; ++i) {
      const int a = t[static_cast<std::size_t>((i + 1) % 3)];
      const int b = t[static_cast<std::size_t>((i + 2) % 3)];
      EdgeRef ref = refs.at({std::min(a, b), std::max(a, b)});
      ref.reversed = a > b;
      element_edges_[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = ref;
    }
  }

  // Connected, hole-free meshes satisfy V - E + T = 1.
  const long euler = static_cast<long>(num_vertices()) - num_edges() + num_elements();
  if (euler != 1) {
    throw ValidationError("mesh violates V - E + T + 1 = 2 (got V - E + T = " +
                          std::to_string(euler) + "); it must be connected without holes");
  }
}

std::array<Point, 3> TriMesh::triangle_points(int k) const {
  const Triangle& t = triangle(k);
  return {vertex(t[0]), vertex(t[1]), vertex(t[2])};
}

const EdgeAdjacency& TriMesh::edge_elements(EdgeRef edge) const {
  const auto i = static_cast<std::size_t>(edge.index);
  return edge.interior() ? interior_adjacency_.at(i) : boundary_adjacency_.at(i);
}

const TriMesh::EdgeVertices& TriMesh::edge_vertices(EdgeRef edge) const {
  const auto i = static_cast<std::size_t>(edge.index);
  return edge.interior() ? interior_edges_.at(i) : boundary_edges_.at(i);
}

Point ElementGeometry::edge_direction(int i) const {
  const Point& a = vertices[static_cast<std::size_t>((i + 1) % 3)];
  const Point& b = vertices[static_cast<std::size_t>((i + 2) % 3)];
  return (b - a) / edge_lengths[static_cast<std::size_t>(i)];
}

ElementGeometry triangle_geometry(const std::array<Point, 3>& vertices, int element) {
  ElementGeometry g;
  g.vertices = vertices;
  const double area = signed_area(vertices[0], vertices[1], vertices[2]);
  const double h2 = longest_edge_squared(vertices[0], vertices[1], vertices[2]);
  if (!(std::abs(area) >= kDegenerateRatio * h2) || h2 == 0.0) {
    throw DegenerateElement(element, element_label(element) + " is degenerate");
  }
  if (area < 0.0) {
    throw DegenerateElement(element, element_label(element) + " is clockwise");
  }
  g.area = area;
  g.centroid = (vertices[0] + vertices[1] + vertices[2]) / 3.0;
  g.diameter = std::sqrt(h2);

  for (int i = 0; i < 3; ++i) {
    const Point d = vertices[static_cast<std::size_t>((i + 2) % 3)] -
                    vertices[static_cast<std::size_t>((i + 1) % 3)];
    const double len = d.norm();
    g.edge_lengths[static_cast<std::size_t>(i)] = len;
    // Rotating a counterclockwise edge direction clockwise points outward.
    g.normals[static_cast<std::size_t>(i)] = Point(d.y(), -d.x()) / len;
  }

  // For a triangle, int_K (x-x_K)(x-x_K)^T = |K|/12 * sum_v d_v d_v^T with
  // d_v the vertex offsets from the centroid (they sum to zero).
  Eigen::Matrix2d j = Eigen::Matrix2d::Zero();
  for (const Point& v : vertices) {
    const Point d = v - g.centroid;
    j += d * d.transpose();
  }
  g.second_moment = (area / 12.0) * j;
  g.centroid_moment = g.second_moment.trace();
  g.c_k = 2.0 * area / g.centroid_moment;
  return g;
}

ElementGeometry element_geometry(const TriMesh& mesh, int element) {
  if (element < 0 || element >= mesh.num_elements()) {
    throw InvalidArgument("element index " + std::to_string(element) + " out of range");
  }
  return triangle_geometry(mesh.triangle_points(element), element);
}

TriMesh generate_structured(MeshKind kind, int nx, int ny, const Rect& domain) {
  if (nx < 1 || ny < 1) {
    throw InvalidArgument("structured mesh needs nx, ny >= 1");
  }
  if (!(domain.x_max > domain.x_min) || !(domain.y_max > domain.y_min)) {
    throw InvalidArgument("structured mesh domain is degenerate");
  }
  const double hx = (domain.x_max - domain.x_min) / nx;
  const double hy = (domain.y_max - domain.y_min) / ny;
  auto xcoord = [&](int i) { return i == nx ? domain.x_max : domain.x_min + i * hx; };
  auto ycoord = [&](int j) { return j == ny ? domain.y_max : domain.y_min + j * hy; };

  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1) +
                                            (kind == MeshKind::kMesh90 ? nx * ny : 0)));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) vertices.emplace_back(xcoord(i), ycoord(j));
  }
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };

  std::vector<TriMesh::Triangle> triangles;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int ll = id(i, j), lr = id(i + 1, j), ur = id(i + 1, j + 1), ul = id(i, j + 1);
      switch (kind) {
        case MeshKind::kMesh45:
          triangles.push_back({ll, lr, ur});
          triangles.push_back({ll, ur, ul});
          break;
        case MeshKind::kMesh135:
          triangles.push_back({ll, lr, ul});
          triangles.push_back({lr, ur, ul});
          break;
        case MeshKind::kMesh90: {
          const int c = static_cast<int>(vertices.size());
          vertices.emplace_back(0.5 * (xcoord(i) + xcoord(i + 1)), 0.5 * (ycoord(j) + ycoord(j + 1)));
          triangles.push_back({ll, lr, c});
          triangles.push_back({lr, ur, c});
          triangles.push_back({ur, ul, c});
          triangles.push_back({ul, ll, c});
          break;
        }
      }
    }
  }
  return TriMesh(std::move(vertices), std::move(triangles));
}

namespace {

// Reads the next non-comment, non-blank line into `line`.
bool next_data_line(std::istream& in, std::string& line, int& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    return true;
  }
  return false;
}

template <typename... T>
void parse_fields(const std::string& line, int line_no, T&... out) {
  std::istringstream ss(line);
  ss.imbue(std::locale::classic());
  ((ss >> out), ...);
  std::string rest;
  if (ss.fail() || (ss >> rest)) {
    throw ParseError("line " + std::to_string(line_no) + ": expected " +
                     std::to_string(sizeof...(T)) + " numeric fields, got '" + line + "'");
  }
}

}  // namespace

TriMesh read_mesh(std::istream& in) {
  std::string line;
  int line_no = 0;
  if (!next_data_line(in, line, line_no)) throw ParseError("empty mesh file");
  long nv = 0, nt = 0;
  parse_fields(line, line_no, nv, nt);
  if (nv <= 0 || nt <= 0) throw ParseError("mesh header counts must be positive");

  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>(nv));
  for (long v = 0; v < nv; ++v) {
    if (!next_data_line(in, line, line_no)) {
      throw ParseError("file ends after " + std::to_string(v) + " of " + std::to_string(nv) +
                       " vertices");
    }
    double x = 0, y = 0;
    parse_fields(line, line_no, x, y);
    if (!std::isfinite(x) || !std::isfinite(y)) {
      throw ParseError("line " + std::to_string(line_no) + ": non-finite coordinate");
    }
    vertices.emplace_back(x, y);
  }

  std::vector<TriMesh::Triangle> triangles;
  triangles.reserve(static_cast<std::size_t>(nt));
  for (long k = 0; k < nt; ++k) {
    if (!next_data_line(in, line, line_no)) {
      throw ParseError("file ends after " + std::to_string(k) + " of " + std::to_string(nt) +
                       " triangles");
    }
    long a = 0, b = 0, c = 0;
    parse_fields(line, line_no, a, b, c);
    auto narrow = [&](long v) {
      if (v < 0 || v >= nv) {
        throw ValidationError("line " + std::to_string(line_no) + ": vertex index " +
                              std::to_string(v) + " outside [0, " + std::to_string(nv) + ")");
      }
      return static_cast<int>(v);
    };
    triangles.push_back({narrow(a), narrow(b), narrow(c)});
  }
  if (next_data_line(in, line, line_no)) {
    throw ParseError("line " + std::to_string(line_no) + ": trailing data after triangles");
  }
  return TriMesh(std::move(vertices), std::move(triangles));
}

TriMesh import_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mesh file '" + path + "'");
  return read_mesh(in);
}

void write_mesh(const TriMesh& mesh, std::ostream& out) {
  out.imbue(std::locale::classic());
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << mesh.num_vertices() << ' ' << mesh.num_elements() << '\n';
  for (const Point& p : mesh.vertices()) out << p.x() << ' ' << p.y() << '\n';
  for (const auto& t : mesh.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

void export_mesh(const TriMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write mesh file '" + path + "'");
  write_mesh(mesh, out);
}

}  // namespace wgdmp
