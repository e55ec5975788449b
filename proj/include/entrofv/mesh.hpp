#pragma once

// Admissible orthogonal meshes for two-point flux schemes.
//
// A Mesh is the cell/edge incidence graph together with the measures and
// distances consumed by TPFA fluxes. Meshes built from polygons also keep
// their vertex geometry, which refinement and boundary-data sampling need;
// meshes loaded from a bare TPFA-graph file do not.

#include "entrofv/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace entrofv {

enum class EdgeTag
{
  Interior,
  Dirichlet,
  Neumann
};

inline char tag_letter(EdgeTag t)
{
  switch (t) {
    case EdgeTag::Interior: return 'I';
    case EdgeTag::Dirichlet: return 'D';
    case EdgeTag::Neumann: return 'N';
  }
  return '?';
}

struct Segment
{
  Point2 a;
  Point2 b;

  double length() const { return distance(a, b); }
  Point2 midpoint() const { return 0.5 * (a + b); }
  Point2 project(Point2 p) const
  {
    const Point2 d = b - a;
    const double s = dot(p - a, d) / dot(d, d);
    return a + s * d;
  }
  bool contains(Point2 p, double tol = 1e-12) const
  {
    const Point2 d = b - a;
    const double len = norm(d);
    if (std::abs(cross(d, p - a)) > tol * std::max(1.0, len)) return false;
    const double s = dot(p - a, d) / (len * len);
    return s >= -tol && s <= 1.0 + tol;
  }
};

struct Cell
{
  double measure = 0.0;
  Point2 center;
  std::vector<Index> edges;
};

struct Edge
{
  double measure = 0.0;
  double dist = 0.0;  // d_sigma
  EdgeTag tag = EdgeTag::Interior;
  std::array<Index, 2> cells{-1, -1};
  std::array<double, 2> cell_dist{0.0, 0.0};  // d_{K,sigma} for cells[0], cells[1]
  double transmissibility = 0.0;
  std::optional<Segment> segment;

  bool interior() const { return tag == EdgeTag::Interior; }
  int cell_count() const { return (cells[0] >= 0) + (cells[1] >= 0); }

  /// 0 or 1 for an incident cell, -1 otherwise.
  int side_of(Index cell) const
  {
    if (cells[0] == cell) return 0;
    if (cells[1] == cell) return 1;
    return -1;
  }
};

/// Assignment of exterior edges to Dirichlet or Neumann parts of the boundary.
/// Each piece is a closed segment; an exterior edge takes the tag of the
/// unique piece containing its midpoint.
struct BoundarySpec
{
  struct Piece
  {
    Segment segment;
    EdgeTag tag = EdgeTag::Neumann;
  };
  std::vector<Piece> pieces;

  enum Side : unsigned
  {
    Left = 1,
    Right = 2,
    Bottom = 4,
    Top = 8
  };

  /// Unit square with the listed sides Dirichlet and the others Neumann.
  static BoundarySpec unit_square(unsigned dirichlet_sides)
  {
    BoundarySpec spec;
    const auto add = [&](Side side, Point2 a, Point2 b) {
      spec.pieces.push_back({{a, b}, (dirichlet_sides & side) ? EdgeTag::Dirichlet : EdgeTag::Neumann});
    };
    add(Left, {0, 0}, {0, 1});
    add(Right, {1, 0}, {1, 1});
    add(Bottom, {0, 0}, {1, 0});
    add(Top, {0, 1}, {1, 1});
    return spec;
  }

  std::optional<EdgeTag> classify(Point2 midpoint) const
  {
    std::optional<EdgeTag> found;
    for (const auto& piece : pieces) {
      if (!piece.segment.contains(midpoint)) continue;
      if (found && *found != piece.tag) return std::nullopt;
      found = piece.tag;
    }
    return found;
  }
};

namespace detail {

inline double polygon_area(const std::vector<Point2>& poly)
{
  double a = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) a += cross(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * a;
}

/// Distance from p to the line of seg, positive on the side of `inside`.
inline double signed_distance(const Segment& seg, Point2 p, Point2 inside)
{
  const Point2 d = seg.b - seg.a;
  const double len = norm(d);
  const double sp = cross(d, p - seg.a) / len;
  const double si = cross(d, inside - seg.a);
  return si >= 0 ? sp : -sp;
}

inline Point2 polygon_centroid(const std::vector<Point2>& poly)
{
  double a = 0, cx = 0, cy = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point2 p = poly[i], q = poly[(i + 1) % poly.size()];
    const double w = cross(p, q);
    a += w;
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  return {cx / (3 * a), cy / (3 * a)};
}

inline std::pair<std::int64_t, std::int64_t> weld_key(Point2 p)
{
  constexpr double scale = 4294967296.0;  // 2^32
  return {std::llround(p.x * scale), std::llround(p.y * scale)};
}

}  // namespace detail

/// Refinement was requested on a mesh it does not apply to.
class GeometryError : public Error
{
public:
  using Error::Error;
};

class Mesh
{
public:
  Mesh() = default;

  /// Graph-only constructor; cell edge lists are rebuilt from the edges.
  Mesh(std::vector<Cell> cells, std::vector<Edge> edges, double xi, double domain_measure)
    : cells_(std::move(cells)), edges_(std::move(edges)), xi_(xi), domain_measure_(domain_measure)
  {
    for (auto& c : cells_) c.edges.clear();
    for (std::size_t e = 0; e < edges_.size(); ++e)
      for (Index k : edges_[e].cells)
        if (k >= 0 && k < static_cast<Index>(cells_.size())) cells_[k].edges.push_back(static_cast<Index>(e));
  }

  /// Builds the mesh of a polygonal tiling. `centers` are the cell points
  /// x_K; vertices closer than ~1e-10 are merged.
  static Mesh from_polygons(std::vector<std::vector<Point2>> polygons,
                            std::vector<Point2> centers,
                            BoundarySpec boundary,
                            std::optional<double> domain_measure = std::nullopt);

  std::size_t num_cells() const { return cells_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Cell& cell(Index k) const { return cells_[k]; }
  const Edge& edge(Index e) const { return edges_[e]; }
  double xi() const { return xi_; }
  double domain_measure() const { return domain_measure_; }

  bool has_geometry() const { return !polygons_.empty(); }
  const std::vector<std::vector<Point2>>& polygons() const { return polygons_; }
  const std::optional<BoundarySpec>& boundary() const { return boundary_; }

  /// Centroid of the cell polygon, or the cell center without geometry.
  Point2 centroid(Index k) const
  {
    if (!has_geometry()) return cells_[k].center;
    return detail::polygon_centroid(polygons_[k]);
  }

  /// Orthogonal projection x_sigma of the center of `cell` on edge `e`.
  Point2 projection(Index cell, Index e) const
  {
    const auto& seg = edges_[e].segment;
    if (!seg) throw GeometryError("edge " + std::to_string(e) + " has no geometry");
    return seg->project(cells_[cell].center);
  }

  std::size_t count(EdgeTag tag) const
  {
    return static_cast<std::size_t>(
      std::count_if(edges_.begin(), edges_.end(), [tag](const Edge& e) { return e.tag == tag; }));
  }

  /// Smallest ratio d_{K,sigma}/d_sigma over all incidences.
  static double compute_xi(const std::vector<Edge>& edges)
  {
    double xi = std::numeric_limits<double>::infinity();
    for (const auto& e : edges)
      for (int s = 0; s < e.cell_count(); ++s) xi = std::min(xi, e.cell_dist[s] / e.dist);
    return xi;
  }

private:
  std::vector<Cell> cells_;
  std::vector<Edge> edges_;
  double xi_ = 0.0;
  double domain_measure_ = 0.0;
  std::vector<std::vector<Point2>> polygons_;
  std::optional<BoundarySpec> boundary_;
};


inline Mesh Mesh::from_polygons(std::vector<std::vector<Point2>> polygons,
                                std::vector<Point2> centers,
                                BoundarySpec boundary,
                                std::optional<double> domain_measure)
{
  if (polygons.size() != centers.size()) throw DataError("polygon and center counts differ");

  std::map<std::pair<std::int64_t, std::int64_t>, Index> vertex_ids;
  std::vector<std::vector<Index>> cell_vertices(polygons.size());
  for (std::size_t k = 0; k < polygons.size(); ++k) {
    if (detail::polygon_area(polygons[k]) < 0) std::reverse(polygons[k].begin(), polygons[k].end());
    for (const Point2& p : polygons[k]) {
      auto [it, fresh] = vertex_ids.try_emplace(detail::weld_key(p), static_cast<Index>(vertex_ids.size()));
      cell_vertices[k].push_back(it->second);
    }
  }

  Mesh mesh;
  mesh.cells_.resize(polygons.size());
  std::map<std::pair<Index, Index>, Index> edge_ids;
  for (std::size_t k = 0; k < polygons.size(); ++k) {
    Cell& cell = mesh.cells_[k];
    cell.measure = detail::polygon_area(polygons[k]);
    cell.center = centers[k];
    const auto& vs = cell_vertices[k];
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const std::size_t j = (i + 1) % vs.size();
      const auto key = std::minmax(vs[i], vs[j]);
      auto [it, fresh] = edge_ids.try_emplace({key.first, key.second}, static_cast<Index>(mesh.edges_.size()));
      if (fresh) {
        Edge e;
        e.segment = Segment{polygons[k][i], polygons[k][j]};
        e.measure = e.segment->length();
        e.cells[0] = static_cast<Index>(k);
        mesh.edges_.push_back(e);
      } else {
        Edge& e = mesh.edges_[it->second];
        if (e.cells[1] >= 0) throw DataError("edge shared by more than two cells");
        e.cells[1] = static_cast<Index>(k);
      }
      cell.edges.push_back(it->second);
    }
  }

  for (std::size_t ei = 0; ei < mesh.edges_.size(); ++ei) {
    Edge& e = mesh.edges_[ei];
    for (int s = 0; s < e.cell_count(); ++s) {
      const Index k = e.cells[s];
      e.cell_dist[s] = detail::signed_distance(*e.segment, mesh.cells_[k].center, detail::polygon_centroid(polygons[k]));
    }
    if (e.cell_count() == 2) {
      e.tag = EdgeTag::Interior;
      e.dist = distance(mesh.cells_[e.cells[0]].center, mesh.cells_[e.cells[1]].center);
    } else {
      const auto tag = boundary.classify(e.segment->midpoint());
      if (!tag || *tag == EdgeTag::Interior)
        throw DataError("boundary specification does not assign exactly one tag to exterior edge " +
                        std::to_string(ei));
      e.tag = *tag;
      e.dist = std::abs(e.cell_dist[0]);
    }
    e.transmissibility = e.measure / e.dist;
  }

  double total = 0;
  for (auto& c : mesh.cells_) {
    std::sort(c.edges.begin(), c.edges.end());
    total += c.measure;
  }
  mesh.domain_measure_ = domain_measure.value_or(total);
  mesh.xi_ = compute_xi(mesh.edges_);
  mesh.polygons_ = std::move(polygons);
  mesh.boundary_ = std::move(boundary);
  return mesh;
}

/// Circumcenter of a triangle.
inline Point2 circumcenter(Point2 a, Point2 b, Point2 c)
{
  const double d = 2 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
  const double a2 = dot(a, a), b2 = dot(b, b), c2 = dot(c, c);
  return {(a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d,
          (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d};
}

namespace detail {

struct PolygonSet
{
  std::vector<std::vector<Point2>> polygons;
  std::vector<Point2> centers;
};

/// Quarter tile of the reference mesh: 14 triangles covering the unit square.
inline PolygonSet reference_tile()
{
  static constexpr std::array<Point2, 12> v{{{0.0, 0.0},
                                             {0.5, 0.0},
                                             {1.0, 0.0},
                                             {0.3, 0.3},
                                             {0.65, 0.35},
                                             {0.0, 0.5},
                                             {1.0, 0.5},
                                             {0.35, 0.65},
                                             {0.7, 0.7},
                                             {0.0, 1.0},
                                             {0.5, 1.0},
                                             {1.0, 1.0}}};
  static constexpr std::array<std::array<int, 3>, 14> tri{{{0, 1, 3},
                                                           {1, 2, 4},
                                                           {3, 1, 4},
                                                           {0, 3, 5},
                                                           {4, 2, 6},
                                                           {3, 4, 7},
                                                           {5, 3, 7},
                                                           {4, 6, 8},
                                                           {7, 4, 8},
                                                           {5, 7, 9},
                                                           {8, 6, 11},
                                                           {7, 8, 10},
                                                           {9, 7, 10},
                                                           {10, 8, 11}}};
  PolygonSet set;
  for (const auto& t : tri) {
    set.polygons.push_back({v[t[0]], v[t[1]], v[t[2]]});
    set.centers.push_back(circumcenter(v[t[0]], v[t[1]], v[t[2]]));
  }
  return set;
}

/// 2x2 grid of copies of the set contracted by 1/2.
inline PolygonSet refine_polygons(const PolygonSet& in)
{
  PolygonSet out;
  out.polygons.reserve(4 * in.polygons.size());
  out.centers.reserve(4 * in.centers.size());
  for (int iy = 0; iy < 2; ++iy) {
    for (int ix = 0; ix < 2; ++ix) {
      const Point2 shift{0.5 * ix, 0.5 * iy};
      for (std::size_t k = 0; k < in.polygons.size(); ++k) {
        std::vector<Point2> poly;
        for (const Point2& p : in.polygons[k]) poly.push_back(0.5 * p + shift);
        out.polygons.push_back(std::move(poly));
        out.centers.push_back(0.5 * in.centers[k] + shift);
      }
    }
  }
  return out;
}

}  // namespace detail

inline constexpr int max_reference_level = 8;

/// Level-`level` member of the reference family on the unit square:
/// 56 * 4^level triangles with circumcenters, mesh size 2^-(level+2).
inline Mesh reference_mesh(int level, const BoundarySpec& boundary)
{
  if (level < 0 || level > max_reference_level)
    throw DataError("reference mesh level must be in [0, " + std::to_string(max_reference_level) + "], got " +
                    std::to_string(level));
  auto set = detail::refine_polygons(detail::reference_tile());
  for (int l = 0; l < level; ++l) set = detail::refine_polygons(set);
  return Mesh::from_polygons(std::move(set.polygons), std::move(set.centers), boundary, 1.0);
}

/// Cell count of reference_mesh(level).
inline std::size_t reference_cell_count(int level) { return std::size_t{56} << (2 * level); }

/// Four copies of the mesh contracted by 1/2, tagged by the mesh's own
/// boundary specification.
inline Mesh refine(const Mesh& mesh)
{
  if (!mesh.has_geometry() || !mesh.boundary())
    throw GeometryError("refinement needs vertex geometry and a boundary specification");
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& poly : mesh.polygons())
    for (const Point2& p : poly) {
      xmin = std::min(xmin, p.x), xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y), ymax = std::max(ymax, p.y);
    }
  const double tol = 1e-12;
  if (std::abs(xmin) > tol || std::abs(ymin) > tol || std::abs(xmax - 1) > tol || std::abs(ymax - 1) > tol ||
      std::abs(mesh.domain_measure() - 1) > tol)
    throw GeometryError("refinement is only supported on meshes of the unit square");
  detail::PolygonSet set{mesh.polygons(), {}};
  for (const auto& c : mesh.cells()) set.centers.push_back(c.center);
  set = detail::refine_polygons(set);
  return Mesh::from_polygons(std::move(set.polygons), std::move(set.centers), *mesh.boundary(), 1.0);
}

// ---------------------------------------------------------------------------
// Admissibility

struct Violation
{
  std::string hypothesis;  // "H1", "H2", "H3", "incidence", "connectivity", "transmissibility", "measure"
  std::vector<Index> cells;
  std::vector<Index> edges;
  std::string message;
};

struct AdmissibilityReport
{
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool cites(std::string_view hypothesis) const
  {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.hypothesis == hypothesis; });
  }
  const Violation* find(std::string_view hypothesis) const
  {
    for (const auto& v : violations)
      if (v.hypothesis == hypothesis) return &v;
    return nullptr;
  }
};

inline constexpr double orthogonality_tolerance = 1e-10;
inline constexpr double measure_tolerance = 1e-12;

inline AdmissibilityReport validate(const Mesh& mesh)
{
  AdmissibilityReport report;
  const auto rel_close = [](double a, double b) {
    return std::abs(a - b) <= measure_tolerance * std::max({1.0, std::abs(a), std::abs(b)});
  };
  const Index nc = static_cast<Index>(mesh.num_cells());

  Violation incidence{"incidence", {}, {}, "edges with wrong number of incident cells"};
  Violation transmissibility{"transmissibility", {}, {}, "tau != m(sigma)/d_sigma or non-positive distance"};
  Violation h2{"H2", {}, {}, "center segment not orthogonal to the edge"};
  Violation h3{"H3", {}, {}, "d_{K,sigma} < xi * d_sigma"};
  bool has_dirichlet = false;

  for (Index ei = 0; ei < static_cast<Index>(mesh.num_edges()); ++ei) {
    const Edge& e = mesh.edge(ei);
    const int expected = e.interior() ? 2 : 1;
    bool cells_ok = e.cell_count() == expected;
    for (int s = 0; s < e.cell_count(); ++s) cells_ok = cells_ok && e.cells[s] < nc;
    if (!cells_ok || e.cells[0] < 0) {
      incidence.edges.push_back(ei);
      continue;
    }
    if (e.tag == EdgeTag::Dirichlet && e.measure > 0) has_dirichlet = true;
    if (!(e.dist > 0) || !(e.measure > 0) || !rel_close(e.transmissibility, e.measure / e.dist))
      transmissibility.edges.push_back(ei);
    for (int s = 0; s < e.cell_count(); ++s)
      if (!(mesh.xi() > 0) || e.cell_dist[s] < mesh.xi() * e.dist * (1 - measure_tolerance)) {
        h3.edges.push_back(ei);
        h3.cells.push_back(e.cells[s]);
      }
    if (e.interior()) {
      const Point2 xk = mesh.cell(e.cells[0]).center, xl = mesh.cell(e.cells[1]).center;
      bool orthogonal = true;
      if (e.segment) {
        const Point2 t = e.segment->b - e.segment->a;
        const Point2 n = xl - xk;
        orthogonal = std::abs(dot(t, n)) <= orthogonality_tolerance * norm(t) * norm(n);
      } else {
        // Without vertex geometry: both centers must lie on one normal line.
        orthogonal = rel_close(e.dist, distance(xk, xl)) && rel_close(e.cell_dist[0] + e.cell_dist[1], e.dist);
      }
      if (!orthogonal) {
        h2.edges.push_back(ei);
        h2.cells.push_back(e.cells[0]);
        h2.cells.push_back(e.cells[1]);
      }
    }
  }
  for (auto* v : {&incidence, &transmissibility, &h2, &h3})
    if (!v->edges.empty()) report.violations.push_back(std::move(*v));

  if (!has_dirichlet)
    report.violations.push_back({"H1", {}, {}, "no Dirichlet edge of positive measure"});

  // Connectivity of the cell adjacency graph.
  if (nc > 0) {
    std::vector<char> seen(nc, 0);
    std::queue<Index> todo;
    todo.push(0);
    seen[0] = 1;
    while (!todo.empty()) {
      const Index k = todo.front();
      todo.pop();
      for (Index ei : mesh.cell(k).edges) {
        const Edge& e = mesh.edge(ei);
        if (e.cell_count() != 2) continue;
        const Index l = e.cells[0] == k ? e.cells[1] : e.cells[0];
        if (l >= 0 && l < nc && !seen[l]) seen[l] = 1, todo.push(l);
      }
    }
    Violation conn{"connectivity", {}, {}, "cells unreachable from cell 0"};
    for (Index k = 0; k < nc; ++k)
      if (!seen[k]) conn.cells.push_back(k);
    if (!conn.cells.empty()) report.violations.push_back(std::move(conn));
  }

  double total = 0;
  Violation measure{"measure", {}, {}, "non-positive cell measure or total != domain measure"};
  for (Index k = 0; k < nc; ++k) {
    total += mesh.cell(k).measure;
    if (!(mesh.cell(k).measure > 0)) measure.cells.push_back(k);
  }
  if (!measure.cells.empty() || !rel_close(total, mesh.domain_measure()))
    report.violations.push_back(std::move(measure));
  return report;
}

/// Field-by-field comparison of the TPFA graphs of two meshes.
inline bool same_graph(const Mesh& a, const Mesh& b, double tol = 1e-15)
{
  const auto close = [tol](double x, double y) { return std::abs(x - y) <= tol * std::max(1.0, std::abs(x)); };
  if (a.num_cells() != b.num_cells() || a.num_edges() != b.num_edges()) return false;
  if (!close(a.xi(), b.xi()) || !close(a.domain_measure(), b.domain_measure())) return false;
  for (std::size_t k = 0; k < a.num_cells(); ++k) {
    const Cell &x = a.cells()[k], &y = b.cells()[k];
    if (!close(x.measure, y.measure) || !close(x.center.x, y.center.x) || !close(x.center.y, y.center.y) ||
        x.edges != y.edges)
      return false;
  }
  for (std::size_t e = 0; e < a.num_edges(); ++e) {
    const Edge &x = a.edges()[e], &y = b.edges()[e];
    if (x.tag != y.tag || x.cells != y.cells || !close(x.measure, y.measure) || !close(x.dist, y.dist) ||
        !close(x.transmissibility, y.transmissibility) || !close(x.cell_dist[0], y.cell_dist[0]) ||
        !close(x.cell_dist[1], y.cell_dist[1]))
      return false;
  }
  return true;
}

}  // namespace entrofv
