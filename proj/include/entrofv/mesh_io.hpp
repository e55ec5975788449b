#pragma once

// TPFA-graph text format.
//
//   tpfa 1
//   cells N
//   <id> <m(K)> <x> <y>                                  (N lines)
//   edges M
//   <id> <m(s)> <d_s> <tag> <cellA> [cellB] <d_A> [d_B]  (M lines, tag in I/D/N)
//   xi <value>
//
// '#' starts a comment. Lines starting with "#@" are geometry annotations
// written for meshes that carry vertex geometry:
//
//   #@ poly <cell> <x1> <y1> <x2> <y2> ...
//   #@ bc <D|N> <ax> <ay> <bx> <by>
//
// Plain readers skip them as comments; load_mesh uses them to restore the
// geometry so the loaded mesh can be refined.

#include "entrofv/mesh.hpp"

#include <charconv>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace entrofv {

namespace detail {

inline std::string fmt_double(double v)
{
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::vector<std::string_view> split_ws(std::string_view line)
{
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t j = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > j) out.push_back(line.substr(j, i - j));
  }
  return out;
}

inline double parse_double(std::string_view tok, std::size_t line)
{
  double v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw ParseError(line, "expected a number, got '" + std::string(tok) + "'");
  return v;
}

inline Index parse_index(std::string_view tok, std::size_t line)
{
  long long v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || v < 0)
    throw ParseError(line, "expected a non-negative integer, got '" + std::string(tok) + "'");
  return static_cast<Index>(v);
}

}  // namespace detail

inline std::string save_mesh(const Mesh& mesh)
{
  using detail::fmt_double;
  std::ostringstream out;
  out << "tpfa 1\n";
  out << "cells " << mesh.num_cells() << "\n";
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const Cell& c = mesh.cells()[k];
    out << k << ' ' << fmt_double(c.measure) << ' ' << fmt_double(c.center.x) << ' ' << fmt_double(c.center.y)
        << '\n';
  }
  out << "edges " << mesh.num_edges() << "\n";
  for (std::size_t ei = 0; ei < mesh.num_edges(); ++ei) {
    const Edge& e = mesh.edges()[ei];
    out << ei << ' ' << fmt_double(e.measure) << ' ' << fmt_double(e.dist) << ' ' << tag_letter(e.tag) << ' '
        << e.cells[0];
    if (e.interior()) out << ' ' << e.cells[1];
    out << ' ' << fmt_double(e.cell_dist[0]);
    if (e.interior()) out << ' ' << fmt_double(e.cell_dist[1]);
    out << '\n';
  }
  out << "xi " << fmt_double(mesh.xi()) << "\n";
  if (mesh.has_geometry() && mesh.boundary()) {
    for (const auto& piece : mesh.boundary()->pieces) {
      const Segment& s = piece.segment;
      out << "#@ bc " << tag_letter(piece.tag) << ' ' << fmt_double(s.a.x) << ' ' << fmt_double(s.a.y) << ' '
          << fmt_double(s.b.x) << ' ' << fmt_double(s.b.y) << '\n';
    }
    for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
      out << "#@ poly " << k;
      for (const Point2& p : mesh.polygons()[k]) out << ' ' << fmt_double(p.x) << ' ' << fmt_double(p.y);
      out << '\n';
    }
  }
  return out.str();
}

inline Mesh load_mesh(std::string_view text)
{
  using detail::parse_double;
  using detail::parse_index;

  struct Line
  {
    std::size_t number;
    std::vector<std::string_view> tokens;
  };
  std::vector<Line> lines;
  std::vector<Line> annotations;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (true) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    ++number;
    if (raw.rfind("#@", 0) == 0) {
      annotations.push_back({number, detail::split_ws(raw.substr(2))});
    } else {
      const std::size_t hash = raw.find('#');
      if (hash != std::string_view::npos) raw = raw.substr(0, hash);
      auto toks = detail::split_ws(raw);
      if (!toks.empty()) lines.push_back({number, std::move(toks)});
    }
    if (end == text.size()) break;
    pos = end + 1;
  }
  if (lines.empty()) throw ParseError(0, "empty mesh file");

  std::size_t cursor = 0;
  const auto next = [&](std::string_view what) -> const Line& {
    if (cursor >= lines.size())
      throw ParseError(number, "unexpected end of file, expected " + std::string(what));
    return lines[cursor++];
  };

  {
    const Line& l = next("header");
    if (l.tokens.size() != 2 || l.tokens[0] != "tpfa" || l.tokens[1] != "1")
      throw ParseError(l.number, "expected header 'tpfa 1'");
  }

  const auto read_count = [&](std::string_view keyword) {
    const Line& l = next(keyword);
    if (l.tokens.size() != 2 || l.tokens[0] != keyword)
      throw ParseError(l.number, "expected '" + std::string(keyword) + " <count>'");
    return static_cast<std::size_t>(parse_index(l.tokens[1], l.number));
  };

  const std::size_t nc = read_count("cells");
  std::vector<Cell> cells(nc);
  for (std::size_t k = 0; k < nc; ++k) {
    const Line& l = next("cell line");
    if (l.tokens.size() != 4) throw ParseError(l.number, "cell line needs 'id m x y'");
    if (parse_index(l.tokens[0], l.number) != static_cast<Index>(k))
      throw ParseError(l.number, "cell ids must be consecutive from 0");
    cells[k].measure = parse_double(l.tokens[1], l.number);
    cells[k].center = {parse_double(l.tokens[2], l.number), parse_double(l.tokens[3], l.number)};
  }

  const std::size_t ne = read_count("edges");
  std::vector<Edge> edges(ne);
  for (std::size_t ei = 0; ei < ne; ++ei) {
    const Line& l = next("edge line");
    if (l.tokens.size() < 6) throw ParseError(l.number, "edge line too short");
    if (parse_index(l.tokens[0], l.number) != static_cast<Index>(ei))
      throw ParseError(l.number, "edge ids must be consecutive from 0");
    Edge& e = edges[ei];
    e.measure = parse_double(l.tokens[1], l.number);
    e.dist = parse_double(l.tokens[2], l.number);
    const std::string_view tag = l.tokens[3];
    if (tag == "I") e.tag = EdgeTag::Interior;
    else if (tag == "D") e.tag = EdgeTag::Dirichlet;
    else if (tag == "N") e.tag = EdgeTag::Neumann;
    else throw ParseError(l.number, "unknown edge tag '" + std::string(tag) + "'");
    const std::size_t want = e.interior() ? 8 : 6;
    if (l.tokens.size() != want)
      throw DataError("edge " + std::to_string(ei) + ": tag " + std::string(tag) + " needs " +
                      std::to_string(want == 8 ? 2 : 1) + " incident cell(s) (line " + std::to_string(l.number) +
                      ")");
    const int nsides = e.interior() ? 2 : 1;
    for (int s = 0; s < nsides; ++s) {
      const Index k = parse_index(l.tokens[4 + s], l.number);
      if (k >= static_cast<Index>(nc))
        throw DataError("edge " + std::to_string(ei) + " references missing cell " + std::to_string(k));
      e.cells[s] = k;
      e.cell_dist[s] = parse_double(l.tokens[4 + nsides + s], l.number);
    }
    if (e.interior() && e.cells[0] == e.cells[1])
      throw DataError("edge " + std::to_string(ei) + " joins cell " + std::to_string(e.cells[0]) + " to itself");
    e.transmissibility = e.measure / e.dist;
  }

  double xi = 0;
  {
    const Line& l = next("xi");
    if (l.tokens.size() != 2 || l.tokens[0] != "xi") throw ParseError(l.number, "expected 'xi <value>'");
    xi = parse_double(l.tokens[1], l.number);
  }
  if (cursor != lines.size()) throw ParseError(lines[cursor].number, "trailing content after 'xi'");

  double total = 0;
  for (const auto& c : cells) total += c.measure;
  const double measure = std::abs(total - 1.0) < 1e-12 ? 1.0 : total;
  Mesh graph(std::move(cells), std::move(edges), xi, measure);

  if (annotations.empty()) return graph;

  BoundarySpec boundary;
  std::vector<std::vector<Point2>> polygons(nc);
  for (const Line& a : annotations) {
    if (a.tokens.empty()) continue;
    if (a.tokens[0] == "bc") {
      if (a.tokens.size() != 6 || (a.tokens[1] != "D" && a.tokens[1] != "N"))
        throw ParseError(a.number, "bad boundary annotation");
      boundary.pieces.push_back({{{parse_double(a.tokens[2], a.number), parse_double(a.tokens[3], a.number)},
                                  {parse_double(a.tokens[4], a.number), parse_double(a.tokens[5], a.number)}},
                                 a.tokens[1] == "D" ? EdgeTag::Dirichlet : EdgeTag::Neumann});
    } else if (a.tokens[0] == "poly") {
      if (a.tokens.size() < 8 || a.tokens.size() % 2 != 0) throw ParseError(a.number, "bad polygon annotation");
      const Index k = parse_index(a.tokens[1], a.number);
      if (k >= static_cast<Index>(nc)) throw ParseError(a.number, "polygon for missing cell");
      for (std::size_t i = 2; i < a.tokens.size(); i += 2)
        polygons[k].push_back({parse_double(a.tokens[i], a.number), parse_double(a.tokens[i + 1], a.number)});
    }
  }
  for (std::size_t k = 0; k < nc; ++k)
    if (polygons[k].empty()) throw ParseError(0, "geometry annotations missing for cell " + std::to_string(k));
  std::vector<Point2> centers;
  for (const auto& c : graph.cells()) centers.push_back(c.center);
  Mesh geo = Mesh::from_polygons(std::move(polygons), std::move(centers), std::move(boundary), measure);
  if (!same_graph(geo, graph, 1e-12))
    throw DataError("geometry annotations are inconsistent with the TPFA graph");
  return geo;
}

}  // namespace entrofv
