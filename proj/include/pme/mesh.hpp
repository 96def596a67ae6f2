// Conforming polytopal meshes of the unit square (-0.5, 0.5)^2: a structured
// triangular generator, a clipped-hexagon generator, and a line-oriented text
// format. Every mesh carries the geometric quantities the discretisations
// need: face measures and outward normals, cell measures, barycenters and
// diameters, and the mesh size h.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "pme/common.hpp"

namespace pme {

struct MeshFace {
  std::array<std::size_t, 2> vertices{npos, npos};
  std::array<std::size_t, 2> cells{npos, npos};  ///< incident cells; [1] = npos on the boundary
  double measure = 0.0;
  Vec2 barycenter{};
  bool boundary = false;
};

struct MeshCell {
  std::vector<std::size_t> vertices;  ///< counter-clockwise loop
  std::vector<std::size_t> faces;     ///< faces[k] joins vertices[k] and vertices[k+1]
  std::vector<Vec2> normals;          ///< unit outward normal per local face
  double measure = 0.0;
  Vec2 barycenter{};
  double diameter = 0.0;
};

class Mesh {
 public:
  /// Build a mesh from vertex coordinates and one vertex loop per cell.
  /// Loops may come in either orientation; they are stored counter-clockwise.
  Mesh(std::vector<Vec2> vertices, const std::vector<std::vector<std::size_t>>& cell_loops,
       double h_override = 0.0)
      : vertices_(std::move(vertices)) {
    build(cell_loops);
    if (h_override > 0.0) h_ = h_override;
    validate();
  }

  /// n x n squares, each split into two triangles along the same diagonal;
  /// mesh size h = sqrt(2)/n exactly.
  static Mesh triangular(std::size_t n) {
    if (n == 0) throw misuse_error("Mesh::triangular: n must be positive");
    std::vector<Vec2> verts((n + 1) * (n + 1));
    for (std::size_t j = 0; j <= n; ++j)
      for (std::size_t i = 0; i <= n; ++i)
        verts[j * (n + 1) + i] = {static_cast<double>(i) / static_cast<double>(n) - 0.5,
                                  static_cast<double>(j) / static_cast<double>(n) - 0.5};
    std::vector<std::vector<std::size_t>> cells;
    cells.reserve(2 * n * n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t v00 = j * (n + 1) + i;
        const std::size_t v10 = v00 + 1;
        const std::size_t v01 = v00 + (n + 1);
        const std::size_t v11 = v01 + 1;
        cells.push_back({v00, v10, v11});
        cells.push_back({v00, v11, v01});
      }
    return Mesh(std::move(verts), cells, std::sqrt(2.0) / static_cast<double>(n));
  }

  /// Honeycomb of flat-top hexagons (circumradius 1/(2n), i.e. n hexagon
  /// diameters across the domain) clipped to the unit square; boundary cells
  /// become quadrilaterals/pentagons. Conforming by construction.
  static Mesh polygonal(std::size_t n) {
    if (n == 0) throw misuse_error("Mesh::polygonal: n must be positive");
    const double a = 0.5 / static_cast<double>(n);
    const double col_dx = 1.5 * a;
    const double row_dy = std::sqrt(3.0) * a;
    const std::array<Vec2, 6> offset = {
        Vec2{a, 0.0},  Vec2{0.5 * a, 0.5 * row_dy},  Vec2{-0.5 * a, 0.5 * row_dy},
        Vec2{-a, 0.0}, Vec2{-0.5 * a, -0.5 * row_dy}, Vec2{0.5 * a, -0.5 * row_dy}};

    VertexMerger merger;
    std::vector<std::vector<std::size_t>> cells;
    for (std::size_t i = 0;; ++i) {
      const double cx = -0.5 + static_cast<double>(i) * col_dx;
      if (cx - a > 0.5) break;
      const double cy0 = (i % 2 == 1) ? -0.5 + 0.5 * row_dy : -0.5;
      const long jmax = static_cast<long>(std::ceil(1.0 / row_dy)) + 1;
      for (long j = -1; j <= jmax; ++j) {
        const Vec2 centre{cx, cy0 + static_cast<double>(j) * row_dy};
        std::vector<Vec2> hex(6);
        for (int k = 0; k < 6; ++k) hex[k] = centre + offset[k];
        std::vector<Vec2> poly = clip_polygon_box(std::move(hex), -0.5, 0.5, -0.5, 0.5);
        if (poly.size() < 3 || polygon_area(poly) < 1e-12 * a * a) continue;
        std::vector<std::size_t> loop(poly.size());
        for (std::size_t k = 0; k < poly.size(); ++k) loop[k] = merger.index(poly[k]);
        cells.push_back(std::move(loop));
      }
    }
    return Mesh(merger.take_points(), cells);
  }

  /// Text format:  NV NF NC / NV vertex lines "x y" / NF face lines
  /// "v0 v1 bflag" / NC cell lines "k f0 ... f(k-1)"; '#' starts a comment.
  static Mesh read(std::istream& in) {
    std::vector<std::string> tokens = tokenize(in);
    std::size_t pos = 0;
    auto next_index = [&](const char* what, std::size_t bound) {
      const long long v = to_ll(take(tokens, pos, what), what);
      if (v < 0 || (bound != npos && static_cast<std::size_t>(v) >= bound))
        throw parse_error(std::string("mesh: ") + what + " out of range");
      return static_cast<std::size_t>(v);
    };
    const std::size_t nv = next_index("vertex count", npos);
    const std::size_t nf = next_index("face count", npos);
    const std::size_t nc = next_index("cell count", npos);
    std::vector<Vec2> verts(nv);
    for (std::size_t i = 0; i < nv; ++i) {
      verts[i].x = to_double(take(tokens, pos, "vertex coordinate"));
      verts[i].y = to_double(take(tokens, pos, "vertex coordinate"));
    }
    struct FileFace {
      std::size_t v0, v1;
      bool boundary;
    };
    std::vector<FileFace> faces(nf);
    for (std::size_t i = 0; i < nf; ++i) {
      faces[i].v0 = next_index("face vertex", nv);
      faces[i].v1 = next_index("face vertex", nv);
      faces[i].boundary = next_index("face boundary flag", 2) == 1;
      if (faces[i].v0 == faces[i].v1) throw geometry_error("mesh: face with repeated vertex");
    }
    std::vector<std::vector<std::size_t>> cell_loops(nc);
    for (std::size_t c = 0; c < nc; ++c) {
      const std::size_t k = next_index("cell face count", npos);
      if (k < 3) throw geometry_error("mesh: cell with fewer than three faces");
      std::vector<std::size_t> fid(k);
      for (std::size_t t = 0; t < k; ++t) fid[t] = next_index("cell face index", nf);
      cell_loops[c] = chain_faces(fid, faces.data());
    }
    if (pos != tokens.size()) throw parse_error("mesh: unexpected trailing tokens");
    Mesh mesh(std::move(verts), cell_loops);
    for (std::size_t i = 0; i < nf; ++i) {
      const std::size_t id = mesh.find_face(faces[i].v0, faces[i].v1);
      if (id == npos) throw geometry_error("mesh: listed face not used by any cell");
      if (mesh.faces_[id].boundary != faces[i].boundary)
        throw geometry_error("mesh: face boundary flag inconsistent with incidence");
    }
    if (mesh.n_faces() != nf) throw geometry_error("mesh: face list incomplete");
    return mesh;
  }

  static Mesh load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("mesh: cannot open '" + path + "'");
    return read(in);
  }

  void write(std::ostream& out) const {
    out << "# polytopal mesh: vertices, faces (v0 v1 bflag), cells (k f0 ... fk-1)\n";
    out << n_vertices() << ' ' << n_faces() << ' ' << n_cells() << '\n';
    char buf[64];
    for (const Vec2& v : vertices_) {
      std::snprintf(buf, sizeof buf, "%.17g %.17g", v.x, v.y);
      out << buf << '\n';
    }
    for (const MeshFace& f : faces_)
      out << f.vertices[0] << ' ' << f.vertices[1] << ' ' << (f.boundary ? 1 : 0) << '\n';
    for (const MeshCell& c : cells_) {
      out << c.faces.size();
      for (std::size_t f : c.faces) out << ' ' << f;
      out << '\n';
    }
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw error("mesh: cannot write '" + path + "'");
    write(out);
  }

  std::size_t n_vertices() const { return vertices_.size(); }
  std::size_t n_faces() const { return faces_.size(); }
  std::size_t n_cells() const { return cells_.size(); }
  const Vec2& vertex(std::size_t i) const { return vertices_[i]; }
  const MeshFace& face(std::size_t i) const { return faces_[i]; }
  const MeshCell& cell(std::size_t i) const { return cells_[i]; }
  bool boundary_vertex(std::size_t i) const { return boundary_vertex_[i] != 0; }
  double h() const { return h_; }

  std::vector<Vec2> cell_polygon(std::size_t c) const {
    std::vector<Vec2> p;
    p.reserve(cells_[c].vertices.size());
    for (std::size_t v : cells_[c].vertices) p.push_back(vertices_[v]);
    return p;
  }

  /// Structural and geometric sanity: positive measures, conforming faces,
  /// and the discrete Stokes identity sum_sigma |sigma| n_{K,sigma} = 0.
  void validate() const {
    for (std::size_t c = 0; c < cells_.size(); ++c) {
      const MeshCell& cell = cells_[c];
      if (cell.measure <= 0.0) throw geometry_error("mesh: nonpositive cell measure");
      Vec2 s{0.0, 0.0};
      for (std::size_t k = 0; k < cell.faces.size(); ++k)
        s += faces_[cell.faces[k]].measure * cell.normals[k];
      if (norm(s) > 1e-12)
        throw geometry_error("mesh: face normals of a cell do not close up");
    }
    for (const MeshFace& f : faces_) {
      if (f.measure <= 0.0) throw geometry_error("mesh: zero-length face");
      if (f.cells[0] == npos) throw geometry_error("mesh: orphan face");
      if (f.boundary != (f.cells[1] == npos))
        throw geometry_error("mesh: face boundary flag inconsistent with incidence");
    }
  }

  /// Empty mesh; only useful as a placeholder before a discretisation is built.
  Mesh() = default;

 private:
  /// Merges points that coincide up to 1e-9 (hash on a snapped lattice with
  /// neighbour lookup), so cells generated independently share vertices.
  class VertexMerger {
   public:
    std::size_t index(Vec2 p) {
      snap(p.x);
      snap(p.y);
      const long long ix = cell_of(p.x), iy = cell_of(p.y);
      for (long long dx = -1; dx <= 1; ++dx)
        for (long long dy = -1; dy <= 1; ++dy) {
          auto it = table_.find({ix + dx, iy + dy});
          if (it == table_.end()) continue;
          for (std::size_t id : it->second)
            if (dist(points_[id], p) <= tol_) return id;
        }
      points_.push_back(p);
      table_[{ix, iy}].push_back(points_.size() - 1);
      return points_.size() - 1;
    }
    std::vector<Vec2> take_points() { return std::move(points_); }

   private:
    static void snap(double& c) {
      if (std::abs(c - 0.5) < 1e-9) c = 0.5;
      if (std::abs(c + 0.5) < 1e-9) c = -0.5;
    }
    long long cell_of(double c) const { return static_cast<long long>(std::floor(c / (4.0 * tol_))); }
    double tol_ = 1e-9;
    std::map<std::pair<long long, long long>, std::vector<std::size_t>> table_;
    std::vector<Vec2> points_;
  };

  void build(const std::vector<std::vector<std::size_t>>& cell_loops) {
    cells_.resize(cell_loops.size());
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> face_of;
    // traversal direction bookkeeping: a conforming interior face is walked
    // once in each direction by its two counter-clockwise cells
    std::vector<std::array<char, 2>> walked;
    for (std::size_t c = 0; c < cell_loops.size(); ++c) {
      std::vector<std::size_t> loop = cell_loops[c];
      if (loop.size() < 3) throw geometry_error("mesh: cell with fewer than three vertices");
      for (std::size_t v : loop)
        if (v >= vertices_.size()) throw parse_error("mesh: cell vertex index out of range");
      std::vector<Vec2> poly(loop.size());
      for (std::size_t k = 0; k < loop.size(); ++k) poly[k] = vertices_[loop[k]];
      double area = polygon_signed_area(poly);
      if (area < 0.0) {
        std::reverse(loop.begin(), loop.end());
        std::reverse(poly.begin(), poly.end());
        area = -area;
      }
      if (!(area > 0.0)) throw geometry_error("mesh: degenerate cell");

      MeshCell& cell = cells_[c];
      cell.vertices = loop;
      cell.measure = area;
      cell.barycenter = polygon_centroid(poly);
      cell.diameter = polygon_diameter(poly);
      for (std::size_t k = 0; k < loop.size(); ++k) {
        const std::size_t va = loop[k];
        const std::size_t vb = loop[(k + 1) % loop.size()];
        if (va == vb) throw geometry_error("mesh: zero-length cell edge");
        const auto key = std::minmax(va, vb);
        auto [it, inserted] = face_of.try_emplace({key.first, key.second}, faces_.size());
        if (inserted) {
          MeshFace f;
          f.vertices = {va, vb};
          f.measure = dist(vertices_[va], vertices_[vb]);
          f.barycenter = 0.5 * (vertices_[va] + vertices_[vb]);
          faces_.push_back(f);
          walked.push_back({0, 0});
        }
        const std::size_t fid = it->second;
        MeshFace& f = faces_[fid];
        if (f.cells[0] == npos)
          f.cells[0] = c;
        else if (f.cells[1] == npos)
          f.cells[1] = c;
        else
          throw geometry_error("mesh: face shared by more than two cells");
        const int dir = (va == f.vertices[0]) ? 0 : 1;
        if (walked[fid][dir]) throw geometry_error("mesh: non-conforming face traversal");
        walked[fid][dir] = 1;
        cell.faces.push_back(fid);
        const Vec2 d = vertices_[vb] - vertices_[va];
        cell.normals.push_back(Vec2{d.y, -d.x} / norm(d));
      }
    }
    boundary_vertex_.assign(vertices_.size(), 0);
    h_ = 0.0;
    for (MeshFace& f : faces_) {
      f.boundary = (f.cells[1] == npos);
      if (f.boundary) {
        boundary_vertex_[f.vertices[0]] = 1;
        boundary_vertex_[f.vertices[1]] = 1;
      }
    }
    for (const MeshCell& c : cells_) h_ = std::max(h_, c.diameter);
  }

  std::size_t find_face(std::size_t a, std::size_t b) const {
    for (std::size_t i = 0; i < faces_.size(); ++i) {
      const auto& v = faces_[i].vertices;
      if ((v[0] == a && v[1] == b) || (v[0] == b && v[1] == a)) return i;
    }
    return npos;
  }

  template <class FileFace>
  static std::vector<std::size_t> chain_faces(const std::vector<std::size_t>& fid,
                                              const FileFace* faces) {
    // Reconstruct the vertex loop of a cell from its (unordered) face list.
    std::vector<char> used(fid.size(), 0);
    std::vector<std::size_t> loop;
    loop.push_back(faces[fid[0]].v0);
    loop.push_back(faces[fid[0]].v1);
    used[0] = 1;
    for (std::size_t step = 1; step + 1 < fid.size(); ++step) {
      const std::size_t tail = loop.back();
      bool found = false;
      for (std::size_t t = 1; t < fid.size() && !found; ++t) {
        if (used[t]) continue;
        const auto& f = faces[fid[t]];
        if (f.v0 == tail || f.v1 == tail) {
          loop.push_back(f.v0 == tail ? f.v1 : f.v0);
          used[t] = 1;
          found = true;
        }
      }
      if (!found) throw geometry_error("mesh: cell faces do not form a closed loop");
    }
    // the one unused face must close the loop
    std::size_t last = npos;
    for (std::size_t t = 0; t < fid.size(); ++t)
      if (!used[t]) last = t;
    if (last == npos) throw geometry_error("mesh: cell faces do not form a closed loop");
    const auto& f = faces[fid[last]];
    const bool closes = (f.v0 == loop.back() && f.v1 == loop.front()) ||
                        (f.v1 == loop.back() && f.v0 == loop.front());
    if (!closes) throw geometry_error("mesh: cell faces do not form a closed loop");
    return loop;
  }

  static std::vector<std::string> tokenize(std::istream& in) {
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) tokens.push_back(tok);
    }
    return tokens;
  }

  static const std::string& take(const std::vector<std::string>& tokens, std::size_t& pos,
                                 const char* what) {
    if (pos >= tokens.size())
      throw parse_error(std::string("mesh: unexpected end of file reading ") + what);
    return tokens[pos++];
  }

  static long long to_ll(const std::string& s, const char* what) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &used);
    } catch (const std::exception&) {
      throw parse_error(std::string("mesh: malformed integer for ") + what);
    }
    if (used != s.size()) throw parse_error(std::string("mesh: malformed integer for ") + what);
    return v;
  }

  static double to_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw parse_error("mesh: malformed number");
    }
    if (used != s.size()) throw parse_error("mesh: malformed number");
    return v;
  }

  std::vector<Vec2> vertices_;
  std::vector<MeshFace> faces_;
  std::vector<MeshCell> cells_;
  std::vector<char> boundary_vertex_;
  double h_ = 0.0;
};

}  // namespace pme
