// Shared primitives: plane vectors, symmetric 2x2 tensors, the library error
// taxonomy, and the polygon/quadrature helpers used by meshes and reconstructions.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace pme {

inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline Vec2 operator*(Vec2 v, double s) { return s * v; }
inline Vec2 operator/(Vec2 v, double s) { return {v.x / s, v.y / s}; }
inline Vec2& operator+=(Vec2& a, Vec2 b) { a.x += b.x; a.y += b.y; return a; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }
/// Counter-clockwise quarter turn; maps an edge vector to a left normal direction.
inline Vec2 rot90(Vec2 v) { return {-v.y, v.x}; }

/// Symmetric positive tensor used as diffusion coefficient.
struct SymTensor2 {
  double xx = 1.0;
  double xy = 0.0;
  double yy = 1.0;

  static SymTensor2 identity() { return {1.0, 0.0, 1.0}; }
  static SymTensor2 scalar(double s) { return {s, 0.0, s}; }

  Vec2 apply(Vec2 v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }

  double eig_min() const {
    const double tr = xx + yy;
    const double disc = std::sqrt(std::max(0.0, 0.25 * (xx - yy) * (xx - yy) + xy * xy));
    return 0.5 * tr - disc;
  }
  double eig_max() const {
    const double tr = xx + yy;
    const double disc = std::sqrt(std::max(0.0, 0.25 * (xx - yy) * (xx - yy) + xy * xy));
    return 0.5 * tr + disc;
  }
  bool positive_definite() const { return eig_min() > 0.0; }
};

// ---------------------------------------------------------------------------
// Error taxonomy
// ---------------------------------------------------------------------------

/// Base class of every exception thrown by the library.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed text input (mesh files, configuration files).
struct parse_error : error {
  using error::error;
};

/// Invalid or degenerate geometry (negative measures, non-conforming faces, ...).
struct geometry_error : error {
  using error::error;
};

/// A precondition of an operation was violated by the caller.
struct misuse_error : error {
  using error::error;
};

/// Linear or nonlinear solver failure; optionally carries the time-step index
/// and the last residual norm seen before giving up.
struct solver_error : error {
  std::size_t step = npos;
  double residual = std::numeric_limits<double>::quiet_NaN();

  explicit solver_error(const std::string& msg) : error(msg) {}
  solver_error(const std::string& msg, std::size_t step_index, double last_residual)
      : error(msg + " (step " + std::to_string(step_index) +
              ", residual " + std::to_string(last_residual) + ")"),
        step(step_index),
        residual(last_residual) {}
};

// ---------------------------------------------------------------------------
// Polygon helpers (vertices in order; positive area = counter-clockwise)
// ---------------------------------------------------------------------------

inline double polygon_signed_area(const std::vector<Vec2>& p) {
  double a = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2& u = p[i];
    const Vec2& v = p[(i + 1) % p.size()];
    a += cross(u, v);
  }
  return 0.5 * a;
}

inline double polygon_area(const std::vector<Vec2>& p) { return std::abs(polygon_signed_area(p)); }

/// Area centroid (valid for simple polygons; cells here are convex).
inline Vec2 polygon_centroid(const std::vector<Vec2>& p) {
  double a = 0.0;
  Vec2 c{0.0, 0.0};
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2& u = p[i];
    const Vec2& v = p[(i + 1) % p.size()];
    const double w = cross(u, v);
    a += w;
    c += w * (u + v);
  }
  if (a == 0.0) throw geometry_error("polygon_centroid: degenerate polygon");
  return c / (3.0 * a);
}

inline double polygon_diameter(const std::vector<Vec2>& p) {
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) d = std::max(d, dist(p[i], p[j]));
  return d;
}

/// Containment test for a convex counter-clockwise polygon (boundary counts
/// as inside, with a tiny slack so shared edges are claimed by either side).
inline bool point_in_convex_polygon(const std::vector<Vec2>& p, const Vec2& x) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2& a = p[i];
    const Vec2& b = p[(i + 1) % p.size()];
    if (cross(b - a, x - a) < -1e-14 * std::max(1.0, dist(a, b))) return false;
  }
  return true;
}

namespace detail {

// One Sutherland-Hodgman pass against the half-plane keep(x) >= bound (axis-aligned).
// coord selects the axis, sign +1 keeps coord >= bound, -1 keeps coord <= bound.
// Intersection points get the clip coordinate set exactly to the bound so that
// neighbouring cells produce bitwise-identical cut vertices.
inline std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& poly, int axis, double sign,
                                        double bound) {
  auto value = [&](const Vec2& v) { return sign * ((axis == 0 ? v.x : v.y) - bound); };
  std::vector<Vec2> out;
  out.reserve(poly.size() + 2);
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    const double va = value(a);
    const double vb = value(b);
    auto cut = [&]() {
      const double t = va / (va - vb);
      Vec2 p = a + t * (b - a);
      if (axis == 0)
        p.x = bound;
      else
        p.y = bound;
      return p;
    };
    if (va >= 0.0) {
      out.push_back(a);
      if (vb < 0.0) out.push_back(cut());
    } else if (vb >= 0.0) {
      out.push_back(cut());
    }
  }
  return out;
}

}  // namespace detail

/// Clip a convex polygon to the axis-aligned box [xmin,xmax] x [ymin,ymax].
/// Returns an empty polygon when nothing remains; consecutive duplicates are removed.
inline std::vector<Vec2> clip_polygon_box(std::vector<Vec2> poly, double xmin, double xmax,
                                          double ymin, double ymax) {
  poly = detail::clip_halfplane(poly, 0, +1.0, xmin);
  poly = detail::clip_halfplane(poly, 0, -1.0, xmax);
  poly = detail::clip_halfplane(poly, 1, +1.0, ymin);
  poly = detail::clip_halfplane(poly, 1, -1.0, ymax);
  std::vector<Vec2> out;
  for (const Vec2& v : poly) {
    if (out.empty() || dist(out.back(), v) > 1e-12) out.push_back(v);
  }
  while (out.size() > 1 && dist(out.front(), out.back()) <= 1e-12) out.pop_back();
  if (out.size() < 3) out.clear();
  return out;
}

// ---------------------------------------------------------------------------
// Quadrature: edge-midpoint rule (degree 2) on dyadically refined triangles.
// `levels` = number of uniform 4-way subdivisions, so a triangle contributes
// 3 * 4^levels sample points.
// ---------------------------------------------------------------------------

template <class F>
void for_each_triangle_sample(Vec2 a, Vec2 b, Vec2 c, int levels, F&& visit) {
  if (levels <= 0) {
    const double w = polygon_area({a, b, c}) / 3.0;
    visit(0.5 * (a + b), w);
    visit(0.5 * (b + c), w);
    visit(0.5 * (c + a), w);
    return;
  }
  const Vec2 ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
  for_each_triangle_sample(a, ab, ca, levels - 1, visit);
  for_each_triangle_sample(ab, b, bc, levels - 1, visit);
  for_each_triangle_sample(ca, bc, c, levels - 1, visit);
  for_each_triangle_sample(ab, bc, ca, levels - 1, visit);
}

/// Sample a simple polygon by fanning triangles from its centroid.
template <class F>
void for_each_polygon_sample(const std::vector<Vec2>& poly, int levels, F&& visit) {
  if (poly.size() < 3) return;
  if (poly.size() == 3) {
    for_each_triangle_sample(poly[0], poly[1], poly[2], levels, visit);
    return;
  }
  const Vec2 c = polygon_centroid(poly);
  for (std::size_t i = 0; i < poly.size(); ++i)
    for_each_triangle_sample(poly[i], poly[(i + 1) % poly.size()], c, levels, visit);
}

template <class F>
double integrate_polygon(const std::vector<Vec2>& poly, int levels, F&& f) {
  double s = 0.0;
  for_each_polygon_sample(poly, levels, [&](Vec2 p, double w) { s += w * f(p); });
  return s;
}

}  // namespace pme
