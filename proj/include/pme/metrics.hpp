// Error measurement: relative discrete errors in the lumped norm (exact for
// piecewise-constant reconstructions, evaluated at the interpolation points),
// field errors by quadrature against the reconstructed function, the error of
// the piecewise-linear field on nodal simplex backends, convergence rates
// between consecutive refinement levels, and the numerical front distance of
// a compactly supported state. The error on u is measured in L^(m+1), the
// error on beta(u) in L^2. Slot sampling is blind to the sub-cell structure
// of a solution near a support boundary, where it only holds Hölder
// regularity; the piecewise-linear norm resolves it by sub-cell quadrature.
#pragma once

#include <cmath>
#include <vector>

#include "pme/common.hpp"
#include "pme/gradient_discretisation.hpp"
#include "pme/linalg.hpp"

namespace pme {

/// Relative error in the lumped L^p norm between slot values and a function:
/// ( sum_i mu_i |v_i - exact(p_i)|^p )^{1/p} / ( sum_i mu_i |exact(p_i)|^p )^{1/p}.
template <class Exact>
double discrete_relative_error(const GradientDiscretisation& gd, const Vector& v, Exact&& exact,
                               double p = 2.0) {
  if (v.size() != gd.n_total)
    throw misuse_error("discrete_relative_error: vector has the wrong size");
  if (!(p >= 1.0)) throw misuse_error("discrete_relative_error: p must be at least 1");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < gd.n_total; ++i) {
    if (!(gd.lumped[i] > 0.0)) continue;
    const double e = exact(gd.points[i]);
    num += gd.lumped[i] * std::pow(std::abs(v[i] - e), p);
    den += gd.lumped[i] * std::pow(std::abs(e), p);
  }
  if (!(den > 0.0))
    throw misuse_error("discrete_relative_error: exact solution vanishes at every point");
  return std::pow(num / den, 1.0 / p);
}

/// Relative error on the state u, measured in L^(m+1).
template <class Exact>
double error_u(const GradientDiscretisation& gd, const Vector& u, Exact&& exact_u, double m) {
  if (!(m > 0.0)) throw misuse_error("error_u: exponent must be positive");
  return discrete_relative_error(gd, u, exact_u, m + 1.0);
}

/// Relative error on the transformed state beta(u), measured in L^2; pass the
/// transformed slot values and the exact transformed solution.
template <class Exact>
double error_beta(const GradientDiscretisation& gd, const Vector& beta_u, Exact&& exact_beta) {
  return discrete_relative_error(gd, beta_u, exact_beta, 2.0);
}

/// Relative L^p field error between the piecewise-constant reconstruction and
/// a function, by dyadic quadrature over the reconstruction regions. This
/// norm carries the O(h) interpolation residue of the reconstruction itself.
template <class Exact>
double field_relative_error(const GradientDiscretisation& gd, const Vector& v, Exact&& exact,
                            double p = 2.0, int levels = 2) {
  if (v.size() != gd.n_total)
    throw misuse_error("field_relative_error: vector has the wrong size");
  if (!(p >= 1.0)) throw misuse_error("field_relative_error: p must be at least 1");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < gd.n_total; ++i) {
    for (const ReconstructionFragment& frag : gd.regions[i]) {
      num += integrate_polygon(frag.polygon, levels,
                               [&](Vec2 x) { return std::pow(std::abs(v[i] - exact(x)), p); });
      den += integrate_polygon(frag.polygon, levels,
                               [&](Vec2 x) { return std::pow(std::abs(exact(x)), p); });
    }
  }
  if (!(den > 0.0))
    throw misuse_error("field_relative_error: exact solution vanishes on the domain");
  return std::pow(num / den, 1.0 / p);
}

template <class Exact>
double error_u_field(const GradientDiscretisation& gd, const Vector& u, Exact&& exact_u, double m,
                     int levels = 2) {
  if (!(m > 0.0)) throw misuse_error("error_u_field: exponent must be positive");
  return field_relative_error(gd, u, exact_u, m + 1.0, levels);
}

template <class Exact>
double error_beta_field(const GradientDiscretisation& gd, const Vector& beta_u, Exact&& exact_beta,
                        int levels = 2) {
  return field_relative_error(gd, beta_u, exact_beta, 2.0, levels);
}

/// Relative L^p error of the piecewise-linear field spanned by nodal simplex
/// gradient cells (vertex slots carry the values, as on the mass-lumped P1
/// backend), by dyadic edge-midpoint quadrature with `levels` subdivisions
/// per cell. Unlike slot sampling this resolves the sub-cell residue near a
/// support boundary, so refinement studies of degenerate states are not
/// polluted by the positions the front happens to take relative to the nodes.
template <class Exact>
double p1_relative_error(const GradientDiscretisation& gd, const Vector& v, Exact&& exact,
                         double p = 2.0, int levels = 2) {
  if (v.size() != gd.n_total)
    throw misuse_error("p1_relative_error: vector has the wrong size");
  if (!(p >= 1.0)) throw misuse_error("p1_relative_error: p must be at least 1");
  double num = 0.0, den = 0.0;
  for (const GradientCell& gc : gd.grad_cells) {
    if (gc.polygon.size() != 3 || gc.coeffs.size() != 3)
      throw misuse_error("p1_relative_error: backend has no nodal simplex cells");
    const Vec2 a = gc.polygon[0], b = gc.polygon[1], c = gc.polygon[2];
    const double va = v[gc.coeffs[0].first];
    const double vb = v[gc.coeffs[1].first];
    const double vc = v[gc.coeffs[2].first];
    const double area2 = cross(b - a, c - a);
    for_each_triangle_sample(a, b, c, levels, [&](Vec2 x, double w) {
      const double lb = cross(x - a, c - a) / area2;
      const double lc = cross(b - a, x - a) / area2;
      const double vh = va * (1.0 - lb - lc) + vb * lb + vc * lc;
      const double e = exact(x);
      num += w * std::pow(std::abs(vh - e), p);
      den += w * std::pow(std::abs(e), p);
    });
  }
  if (!(den > 0.0))
    throw misuse_error("p1_relative_error: exact solution vanishes on the domain");
  return std::pow(num / den, 1.0 / p);
}

/// Convergence rate between two refinement levels: log(e1/e2)/log(h1/h2).
inline double rate(double e1, double e2, double h1, double h2) {
  if (!(e1 > 0.0) || !(e2 > 0.0)) throw misuse_error("rate: errors must be positive");
  if (!(h1 > 0.0) || !(h2 > 0.0)) throw misuse_error("rate: mesh sizes must be positive");
  if (h1 == h2) throw misuse_error("rate: mesh sizes must differ");
  return std::log(e1 / e2) / std::log(h1 / h2);
}

/// Rates between consecutive levels of a refinement sequence.
inline std::vector<double> rates(const std::vector<double>& h, const std::vector<double>& e) {
  if (h.size() != e.size()) throw misuse_error("rates: mismatched level counts");
  if (h.size() < 2) throw misuse_error("rates: need at least two levels");
  std::vector<double> r(h.size() - 1);
  for (std::size_t k = 1; k < h.size(); ++k) {
    if (k > 0 && !(h[k] < h[k - 1]))
      throw misuse_error("rates: mesh sizes must be strictly decreasing");
    r[k - 1] = rate(e[k - 1], e[k], h[k - 1], h[k]);
  }
  return r;
}

/// Distance from the origin to the farthest massive slot whose value exceeds
/// threshold_rel times the maximal value; zero when every value is below the
/// threshold. Tracks the free boundary of a compactly supported state.
inline double front_distance(const GradientDiscretisation& gd, const Vector& v,
                             double threshold_rel = 1e-6) {
  if (v.size() != gd.n_total) throw misuse_error("front_distance: vector has the wrong size");
  if (!(threshold_rel > 0.0) || !(threshold_rel < 1.0))
    throw misuse_error("front_distance: relative threshold must lie in (0, 1)");
  double vmax = 0.0;
  for (std::size_t i = 0; i < gd.n_total; ++i)
    if (gd.lumped[i] > 0.0) vmax = std::max(vmax, std::abs(v[i]));
  if (vmax <= 0.0) return 0.0;
  const double threshold = threshold_rel * vmax;
  double radius = 0.0;
  for (std::size_t i = 0; i < gd.n_total; ++i)
    if (gd.lumped[i] > 0.0 && std::abs(v[i]) > threshold)
      radius = std::max(radius, norm(gd.points[i]));
  return radius;
}

/// Slope of the least-squares line through (x_k, y_k); used for trend checks.
inline double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw misuse_error("least_squares_slope: need two or more paired samples");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  const double det = n * sxx - sx * sx;
  if (!(det > 0.0)) throw misuse_error("least_squares_slope: degenerate abscissae");
  return (n * sxy - sx * sy) / det;
}

}  // namespace pme
