// Computable quality indicators of a gradient discretisation: the coercivity
// constant (discrete Poincare constant), the consistency defect of a smooth
// target, the limit-conformity defect of a smooth vector field, and the dual
// norm of a reconstructed function. All reduce to small linear-algebra
// problems on the unknown block of the unit-tensor stiffness matrix.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pme/common.hpp"
#include "pme/gradient_discretisation.hpp"
#include "pme/linalg.hpp"

namespace pme {

/// Smooth scalar target with analytic gradient (vanishing on the boundary).
struct ScalarProbe {
  std::string name;
  std::function<double(Vec2)> value;
  std::function<Vec2(Vec2)> gradient;
};

/// Smooth vector field with analytic divergence.
struct VectorProbe {
  std::string name;
  std::function<Vec2(Vec2)> value;
  std::function<double(Vec2)> divergence;
};

namespace detail {

/// Unknown-block stiffness matrix for the unit tensor.
inline SparseMatrix stiffness_block(const GradientDiscretisation& gd) {
  if (gd.n_unknowns == 0) throw misuse_error("diagnostics: discretisation has no unknowns");
  return gd.assemble_diffusion([](Vec2) { return SymTensor2::identity(); })
      .top_left(gd.n_unknowns, gd.n_unknowns);
}

inline double lcg_unit(std::uint64_t& seed) {
  seed = seed * 6364136223846793005ULL + 1442695040888963407ULL;
  return static_cast<double>(seed >> 11) / 9007199254740992.0;
}

}  // namespace detail

/// Dual norm of the reconstructed function of v: sqrt(p' K^{-1} p) with
/// p_i = mu_i v_i on the unknowns and K the unit-tensor stiffness matrix.
inline double dual_norm(const GradientDiscretisation& gd, const Vector& v) {
  if (v.size() != gd.n_total) throw misuse_error("dual_norm: vector has the wrong size");
  const SparseMatrix k = detail::stiffness_block(gd);
  Vector p(gd.n_unknowns);
  for (std::size_t i = 0; i < gd.n_unknowns; ++i) p[i] = gd.lumped[i] * v[i];
  if (norm_inf(p) == 0.0) return 0.0;
  const Vector x = solve_spd(k, p);
  return std::sqrt(std::max(0.0, dot(p, x)));
}

/// Coercivity constant C = max ||reconstruction|| / ||gradient|| over the
/// unknowns: the square root of the largest eigenvalue of K^{-1} M, computed
/// by power iteration with a deterministic pseudo-random start.
inline double coercivity_constant(const GradientDiscretisation& gd) {
  const SparseMatrix k = detail::stiffness_block(gd);
  const std::size_t n = gd.n_unknowns;
  bool any_mass = false;
  for (std::size_t i = 0; i < n; ++i)
    if (gd.lumped[i] > 0.0) any_mass = true;
  if (!any_mass) throw misuse_error("coercivity_constant: no massive unknowns");

  const BandLU lu(k);
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = detail::lcg_unit(seed) + 0.1;
  const auto mass_apply = [&](const Vector& w) {
    Vector y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) y[i] = gd.lumped[i] * w[i];
    return y;
  };

  double rho_prev = -1.0;
  std::size_t settled = 0;
  for (std::size_t it = 0; it < 10000; ++it) {
    const Vector mx = mass_apply(x);
    Vector z = lu.solve(mx);
    const double nz = norm_2(z);
    if (!(nz > 0.0)) throw solver_error("coercivity_constant: iterate vanished");
    for (double& c : z) c /= nz;
    // Rayleigh quotient of the pencil (M, K) at z, using K z_unnormalised = M x
    const Vector mz = mass_apply(z);
    const Vector kz = k.apply(z);
    const double rho = dot(z, mz) / dot(z, kz);
    x = std::move(z);
    if (rho_prev > 0.0 && std::abs(rho - rho_prev) <= 1e-12 * rho) {
      if (++settled >= 2) return std::sqrt(rho);
    } else {
      settled = 0;
    }
    rho_prev = rho;
  }
  throw solver_error("coercivity_constant: power iteration did not converge");
}

/// Consistency defect of a smooth boundary-compatible target: the discrete
/// minimiser of the smooth L^2 surrogate ||Pw - phi||^2 + ||Gw - grad phi||^2
/// is computed by a linear solve, and the reported value is the original
/// L^(1+m_hat) + L^2 functional at that minimiser (an upper bound with the
/// same decay order). m_hat = max(1, 1/m) of the problem at hand.
inline double consistency_defect(const GradientDiscretisation& gd, const ScalarProbe& probe,
                                 double m_hat = 1.0, int levels = 2) {
  if (!probe.value || !probe.gradient)
    throw misuse_error("consistency_defect: probe must provide value and gradient");
  if (!(m_hat >= 1.0)) throw misuse_error("consistency_defect: m_hat must be at least 1");
  const std::size_t n = gd.n_unknowns;
  const SparseMatrix k = detail::stiffness_block(gd);

  // right-hand side: b_i = integral over region i of phi
  //                      + sum of gradient-cell integrals of coeff_i . grad phi
  Vector b(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (const ReconstructionFragment& frag : gd.regions[i])
      b[i] += integrate_polygon(frag.polygon, levels, probe.value);
  for (const GradientCell& gc : gd.grad_cells) {
    Vec2 gphi{0.0, 0.0};
    for_each_polygon_sample(gc.polygon, levels, [&](Vec2 x, double w) {
      gphi += w * probe.gradient(x);
    });
    for (const auto& [slot, c] : gc.coeffs)
      if (slot < n) b[slot] += dot(c, gphi);
  }

  // normal equations of the surrogate: (M + K) w = b on the unknowns
  Vector mass(n);
  for (std::size_t i = 0; i < n; ++i) mass[i] = gd.lumped[i];
  const SparseMatrix mk = k.plus_diagonal(mass);
  const Vector w = solve_spd(mk, b);

  Vector w_full(gd.n_total, 0.0);
  for (std::size_t i = 0; i < n; ++i) w_full[i] = w[i];

  const double p = 1.0 + m_hat;
  double rec = 0.0;
  for (std::size_t i = 0; i < gd.n_total; ++i)
    for (const ReconstructionFragment& frag : gd.regions[i])
      rec += integrate_polygon(frag.polygon, levels, [&](Vec2 x) {
        return std::pow(std::abs(w_full[i] - probe.value(x)), p);
      });
  double grad = 0.0;
  for (const GradientCell& gc : gd.grad_cells) {
    const Vec2 g = gc.gradient(w_full);
    grad += integrate_polygon(gc.polygon, levels, [&](Vec2 x) {
      const Vec2 d = g - probe.gradient(x);
      return dot(d, d);
    });
  }
  return std::pow(rec, 1.0 / p) + std::sqrt(grad);
}

/// Limit-conformity defect of a smooth vector field: the dual norm
/// sqrt(r' K^{-1} r) of the discrete divergence-theorem residual
/// r_i = integral of (grad e_i . field + reconstruction e_i . div field).
inline double limit_conformity_defect(const GradientDiscretisation& gd, const VectorProbe& probe,
                                      int levels = 2) {
  if (!probe.value || !probe.divergence)
    throw misuse_error("limit_conformity_defect: probe must provide value and divergence");
  const std::size_t n = gd.n_unknowns;
  const SparseMatrix k = detail::stiffness_block(gd);

  Vector r(n, 0.0);
  for (const GradientCell& gc : gd.grad_cells) {
    Vec2 intf{0.0, 0.0};
    for_each_polygon_sample(gc.polygon, levels, [&](Vec2 x, double w) {
      intf += w * probe.value(x);
    });
    for (const auto& [slot, c] : gc.coeffs)
      if (slot < n) r[slot] += dot(c, intf);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (const ReconstructionFragment& frag : gd.regions[i])
      r[i] += integrate_polygon(frag.polygon, levels, probe.divergence);

  if (norm_inf(r) == 0.0) return 0.0;
  const Vector x = solve_spd(k, r);
  return std::sqrt(std::max(0.0, dot(r, x)));
}

/// Built-in scalar probes (vanishing on the boundary of the unit square).
inline std::vector<ScalarProbe> scalar_probe_catalog() {
  std::vector<ScalarProbe> probes;
  probes.push_back(
      {"bubble", [](Vec2 x) { return (0.25 - x.x * x.x) * (0.25 - x.y * x.y); },
       [](Vec2 x) {
         return Vec2{-2.0 * x.x * (0.25 - x.y * x.y), -2.0 * x.y * (0.25 - x.x * x.x)};
       }});
  const double pi = 3.14159265358979323846;
  probes.push_back(
      {"cosine", [pi](Vec2 x) { return std::cos(pi * x.x) * std::cos(pi * x.y); },
       [pi](Vec2 x) {
         return Vec2{-pi * std::sin(pi * x.x) * std::cos(pi * x.y),
                     -pi * std::cos(pi * x.x) * std::sin(pi * x.y)};
       }});
  return probes;
}

/// Built-in vector probes with analytic divergence.
inline std::vector<VectorProbe> vector_probe_catalog() {
  std::vector<VectorProbe> probes;
  const double pi = 3.14159265358979323846;
  probes.push_back({"swirl",
                    [pi](Vec2 x) {
                      return Vec2{std::sin(pi * x.y), std::sin(pi * x.x)};
                    },
                    [](Vec2) { return 0.0; }});
  probes.push_back({"sines",
                    [pi](Vec2 x) {
                      return Vec2{std::sin(pi * x.x), std::sin(pi * x.y)};
                    },
                    [pi](Vec2 x) { return pi * (std::cos(pi * x.x) + std::cos(pi * x.y)); }});
  return probes;
}

}  // namespace pme
