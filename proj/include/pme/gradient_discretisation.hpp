// Space-time discretisation data. A gradient discretisation is stored in
// operator form: a piecewise-constant reconstruction (one measured region per
// degree of freedom) and a piecewise-constant gradient (one linear stencil per
// gradient cell), together with interpolation points and the lumped measures.
// From these the mass and diffusion matrices, interpolants, source vectors and
// exact discrete norms are assembled backend-independently. Degrees of freedom
// are ordered unknowns first, then the pinned boundary slots.
#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "pme/common.hpp"
#include "pme/linalg.hpp"
#include "pme/mesh.hpp"

namespace pme {

/// One piece of the reconstruction region of a degree of freedom.
struct ReconstructionFragment {
  std::vector<Vec2> polygon;
  double measure = 0.0;
};

/// Intersection of a gradient cell with one reconstruction region: the piece
/// on which both the discrete gradient and the reconstructed state are
/// constant, used to evaluate state-dependent diffusion tensors.
struct StateFragment {
  std::size_t slot = npos;
  double measure = 0.0;
  Vec2 centroid{};
};

/// Region on which the discrete gradient of a vector is the fixed linear
/// combination  grad v = sum_j coeffs[j].second * v[coeffs[j].first].
struct GradientCell {
  std::vector<Vec2> polygon;
  double measure = 0.0;
  std::vector<std::pair<std::size_t, Vec2>> coeffs;
  std::vector<StateFragment> fragments;

  Vec2 gradient(const Vector& v) const {
    Vec2 g{0.0, 0.0};
    for (const auto& [slot, c] : coeffs) g += v[slot] * c;
    return g;
  }
};

struct GradientDiscretisation {
  std::string name;        ///< backend label ("mlp1", "hmm")
  Mesh mesh;               ///< underlying mesh (owned)
  std::size_t n_unknowns = 0;  ///< slots 0..n_unknowns-1 are genuine unknowns
  std::size_t n_total = 0;     ///< unknowns followed by pinned boundary slots
  double h = 0.0;

  std::vector<Vec2> points;    ///< interpolation point per slot
  std::vector<double> lumped;  ///< lumped measure per slot (0 on massless slots)
  std::vector<std::vector<ReconstructionFragment>> regions;  ///< per slot
  std::vector<GradientCell> grad_cells;

  bool is_unknown(std::size_t i) const { return i < n_unknowns; }
  bool has_mass(std::size_t i) const { return lumped[i] > 0.0; }
  std::size_t n_boundary() const { return n_total - n_unknowns; }

  /// Nodal interpolation: evaluate a function at every slot's point.
  template <class F>
  Vector interpolate(F&& f) const {
    Vector v(n_total);
    for (std::size_t i = 0; i < n_total; ++i) v[i] = f(points[i]);
    return v;
  }

  /// Pointwise value of the reconstructed field: v_i on region i, zero
  /// outside every region (linear scan; meant for tests and field sampling).
  double reconstruct(const Vector& v, const Vec2& x) const {
    if (v.size() != n_total) throw misuse_error("reconstruct: vector has the wrong size");
    for (std::size_t i = 0; i < n_total; ++i)
      for (const ReconstructionFragment& frag : regions[i])
        if (point_in_convex_polygon(frag.polygon, x)) return v[i];
    return 0.0;
  }

  /// Diagonal lumped mass matrix over all slots.
  SparseMatrix lumped_mass() const { return SparseMatrix::diagonal(lumped); }

  /// Stiffness matrix for a state-independent tensor field.
  template <class TensorAt>
  SparseMatrix assemble_diffusion(TensorAt&& tensor_at) const {
    return assemble_impl([&](const StateFragment& sf) { return tensor_at(sf.centroid); });
  }

  /// Stiffness matrix for a state-dependent tensor: on each state fragment the
  /// tensor is evaluated at the fragment centroid and the reconstructed state.
  template <class TensorAtState>
  SparseMatrix assemble_diffusion(TensorAtState&& tensor_at, const Vector& state) const {
    if (state.size() != n_total)
      throw misuse_error("assemble_diffusion: state vector has the wrong size");
    return assemble_impl(
        [&](const StateFragment& sf) { return tensor_at(sf.centroid, state[sf.slot]); });
  }

  /// Exact L^p norm of the piecewise-constant reconstruction, p >= 1.
  double lumped_norm(const Vector& v, double p = 2.0) const {
    if (v.size() != n_total) throw misuse_error("lumped_norm: vector has the wrong size");
    if (!(p >= 1.0)) throw misuse_error("lumped_norm: p must be at least 1");
    double s = 0.0;
    for (std::size_t i = 0; i < n_total; ++i)
      if (lumped[i] > 0.0) s += lumped[i] * std::pow(std::abs(v[i]), p);
    return std::pow(s, 1.0 / p);
  }

  /// Exact L^2 norm of the piecewise-constant discrete gradient.
  double gradient_norm2(const Vector& v) const {
    if (v.size() != n_total) throw misuse_error("gradient_norm2: vector has the wrong size");
    double s = 0.0;
    for (const GradientCell& gc : grad_cells) {
      const Vec2 g = gc.gradient(v);
      s += gc.measure * dot(g, g);
    }
    return std::sqrt(s);
  }

  /// Structural invariants: measures are consistent, stencils kill constants.
  void validate() const {
    if (n_total != points.size() || n_total != lumped.size() || n_total != regions.size())
      throw misuse_error("gradient discretisation: inconsistent slot counts");
    if (n_unknowns > n_total)
      throw misuse_error("gradient discretisation: more unknowns than slots");
    double vol_regions = 0.0, vol_grad = 0.0;
    for (std::size_t i = 0; i < n_total; ++i) {
      if (lumped[i] < 0.0) throw geometry_error("gradient discretisation: negative measure");
      double s = 0.0;
      for (const ReconstructionFragment& frag : regions[i]) {
        if (frag.measure <= 0.0)
          throw geometry_error("gradient discretisation: empty region fragment");
        s += frag.measure;
      }
      if (std::abs(s - lumped[i]) > 1e-12 * std::max(1.0, s))
        throw geometry_error("gradient discretisation: region measures do not sum to the lumped measure");
      vol_regions += s;
    }
    for (const GradientCell& gc : grad_cells) {
      if (gc.measure <= 0.0) throw geometry_error("gradient discretisation: empty gradient cell");
      vol_grad += gc.measure;
      Vec2 sum{0.0, 0.0};
      double scale = 0.0;
      double frag_measure = 0.0;
      for (const auto& [slot, c] : gc.coeffs) {
        if (slot >= n_total) throw misuse_error("gradient discretisation: stencil slot out of range");
        sum += c;
        scale += norm(c);
      }
      if (norm(sum) > 1e-12 * std::max(1.0, scale))
        throw geometry_error("gradient discretisation: gradient of constants does not vanish");
      for (const StateFragment& sf : gc.fragments) {
        if (sf.slot >= n_total) throw misuse_error("gradient discretisation: fragment slot out of range");
        frag_measure += sf.measure;
      }
      if (std::abs(frag_measure - gc.measure) > 1e-12 * std::max(1.0, gc.measure))
        throw geometry_error("gradient discretisation: state fragments do not tile the gradient cell");
    }
    if (std::abs(vol_regions - vol_grad) > 1e-10 * std::max(1.0, vol_grad))
      throw geometry_error("gradient discretisation: reconstruction and gradient volumes differ");
  }

 private:
  template <class TensorOf>
  SparseMatrix assemble_impl(TensorOf&& tensor_of) const {
    std::vector<Triplet> trips;
    for (const GradientCell& gc : grad_cells) {
      SymTensor2 t{0.0, 0.0, 0.0};
      for (const StateFragment& sf : gc.fragments) {
        const SymTensor2 lam = tensor_of(sf);
        if (!lam.positive_definite())
          throw misuse_error("assemble_diffusion: tensor is not symmetric positive definite");
        t.xx += sf.measure * lam.xx;
        t.xy += sf.measure * lam.xy;
        t.yy += sf.measure * lam.yy;
      }
      // bilinear form written so that the (i,j) and (j,i) contributions are
      // bitwise equal, making the assembled matrix exactly symmetric
      for (const auto& [i, ci] : gc.coeffs)
        for (const auto& [j, cj] : gc.coeffs)
          trips.push_back({i, j,
                           t.xx * (ci.x * cj.x) + t.xy * (ci.x * cj.y + ci.y * cj.x) +
                               t.yy * (ci.y * cj.y)});
    }
    return SparseMatrix::from_triplets(n_total, n_total, trips);
  }
};

/// Map a scalar function g with g(0) = 0 over slot values; because the
/// reconstruction is piecewise constant this commutes exactly (bit for bit)
/// with applying g to the reconstructed field.
template <class F>
Vector apply_nonlinearity(const Vector& v, F&& g) {
  Vector w(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) w[i] = g(v[i]);
  return w;
}

/// Strictly increasing time nodes t_0 < t_1 < ... < t_N for implicit stepping.
struct TimeGrid {
  std::vector<double> times;

  /// N = round(T/dt) uniform steps (at least one), hitting T exactly.
  static TimeGrid uniform(double T, double dt) {
    if (!(T > 0.0)) throw misuse_error("TimeGrid: final time must be positive");
    if (!(dt > 0.0)) throw misuse_error("TimeGrid: time step must be positive");
    const long long n = std::max<long long>(1, std::llround(T / dt));
    TimeGrid g;
    g.times.resize(static_cast<std::size_t>(n) + 1);
    for (long long k = 0; k <= n; ++k)
      g.times[static_cast<std::size_t>(k)] = T * static_cast<double>(k) / static_cast<double>(n);
    g.times.front() = 0.0;
    g.times.back() = T;
    return g;
  }

  std::size_t n_steps() const { return times.empty() ? 0 : times.size() - 1; }
  double dt(std::size_t n) const { return times[n + 1] - times[n]; }
  double final_time() const { return times.back(); }

  void validate() const {
    if (times.size() < 2) throw misuse_error("TimeGrid: need at least one step");
    if (times.front() != 0.0) throw misuse_error("TimeGrid: times must start at zero");
    for (std::size_t k = 0; k + 1 < times.size(); ++k)
      if (!(times[k] < times[k + 1]))
        throw misuse_error("TimeGrid: times must be strictly increasing");
  }
};

}  // namespace pme
