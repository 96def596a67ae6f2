// Mass-lumped conforming P1 discretisation on triangular meshes. Degrees of
// freedom sit at the vertices (interior ones are unknowns, boundary ones are
// pinned); the reconstruction of a vertex is constant on the union of the
// barycentric third-quadrilaterals of its adjacent triangles, and the gradient
// is the usual piecewise P1 gradient, constant per triangle.
#pragma once

#include <array>
#include <vector>

#include "pme/gradient_discretisation.hpp"
#include "pme/mesh.hpp"

namespace pme {

inline GradientDiscretisation build_mlp1(Mesh mesh) {
  for (std::size_t c = 0; c < mesh.n_cells(); ++c)
    if (mesh.cell(c).vertices.size() != 3)
      throw misuse_error("build_mlp1: mesh must be triangular");

  GradientDiscretisation gd;
  gd.name = "mlp1";
  gd.h = mesh.h();

  // vertex -> slot, interior first
  const std::size_t nv = mesh.n_vertices();
  std::vector<std::size_t> slot_of(nv, npos);
  std::size_t next = 0;
  for (std::size_t v = 0; v < nv; ++v)
    if (!mesh.boundary_vertex(v)) slot_of[v] = next++;
  gd.n_unknowns = next;
  for (std::size_t v = 0; v < nv; ++v)
    if (mesh.boundary_vertex(v)) slot_of[v] = next++;
  gd.n_total = next;

  gd.points.resize(gd.n_total);
  gd.lumped.assign(gd.n_total, 0.0);
  gd.regions.resize(gd.n_total);
  for (std::size_t v = 0; v < nv; ++v) gd.points[slot_of[v]] = mesh.vertex(v);

  gd.grad_cells.reserve(mesh.n_cells());
  for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
    const MeshCell& cell = mesh.cell(c);
    const Vec2 p0 = mesh.vertex(cell.vertices[0]);
    const Vec2 p1 = mesh.vertex(cell.vertices[1]);
    const Vec2 p2 = mesh.vertex(cell.vertices[2]);
    const Vec2 centre = (p0 + p1 + p2) / 3.0;
    const std::array<Vec2, 3> corner = {p0, p1, p2};
    const std::array<Vec2, 3> mid = {0.5 * (p0 + p1), 0.5 * (p1 + p2), 0.5 * (p2 + p0)};

    GradientCell gc;
    gc.polygon = {p0, p1, p2};
    gc.measure = cell.measure;
    for (int k = 0; k < 3; ++k) {
      const std::size_t slot = slot_of[cell.vertices[static_cast<std::size_t>(k)]];
      // hat-function gradient: quarter-turn of the opposite edge over twice the area
      const Vec2 edge = corner[(k + 2) % 3] - corner[(k + 1) % 3];
      gc.coeffs.emplace_back(slot, rot90(edge) / (2.0 * cell.measure));

      // barycentric third of the triangle around corner k
      ReconstructionFragment frag;
      frag.polygon = {corner[k], mid[k], centre, mid[(k + 2) % 3]};
      frag.measure = polygon_area(frag.polygon);
      StateFragment sf;
      sf.slot = slot;
      sf.measure = frag.measure;
      sf.centroid = polygon_centroid(frag.polygon);
      gc.fragments.push_back(sf);
      gd.lumped[slot] += frag.measure;
      gd.regions[slot].push_back(std::move(frag));
    }
    gd.grad_cells.push_back(std::move(gc));
  }

  gd.mesh = std::move(mesh);
  gd.validate();
  return gd;
}

}  // namespace pme
