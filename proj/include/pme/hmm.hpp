// Hybrid mimetic mixed discretisation on general polytopal meshes. Degrees of
// freedom sit at cell barycenters and face midpoints; cells and interior faces
// are unknowns, boundary faces are pinned. The reconstruction of a cell is
// constant on the cell (faces reconstruct to nothing and carry no mass), and
// the gradient is constant on each cell/face pyramid: the consistent cell
// gradient plus a stabilisation proportional to the face residual.
#pragma once

#include <cmath>
#include <vector>

#include "pme/gradient_discretisation.hpp"
#include "pme/mesh.hpp"

namespace pme {

inline GradientDiscretisation build_hmm(Mesh mesh) {
  GradientDiscretisation gd;
  gd.name = "hmm";
  gd.h = mesh.h();

  const std::size_t nc = mesh.n_cells();
  const std::size_t nf = mesh.n_faces();
  std::vector<std::size_t> face_slot(nf, npos);
  std::size_t next = nc;
  for (std::size_t f = 0; f < nf; ++f)
    if (!mesh.face(f).boundary) face_slot[f] = next++;
  gd.n_unknowns = next;
  for (std::size_t f = 0; f < nf; ++f)
    if (mesh.face(f).boundary) face_slot[f] = next++;
  gd.n_total = next;

  gd.points.resize(gd.n_total);
  gd.lumped.assign(gd.n_total, 0.0);
  gd.regions.resize(gd.n_total);
  for (std::size_t c = 0; c < nc; ++c) {
    gd.points[c] = mesh.cell(c).barycenter;
    gd.lumped[c] = mesh.cell(c).measure;
    ReconstructionFragment frag;
    frag.polygon = mesh.cell_polygon(c);
    frag.measure = mesh.cell(c).measure;
    gd.regions[c].push_back(std::move(frag));
  }
  for (std::size_t f = 0; f < nf; ++f) gd.points[face_slot[f]] = mesh.face(f).barycenter;

  const double stab = std::sqrt(2.0);  // sqrt(space dimension)
  for (std::size_t c = 0; c < nc; ++c) {
    const MeshCell& cell = mesh.cell(c);
    const std::size_t nk = cell.faces.size();
    // consistent cell gradient G_K v = (1/|K|) sum |sigma| v_sigma n_sigma
    std::vector<Vec2> w(nk);
    for (std::size_t k = 0; k < nk; ++k)
      w[k] = (mesh.face(cell.faces[k]).measure / cell.measure) * cell.normals[k];

    for (std::size_t k = 0; k < nk; ++k) {
      const MeshFace& face = mesh.face(cell.faces[k]);
      const Vec2 n = cell.normals[k];
      const Vec2 y = face.barycenter - cell.barycenter;
      const double d = dot(y, n);
      if (!(d > 0.0))
        throw geometry_error("build_hmm: nonpositive distance from barycenter to a face");
      const double s = stab / d;

      GradientCell gc;
      const Vec2 va = mesh.vertex(cell.vertices[k]);
      const Vec2 vb = mesh.vertex(cell.vertices[(k + 1) % nk]);
      gc.polygon = {cell.barycenter, va, vb};
      gc.measure = 0.5 * face.measure * d;
      gc.coeffs.emplace_back(c, -s * n);
      for (std::size_t k2 = 0; k2 < nk; ++k2) {
        const double res = (k2 == k ? 1.0 : 0.0) - dot(w[k2], y);
        gc.coeffs.emplace_back(face_slot[cell.faces[k2]], w[k2] + (s * res) * n);
      }
      StateFragment sf;
      sf.slot = c;
      sf.measure = gc.measure;
      sf.centroid = (cell.barycenter + va + vb) / 3.0;
      gc.fragments.push_back(sf);
      gd.grad_cells.push_back(std::move(gc));
    }
  }

  gd.mesh = std::move(mesh);
  gd.validate();
  return gd;
}

}  // namespace pme
