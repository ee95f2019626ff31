#pragma once

#include "nlstab/common.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace nlstab::geometry {

/// Conforming simplicial mesh (triangles for n = 2, tetrahedra for n = 3).
///
/// `cells[c]` uses the first dim+1 entries, `bfacets[f]` the first dim
/// entries. After `finalize()` every cell has positive orientation, every
/// boundary facet is ordered so that its normal points out of the mesh, and
/// the boundary node numbering (`boundary_nodes` / `boundary_index`) is
/// available. Node ids are stable: derived meshes (the bulged extension of a
/// domain) keep the ids of the mesh they were built from.
struct Mesh {
    int dim = 2;
    std::vector<Point> nodes;
    std::vector<std::array<int, 4>> cells;
    std::vector<std::array<int, 3>> bfacets;
    std::vector<int> bfacet_tag;

    std::vector<int> boundary_nodes;
    std::vector<int> boundary_index;
    std::uint64_t id = 0;

    [[nodiscard]] int num_nodes() const { return static_cast<int>(nodes.size()); }
    [[nodiscard]] int num_cells() const { return static_cast<int>(cells.size()); }
    [[nodiscard]] int num_boundary_nodes() const { return static_cast<int>(boundary_nodes.size()); }
    [[nodiscard]] int verts_per_cell() const { return dim + 1; }

    /// Orients cells, recomputes boundary facets when none are given (tags
    /// default to 0), orients facets outward and assigns a fresh mesh id.
    /// Throws InvalidArgument on a cell with non-positive volume.
    void finalize();

    [[nodiscard]] double signed_volume(int cell) const;
    [[nodiscard]] double facet_measure(int facet) const;
    /// Unit outward normal of boundary facet f.
    [[nodiscard]] Point facet_normal(int facet) const;
    /// Longest edge over all cells.
    [[nodiscard]] double max_edge() const;
    /// Longest edge among cells touching node v.
    [[nodiscard]] double local_size(int node) const;
    [[nodiscard]] double total_volume() const;
};

/// Signed volume of the simplex spanned by `pts` (dim+1 points).
double simplex_volume(int dim, const std::array<Point, 4>& pts);

/// Distance from p to the closest point of a boundary facet (segment or triangle).
double point_facet_distance(int dim, const Point& p, const Point& a, const Point& b, const Point& c);

/// Sorted vertex key of a facet, used for face matching.
std::array<int, 3> facet_key(int dim, const std::array<int, 3>& f);

} // namespace nlstab::geometry
