#pragma once

#include "nlstab/geometry/mesh.hpp"

#include <functional>
#include <vector>

namespace nlstab::geometry {

/// Unit disk (dim = 2) or unit ball (dim = 3) scaled by `radius`.
///
/// Structured O-grid: a Kuhn-split square/cube core surrounded by radial
/// layers that map the core boundary onto the sphere (equiangular
/// projection). `pole` is a unit vector; the mesh has a node at
/// radius * pole. `grading` in [0, 1) applies the ball automorphism that
/// fixes the pole and shrinks cells near it by (1 - grading)/(1 + grading).
Mesh make_round_mesh(int dim, double h, double radius, const Point& pole, double grading = 0.0);

/// Convex polygon with counter-clockwise vertices; fan from the centroid
/// with uniform subdivision of every fan triangle.
Mesh make_polygon_mesh(const std::vector<Point>& vertices, double h);

/// Axis-aligned box [lo, hi] (dim = 3) or rectangle (dim = 2), Kuhn split.
Mesh make_box_mesh(int dim, const Point& lo, const Point& hi, double h);

/// Conforming longest-edge bisection (each edge is split only once it is the
/// longest edge of every cell around it). Cells whose longest edge exceeds
/// size(centroid) are refined until none remain. Midpoints of boundary edges
/// are passed through `project` (kept on the chord when empty). Node ids of
/// `base` are preserved; boundary facets are rebuilt with tag 0.
Mesh refine_by_size(const Mesh& base, const std::function<double(const Point&)>& size,
                    const std::function<Point(const Point&)>& project = {});

/// Builds an outward extension of `base` by pushing layers off the boundary.
///
/// Boundary node i moves by height * profile[i] * normals[i] (profile in
/// [0,1], zero outside the region to bulge). Facets with at least one node of
/// positive profile are extruded in `layers` layers; nodes with zero profile
/// are shared by all layers, so the extension boundary coincides with the base
/// boundary wherever the profile vanishes. Base node ids are preserved.
/// Layer thicknesses grow geometrically by `growth` (1 = uniform).
Mesh extrude_boundary(const Mesh& base, const std::vector<double>& profile,
                      const std::vector<Point>& normals, double height, int layers, double growth = 1.0);

} // namespace nlstab::geometry
