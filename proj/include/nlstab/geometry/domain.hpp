#pragma once

#include "nlstab/geometry/mesh.hpp"

#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace nlstab::geometry {

enum class Shape { Disk, Ball, Polygon, Box, Imported };

Shape parse_shape(const std::string& name);
std::string shape_name(Shape s);

/// Geometric description of Ω, its boundary patches and the extension sizes.
///
/// Patch sizes are distances from x0 measured along the boundary: the
/// geodesic angle on the disk/ball, arc length on a polygon, in-face distance
/// on a box (other faces are infinitely far) and Euclidean distance for
/// imported meshes.
struct DomainSpec {
    Shape shape = Shape::Disk;
    double h = 0.1;
    /// Disk/ball: direction of x0 (normalized). Other shapes: a point snapped
    /// to the nearest boundary node.
    Point x0 = Point::UnitX();
    bool full_boundary = false;
    double patch_radius = M_PI / 4;     // S = {d < patch_radius}
    double subpatch_radius = M_PI / 8;  // S' = {d < subpatch_radius}
    /// Radius of the enclosing ball, relative to the circumradius of Ω about
    /// its centroid.
    double outer_radius = 1.5;
    /// Height of the outward bulge over S'; 0 selects min(3 delta', 0.9 (R* - 1) r).
    double bulge_height = 0.0;
    /// Mesh compression toward x0 (disk/ball only), see make_round_mesh.
    double grading = 0.0;
    /// Local bisection toward x0 (0 = off): cells are refined until their
    /// longest edge is at most max(x0_size, size_growth * distance to x0).
    double x0_size = 0.0;
    double size_growth = 0.5;
    /// Tubular-neighbourhood radius; 0 selects the shape default.
    double delta_prime = 0.0;
    std::vector<Point> polygon;
    Point box_lo = Point(-1, -1, -1);
    Point box_hi = Point(1, 1, 1);
    std::string mesh_file;
    int imported_dim = 0;
};

/// Boundary region {d < radius} of a mesh boundary.
struct BoundaryPatch {
    std::string name;
    double radius = 0.0;
    bool full = false;
    /// Per mesh node: 1 when the node lies in the open patch.
    std::vector<char> node_in;
    /// Boundary facets touching at least one patch node.
    std::vector<int> facets;
    double area = 0.0;

    [[nodiscard]] bool contains_node(int v) const { return node_in[v] != 0; }
};

/// Nodal values on the boundary nodes of a mesh, ordered by boundary_index.
struct BoundaryFunction {
    std::uint64_t mesh_id = 0;
    Vector values;
    /// Optional support patch as a node mask over the mesh (empty = none).
    std::vector<char> support;

    /// Throws InvalidArgument when a declared support is violated.
    void validate(const Mesh& mesh) const;
};

class DomainTriple {
public:
    int dim = 2;
    DomainSpec spec;
    std::shared_ptr<const Mesh> omega;
    std::shared_ptr<const Mesh> omega_prime;
    std::shared_ptr<const Mesh> omega_star;
    BoundaryPatch S;
    BoundaryPatch S_prime;
    Point x0 = Point::Zero();
    int x0_node = -1;
    Point center = Point::Zero();
    double star_radius = 0.0;
    double delta = 0.0;
    double delta_prime = 0.0;
    double bulge_height = 0.0;
    /// Longest edge among Ω cells touching x0.
    double local_h = 0.0;
    /// Boundary distance from x0 per Ω node (infinity for interior nodes).
    std::vector<double> boundary_distance;
    /// Outward unit normal per Ω boundary node (zero for interior nodes).
    std::vector<Point> node_normal;

    [[nodiscard]] Point normal_at_x0() const { return node_normal[x0_node]; }
    [[nodiscard]] double h() const { return spec.h; }

    /// Re-checks every geometric invariant; throws InvalidArgument with a
    /// description of the first violation.
    void validate() const;
};

DomainTriple build_domain(const DomainSpec& spec);

/// y_tau = x0 + tau * nu(x0); requires 0 < tau < delta.
Point exterior_point(const DomainTriple& dom, double tau);

/// C^2 cutoff on the Ω boundary: 1 on S', 0 outside S, quintic blend between.
BoundaryFunction boundary_cutoff(const DomainTriple& dom);

/// Point-location test for Ω (exact for builtin shapes, mesh-based otherwise).
bool inside_omega(const DomainTriple& dom, const Point& p);

/// Minimum distance from p to the boundary facets of `mesh`.
double distance_to_boundary(const Mesh& mesh, const Point& p);

/// Quintic smoothstep 6t^5 - 15t^4 + 10t^3 clamped to [0, 1].
double smoothstep5(double t);

} // namespace nlstab::geometry
