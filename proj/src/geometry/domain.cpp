#include "nlstab/geometry/domain.hpp"

#include "nlstab/geometry/mesh_gen.hpp"
#include "nlstab/geometry/mesh_io.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace nlstab::geometry {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_round(Shape s) { return s == Shape::Disk || s == Shape::Ball; }

struct Polygon {
    std::vector<Point> v;
    std::vector<double> cumulative;  // arc length at vertex i
    double perimeter = 0.0;

    explicit Polygon(const std::vector<Point>& verts) : v(verts)
    {
        cumulative.push_back(0.0);
        for (std::size_t i = 0; i < v.size(); ++i) {
            perimeter += (v[(i + 1) % v.size()] - v[i]).norm();
            cumulative.push_back(perimeter);
        }
    }
    [[nodiscard]] int edge_of(const Point& p) const
    {
        int best = 0;
        double bd = kInf;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double d = point_facet_distance(2, p, v[i], v[(i + 1) % v.size()], v[i]);
            if (d < bd) {
                bd = d;
                best = static_cast<int>(i);
            }
        }
        return best;
    }
    [[nodiscard]] double arclength(const Point& p) const
    {
        const int e = edge_of(p);
        return cumulative[e] + (p - v[e]).norm();
    }
    [[nodiscard]] Point edge_normal(int e) const
    {
        const Point t = v[(e + 1) % v.size()] - v[e];
        return Point(t.y(), -t.x(), 0.0).normalized();
    }
};

// Faces of an axis-aligned box touched by p, encoded as 2*axis + (0 lo | 1 hi).
std::vector<int> box_faces(int dim, const Point& p, const Point& lo, const Point& hi)
{
    std::vector<int> out;
    const double tol = 1e-9 * (hi - lo).head(dim).norm();
    for (int i = 0; i < dim; ++i) {
        if (std::abs(p[i] - lo[i]) < tol) out.push_back(2 * i);
        if (std::abs(p[i] - hi[i]) < tol) out.push_back(2 * i + 1);
    }
    return out;
}

Point box_face_normal(int face)
{
    Point n = Point::Zero();
    n[face / 2] = face % 2 ? 1.0 : -1.0;
    return n;
}

BoundaryPatch make_patch(const Mesh& mesh, const std::vector<double>& dist, double radius, bool full,
                         const std::string& name)
{
    BoundaryPatch p;
    p.name = name;
    p.radius = full ? kInf : radius;
    p.full = full;
    p.node_in.assign(mesh.num_nodes(), 0);
    for (int v : mesh.boundary_nodes)
        if (full || dist[v] < radius) p.node_in[v] = 1;
    for (int f = 0; f < static_cast<int>(mesh.bfacets.size()); ++f) {
        bool touches = false;
        for (int i = 0; i < mesh.dim; ++i) touches |= p.node_in[mesh.bfacets[f][i]] != 0;
        if (touches) {
            p.facets.push_back(f);
            p.area += mesh.facet_measure(f);
        }
    }
    return p;
}

bool patch_connected(const Mesh& mesh, const BoundaryPatch& p)
{
    if (p.facets.empty()) return false;
    std::vector<std::vector<int>> by_node(mesh.num_nodes());
    for (std::size_t k = 0; k < p.facets.size(); ++k)
        for (int i = 0; i < mesh.dim; ++i) by_node[mesh.bfacets[p.facets[k]][i]].push_back(static_cast<int>(k));
    std::vector<char> seen(p.facets.size(), 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    std::size_t count = 1;
    while (!q.empty()) {
        const int k = q.front();
        q.pop();
        for (int i = 0; i < mesh.dim; ++i)
            for (int j : by_node[mesh.bfacets[p.facets[k]][i]])
                if (!seen[j]) {
                    seen[j] = 1;
                    ++count;
                    q.push(j);
                }
    }
    return count == p.facets.size();
}

} // namespace

Shape parse_shape(const std::string& name)
{
    if (name == "disk") return Shape::Disk;
    if (name == "ball") return Shape::Ball;
    if (name == "polygon") return Shape::Polygon;
    if (name == "box") return Shape::Box;
    if (name == "imported") return Shape::Imported;
    throw InvalidArgument("unknown shape '" + name + "'");
}

std::string shape_name(Shape s)
{
    switch (s) {
    case Shape::Disk: return "disk";
    case Shape::Ball: return "ball";
    case Shape::Polygon: return "polygon";
    case Shape::Box: return "box";
    case Shape::Imported: return "imported";
    }
    return "unknown";
}

double smoothstep5(double t)
{
    t = std::clamp(t, 0.0, 1.0);
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

double distance_to_boundary(const Mesh& mesh, const Point& p)
{
    double best = kInf;
    for (const auto& f : mesh.bfacets) {
        const Point& a = mesh.nodes[f[0]];
        const Point& b = mesh.nodes[f[1]];
        const Point& c = mesh.dim == 3 ? mesh.nodes[f[2]] : a;
        best = std::min(best, point_facet_distance(mesh.dim, p, a, b, c));
    }
    return best;
}

void BoundaryFunction::validate(const Mesh& mesh) const
{
    NLSTAB_REQUIRE(mesh_id == mesh.id, InvalidArgument, "BoundaryFunction: built on a different mesh");
    NLSTAB_REQUIRE(values.size() == mesh.num_boundary_nodes(), InvalidArgument,
                   "BoundaryFunction: value count does not match boundary nodes");
    NLSTAB_REQUIRE(values.allFinite(), InvalidArgument, "BoundaryFunction: non-finite value");
    if (support.empty()) return;
    for (int b = 0; b < mesh.num_boundary_nodes(); ++b)
        NLSTAB_REQUIRE(support[mesh.boundary_nodes[b]] || values[b] == 0.0, InvalidArgument,
                       "BoundaryFunction: nonzero value outside the declared support");
}

DomainTriple build_domain(const DomainSpec& spec)
{
    NLSTAB_REQUIRE(spec.h > 0, InvalidArgument, "build_domain: h must be positive");
    NLSTAB_REQUIRE(spec.outer_radius > 1, InvalidArgument, "build_domain: outer_radius must exceed 1");
    if (!spec.full_boundary) {
        NLSTAB_REQUIRE(spec.patch_radius > 0, InvalidArgument, "build_domain: patch S is empty");
        NLSTAB_REQUIRE(spec.subpatch_radius > 0 && spec.subpatch_radius < spec.patch_radius, InvalidArgument,
                       "build_domain: S' must be nonempty and compactly contained in S");
    }

    DomainTriple dom;
    dom.spec = spec;
    Mesh omega;
    switch (spec.shape) {
    case Shape::Disk:
    case Shape::Ball: {
        dom.dim = spec.shape == Shape::Disk ? 2 : 3;
        Point dir = spec.x0;
        if (dom.dim == 2) dir.z() = 0;
        NLSTAB_REQUIRE(dir.norm() > 0, InvalidArgument, "build_domain: x0 direction is zero");
        omega = make_round_mesh(dom.dim, spec.h, 1.0, dir.normalized(), spec.grading);
        break;
    }
    case Shape::Polygon:
        dom.dim = 2;
        omega = make_polygon_mesh(spec.polygon, spec.h);
        break;
    case Shape::Box:
        dom.dim = 3;
        omega = make_box_mesh(3, spec.box_lo, spec.box_hi, spec.h);
        break;
    case Shape::Imported:
        omega = read_mesh(spec.mesh_file);
        dom.dim = omega.dim;
        break;
    }
    NLSTAB_REQUIRE(!(spec.grading > 0 && !is_round(spec.shape)), InvalidArgument,
                   "build_domain: grading is only available for the disk and the ball");

    // Marked point: nearest boundary node.
    Point target = spec.x0;
    if (is_round(spec.shape)) target = spec.x0.normalized();
    if (dom.dim == 2) target.z() = 0;
    double best = kInf;
    for (int v : omega.boundary_nodes) {
        const double d = (omega.nodes[v] - target).norm();
        if (d < best) {
            best = d;
            dom.x0_node = v;
        }
    }
    dom.x0 = omega.nodes[dom.x0_node];
    if (spec.x0_size > 0) {
        NLSTAB_REQUIRE(spec.size_growth > 0, InvalidArgument, "build_domain: size_growth must be positive");
        const Point p = dom.x0;
        auto size = [&](const Point& x) { return std::max(spec.x0_size, spec.size_growth * (x - p).norm()); };
        std::function<Point(const Point&)> project;
        if (is_round(spec.shape)) project = [](const Point& x) { return Point(x.normalized()); };
        omega = refine_by_size(omega, size, project);
    }

    const int nn = omega.num_nodes();
    dom.boundary_distance.assign(nn, kInf);
    dom.node_normal.assign(nn, Point::Zero());

    if (is_round(spec.shape)) {
        for (int v : omega.boundary_nodes) {
            const Point u = omega.nodes[v].normalized();
            dom.node_normal[v] = u;
            dom.boundary_distance[v] = std::acos(std::clamp(u.dot(dom.x0.normalized()), -1.0, 1.0));
        }
        dom.delta_prime = 0.5;
    } else if (spec.shape == Shape::Polygon) {
        const Polygon poly(spec.polygon);
        const double s0 = poly.arclength(dom.x0);
        for (int v : omega.boundary_nodes) {
            const Point& p = omega.nodes[v];
            const double ds = std::abs(poly.arclength(p) - s0);
            dom.boundary_distance[v] = std::min(ds, poly.perimeter - ds);
            Point n = Point::Zero();
            for (std::size_t e = 0; e < poly.v.size(); ++e)
                if (point_facet_distance(2, p, poly.v[e], poly.v[(e + 1) % poly.v.size()], p) < 1e-9)
                    n += poly.edge_normal(static_cast<int>(e));
            dom.node_normal[v] = n.normalized();
        }
        double corner = kInf;
        for (double c : poly.cumulative) {
            const double ds = std::abs(c - s0);
            corner = std::min(corner, std::min(ds, poly.perimeter - ds));
        }
        dom.delta_prime = 0.5 * corner;
    } else if (spec.shape == Shape::Box) {
        const auto faces0 = box_faces(3, dom.x0, spec.box_lo, spec.box_hi);
        NLSTAB_REQUIRE(faces0.size() == 1, InvalidArgument, "build_domain: x0 must lie inside a face of the box");
        const int face = faces0[0];
        const int axis = face / 2;
        double edge = kInf;
        for (int i = 0; i < 3; ++i)
            if (i != axis)
                edge = std::min({edge, dom.x0[i] - spec.box_lo[i], spec.box_hi[i] - dom.x0[i]});
        for (int v : omega.boundary_nodes) {
            const auto fs = box_faces(3, omega.nodes[v], spec.box_lo, spec.box_hi);
            Point n = Point::Zero();
            for (int f : fs) n += box_face_normal(f);
            dom.node_normal[v] = n.normalized();
            if (std::find(fs.begin(), fs.end(), face) != fs.end())
                dom.boundary_distance[v] = (omega.nodes[v] - dom.x0).norm();
        }
        dom.delta_prime = 0.5 * edge;
    } else {
        for (std::size_t f = 0; f < omega.bfacets.size(); ++f) {
            const Point n = omega.facet_normal(static_cast<int>(f)) * omega.facet_measure(static_cast<int>(f));
            for (int i = 0; i < omega.dim; ++i) dom.node_normal[omega.bfacets[f][i]] += n;
        }
        for (int v : omega.boundary_nodes) {
            dom.node_normal[v].normalize();
            dom.boundary_distance[v] = (omega.nodes[v] - dom.x0).norm();
        }
        dom.delta_prime = 0.25;
    }
    if (spec.delta_prime > 0) dom.delta_prime = spec.delta_prime;
    if (spec.full_boundary)
        for (int v : omega.boundary_nodes) dom.boundary_distance[v] = 0.0;

    if (!spec.full_boundary && !is_round(spec.shape) && spec.shape != Shape::Imported)
        NLSTAB_REQUIRE(spec.subpatch_radius <= 2 * dom.delta_prime, InvalidArgument,
                       "build_domain: S' must stay on the flat boundary piece containing x0");

    dom.S = make_patch(omega, dom.boundary_distance, spec.patch_radius, spec.full_boundary, "S");
    dom.S_prime = make_patch(omega, dom.boundary_distance, spec.subpatch_radius, spec.full_boundary, "S'");
    int sprime_nodes = 0;
    for (int v : omega.boundary_nodes) sprime_nodes += dom.S_prime.node_in[v];
    NLSTAB_REQUIRE(sprime_nodes >= dom.dim + 1, InvalidArgument,
                   "build_domain: h too coarse to resolve S' (" + std::to_string(sprime_nodes) + " nodes)");
    NLSTAB_REQUIRE(patch_connected(omega, dom.S) && patch_connected(omega, dom.S_prime), InvalidArgument,
                   "build_domain: boundary patch is not connected");

    // Enclosing ball about the node centroid.
    Point c = Point::Zero();
    if (!is_round(spec.shape)) {
        for (const auto& p : omega.nodes) c += p;
        c /= nn;
    }
    double circum = 0.0;
    for (const auto& p : omega.nodes) circum = std::max(circum, (p - c).norm());
    dom.center = c;
    dom.star_radius = spec.outer_radius * circum;

    dom.bulge_height = spec.bulge_height > 0 ? spec.bulge_height
                                             : std::min(3.0 * dom.delta_prime, 0.9 * (dom.star_radius - circum));
    dom.local_h = omega.local_size(dom.x0_node);

    std::vector<double> profile(nn, 0.0);
    for (int v : omega.boundary_nodes) {
        if (spec.full_boundary) {
            profile[v] = 1.0;
        } else if (dom.boundary_distance[v] < spec.subpatch_radius) {
            const double r = dom.boundary_distance[v] / spec.subpatch_radius;
            profile[v] = std::pow(1.0 - r * r, 3);
            if (profile[v] < 1e-6) profile[v] = 0.0;
        }
    }
    // First layer about as thick as the mesh at x0, then geometric growth.
    constexpr double growth = 1.15;
    const int layers = std::max(
        2, static_cast<int>(std::ceil(std::log1p(dom.bulge_height * (growth - 1.0) / dom.local_h) / std::log(growth))));
    Mesh prime = extrude_boundary(omega, profile, dom.node_normal, dom.bulge_height, layers, growth);

    const double dist_x0 = distance_to_boundary(prime, dom.x0);
    dom.delta = std::min({dist_x0 / 3.0, 1.0, dom.delta_prime});

    const double star_h = std::max(2.0 * spec.h, 0.15 * dom.star_radius);
    Mesh star = make_round_mesh(dom.dim, star_h, dom.star_radius,
                                dom.dim == 2 ? Point::UnitX() : Point::UnitZ());
    for (auto& p : star.nodes) p += c;

    dom.omega = std::make_shared<const Mesh>(std::move(omega));
    dom.omega_prime = std::make_shared<const Mesh>(std::move(prime));
    dom.omega_star = std::make_shared<const Mesh>(std::move(star));
    dom.validate();
    return dom;
}

void DomainTriple::validate() const
{
    NLSTAB_REQUIRE(omega && omega_prime && omega_star, InvalidArgument, "DomainTriple: missing mesh");
    const double tol = 1e-9;
    for (const auto* m : {omega.get(), omega_prime.get()})
        for (const auto& p : m->nodes)
            NLSTAB_REQUIRE((p - center).norm() < star_radius - tol, InvalidArgument,
                           "DomainTriple: a vertex of Omega or Omega' lies outside Omega*");
    NLSTAB_REQUIRE(omega_prime->num_nodes() >= omega->num_nodes(), InvalidArgument,
                   "DomainTriple: Omega' does not contain Omega");
    for (int v = 0; v < omega->num_nodes(); ++v)
        NLSTAB_REQUIRE((omega_prime->nodes[v] - omega->nodes[v]).norm() == 0.0, InvalidArgument,
                       "DomainTriple: Omega' does not reuse the Omega nodes");
    for (int v : omega->boundary_nodes)
        if (!S_prime.contains_node(v))
            NLSTAB_REQUIRE(omega_prime->boundary_index[v] >= 0, InvalidArgument,
                           "DomainTriple: boundary node outside S' is not on the boundary of Omega'");
    for (int v : omega->boundary_nodes)
        NLSTAB_REQUIRE(!S_prime.contains_node(v) || S.contains_node(v), InvalidArgument,
                       "DomainTriple: S' is not contained in S");
    NLSTAB_REQUIRE(S_prime.contains_node(x0_node), InvalidArgument, "DomainTriple: x0 is not in S'");
    const double dist = distance_to_boundary(*omega_prime, x0);
    NLSTAB_REQUIRE(delta > 0 && delta <= std::min(dist / 3.0, 1.0) + tol, InvalidArgument,
                   "DomainTriple: delta violates delta <= min(dist(x0, boundary of Omega')/3, 1)");
    for (const auto* m : {omega.get(), omega_prime.get(), omega_star.get()})
        for (int c = 0; c < m->num_cells(); ++c)
            NLSTAB_REQUIRE(m->signed_volume(c) > 0, InvalidArgument, "DomainTriple: cell with non-positive volume");
}

Point exterior_point(const DomainTriple& dom, double tau)
{
    NLSTAB_REQUIRE(tau > 0 && tau < dom.delta, InvalidArgument,
                   "exterior_point: tau must lie in (0, delta) with delta = " + std::to_string(dom.delta));
    return dom.x0 + tau * dom.normal_at_x0();
}

BoundaryFunction boundary_cutoff(const DomainTriple& dom)
{
    const Mesh& m = *dom.omega;
    BoundaryFunction chi;
    chi.mesh_id = m.id;
    chi.values.resize(m.num_boundary_nodes());
    chi.support = dom.S.node_in;
    const double r1 = dom.spec.subpatch_radius, r2 = dom.spec.patch_radius;
    NLSTAB_REQUIRE(dom.spec.full_boundary || r1 < r2, InvalidArgument,
                   "boundary_cutoff: S' is not compactly contained in S");
    for (int b = 0; b < m.num_boundary_nodes(); ++b) {
        const int v = m.boundary_nodes[b];
        if (dom.spec.full_boundary) {
            chi.values[b] = 1.0;
            continue;
        }
        const double d = dom.boundary_distance[v];
        chi.values[b] = d >= r2 ? 0.0 : 1.0 - smoothstep5((d - r1) / (r2 - r1));
    }
    return chi;
}

bool inside_omega(const DomainTriple& dom, const Point& p)
{
    const auto& spec = dom.spec;
    switch (spec.shape) {
    case Shape::Disk:
    case Shape::Ball: return p.norm() < 1.0;
    case Shape::Polygon: {
        const auto& v = spec.polygon;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const Point e = v[(i + 1) % v.size()] - v[i], w = p - v[i];
            if (e.x() * w.y() - e.y() * w.x() <= 0) return false;
        }
        return true;
    }
    case Shape::Box:
        for (int i = 0; i < 3; ++i)
            if (p[i] <= spec.box_lo[i] || p[i] >= spec.box_hi[i]) return false;
        return true;
    case Shape::Imported: break;
    }
    const Mesh& m = *dom.omega;
    for (int c = 0; c < m.num_cells(); ++c) {
        std::array<Point, 4> q;
        for (int i = 0; i <= m.dim; ++i) q[i] = m.nodes[m.cells[c][i]];
        const double vol = m.signed_volume(c);
        bool in = true;
        for (int i = 0; i <= m.dim && in; ++i) {
            auto r = q;
            r[i] = p;
            in = simplex_volume(m.dim, r) > 1e-12 * vol;
        }
        if (in) return true;
    }
    return false;
}

} // namespace nlstab::geometry
