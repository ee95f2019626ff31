#include "nlstab/geometry/mesh.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace nlstab::geometry {

namespace {

std::atomic<std::uint64_t> next_mesh_id{1};

struct FaceRecord {
    std::array<int, 3> key;
    int cell;
    int opposite;
    std::array<int, 3> verts;
};

Point raw_normal(int dim, const Point& a, const Point& b, const Point& c)
{
    if (dim == 2) {
        const Point t = b - a;
        return Point(t.y(), -t.x(), 0.0);
    }
    return (b - a).cross(c - a);
}

} // namespace

double simplex_volume(int dim, const std::array<Point, 4>& p)
{
    if (dim == 2) {
        const Point e1 = p[1] - p[0], e2 = p[2] - p[0];
        return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
    }
    return (p[1] - p[0]).dot((p[2] - p[0]).cross(p[3] - p[0])) / 6.0;
}

std::array<int, 3> facet_key(int dim, const std::array<int, 3>& f)
{
    std::array<int, 3> k = f;
    if (dim == 2) {
        k[2] = -1;
        if (k[0] > k[1]) std::swap(k[0], k[1]);
    } else {
        std::sort(k.begin(), k.end());
    }
    return k;
}

double point_facet_distance(int dim, const Point& p, const Point& a, const Point& b, const Point& c)
{
    if (dim == 2) {
        const Point ab = b - a;
        const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
        return (p - (a + t * ab)).norm();
    }
    // Closest point on triangle (Ericson, Real-Time Collision Detection, 5.1.5).
    const Point ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0 && d2 <= 0) return ap.norm();
    const Point bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0 && d4 <= d3) return bp.norm();
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) return (p - (a + d1 / (d1 - d3) * ab)).norm();
    const Point cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0 && d5 <= d6) return cp.norm();
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) return (p - (a + d2 / (d2 - d6) * ac)).norm();
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
        const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (p - (b + w * (c - b))).norm();
    }
    const double denom = 1.0 / (va + vb + vc);
    const double v = vb * denom, w = vc * denom;
    return (p - (a + v * ab + w * ac)).norm();
}

double Mesh::signed_volume(int c) const
{
    std::array<Point, 4> p;
    for (int i = 0; i <= dim; ++i) p[i] = nodes[cells[c][i]];
    return simplex_volume(dim, p);
}

double Mesh::facet_measure(int f) const
{
    const auto& v = bfacets[f];
    const Point n = raw_normal(dim, nodes[v[0]], nodes[v[1]], dim == 3 ? nodes[v[2]] : Point::Zero());
    return dim == 2 ? n.norm() : 0.5 * n.norm();
}

Point Mesh::facet_normal(int f) const
{
    const auto& v = bfacets[f];
    return raw_normal(dim, nodes[v[0]], nodes[v[1]], dim == 3 ? nodes[v[2]] : Point::Zero()).normalized();
}

double Mesh::max_edge() const
{
    double m = 0.0;
    for (const auto& c : cells)
        for (int i = 0; i <= dim; ++i)
            for (int j = i + 1; j <= dim; ++j) m = std::max(m, (nodes[c[i]] - nodes[c[j]]).norm());
    return m;
}

double Mesh::local_size(int node) const
{
    double m = 0.0;
    for (const auto& c : cells) {
        bool touches = false;
        for (int i = 0; i <= dim; ++i) touches |= c[i] == node;
        if (!touches) continue;
        for (int i = 0; i <= dim; ++i)
            for (int j = i + 1; j <= dim; ++j) m = std::max(m, (nodes[c[i]] - nodes[c[j]]).norm());
    }
    return m;
}

double Mesh::total_volume() const
{
    double v = 0.0;
    for (int c = 0; c < num_cells(); ++c) v += signed_volume(c);
    return v;
}

void Mesh::finalize()
{
    NLSTAB_REQUIRE(dim == 2 || dim == 3, InvalidArgument, "Mesh: dim must be 2 or 3");
    NLSTAB_REQUIRE(!cells.empty(), InvalidArgument, "Mesh: no cells");
    double scale = 0.0;
    for (const auto& p : nodes) scale = std::max(scale, p.norm());
    scale = std::max(scale, 1.0);
    const double vol_floor = 1e-14 * std::pow(scale, dim);

    for (int c = 0; c < num_cells(); ++c) {
        for (int i = 0; i <= dim; ++i)
            NLSTAB_REQUIRE(cells[c][i] >= 0 && cells[c][i] < num_nodes(), InvalidArgument,
                           "Mesh: cell references a missing node");
        double v = signed_volume(c);
        if (v < 0) {
            std::swap(cells[c][0], cells[c][1]);
            v = -v;
        }
        NLSTAB_REQUIRE(v > vol_floor, InvalidArgument,
                       "Mesh: cell " + std::to_string(c) + " has non-positive volume");
    }

    std::vector<FaceRecord> faces;
    faces.reserve(cells.size() * static_cast<std::size_t>(dim + 1));
    for (int c = 0; c < num_cells(); ++c) {
        for (int skip = 0; skip <= dim; ++skip) {
            FaceRecord r{};
            int k = 0;
            for (int i = 0; i <= dim; ++i)
                if (i != skip) r.verts[k++] = cells[c][i];
            if (dim == 2) r.verts[2] = -1;
            r.key = facet_key(dim, r.verts);
            r.cell = c;
            r.opposite = cells[c][skip];
            faces.push_back(r);
        }
    }
    std::sort(faces.begin(), faces.end(), [](const FaceRecord& a, const FaceRecord& b) { return a.key < b.key; });

    std::vector<FaceRecord> boundary;
    for (std::size_t i = 0; i < faces.size();) {
        std::size_t j = i + 1;
        while (j < faces.size() && faces[j].key == faces[i].key) ++j;
        NLSTAB_REQUIRE(j - i <= 2, InvalidArgument, "Mesh: non-manifold facet shared by more than two cells");
        if (j - i == 1) boundary.push_back(faces[i]);
        i = j;
    }

    auto orient = [&](const FaceRecord& r) {
        std::array<int, 3> v = r.verts;
        const Point n = raw_normal(dim, nodes[v[0]], nodes[v[1]], dim == 3 ? nodes[v[2]] : Point::Zero());
        if (n.dot(nodes[v[0]] - nodes[r.opposite]) < 0) std::swap(v[0], v[1]);
        return v;
    };

    if (bfacets.empty()) {
        for (const auto& r : boundary) bfacets.push_back(orient(r));
        bfacet_tag.assign(bfacets.size(), 0);
    } else {
        NLSTAB_REQUIRE(bfacets.size() == boundary.size(), InvalidArgument,
                       "Mesh: declared boundary facets do not match the cell boundary");
        if (bfacet_tag.size() != bfacets.size()) bfacet_tag.assign(bfacets.size(), 0);
        for (auto& f : bfacets) {
            const auto key = facet_key(dim, f);
            auto it = std::lower_bound(boundary.begin(), boundary.end(), key,
                                       [](const FaceRecord& r, const std::array<int, 3>& k) { return r.key < k; });
            NLSTAB_REQUIRE(it != boundary.end() && it->key == key, InvalidArgument,
                           "Mesh: declared boundary facet is not on the boundary");
            FaceRecord r = *it;
            r.verts = f;
            f = orient(r);
        }
    }

    boundary_nodes.clear();
    for (const auto& f : bfacets)
        for (int i = 0; i < dim; ++i) boundary_nodes.push_back(f[i]);
    std::sort(boundary_nodes.begin(), boundary_nodes.end());
    boundary_nodes.erase(std::unique(boundary_nodes.begin(), boundary_nodes.end()), boundary_nodes.end());
    boundary_index.assign(nodes.size(), -1);
    for (int i = 0; i < num_boundary_nodes(); ++i) boundary_index[boundary_nodes[i]] = i;

    id = next_mesh_id.fetch_add(1);
}

} // namespace nlstab::geometry
