#include "nlstab/geometry/mesh_gen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace nlstab::geometry {

namespace {

struct Lattice {
    int dim;
    std::array<int, 3> n{1, 1, 1};
    [[nodiscard]] int index(int i, int j, int k) const { return i + (n[0] + 1) * (j + (n[1] + 1) * k); }
};

// Kuhn triangulation of a tensor lattice; `pos` maps lattice indices to points.
template <class PosFn>
Mesh kuhn_lattice(int dim, const std::array<int, 3>& counts, PosFn pos)
{
    Lattice lat{dim, counts};
    if (dim == 2) lat.n[2] = 0;
    Mesh m;
    m.dim = dim;
    for (int k = 0; k <= lat.n[2]; ++k)
        for (int j = 0; j <= lat.n[1]; ++j)
            for (int i = 0; i <= lat.n[0]; ++i) m.nodes.push_back(pos(i, j, k));

    if (dim == 2) {
        for (int j = 0; j < lat.n[1]; ++j)
            for (int i = 0; i < lat.n[0]; ++i) {
                const int p00 = lat.index(i, j, 0), p10 = lat.index(i + 1, j, 0);
                const int p01 = lat.index(i, j + 1, 0), p11 = lat.index(i + 1, j + 1, 0);
                m.cells.push_back({p00, p10, p11, -1});
                m.cells.push_back({p00, p11, p01, -1});
            }
        return m;
    }
    std::array<int, 3> perm{0, 1, 2};
    std::vector<std::array<int, 3>> perms;
    do perms.push_back(perm);
    while (std::next_permutation(perm.begin(), perm.end()));
    for (int k = 0; k < lat.n[2]; ++k)
        for (int j = 0; j < lat.n[1]; ++j)
            for (int i = 0; i < lat.n[0]; ++i)
                for (const auto& p : perms) {
                    std::array<int, 3> c{i, j, k};
                    std::array<int, 4> tet{};
                    tet[0] = lat.index(c[0], c[1], c[2]);
                    for (int s = 0; s < 3; ++s) {
                        ++c[p[s]];
                        tet[s + 1] = lat.index(c[0], c[1], c[2]);
                    }
                    m.cells.push_back(tet);
                }
    return m;
}

Point equiangular(int dim, const Point& c)
{
    int dom = 0;
    for (int i = 1; i < dim; ++i)
        if (std::abs(c[i]) > std::abs(c[dom])) dom = i;
    Point b = Point::Zero();
    for (int i = 0; i < dim; ++i)
        b[i] = i == dom ? (c[i] > 0 ? 1.0 : -1.0) : std::tan(0.25 * M_PI * c[i] / std::abs(c[dom]));
    return b.normalized();
}

Mat3 rotation_between(const Point& from, const Point& to)
{
    const Point f = from.normalized(), t = to.normalized();
    const Point v = f.cross(t);
    const double c = f.dot(t);
    if (v.norm() < 1e-14) {
        if (c > 0) return Mat3::Identity();
        // Half turn about any axis orthogonal to f.
        Point axis = std::abs(f.x()) < 0.9 ? Point::UnitX().cross(f) : Point::UnitY().cross(f);
        axis.normalize();
        return 2.0 * axis * axis.transpose() - Mat3::Identity();
    }
    Mat3 k;
    k << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
    return Mat3::Identity() + k + k * k * (1.0 / (1.0 + c));
}

Point mobius(const Point& x, const Point& a)
{
    const double a2 = a.squaredNorm();
    const Point d = x - a;
    const double den = 1.0 - 2.0 * x.dot(a) + x.squaredNorm() * a2;
    return ((1.0 - a2) * d - d.squaredNorm() * a) / den;
}

} // namespace

Mesh make_round_mesh(int dim, double h, double radius, const Point& pole, double grading)
{
    NLSTAB_REQUIRE(dim == 2 || dim == 3, InvalidArgument, "make_round_mesh: dim must be 2 or 3");
    NLSTAB_REQUIRE(h > 0 && radius > 0, InvalidArgument, "make_round_mesh: h and radius must be positive");
    NLSTAB_REQUIRE(grading >= 0 && grading < 1, InvalidArgument, "make_round_mesh: grading must lie in [0, 1)");
    NLSTAB_REQUIRE(std::abs(pole.norm() - 1.0) < 1e-9, InvalidArgument, "make_round_mesh: pole must be a unit vector");

    const double hr = h / radius;
    const int m = 2 * static_cast<int>(std::ceil(M_PI / (8.0 * hr)));
    const double a = dim == 2 ? 0.55 : 0.45;
    const int layers = dim == 2 ? std::max(1, m / 2) : std::max(1, static_cast<int>(std::lround(0.7 * m)));

    std::array<int, 3> counts{2 * m, 2 * m, dim == 3 ? 2 * m : 0};
    Mesh core = kuhn_lattice(dim, counts, [&](int i, int j, int k) {
        return Point(a * (i - m) / m, a * (j - m) / m, dim == 3 ? a * (k - m) / m : 0.0);
    });
    core.finalize();

    Mesh mesh;
    mesh.dim = dim;
    mesh.nodes = core.nodes;
    mesh.cells = core.cells;

    // Layer 0 is the core boundary itself; layers 1..L are new nodes.
    const int nb = core.num_boundary_nodes();
    const int ncore = core.num_nodes();
    auto layer_id = [&](int bidx, int l) { return l == 0 ? core.boundary_nodes[bidx] : ncore + (l - 1) * nb + bidx; };
    for (int l = 1; l <= layers; ++l) {
        const double t = static_cast<double>(l) / layers;
        for (int b = 0; b < nb; ++b) {
            const Point p = core.nodes[core.boundary_nodes[b]];
            const Point e = equiangular(dim, p / a);
            mesh.nodes.push_back(l == layers ? e : Point((1 - t) * p + t * e));
        }
    }

    for (const auto& f : core.bfacets) {
        std::array<int, 3> bi{};
        for (int i = 0; i < dim; ++i) bi[i] = core.boundary_index[f[i]];
        std::sort(bi.begin(), bi.begin() + dim);
        for (int l = 0; l < layers; ++l) {
            if (dim == 2) {
                const int b0 = layer_id(bi[0], l), b1 = layer_id(bi[1], l);
                const int t0 = layer_id(bi[0], l + 1), t1 = layer_id(bi[1], l + 1);
                mesh.cells.push_back({b0, b1, t0, -1});
                mesh.cells.push_back({b1, t0, t1, -1});
            } else {
                const int b0 = layer_id(bi[0], l), b1 = layer_id(bi[1], l), b2 = layer_id(bi[2], l);
                const int t0 = layer_id(bi[0], l + 1), t1 = layer_id(bi[1], l + 1), t2 = layer_id(bi[2], l + 1);
                mesh.cells.push_back({b0, b1, b2, t0});
                mesh.cells.push_back({b1, b2, t0, t1});
                mesh.cells.push_back({b2, t0, t1, t2});
            }
        }
    }

    const Point base_pole = dim == 2 ? Point::UnitX() : Point::UnitZ();
    const Mat3 rot = rotation_between(base_pole, pole);
    const Point shift = -grading * pole;
    for (auto& x : mesh.nodes) {
        const bool on_sphere = std::abs(x.norm() - 1.0) < 1e-12;
        x = rot * x;
        if (dim == 2) x.z() = 0.0;
        if (grading > 0) x = mobius(x, shift);
        if (on_sphere) x.normalize();
        x *= radius;
    }
    mesh.finalize();
    return mesh;
}

Mesh make_polygon_mesh(const std::vector<Point>& v, double h)
{
    const int nv = static_cast<int>(v.size());
    NLSTAB_REQUIRE(nv >= 3, InvalidArgument, "make_polygon_mesh: need at least three vertices");
    NLSTAB_REQUIRE(h > 0, InvalidArgument, "make_polygon_mesh: h must be positive");
    for (int i = 0; i < nv; ++i) {
        const Point e1 = v[(i + 1) % nv] - v[i], e2 = v[(i + 2) % nv] - v[(i + 1) % nv];
        NLSTAB_REQUIRE(e1.x() * e2.y() - e1.y() * e2.x() > 0, InvalidArgument,
                       "make_polygon_mesh: vertices must be convex and counter-clockwise");
    }
    Point c = Point::Zero();
    for (const auto& p : v) c += p;
    c /= nv;
    double longest = 0.0;
    for (int i = 0; i < nv; ++i)
        longest = std::max({longest, (v[i] - c).norm(), (v[(i + 1) % nv] - v[i]).norm()});
    const int k = std::max(1, static_cast<int>(std::ceil(longest / h)));

    Mesh mesh;
    mesh.dim = 2;
    std::map<std::pair<long long, long long>, int> ids;
    const double q = 1e9;
    auto node = [&](const Point& p) {
        const auto key = std::make_pair(std::llround(p.x() * q), std::llround(p.y() * q));
        auto [it, inserted] = ids.emplace(key, mesh.num_nodes());
        if (inserted) mesh.nodes.push_back(Point(p.x(), p.y(), 0.0));
        return it->second;
    };
    for (int f = 0; f < nv; ++f) {
        const Point a = v[f] - c, b = v[(f + 1) % nv] - c;
        auto at = [&](int i, int j) { return node(c + (double(i) / k) * a + (double(j) / k) * b); };
        for (int i = 0; i < k; ++i)
            for (int j = 0; i + j < k; ++j) {
                mesh.cells.push_back({at(i, j), at(i + 1, j), at(i, j + 1), -1});
                if (i + j + 1 < k) mesh.cells.push_back({at(i + 1, j), at(i + 1, j + 1), at(i, j + 1), -1});
            }
    }
    mesh.finalize();
    return mesh;
}

Mesh make_box_mesh(int dim, const Point& lo, const Point& hi, double h)
{
    NLSTAB_REQUIRE(dim == 2 || dim == 3, InvalidArgument, "make_box_mesh: dim must be 2 or 3");
    NLSTAB_REQUIRE(h > 0, InvalidArgument, "make_box_mesh: h must be positive");
    std::array<int, 3> counts{0, 0, 0};
    for (int i = 0; i < dim; ++i) {
        NLSTAB_REQUIRE(hi[i] > lo[i], InvalidArgument, "make_box_mesh: empty box");
        counts[i] = 2 * std::max(1, static_cast<int>(std::ceil((hi[i] - lo[i]) / (2 * h))));
    }
    Mesh mesh = kuhn_lattice(dim, counts, [&](int i, int j, int k) {
        Point p = Point::Zero();
        const std::array<int, 3> idx{i, j, k};
        for (int d = 0; d < dim; ++d) p[d] = lo[d] + (hi[d] - lo[d]) * idx[d] / counts[d];
        return p;
    });
    mesh.finalize();
    return mesh;
}

Mesh extrude_boundary(const Mesh& base, const std::vector<double>& profile,
                      const std::vector<Point>& normals, double height, int layers, double growth)
{
    NLSTAB_REQUIRE(static_cast<int>(profile.size()) == base.num_nodes() &&
                       static_cast<int>(normals.size()) == base.num_nodes(),
                   InvalidArgument, "extrude_boundary: profile/normals must be per node");
    NLSTAB_REQUIRE(height > 0 && layers >= 1, InvalidArgument, "extrude_boundary: bad height or layer count");
    NLSTAB_REQUIRE(growth >= 1.0, InvalidArgument, "extrude_boundary: layer growth must be >= 1");
    std::vector<double> frac(layers + 1, 0.0);
    for (int l = 1; l <= layers; ++l) frac[l] = frac[l - 1] + std::pow(growth, l - 1);
    for (auto& f : frac) f /= frac[layers];
    const int dim = base.dim;
    Mesh mesh;
    mesh.dim = dim;
    mesh.nodes = base.nodes;
    mesh.cells = base.cells;

    std::vector<int> first_layer(base.num_nodes(), -1);
    for (int v : base.boundary_nodes) {
        if (profile[v] <= 0) continue;
        first_layer[v] = mesh.num_nodes();
        for (int l = 1; l <= layers; ++l)
            mesh.nodes.push_back(base.nodes[v] + height * profile[v] * frac[l] * normals[v]);
    }
    auto id = [&](int v, int l) { return (l == 0 || first_layer[v] < 0) ? v : first_layer[v] + l - 1; };

    auto push_if_proper = [&](std::array<int, 4> c) {
        for (int i = 0; i <= dim; ++i)
            for (int j = i + 1; j <= dim; ++j)
                if (c[i] == c[j]) return;
        mesh.cells.push_back(c);
    };
    for (const auto& f : base.bfacets) {
        bool lifted = false;
        for (int i = 0; i < dim; ++i) lifted |= first_layer[f[i]] >= 0;
        if (!lifted) continue;
        std::array<int, 3> b = f;
        std::sort(b.begin(), b.begin() + dim);
        for (int l = 0; l < layers; ++l) {
            if (dim == 2) {
                push_if_proper({id(b[0], l), id(b[1], l), id(b[0], l + 1), -1});
                push_if_proper({id(b[1], l), id(b[0], l + 1), id(b[1], l + 1), -1});
            } else {
                push_if_proper({id(b[0], l), id(b[1], l), id(b[2], l), id(b[0], l + 1)});
                push_if_proper({id(b[1], l), id(b[2], l), id(b[0], l + 1), id(b[1], l + 1)});
                push_if_proper({id(b[2], l), id(b[0], l + 1), id(b[1], l + 1), id(b[2], l + 1)});
            }
        }
    }
    mesh.finalize();
    return mesh;
}

} // namespace nlstab::geometry

namespace nlstab::geometry {

namespace {

class Bisector {
public:
    Bisector(const Mesh& base, std::function<Point(const Point&)> project)
        : dim_(base.dim), nodes_(base.nodes), cells_(base.cells), project_(std::move(project)),
          node_cells_(base.nodes.size())
    {
        for (int c = 0; c < static_cast<int>(cells_.size()); ++c)
            for (int i = 0; i <= dim_; ++i) node_cells_[cells_[c][i]].push_back(c);
    }

    /// Longest edge of a cell; ties go to the lexicographically smallest pair.
    [[nodiscard]] std::pair<int, int> longest(int c) const
    {
        std::pair<int, int> best{-1, -1};
        double bl = -1.0;
        for (int i = 0; i <= dim_; ++i)
            for (int j = i + 1; j <= dim_; ++j) {
                int a = cells_[c][i], b = cells_[c][j];
                if (a > b) std::swap(a, b);
                const double l = (nodes_[a] - nodes_[b]).squaredNorm();
                if (l > bl || (l == bl && std::make_pair(a, b) < best)) {
                    bl = l;
                    best = {a, b};
                }
            }
        return best;
    }

    [[nodiscard]] double length(int c) const
    {
        const auto e = longest(c);
        return (nodes_[e.first] - nodes_[e.second]).norm();
    }

    [[nodiscard]] Point centroid(int c) const
    {
        Point p = Point::Zero();
        for (int i = 0; i <= dim_; ++i) p += nodes_[cells_[c][i]];
        return p / (dim_ + 1);
    }

    [[nodiscard]] int num_cells() const { return static_cast<int>(cells_.size()); }

    void split(std::pair<int, int> e)
    {
        for (;;) {
            bool deferred = false;
            for (int c : around(e)) {
                const auto le = longest(c);
                if (le != e) {
                    split(le);
                    deferred = true;
                    break;
                }
            }
            if (!deferred) break;
        }
        const auto cells = around(e);
        Point m = 0.5 * (nodes_[e.first] + nodes_[e.second]);
        if (project_ && on_boundary(e, cells)) m = project_(m);
        const int mid = static_cast<int>(nodes_.size());
        nodes_.push_back(m);
        node_cells_.emplace_back();
        for (int c : cells) {
            auto child = cells_[c];
            for (int i = 0; i <= dim_; ++i) {
                if (cells_[c][i] == e.second) cells_[c][i] = mid;
                if (child[i] == e.first) child[i] = mid;
            }
            const int nc = static_cast<int>(cells_.size());
            cells_.push_back(child);
            auto& nb = node_cells_[e.second];
            nb.erase(std::find(nb.begin(), nb.end(), c));
            nb.push_back(nc);
            for (int i = 0; i <= dim_; ++i)
                if (child[i] != e.second && child[i] != mid) node_cells_[child[i]].push_back(nc);
            node_cells_[mid].push_back(c);
            node_cells_[mid].push_back(nc);
        }
    }

    Mesh finish() &&
    {
        Mesh m;
        m.dim = dim_;
        m.nodes = std::move(nodes_);
        m.cells = std::move(cells_);
        m.finalize();
        return m;
    }

private:
    int dim_;
    std::vector<Point> nodes_;
    std::vector<std::array<int, 4>> cells_;
    std::function<Point(const Point&)> project_;
    std::vector<std::vector<int>> node_cells_;

    [[nodiscard]] bool contains(int c, int v) const
    {
        for (int i = 0; i <= dim_; ++i)
            if (cells_[c][i] == v) return true;
        return false;
    }

    [[nodiscard]] std::vector<int> around(std::pair<int, int> e) const
    {
        std::vector<int> out;
        for (int c : node_cells_[e.first])
            if (contains(c, e.second)) out.push_back(c);
        std::sort(out.begin(), out.end());
        return out;
    }

    /// An edge is on the boundary when one of the facets through it belongs to a single cell.
    [[nodiscard]] bool on_boundary(std::pair<int, int> e, const std::vector<int>& cells) const
    {
        if (dim_ == 2) return cells.size() == 1;
        std::map<int, int> third;
        for (int c : cells)
            for (int i = 0; i <= dim_; ++i) {
                const int v = cells_[c][i];
                if (v != e.first && v != e.second) ++third[v];
            }
        for (const auto& [v, n] : third)
            if (n == 1) return true;
        return false;
    }
};

} // namespace

Mesh refine_by_size(const Mesh& base, const std::function<double(const Point&)>& size,
                    const std::function<Point(const Point&)>& project)
{
    NLSTAB_REQUIRE(static_cast<bool>(size), InvalidArgument, "refine_by_size: size function is empty");
    Bisector b(base, project);
    bool changed = true;
    while (changed) {
        changed = false;
        for (int c = 0; c < b.num_cells(); ++c) {
            while (b.length(c) > size(b.centroid(c))) {
                NLSTAB_REQUIRE(size(b.centroid(c)) > 0, InvalidArgument, "refine_by_size: size must be positive");
                b.split(b.longest(c));
                changed = true;
            }
        }
    }
    return std::move(b).finish();
}

} // namespace nlstab::geometry
