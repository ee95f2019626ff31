#include "nlstab/geometry/domain.hpp"
#include "nlstab/geometry/mesh_gen.hpp"
#include "nlstab/geometry/mesh_io.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace nlstab;
using namespace nlstab::geometry;

namespace {

DomainSpec partial_disk(double h)
{
    DomainSpec s;
    s.shape = Shape::Disk;
    s.h = h;
    s.x0 = Point(1, 0, 0);
    s.patch_radius = M_PI / 4;
    s.subpatch_radius = M_PI / 8;
    return s;
}

DomainSpec square(double h)
{
    DomainSpec s;
    s.shape = Shape::Polygon;
    s.polygon = {Point(-1, -1, 0), Point(1, -1, 0), Point(1, 1, 0), Point(-1, 1, 0)};
    s.x0 = Point(1, 0, 0);
    s.h = h;
    s.patch_radius = 0.6;
    s.subpatch_radius = 0.3;
    return s;
}

// Every Omega boundary node outside S' is an Omega' boundary node at the same place.
int count_outside_subpatch_not_on_prime(const DomainTriple& dom)
{
    const Mesh& m = *dom.omega;
    const Mesh& mp = *dom.omega_prime;
    int bad = 0;
    for (int v : m.boundary_nodes) {
        if (dom.S_prime.contains_node(v)) continue;
        const bool on_prime = v < mp.num_nodes() && mp.boundary_index[v] >= 0 && (mp.nodes[v] - m.nodes[v]).norm() == 0.0;
        if (!on_prime) ++bad;
    }
    return bad;
}

} // namespace

TEST(BuildDomain, FullBoundaryDiskIsConcentric)
{
    DomainSpec s;
    s.h = 0.05;
    s.full_boundary = true;
    const DomainTriple dom = build_domain(s);
    const Mesh& mp = *dom.omega_prime;
    double rmin = 1e9, rmax = 0;
    for (int v : mp.boundary_nodes) {
        rmin = std::min(rmin, mp.nodes[v].norm());
        rmax = std::max(rmax, mp.nodes[v].norm());
    }
    EXPECT_NEAR(rmin, 1.0 + dom.bulge_height, 1e-9);
    EXPECT_NEAR(rmax, 1.0 + dom.bulge_height, 1e-9);
    EXPECT_LE(3 * dom.delta, dom.bulge_height + 1e-12);
    for (int v : dom.omega->boundary_nodes) EXPECT_TRUE(dom.S.contains_node(v));
}

TEST(BuildDomain, BulgeLeavesBoundaryOutsideSubpatchFixed)
{
    const DomainTriple dom = build_domain(partial_disk(0.05));
    EXPECT_NEAR(dom.x0.x(), 1.0, 1e-12);
    EXPECT_EQ(count_outside_subpatch_not_on_prime(dom), 0);
    int bulged = 0;
    for (int v : dom.omega->boundary_nodes)
        if (dom.omega_prime->boundary_index[v] < 0) ++bulged;
    EXPECT_GT(bulged, 0);
}

TEST(BuildDomain, CoarseBallHasPositiveCells)
{
    DomainSpec s;
    s.shape = Shape::Ball;
    s.h = 0.2;
    s.x0 = Point(0, 0, 1);
    const DomainTriple dom = build_domain(s);
    EXPECT_EQ(dom.dim, 3);
    for (const auto* m : {dom.omega.get(), dom.omega_prime.get(), dom.omega_star.get()})
        for (int c = 0; c < m->num_cells(); ++c) ASSERT_GT(m->signed_volume(c), 0.0);
    EXPECT_NO_THROW(dom.validate());
}

TEST(BuildDomain, HalvingHPreservesContainment)
{
    for (double h : {0.1, 0.05, 0.025}) {
        const DomainTriple dom = build_domain(partial_disk(h));
        EXPECT_NO_THROW(dom.validate()) << "h = " << h;
        EXPECT_EQ(count_outside_subpatch_not_on_prime(dom), 0) << "h = " << h;
        EXPECT_GE(distance_to_boundary(*dom.omega_prime, exterior_point(dom, 0.999 * dom.delta)),
                  dom.delta * (1 - 1e-9));
    }
}

TEST(BuildDomain, RejectsNonPositiveMeshSize)
{
    DomainSpec s;
    s.h = -0.1;
    EXPECT_THROW(build_domain(s), InvalidArgument);
    s.h = 0.1;
    s.subpatch_radius = s.patch_radius;
    EXPECT_THROW(build_domain(s), InvalidArgument);
}

TEST(ExteriorPoint, DiskRadialNormal)
{
    DomainSpec s = partial_disk(0.05);
    s.full_boundary = true;
    s.outer_radius = 2.5;
    const DomainTriple dom = build_domain(s);
    ASSERT_GT(dom.delta, 0.1);
    const Point y = exterior_point(dom, 0.1);
    EXPECT_NEAR(y.x(), 1.1, 1e-12);
    EXPECT_NEAR(y.y(), 0.0, 1e-12);
}

TEST(ExteriorPoint, BallRadialNormal)
{
    DomainSpec s;
    s.shape = Shape::Ball;
    s.h = 0.2;
    s.x0 = Point(0, 0, 1);
    const DomainTriple dom = build_domain(s);
    ASSERT_GT(dom.delta, 0.05);
    const Point y = exterior_point(dom, 0.05);
    EXPECT_NEAR((y - Point(0, 0, 1.05)).norm(), 0.0, 1e-12);
}

TEST(ExteriorPoint, PolygonEdgeMidpointIsOutside)
{
    const DomainTriple dom = build_domain(square(0.1));
    ASSERT_NEAR((dom.x0 - Point(1, 0, 0)).norm(), 0.0, 1e-12);
    ASSERT_GT(dom.delta, 0.02);
    const Point y = exterior_point(dom, 0.02);
    EXPECT_NEAR((y - Point(1.02, 0, 0)).norm(), 0.0, 1e-12);
    EXPECT_FALSE(oracle::in_polygon(dom.spec.polygon, y));
    EXPECT_FALSE(inside_omega(dom, y));
}

TEST(ExteriorPoint, RejectsOffsetsOutsideRange)
{
    const DomainTriple dom = build_domain(partial_disk(0.1));
    EXPECT_THROW(exterior_point(dom, 0.0), InvalidArgument);
    EXPECT_THROW(exterior_point(dom, dom.delta), InvalidArgument);
}

TEST(ExteriorPoint, OffsetDistanceAndExteriorForAllShapes)
{
    DomainSpec ball;
    ball.shape = Shape::Ball;
    ball.h = 0.25;
    DomainSpec box;
    box.shape = Shape::Box;
    box.h = 0.25;
    box.x0 = Point(0, 0, 1);
    box.patch_radius = 0.6;
    box.subpatch_radius = 0.3;
    for (const DomainSpec& s : {partial_disk(0.1), square(0.1), ball, box}) {
        const DomainTriple dom = build_domain(s);
        for (int i = 1; i < 20; ++i) {
            const double tau = dom.delta * i / 20.0;
            const Point y = exterior_point(dom, tau);
            EXPECT_NEAR((y - dom.x0).norm(), tau, 1e-12);
            EXPECT_FALSE(inside_omega(dom, y));
        }
    }
}

TEST(BoundaryCutoff, PartialPatchBlend)
{
    const DomainTriple dom = build_domain(partial_disk(0.05));
    const BoundaryFunction chi = boundary_cutoff(dom);
    const Mesh& m = *dom.omega;
    EXPECT_DOUBLE_EQ(chi.values[m.boundary_index[dom.x0_node]], 1.0);
    double outside = 0.0;
    bool blended = false;
    for (int b = 0; b < m.num_boundary_nodes(); ++b) {
        const int v = m.boundary_nodes[b];
        const double c = chi.values[b];
        EXPECT_GE(c, 0.0);
        EXPECT_LE(c, 1.0);
        if (!dom.S.contains_node(v)) outside = std::max(outside, std::abs(c));
        if (dom.S_prime.contains_node(v)) {
            EXPECT_DOUBLE_EQ(c, 1.0);
        }
        if (c > 0.0 && c < 1.0) blended = true;
    }
    EXPECT_EQ(outside, 0.0);
    EXPECT_TRUE(blended);
}

TEST(BoundaryCutoff, FullBoundaryIsOne)
{
    DomainSpec s;
    s.h = 0.1;
    s.full_boundary = true;
    const BoundaryFunction chi = boundary_cutoff(build_domain(s));
    EXPECT_EQ(chi.values.minCoeff(), 1.0);
    EXPECT_EQ(chi.values.maxCoeff(), 1.0);
}

TEST(Smoothstep, EndpointsAndFlatDerivatives)
{
    EXPECT_EQ(smoothstep5(0.0), 0.0);
    EXPECT_EQ(smoothstep5(1.0), 1.0);
    EXPECT_EQ(smoothstep5(-1.0), 0.0);
    EXPECT_EQ(smoothstep5(2.0), 1.0);
    const double e = 1e-4;
    EXPECT_LT(smoothstep5(e), 1e-10);
    EXPECT_GT(smoothstep5(1 - e), 1 - 1e-10);
    EXPECT_NEAR(smoothstep5(0.5), 0.5, 1e-15);
}

TEST(RoundMesh, VolumeConvergesToDisk)
{
    const Mesh coarse = make_round_mesh(2, 0.1, 1.0, Point::UnitX());
    const Mesh fine = make_round_mesh(2, 0.05, 1.0, Point::UnitX());
    const double e1 = M_PI - coarse.total_volume();
    const double e2 = M_PI - fine.total_volume();
    EXPECT_GT(e1, 0.0);
    EXPECT_NEAR(e1 / e2, 4.0, 0.4);
    EXPECT_LE(fine.max_edge(), 0.05 * 1.6);
}

TEST(RefineBySize, ConformingAndGraded)
{
    const Mesh base = make_round_mesh(2, 0.2, 1.0, Point::UnitX());
    const Point x0(1, 0, 0);
    const Mesh ref = refine_by_size(base, [&](const Point& x) { return std::max(0.01, 0.5 * (x - x0).norm()); },
                                    [](const Point& x) { return Point(x.normalized()); });
    EXPECT_GT(ref.num_nodes(), base.num_nodes());
    for (int v = 0; v < base.num_nodes(); ++v) EXPECT_EQ(ref.nodes[v], base.nodes[v]);
    EXPECT_NEAR(ref.total_volume(), M_PI, 0.05);
    const int v0 = oracle::nearest_node(ref, x0);
    EXPECT_LE(ref.local_size(v0), 0.01 * 1.01);
    // Boundary facets form closed loops: every boundary node is in exactly two facets.
    std::vector<int> count(ref.num_nodes(), 0);
    for (const auto& f : ref.bfacets) {
        ++count[f[0]];
        ++count[f[1]];
    }
    for (int v : ref.boundary_nodes) EXPECT_EQ(count[v], 2);
}

TEST(MeshIo, RoundTrip)
{
    const Mesh m = make_round_mesh(3, 0.5, 1.0, Point::UnitZ());
    std::stringstream ss;
    write_mesh(ss, m);
    const Mesh r = read_mesh(ss);
    ASSERT_EQ(r.num_nodes(), m.num_nodes());
    ASSERT_EQ(r.num_cells(), m.num_cells());
    EXPECT_EQ(r.num_boundary_nodes(), m.num_boundary_nodes());
    EXPECT_NEAR(r.total_volume(), m.total_volume(), 1e-12);
}

TEST(MeshIo, MalformedLineReportsLineNumber)
{
    std::stringstream ss("dim 2\nnodes: 0 0 0\nnodes: 1 1 0\nnodes: 2 0 x\n");
    try {
        read_mesh(ss);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("4"), std::string::npos);
    }
}
