#include "nlstab/dn/boundary_space.hpp"
#include "nlstab/geometry/mesh_gen.hpp"
#include "nlstab/singular/singular_data.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

using namespace nlstab;
using namespace nlstab::geometry;
using namespace nlstab::pde;
using namespace nlstab::singular;

namespace {

Mat3 anisotropic()
{
    Mat3 a;
    a << 2.0, 0.3, 0.0, 0.3, 1.5, 0.1, 0.0, 0.1, 1.2;
    return a;
}

DomainTriple refined_disk()
{
    DomainSpec s;
    s.h = 0.05;
    s.full_boundary = true;
    s.outer_radius = 2.5;
    s.x0_size = 0.002;
    s.size_growth = 0.3;
    return build_domain(s);
}

DomainTriple partial_disk()
{
    DomainSpec s;
    s.h = 0.05;
    s.patch_radius = M_PI / 3;
    s.subpatch_radius = M_PI / 6;
    s.x0_size = 0.005;
    s.size_growth = 0.4;
    return build_domain(s);
}

DomainTriple coarse_ball()
{
    DomainSpec s;
    s.shape = Shape::Ball;
    s.h = 0.25;
    s.x0 = Point(0, 0, 1);
    s.patch_radius = 1.0;
    s.subpatch_radius = 0.6;
    s.x0_size = 0.02;
    return build_domain(s);
}

Point direction(int dim, int i)
{
    const double t = 0.7 + 1.3 * i;
    return dim == 2 ? Point(std::cos(t), std::sin(t), 0) : Point(std::cos(t) * std::sin(0.4 + i), std::sin(t) * std::sin(0.4 + i), std::cos(0.4 + i));
}

} // namespace

TEST(FundamentalH, ClosedFormValues)
{
    const auto I = CoefficientMatrixField::identity();
    const auto H3 = fundamental_h(I, Point::Zero(), 3);
    EXPECT_NEAR(H3.value(Point(0.5, 0, 0)), 1.0 / (4 * M_PI * 0.5), 1e-15);
    EXPECT_NEAR(H3.value(Point(0.5, 0, 0)), 0.159155, 1e-6);
    const auto H2 = fundamental_h(I, Point(0.2, 0.1, 0), 2);
    EXPECT_EQ(H2.value(Point(1.2, 0.1, 0)), 0.0);
    EXPECT_THROW((void)H2.value(Point(0.2, 0.1, 0)), InvalidArgument);
    EXPECT_NEAR(unit_sphere_area(2), 2 * M_PI, 1e-15);
    EXPECT_NEAR(unit_sphere_area(3), 4 * M_PI, 1e-15);
}

TEST(FundamentalH, FluxNormalization)
{
    for (int n : {2, 3}) {
        for (const auto& a : {CoefficientMatrixField::identity(), CoefficientMatrixField::constant_matrix(anisotropic())}) {
            const auto H = fundamental_h(a, Point(0.1, 0.2, n == 3 ? 0.3 : 0.0), n);
            for (double r : {0.05, 0.3, 0.8}) EXPECT_NEAR(flux_through_sphere(H, a, r), -1.0, 1e-6) << n << " " << r;
        }
    }
}

TEST(FundamentalH, DerivativesMatchFiniteDifferences)
{
    const auto a = CoefficientMatrixField::constant_matrix(anisotropic());
    for (int n : {2, 3}) {
        const Point y(0.1, -0.2, n == 3 ? 0.05 : 0.0);
        const auto H = fundamental_h(a, y, n);
        const Point x = y + 0.4 * direction(n, 1);
        const double e = 1e-5;
        for (int i = 0; i < n; ++i) {
            const Point d = e * Point::Unit(i);
            EXPECT_NEAR(H.gradient(x)[i], (H.value(x + d) - H.value(x - d)) / (2 * e), 1e-8);
            EXPECT_NEAR(H.derivative(x, i), H.gradient(x)[i], 1e-15);
            for (int j = 0; j < n; ++j) {
                EXPECT_NEAR(H.hessian(x)(j, i), (H.gradient(x + d)[j] - H.gradient(x - d)[j]) / (2 * e), 1e-6);
                EXPECT_NEAR(H.derivative_gradient(x, j)[i], H.hessian(x)(j, i), 1e-12);
            }
        }
    }
}

TEST(FundamentalH, DifferentiatedKernelIsHarmonic)
{
    const auto H = fundamental_h(CoefficientMatrixField::identity(), Point(0, 0, 1.1), 3);
    const double e = 1e-3;
    for (int k = 0; k < 3; ++k) {
        for (int i = 0; i < 5; ++i) {
            const Point x = Point(0, 0, 1.1) + (0.2 + 0.1 * i) * direction(3, i);
            double lap = 0.0, scale = 0.0;
            for (int j = 0; j < 3; ++j) {
                const Point d = e * Point::Unit(j);
                const double djj = (H.derivative_gradient(x + d, k)[j] - H.derivative_gradient(x - d, k)[j]) / (2 * e);
                lap += djj;
                scale += std::abs(djj);
            }
            EXPECT_LT(std::abs(lap), 1e-4 * scale) << k << " " << i;
        }
    }
}

TEST(FundamentalH, ShellBoundsAreStable)
{
    const auto a = CoefficientMatrixField::constant_matrix(anisotropic());
    const auto H = fundamental_h(a, Point::Zero(), 3);
    std::vector<double> lo_val, hi_val, lo_grad, hi_grad;
    for (double r = 0.05; r <= 0.5 + 1e-12; r *= 1.5) {
        double lv = 1e300, hv = 0, lg = 1e300, hg = 0;
        for (int i = 0; i < 200; ++i) {
            const Point x = r * direction(3, i).normalized();
            lv = std::min(lv, H.value(x) * r);
            hv = std::max(hv, H.value(x) * r);
            lg = std::min(lg, H.gradient(x).norm() * r * r);
            hg = std::max(hg, H.gradient(x).norm() * r * r);
        }
        lo_val.push_back(lv);
        hi_val.push_back(hv);
        lo_grad.push_back(lg);
        hi_grad.push_back(hg);
    }
    const auto spread = [](const std::vector<double>& v) {
        return *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end());
    };
    EXPECT_LE(spread(lo_val), 2.0);
    EXPECT_LE(spread(hi_val), 2.0);
    EXPECT_LE(spread(lo_grad), 2.0);
    EXPECT_LE(spread(hi_grad), 2.0);
    EXPECT_GT(lo_val.front(), 0.0);
}

TEST(Parametrix, IdentityHasNoRemainder)
{
    const auto m = std::make_shared<const Mesh>(make_round_mesh(2, 0.1, 1.0, Point::UnitX()));
    const Parametrix P = parametrix(CoefficientMatrixField::identity(), Point(0.1, 0.1, 0), m);
    EXPECT_TRUE(P.constant_coefficients);
    EXPECT_EQ(P.R.cwiseAbs().maxCoeff(), 0.0);
    const int v = 7;
    EXPECT_EQ(P.at_node(v), P.H.value(m->nodes[v]));
}

TEST(Parametrix, ScaledIdentityIsExact)
{
    const auto m = std::make_shared<const Mesh>(make_round_mesh(2, 0.05, 1.0, Point::UnitX()));
    const Point y(0.1, 0.1, 0);
    const Parametrix P = parametrix(CoefficientMatrixField::constant_matrix(2 * Mat3::Identity()), y, m);
    EXPECT_EQ(P.R.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LT(P.residual, 1e-12);
    const Point x(0.5, -0.2, 0);
    EXPECT_NEAR(P.H.value(x), -std::log((x - y).norm() / std::sqrt(2.0)) / (2 * M_PI * 2.0), 1e-14);
}

TEST(Parametrix, VariableCoefficientRemainder)
{
    auto a = CoefficientMatrixField::scalar([](const Point& x) { return 1 + 0.2 * x.x(); }, "1+0.2x1");
    a.constant = false;
    const Point y(0.1, 0.1, 0.1);
    Mesh base = make_round_mesh(3, 0.25, 1.0, Point::UnitX());
    base = refine_by_size(base, [&](const Point& x) { return std::max(0.02, 0.4 * (x - y).norm()); },
                          [](const Point& x) { return Point(x.normalized()); });
    const auto m = std::make_shared<const Mesh>(std::move(base));
    const Parametrix P = parametrix(a, y, m);
    EXPECT_FALSE(P.constant_coefficients);
    EXPECT_GT(P.R.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LT(P.residual, 1e-8);
    EXPECT_GT(P.residual_of_h, 1e-4);
    const auto V = FESpace::of(m);
    EXPECT_TRUE(std::isfinite(h1_norm(*V, P.R)));
    // |R| <= C |x - y|^{5/2 - n}: fit C on shells and check it is stable.
    std::vector<double> shell_c;
    for (double r0 = 0.05; r0 < 0.5; r0 *= 1.6) {
        double worst = 0.0;
        for (int v = 0; v < m->num_nodes(); ++v) {
            const double r = (m->nodes[v] - y).norm();
            if (r >= r0 && r < 1.6 * r0) worst = std::max(worst, std::abs(P.R[v]) * std::pow(r, 0.5));
        }
        shell_c.push_back(worst);
    }
    const double C = *std::max_element(shell_c.begin(), shell_c.end());
    EXPECT_TRUE(std::isfinite(C));
    EXPECT_GT(C, 0.0);
    for (int v = 0; v < m->num_nodes(); ++v) {
        const double r = (m->nodes[v] - y).norm();
        if (r >= 0.05) {
            EXPECT_LE(std::abs(P.R[v]), 1.5 * C * std::pow(r, -0.5));
        }
    }
}

TEST(Parametrix, RejectsUnderResolvedMollification)
{
    const auto m = std::make_shared<const Mesh>(make_round_mesh(2, 0.1, 1.0, Point::UnitX()));
    ParametrixOptions o;
    o.mollify_factor = 0.5;
    EXPECT_THROW(parametrix(CoefficientMatrixField::identity(), Point(0.1, 0, 0), m, o), InvalidArgument);
}

TEST(SingularData, G1VanishesOutsideSubpatch)
{
    const DomainTriple dom = partial_disk();
    const Mesh& m = *dom.omega;
    for (double tau : {0.5 * dom.delta, 0.1 * dom.delta}) {
        const SingularData d = make_g1(dom, tau);
        EXPECT_GT(d.g.values.cwiseAbs().maxCoeff(), 0.0);
        for (int b = 0; b < m.num_boundary_nodes(); ++b)
            if (!dom.S_prime.contains_node(m.boundary_nodes[b])) {
                ASSERT_EQ(d.g.values[b], 0.0);
            }
        EXPECT_NO_THROW(d.g.validate(m));
    }
    EXPECT_THROW(make_g1(dom, dom.delta), InvalidArgument);
}

TEST(SingularData, G1NormGrowsLogarithmicallyInTwoDimensions)
{
    const DomainTriple dom = refined_disk();
    const auto bs = dn::BoundarySpace::of(dom.omega);
    std::vector<double> lt, n2;
    for (double tau : {0.2, 0.1, 0.05, 0.025}) {
        const SingularData d = make_g1(dom, tau);
        lt.push_back(std::abs(std::log(tau)));
        n2.push_back(std::pow(bs->norm_plus(d.g.values), 2));
    }
    const LineFit f = fit_line(lt, n2);
    EXPECT_GT(f.slope, 0.0);
    EXPECT_GT(f.r2, 0.99);
}

TEST(SingularData, G2RequiresThreeDimensions)
{
    EXPECT_THROW(make_g2(partial_disk(), 0.05, 1), Unsupported);
}

TEST(SingularData, G2VanishesOutsideSubpatch)
{
    const DomainTriple dom = coarse_ball();
    const Mesh& m = *dom.omega;
    const SingularData d = make_g2(dom, 0.3 * dom.delta, 3);
    EXPECT_EQ(d.k, 3);
    for (int b = 0; b < m.num_boundary_nodes(); ++b)
        if (!dom.S_prime.contains_node(m.boundary_nodes[b])) {
            ASSERT_EQ(d.g.values[b], 0.0);
        }
    EXPECT_THROW(make_g2(dom, 0.3 * dom.delta, 4), InvalidArgument);
}

TEST(TauSchedule, GeometricAndResolved)
{
    const DomainTriple dom = refined_disk();
    const auto t = tau_schedule(dom);
    ASSERT_GE(t.size(), 4u);
    EXPECT_NEAR(t.front(), dom.delta / 2, 1e-15);
    for (std::size_t i = 1; i < t.size(); ++i) EXPECT_NEAR(t[i] / t[i - 1], 0.5, 1e-14);
    EXPECT_GE(t.back(), std::max(resolution_floor(dom), dom.delta / 32) * (1 - 1e-12));
    EXPECT_NEAR(resolution_floor(dom), 4 * dom.local_h, 1e-15);
}

TEST(SingularSolve, AdjointWithoutDriftMatchesDirect)
{
    const DomainTriple dom = partial_disk();
    const SingularData d = make_g1(dom, 0.3 * dom.delta);
    SingularProblem adj;
    adj.adjoint = true;
    const auto w = singular_solve(dom, d).solution.u;
    const auto wa = singular_solve(dom, d, adj).solution.u;
    EXPECT_LT((w - wa).cwiseAbs().maxCoeff(), 1e-12 * w.cwiseAbs().maxCoeff());
}

TEST(SingularSolve, RemainderBoundedAndDominatedInTwoDimensions)
{
    const DomainTriple dom = refined_disk();
    const auto rep = decomposition_sweep(dom, {0.2, 0.1, 0.05, 0.025}, DataKind::G1, 0);
    ASSERT_EQ(rep.rows.size(), 4u);
    double zmin = 1e300, zmax = 0.0;
    for (const auto& r : rep.rows) {
        EXPECT_TRUE(r.resolved);
        zmin = std::min(zmin, r.remainder_h1);
        zmax = std::max(zmax, r.remainder_h1);
    }
    EXPECT_LT(zmax / zmin, 1.5);
    EXPECT_NEAR(rep.remainder_fit.slope, 0.0, 0.1);
    EXPECT_TRUE(rep.ratio_monotone);
}

TEST(SingularSolve, WritesDecompositionArtifacts)
{
    const DomainTriple dom = refined_disk();
    const auto rep = decomposition_sweep(dom, {0.2, 0.1, 0.05, 0.025}, DataKind::G1, 0);
    const auto dir = std::filesystem::temp_directory_path() / "nlstab_test_decomposition";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto paths = write_decomposition(rep, dir / "g1.csv");
    ASSERT_EQ(paths.size(), 2u);
    for (const auto& p : paths) EXPECT_TRUE(std::filesystem::exists(p));
    std::filesystem::remove_all(dir);
}

TEST(FitLine, ExactLine)
{
    const LineFit f = fit_line({1, 2, 3, 4}, {3, 5, 7, 9});
    EXPECT_NEAR(f.slope, 2.0, 1e-14);
    EXPECT_NEAR(f.intercept, 1.0, 1e-14);
    EXPECT_NEAR(f.r2, 1.0, 1e-14);
    EXPECT_NEAR(fit_loglog({1, 2, 4}, {1, 0.25, 0.0625}).slope, -2.0, 1e-14);
}
