#include "nlstab/harness/csv.hpp"
#include "nlstab/recon/gamma.hpp"
#include "nlstab/recon/pairing.hpp"
#include "nlstab/recon/semilinear.hpp"
#include "nlstab/recon/stability.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

using namespace nlstab;
using namespace nlstab::geometry;
using namespace nlstab::pde;
using namespace nlstab::recon;

namespace {

const DomainTriple& refined_disk()
{
    static const DomainTriple dom = [] {
        DomainSpec s;
        s.h = 0.025;
        s.full_boundary = true;
        s.outer_radius = 2.5;
        s.x0_size = 0.002;
        s.size_growth = 0.3;
        return build_domain(s);
    }();
    return dom;
}

const ProbeSet& short_probes()
{
    static const ProbeSet p = make_gamma_probes(refined_disk(), {0.2, 0.1, 0.05, 0.025});
    return p;
}

const DomainTriple& partial_disk()
{
    static const DomainTriple dom = [] {
        DomainSpec s;
        s.h = 0.05;
        s.patch_radius = M_PI / 3;
        s.subpatch_radius = M_PI / 6;
        s.x0_size = 0.005;
        s.size_growth = 0.4;
        return build_domain(s);
    }();
    return dom;
}

const DomainTriple& refined_ball()
{
    static const DomainTriple dom = [] {
        DomainSpec s;
        s.shape = Shape::Ball;
        s.h = 0.2;
        s.full_boundary = true;
        s.outer_radius = 2.5;
        s.x0_size = 0.005;
        s.size_growth = 0.5;
        return build_domain(s);
    }();
    return dom;
}

const GprimeContext& ball_context()
{
    static const GprimeContext ctx = make_gprime_context(refined_ball(), 16);
    return ctx;
}

ProblemSpec gamma_problem(std::function<double(double)> g, std::function<double(double)> dg)
{
    ProblemSpec p;
    p.gamma.gamma = std::move(g);
    p.gamma.dgamma = std::move(dg);
    p.gamma.constant = false;
    return p;
}

ProblemSpec sine_gamma()
{
    return gamma_problem([](double u) { return 2 + std::sin(u); }, [](double u) { return std::cos(u); });
}

DriftLaw linear_radial(bool admissible)
{
    DriftLaw d;
    d.name = "-u x";
    d.zero = false;
    d.admissible_flag = admissible;
    d.D = [](const Point& x, double u) { return Point(-u * Point(x.x(), x.y(), 0)); };
    d.div = [](const Point&, double u) { return -2 * u; };
    d.dDdt = [](const Point& x, double) { return Point(-Point(x.x(), x.y(), 0)); };
    return d;
}

SemilinearLaw linear_G(double c = 1.0)
{
    SemilinearLaw G;
    G.G = [c](double u) { return c * u; };
    G.dG = [c](double) { return c; };
    G.kappa = [c](double t) { return c * (1 + t); };
    return G;
}

SemilinearLaw cubic_third()
{
    SemilinearLaw G;
    G.G = [](double u) { return u * u * u / 3; };
    G.dG = [](double u) { return u * u; };
    G.d2G = [](double u) { return 2 * u; };
    G.kappa = [](double t) { return 1 + t * t + t * t * t; };
    return G;
}

// Independent P1 quadrature of int grad u . grad v (piecewise constant gradients).
double gradient_pairing(const FESpace& V, const Vector& u, const Vector& v)
{
    double s = 0.0;
    for (int c = 0; c < V.num_cells(); ++c) {
        Point gu = Point::Zero(), gv = Point::Zero();
        for (int i = 0; i <= V.dim; ++i) {
            const int n = V.mesh->cells[c][i];
            gu += u[n] * V.grads[c][i];
            gv += v[n] * V.grads[c][i];
        }
        s += V.vol[c] * gu.dot(gv);
    }
    return s;
}

} // namespace

TEST(Pairing, IdenticalProblemsGiveZero)
{
    const DomainTriple& dom = partial_disk();
    ProblemSpec p = sine_gamma();
    p.drift = linear_radial(true);
    const auto g = singular::make_g1(dom, 0.3 * dom.delta);
    const PairingSample s = pairing(p, p, dn::Background::constant(0.4), dom, g);
    EXPECT_EQ(s.boundary, 0.0);
    EXPECT_EQ(s.volume, 0.0);
    EXPECT_TRUE(s.consistent);
}

TEST(Pairing, ConstantGammaDifferenceMatchesVolumeQuadrature)
{
    const DomainTriple& dom = partial_disk();
    ProblemSpec p1, p2;
    p1.gamma = QuasilinearLaw::constant_law(2.0);
    p2.gamma = QuasilinearLaw::constant_law(1.0);
    const auto g = singular::make_g1(dom, 0.25 * dom.delta);
    const PairingSample s = pairing(p1, p2, dn::Background::constant(0.0), dom, g);
    // Both constant-coefficient solutions are the harmonic extension of g.
    const auto w = solve_linear(LinearSpec{}, g.g, dom.omega).u;
    const double oracle_value = gradient_pairing(*FESpace::of(dom.omega), w, w);
    EXPECT_NEAR(s.boundary / oracle_value, 1.0, 1e-8);
    EXPECT_TRUE(s.consistent);
    EXPECT_GT(s.boundary, 0.0);
}

TEST(Pairing, GreenIdentityWithDriftAndSmoothData)
{
    const DomainTriple& dom = partial_disk();
    const Mesh& m = *dom.omega;
    ProblemSpec p1 = sine_gamma();
    p1.drift = linear_radial(true);
    ProblemSpec p2 = gamma_problem([](double u) { return 1.5 + 0.2 * u * u; }, [](double u) { return 0.4 * u; });
    p2.drift.zero = false;
    p2.drift.D = [](const Point& x, double u) { return Point(0.7 * u * Point(-x.y(), x.x(), 0)); };
    const PairingContext ctx(p1, p2, dn::Background::constant(0.8), dom.omega, dom.S);
    const auto chi = boundary_cutoff(dom);
    Vector g(m.num_boundary_nodes());
    for (int b = 0; b < g.size(); ++b) {
        const Point& x = m.nodes[m.boundary_nodes[b]];
        g[b] = chi.values[b] * (1 + x.y() + x.x() * x.y());
    }
    const PairingSample s = ctx.sample(g);
    EXPECT_GT(std::abs(s.boundary), 1e-3);
    EXPECT_LE(s.discrepancy, 1e-8 * (std::abs(s.boundary) + std::abs(s.volume)));
    EXPECT_TRUE(s.consistent);
}

TEST(Pairing, SemilinearPotentialDifference)
{
    const DomainTriple& dom = partial_disk();
    ProblemSpec p1, p2;
    p1.condition = p2.condition = Condition::Semilinear;
    p1.G = linear_G();
    p2.G = cubic_third();
    const auto chi = boundary_cutoff(dom);
    const PairingContext ctx(p1, p2, dn::Background::with_cutoff(0.7, chi), dom.omega, dom.S);
    const PairingSample s = ctx.sample(singular::make_g1(dom, 0.3 * dom.delta));
    EXPECT_GT(std::abs(s.boundary), 0.0);
    EXPECT_TRUE(s.consistent) << s.boundary << " vs " << s.volume;
}

TEST(Pairing, RejectsIncompatibleInputs)
{
    const DomainTriple& dom = partial_disk();
    ProblemSpec p1, p2, p3;
    p2.a = CoefficientMatrixField::constant_matrix(2 * Mat3::Identity());
    p3.condition = Condition::Semilinear;
    const auto bg = dn::Background::constant(0.0);
    EXPECT_THROW(PairingContext(p1, p2, bg, dom.omega, dom.S), InvalidArgument);
    EXPECT_THROW(PairingContext(p1, p3, bg, dom.omega, dom.S), InvalidArgument);
    const PairingContext ctx(p1, p1, bg, dom.omega, dom.S);
    EXPECT_THROW((void)ctx.sample(Vector(Vector::Ones(dom.omega->num_boundary_nodes()))), InvalidArgument);
}

TEST(PowerTailFit, RecoversSyntheticTail)
{
    const std::vector<double> taus{0.2, 0.1, 0.05, 0.025, 0.0125};
    std::vector<double> r;
    for (double t : taus) r.push_back(2.0 + 0.5 * std::pow(t, 1.3));
    const PowerTailFit f = fit_power_tail(taus, r);
    EXPECT_NEAR(f.limit, 2.0, 1e-6);
    EXPECT_NEAR(f.beta, 1.3, 1e-3);
    EXPECT_NEAR(f.tail, 0.5, 1e-3);
    EXPECT_LT(f.rel_rms, 1e-8);
}

TEST(PowerTailFit, ConstantDataAndPreconditions)
{
    const PowerTailFit f = fit_power_tail({0.2, 0.1, 0.05, 0.025}, {1.7, 1.7, 1.7, 1.7});
    EXPECT_DOUBLE_EQ(f.limit, 1.7);
    EXPECT_TRUE(std::isnan(f.beta));
    EXPECT_THROW(fit_power_tail({0.2, 0.1, 0.05}, {1, 1, 1}), InvalidArgument);
    EXPECT_THROW(fit_power_tail({0.2, 0.1, 0.05, -1.0}, {1, 1, 1, 1}), InvalidArgument);
}

TEST(EstimateGamma, ConstantLawIsExact)
{
    for (double c : {0.5, 1.0, 3.7}) {
        ProblemSpec p;
        p.gamma = QuasilinearLaw::constant_law(c);
        const GammaEstimate e = estimate_gamma_at(p, 0.3, refined_disk(), short_probes());
        EXPECT_NEAR(e.value, c, 1e-6 * c) << "c = " << c;
        for (double r : e.ratios) EXPECT_NEAR(r, c, 1e-9 * c);
        EXPECT_TRUE(e.flags.empty());
    }
}

TEST(EstimateGamma, QuadraticLawAtZero)
{
    const ProblemSpec p = gamma_problem([](double u) { return 1 + u * u; }, [](double u) { return 2 * u; });
    EXPECT_NEAR(estimate_gamma_at(p, 0.0, refined_disk(), short_probes()).value, 1.0, 0.02);
}

TEST(EstimateGamma, SineLawWithRadialDriftOnExtendedSchedule)
{
    const DomainTriple& dom = refined_disk();
    std::vector<double> taus;
    for (double t = 0.2; t > 4 * dom.local_h; t /= 2) taus.push_back(t);
    ASSERT_GE(taus.size(), 5u);
    const ProbeSet probes = make_gamma_probes(dom, taus);
    ProblemSpec p = sine_gamma();
    p.drift = linear_radial(false);
    const GammaEstimate e = estimate_gamma_at(p, M_PI / 2, dom, probes);
    // div D = -pi < 0 here, so the estimate stays inside the theory.
    EXPECT_TRUE(e.flags.empty());
    EXPECT_TRUE(e.monotone);
    // The drift bias decays like 1/|ln tau|.
    const std::size_t n = e.ratios.size();
    for (std::size_t i = 1; i < n; ++i) EXPECT_LT(std::abs(e.ratios[i] - 3.0), std::abs(e.ratios[i - 1] - 3.0));
    const double b1 = (e.ratios[n - 1] - 3.0) * std::abs(std::log(e.taus[n - 1]));
    const double b2 = (e.ratios[n - 2] - 3.0) * std::abs(std::log(e.taus[n - 2]));
    EXPECT_NEAR(b1 / b2, 1.0, 0.1);
    EXPECT_NEAR(e.value, 3.0, 0.25);
}

TEST(EstimateGamma, FlagsOutOfTheoryDrift)
{
    ProblemSpec p = sine_gamma();
    p.drift = linear_radial(false);
    const GammaEstimate e = estimate_gamma_at(p, -0.5, refined_disk(), short_probes());
    EXPECT_NE(std::find(e.flags.begin(), e.flags.end(), "out-of-theory"), e.flags.end());
}

TEST(EstimateGamma, RejectsDriftThatBreaksClaimedAdmissibility)
{
    ProblemSpec p = sine_gamma();
    p.drift = linear_radial(true);
    EXPECT_THROW(estimate_gamma_at(p, -0.5, refined_disk(), short_probes()), LawViolation);
    EXPECT_NO_THROW(estimate_gamma_at(p, 0.5, refined_disk(), short_probes()));
}

TEST(ReconstructGamma, ConstantOneIsFlat)
{
    ProblemSpec p;
    const ReconstructionCurve c = reconstruct_gamma(p, lambda_grid(2.0, 0.5), refined_disk(), short_probes());
    ASSERT_EQ(c.points.size(), 9u);
    for (const auto& q : c.points) EXPECT_NEAR(q.value, 1.0, 1e-6);
    EXPECT_EQ(c.quantity, "gamma");
    EXPECT_FALSE(c.flagged());
}

TEST(ReconstructGamma, DifferenceOfEqualLawsIsZero)
{
    const ProblemSpec p = sine_gamma();
    const auto grid = lambda_grid(2.0, 0.5);
    const ReconstructionCurve c1 = reconstruct_gamma(p, grid, refined_disk(), short_probes());
    const ReconstructionCurve c2 = reconstruct_gamma(p, grid, refined_disk(), short_probes());
    const ReconstructionCurve d = difference_curve(c1, c2);
    for (const auto& q : d.points) EXPECT_EQ(q.value, 0.0);
    EXPECT_EQ(d.quantity, "gamma-difference");
}

TEST(Curve, ErrorAndDifference)
{
    ReconstructionCurve a, b;
    for (double l : {-1.0, 0.0, 1.0}) {
        CurvePoint p;
        p.lambda = l;
        p.value = 2 + l;
        a.points.push_back(p);
        p.value = 2 + 0.5 * l;
        b.points.push_back(p);
    }
    const CurveError e = curve_error(a, [](double l) { return 2 + 0.9 * l; });
    EXPECT_NEAR(e.sup_abs, 0.1, 1e-14);
    EXPECT_NEAR(e.sup_rel, 0.1 / 2.9, 1e-14);
    EXPECT_NEAR(e.pointwise_rel, 0.1 / 1.1, 1e-14);
    const ReconstructionCurve d = difference_curve(a, b);
    EXPECT_NEAR(d.points[0].value, -0.5, 1e-15);
    EXPECT_TRUE(d.lambda_R == -1.0 || d.lambda_R == 1.0);
    std::swap(a.points[0], a.points[1]);
    EXPECT_THROW(a.validate(), InvalidArgument);
}

TEST(Curve, LambdaGridCoversRange)
{
    const auto g = lambda_grid(2.0, 0.05);
    EXPECT_EQ(g.size(), 81u);
    EXPECT_DOUBLE_EQ(g.front(), -2.0);
    EXPECT_DOUBLE_EQ(g.back(), 2.0);
    EXPECT_THROW(lambda_grid(-1.0, 0.1), InvalidArgument);
}

TEST(Curve, CsvCarriesGridMetadata)
{
    ReconstructionCurve c;
    c.quantity = "gamma";
    c.h = 0.025;
    c.dictionary_size = 0;
    c.taus = {0.2, 0.1};
    for (double l : {-1.0, 1.0}) {
        CurvePoint p;
        p.lambda = l;
        p.value = 1.0;
        c.points.push_back(p);
    }
    const auto dir = std::filesystem::temp_directory_path() / "nlstab_test_curve";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto paths = write_curve(c, dir / "gamma.csv");
    const auto t = harness::read_csv(paths[0]);
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.numbers("h")[1], 0.025);
    EXPECT_EQ(t.rows[0][t.column("tau_schedule")], "0.2;0.1");
    std::filesystem::remove_all(dir);
}

TEST(IntegrateFromZero, ExactForPiecewiseLinearDerivative)
{
    const std::vector<double> l{-1.0, -0.5, 0.0, 0.5, 1.0};
    const std::vector<double> d{2.0, 1.0, 0.0, 1.0, 2.0};
    const auto G = integrate_from_zero(l, d, 0.0);
    EXPECT_NEAR(G[2], 0.0, 1e-15);
    EXPECT_NEAR(G[3], 0.25, 1e-15);
    EXPECT_NEAR(G[4], 1.0, 1e-15);
    EXPECT_NEAR(G[0], -1.0, 1e-15);
    const auto shifted = integrate_from_zero(l, d, 0.75);
    for (std::size_t i = 0; i < G.size(); ++i) EXPECT_DOUBLE_EQ(shifted[i] - G[i], 0.75);
    EXPECT_THROW(integrate_from_zero({0.5, 1.0}, {1.0, 1.0}, 0.0), InvalidArgument);
}

TEST(Gprime, ZeroLawGivesZero)
{
    const GprimeEstimate e = estimate_gprime_at(SemilinearLaw::zero_law(), 0.5, ball_context());
    EXPECT_NEAR(e.value, 0.0, 1e-10);
    EXPECT_GT(e.denominator, 0.0);
}

TEST(Gprime, CubicLawAtOne)
{
    const GprimeEstimate e = estimate_gprime_at(cubic_third(), 1.0, ball_context());
    EXPECT_NEAR(e.value, 1.0, 0.1);
    EXPECT_GE(e.tau, e.tau_floor);
    EXPECT_LE(e.tau, e.tau_ceiling);
}

TEST(Gprime, RequiresThreeDimensions)
{
    EXPECT_THROW(make_gprime_context(partial_disk()), Unsupported);
}

TEST(ReconstructSemilinear, ZeroLawAndAnchorShift)
{
    const auto grid = lambda_grid(1.0, 0.5);
    const auto z = reconstruct_semilinear(SemilinearLaw::zero_law(), grid, 0.0, ball_context());
    for (const auto& p : z.G.points) EXPECT_NEAR(p.value, 0.0, 1e-10);
    const auto a = reconstruct_semilinear(linear_G(), grid, 0.0, ball_context());
    const auto b = reconstruct_semilinear(linear_G(), grid, 0.3, ball_context());
    for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_DOUBLE_EQ(b.G.points[i].value - a.G.points[i].value, 0.3);
}

TEST(Stability, ConstantLawRatioIsIndependentOfS)
{
    DomainSpec s;
    s.h = 0.05;
    s.full_boundary = true;
    const DomainTriple dom = build_domain(s);
    const auto dict = dn::make_dictionary(dom.omega, dom.S, 16, dn::DictionaryKind::Fourier);
    StabilityFamily f;
    f.member = [](double s) {
        ProblemSpec p;
        p.gamma = QuasilinearLaw::constant_law(1.0 + s);
        return p;
    };
    f.s_values = {0.0, 0.4, 0.2, 0.1, 0.05};
    StabilityOptions o;
    o.lambdas = lambda_grid(2.0, 1.0);
    const StabilityReport r = stability_sweep(f, dom, dict, o);
    ASSERT_EQ(r.rows.size(), 5u);
    EXPECT_TRUE(r.rows[0].excluded);
    EXPECT_EQ(r.rows[0].left, 0.0);
    EXPECT_EQ(r.rows[0].measurement, 0.0);
    EXPECT_TRUE(std::isnan(r.rows[0].ratio));
    EXPECT_NEAR(r.spread, 1.0, 1e-6);
    const double ref = dn::operator_norm(
        dn::sample_operator(dn::LinearizedDN(ProblemSpec{}, dn::Background::constant(0.0), dom.omega, dom.S), dict));
    EXPECT_NEAR(r.C, 1.0 / ref, 1e-8);
    EXPECT_NEAR(r.C, 1.0 / oracle::fourier_symbol_max(16), 0.12);
    EXPECT_TRUE(r.bounded_by(r.C));
    EXPECT_FALSE(r.bounded_by(0.9 * r.C));
}

TEST(Stability, HoelderRejectsShiftedAnchor)
{
    const DomainTriple& dom = partial_disk();
    StabilityFamily f;
    f.base.condition = Condition::Semilinear;
    f.base.G = linear_G();
    f.member = [](double s) {
        ProblemSpec p;
        p.condition = Condition::Semilinear;
        p.G = linear_G();
        const auto G = p.G.G;
        p.G.G = [G, s](double u) { return G(u) + s; };
        p.G.kappa = [s](double t) { return 1 + s + t; };
        return p;
    };
    f.s_values = {0.1};
    StabilityOptions o;
    o.mode = StabilityMode::Hoelder;
    o.lambdas = {0.0};
    EXPECT_THROW(check_family(f, o, *dom.omega), LawViolation);
    o.mode = StabilityMode::Lipschitz;
    EXPECT_NO_THROW(check_family(f, o, *dom.omega));
}

TEST(Stability, RejectsNonPositiveGammaMember)
{
    const DomainTriple& dom = partial_disk();
    StabilityFamily f;
    f.member = [](double s) {
        ProblemSpec p;
        p.gamma = QuasilinearLaw::constant_law(1.0 - 2 * s);
        return p;
    };
    f.s_values = {0.1, 0.6};
    StabilityOptions o;
    o.lambdas = {0.0};
    EXPECT_THROW(check_family(f, o, *dom.omega), LawViolation);
}

TEST(Stability, ModeNames)
{
    EXPECT_EQ(parse_stability_mode("hoelder"), StabilityMode::Hoelder);
    EXPECT_EQ(stability_mode_name(StabilityMode::Lipschitz), "lipschitz");
    EXPECT_THROW(parse_stability_mode("holder-ish"), InvalidArgument);
}
