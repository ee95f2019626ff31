#include "nlstab/recon/semilinear.hpp"

#include "nlstab/parallel.hpp"
#include "nlstab/pde/fe_space.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace nlstab::recon {

GprimeContext make_gprime_context(const geometry::DomainTriple& dom, int dictionary_size)
{
    NLSTAB_REQUIRE(dom.dim == 3, Unsupported, "G' recovery needs n = 3");
    GprimeContext ctx;
    ctx.dom = &dom;
    ctx.chi = geometry::boundary_cutoff(dom);
    ctx.sweep = singular::sweep_operator(dom, pde::CoefficientMatrixField::identity());
    const auto V = pde::FESpace::of(dom.omega);
    ctx.reference = pde::schrodinger_operator(Vector::Zero(V->num_nodes()), V);
    ctx.dict = dn::make_dictionary(dom.omega, dom.S, dictionary_size, dn::DictionaryKind::Eigen);
    pde::ProblemSpec zero;
    zero.condition = pde::Condition::Semilinear;
    const dn::LinearizedDN ref(zero, dn::Background::constant(0.0), dom.omega, dom.S);
    ctx.reference_sample = dn::sample_operator(ref, ctx.dict);
    return ctx;
}

GprimeEstimate estimate_gprime_at(const pde::SemilinearLaw& G, double lambda, const GprimeContext& ctx,
                                  const GprimeOptions& opts, double m)
{
    NLSTAB_REQUIRE(ctx.dom != nullptr, InvalidArgument, "estimate_gprime_at: empty context");
    const auto& dom = *ctx.dom;
    pde::ProblemSpec p;
    p.condition = pde::Condition::Semilinear;
    p.G = G;
    const dn::LinearizedDN op(p, dn::Background::with_cutoff(lambda, ctx.chi), dom.omega, dom.S, opts.solver);
    GprimeEstimate e;
    e.lambda = lambda;
    e.m = m >= 0 ? m : dn::measurement_functional(dn::sample_operator(op, ctx.dict), ctx.reference_sample);
    e.tau_floor = singular::resolution_floor(dom);
    e.tau_ceiling = 0.5 * dom.delta;
    if (opts.tau > 0) {
        e.tau = opts.tau;
    } else {
        const double t = std::cbrt(e.m);
        e.tau = std::clamp(t, e.tau_floor, e.tau_ceiling);
        if (t < e.tau_floor) e.flags.push_back("resolution");
    }
    const auto& V = op.op().space();
    for (int k = 1; k <= dom.dim; ++k) {
        const auto d = singular::make_g2(dom, e.tau, k, pde::CoefficientMatrixField::identity(), ctx.sweep);
        const Vector& g = d.g.values;
        const Vector wq = op.solve(g);
        const Vector w0 = ctx.reference->solve(g);
        e.numerator += g.dot(op.op().flux(wq)) - g.dot(ctx.reference->flux(w0));
        const auto& H = d.H;
        const int c = k - 1;
        const double l2 =
            pde::h1_error(
                V, Vector(), [&](const Point& x) { return H.derivative(x, c); },
                [&](const Point& x) { return H.derivative_gradient(x, c); }, 5)
                .first;
        e.denominator += l2 * l2;
    }
    e.value = e.numerator / e.denominator;
    if (e.value < -opts.negative_tolerance) e.flags.push_back("negative");
    return e;
}

std::vector<double> integrate_from_zero(const std::vector<double>& lambdas, const std::vector<double>& derivative,
                                        double anchor)
{
    const std::size_t n = lambdas.size();
    NLSTAB_REQUIRE(n >= 2 && derivative.size() == n, InvalidArgument, "integration: need matching grids of size >= 2");
    for (std::size_t i = 1; i < n; ++i)
        NLSTAB_REQUIRE(lambdas[i] > lambdas[i - 1], InvalidArgument, "integration: grid must be strictly increasing");
    NLSTAB_REQUIRE(lambdas.front() <= 0.0 && lambdas.back() >= 0.0, InvalidArgument,
                   "integration: the grid must contain 0 in its range");
    std::vector<double> F(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        F[i] = F[i - 1] + 0.5 * (lambdas[i] - lambdas[i - 1]) * (derivative[i] + derivative[i - 1]);
    std::size_t j = 0;
    while (j + 1 < n - 1 && lambdas[j + 1] <= 0.0) ++j;
    const double len = lambdas[j + 1] - lambdas[j];
    const double d0 = derivative[j] + (derivative[j + 1] - derivative[j]) * (0.0 - lambdas[j]) / len;
    const double F0 = F[j] + 0.5 * (0.0 - lambdas[j]) * (derivative[j] + d0);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = anchor + (F[i] - F0);
    return out;
}

SemilinearReconstruction reconstruct_semilinear(const pde::SemilinearLaw& G, const std::vector<double>& lambdas,
                                                double anchor, const GprimeContext& ctx,
                                                const GprimeOptions& opts, int workers)
{
    NLSTAB_REQUIRE(ctx.dom != nullptr, InvalidArgument, "reconstruct_semilinear: empty context");
    SemilinearReconstruction r;
    auto& c = r.gprime;
    c.quantity = "gprime";
    c.dim = ctx.dom->dim;
    c.h = ctx.dom->h();
    c.local_h = ctx.dom->local_h;
    c.dictionary_size = ctx.dict.size();
    c.points.resize(lambdas.size());
    for (std::size_t i = 0; i < lambdas.size(); ++i) c.points[i].lambda = lambdas[i];
    c.validate();
    parallel_for(static_cast<int>(lambdas.size()), workers, [&](int i) {
        const GprimeEstimate e = estimate_gprime_at(G, lambdas[i], ctx, opts);
        auto& p = c.points[i];
        p.value = e.value;
        p.tau_min = p.tau_max = e.tau;
        p.taus_used = 1;
        p.flags = e.flags;
    });
    std::set<double> taus;
    for (const auto& p : c.points) taus.insert(p.tau_min);
    c.taus.assign(taus.rbegin(), taus.rend());

    r.G = c;
    r.G.quantity = "G";
    const auto values = integrate_from_zero(lambdas, c.values(), anchor);
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        auto& p = r.G.points[i];
        p.value = values[i];
        std::set<std::string> flags;
        for (const auto& q : c.points)
            if ((q.lambda >= std::min(0.0, lambdas[i]) && q.lambda <= std::max(0.0, lambdas[i])) || &q == &c.points[i])
                flags.insert(q.flags.begin(), q.flags.end());
        p.flags.assign(flags.begin(), flags.end());
    }
    return r;
}

} // namespace nlstab::recon
