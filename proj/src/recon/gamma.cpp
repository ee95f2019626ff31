#include "nlstab/recon/gamma.hpp"

#include "nlstab/dn/dn_map.hpp"
#include "nlstab/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace nlstab::recon {

ProbeSet make_gamma_probes(const geometry::DomainTriple& dom, std::vector<double> taus,
                           const pde::CoefficientMatrixField& a, int workers)
{
    std::sort(taus.begin(), taus.end(), std::greater<>());
    taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
    NLSTAB_REQUIRE(taus.size() >= 4, InvalidArgument, "gamma probes: the tau schedule needs at least 4 values");
    ProbeSet P;
    P.taus = taus;
    P.a = a;
    P.local_h = dom.local_h;
    P.h = dom.h();
    P.dim = dom.dim;
    const auto sweep = singular::sweep_operator(dom, a);
    P.data.resize(taus.size());
    parallel_for(static_cast<int>(taus.size()), workers,
                 [&](int i) { P.data[i] = singular::make_g1(dom, taus[i], a, {}, sweep); });
    const int nb = dom.omega->num_boundary_nodes();
    P.G.resize(nb, static_cast<Eigen::Index>(taus.size()));
    for (std::size_t j = 0; j < taus.size(); ++j) P.G.col(j) = P.data[j].g.values;

    pde::ProblemSpec ref;
    ref.a = a;
    const dn::LinearizedDN op(ref, dn::Background::constant(0.0), dom.omega, dom.S);
    const Matrix W = op.apply_many(P.G);
    P.reference.resize(P.G.cols());
    for (Eigen::Index j = 0; j < P.G.cols(); ++j) {
        P.reference[j] = P.G.col(j).dot(W.col(j));
        NLSTAB_REQUIRE(P.reference[j] > 0, SolverError, "gamma probes: reference pairing is not positive");
    }
    return P;
}

namespace {

struct LinearFit {
    double limit = 0, tail = 0, sse = 0;
};

LinearFit fit_for_beta(const std::vector<double>& t, const std::vector<double>& r, double beta)
{
    const int n = static_cast<int>(t.size());
    Matrix A(n, 2);
    Vector b(n);
    for (int i = 0; i < n; ++i) {
        A(i, 0) = 1.0;
        A(i, 1) = std::pow(t[i], beta);
        b[i] = r[i];
    }
    const Vector c = A.colPivHouseholderQr().solve(b);
    return {c[0], c[1], (A * c - b).squaredNorm()};
}

} // namespace

PowerTailFit fit_power_tail(const std::vector<double>& taus, const std::vector<double>& r, double beta_min,
                            double beta_max)
{
    NLSTAB_REQUIRE(taus.size() == r.size() && taus.size() >= 4, InvalidArgument,
                   "power-tail fit: needs at least 4 (tau, r) pairs");
    NLSTAB_REQUIRE(beta_min > 0 && beta_max > beta_min, InvalidArgument, "power-tail fit: bad beta range");
    for (double t : taus) NLSTAB_REQUIRE(t > 0, InvalidArgument, "power-tail fit: tau must be positive");
    PowerTailFit f;
    f.points = static_cast<int>(r.size());
    double mean = 0.0, spread = 0.0;
    for (double v : r) mean += v / r.size();
    for (double v : r) spread = std::max(spread, std::abs(v - mean));
    double scale = 0.0;
    for (double v : r) scale += std::abs(v) / r.size();
    if (spread <= 1e-13 * std::max(scale, 1e-300)) {
        f.limit = mean;
        f.beta = std::numeric_limits<double>::quiet_NaN();
        return f;
    }
    const int grid = 200;
    const double lmin = std::log(beta_min), lmax = std::log(beta_max);
    int best = 0;
    double best_sse = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid; ++i) {
        const double sse = fit_for_beta(taus, r, std::exp(lmin + (lmax - lmin) * i / grid)).sse;
        if (sse < best_sse) {
            best_sse = sse;
            best = i;
        }
    }
    double lo = lmin + (lmax - lmin) * std::max(0, best - 1) / grid;
    double hi = lmin + (lmax - lmin) * std::min(grid, best + 1) / grid;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 60; ++it) {
        const double m1 = hi - phi * (hi - lo), m2 = lo + phi * (hi - lo);
        if (fit_for_beta(taus, r, std::exp(m1)).sse <= fit_for_beta(taus, r, std::exp(m2)).sse)
            hi = m2;
        else
            lo = m1;
    }
    f.beta = std::exp(0.5 * (lo + hi));
    const LinearFit lf = fit_for_beta(taus, r, f.beta);
    f.limit = lf.limit;
    f.tail = lf.tail;
    f.rel_rms = std::sqrt(lf.sse / r.size()) / std::max(scale, 1e-300);
    return f;
}

namespace {

/// True when div_x D(., lambda) <= tol at every mesh node.
bool drift_sign_ok(const pde::DriftLaw& drift, double lambda, const geometry::Mesh& mesh)
{
    for (const auto& x : mesh.nodes)
        if (drift.div(x, lambda) > 1e-12) return false;
    return true;
}

} // namespace

GammaEstimate estimate_gamma_at(const pde::ProblemSpec& measured, double lambda, const geometry::DomainTriple& dom,
                                const ProbeSet& probes, const GammaOptions& opts)
{
    NLSTAB_REQUIRE(measured.condition == pde::Condition::Quasilinear, InvalidArgument,
                   "estimate_gamma_at: condition (i) problem expected");
    NLSTAB_REQUIRE(probes.G.rows() == dom.omega->num_boundary_nodes() && probes.taus.size() >= 4,
                   InvalidArgument, "estimate_gamma_at: probes do not match the domain");
    GammaEstimate e;
    e.lambda = lambda;
    if (!measured.drift.zero && !drift_sign_ok(measured.drift, lambda, *dom.omega)) {
        NLSTAB_REQUIRE(!measured.drift.admissible_flag, LawViolation,
                       "estimate_gamma_at: drift '" + measured.drift.name + "' has div_x D > 0 at lambda = " +
                           std::to_string(lambda));
        e.flags.push_back("out-of-theory");
    }
    const dn::LinearizedDN op(measured, dn::Background::constant(lambda), dom.omega, dom.S, opts.solver);
    const Matrix W = op.apply_many(probes.G);
    e.taus = probes.taus;
    for (Eigen::Index j = 0; j < probes.G.cols(); ++j)
        e.ratios.push_back(probes.G.col(j).dot(W.col(j)) / probes.reference[j]);
    e.fit = fit_power_tail(e.taus, e.ratios);
    e.value = e.fit.limit;
    bool inc = true, dec = true;
    for (std::size_t i = 1; i < e.ratios.size(); ++i) {
        inc = inc && e.ratios[i] >= e.ratios[i - 1];
        dec = dec && e.ratios[i] <= e.ratios[i - 1];
    }
    e.monotone = inc || dec;
    if (!e.monotone && e.fit.rel_rms > opts.residual_threshold) e.flags.push_back("poor-fit");
    return e;
}

ReconstructionCurve reconstruct_gamma(const pde::ProblemSpec& measured, const std::vector<double>& lambdas,
                                      const geometry::DomainTriple& dom, const ProbeSet& probes,
                                      const GammaOptions& opts, int workers)
{
    ReconstructionCurve c;
    c.quantity = "gamma";
    c.dim = dom.dim;
    c.h = dom.h();
    c.local_h = dom.local_h;
    c.taus = probes.taus;
    c.points.resize(lambdas.size());
    for (std::size_t i = 0; i < lambdas.size(); ++i) c.points[i].lambda = lambdas[i];
    c.validate();
    parallel_for(static_cast<int>(lambdas.size()), workers, [&](int i) {
        const GammaEstimate e = estimate_gamma_at(measured, lambdas[i], dom, probes, opts);
        auto& p = c.points[i];
        p.value = e.value;
        p.fit_residual = e.fit.rel_rms;
        p.tau_min = e.taus.back();
        p.tau_max = e.taus.front();
        p.taus_used = static_cast<int>(e.taus.size());
        p.beta = e.fit.beta;
        p.tail = e.fit.tail;
        p.flags = e.flags;
    });
    return c;
}

} // namespace nlstab::recon
