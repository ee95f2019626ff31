#include "nlstab/singular/singular_data.hpp"

#include "nlstab/dn/boundary_space.hpp"
#include "nlstab/harness/csv.hpp"
#include "nlstab/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>

namespace nlstab::singular {

using geometry::DomainTriple;

std::string kind_name(DataKind kind) { return kind == DataKind::G1 ? "g1" : "g2"; }

double SingularData::leading(const Point& x) const
{
    return kind == DataKind::G1 ? H.value(x) : H.derivative(x, k - 1);
}

Point SingularData::leading_gradient(const Point& x) const
{
    return kind == DataKind::G1 ? H.gradient(x) : H.derivative_gradient(x, k - 1);
}

double resolution_floor(const DomainTriple& dom) { return 4.0 * dom.local_h; }

std::vector<double> tau_schedule(const DomainTriple& dom)
{
    const double lo = std::max(resolution_floor(dom), dom.delta / 32.0);
    std::vector<double> taus;
    for (double t = dom.delta / 2.0; t >= lo * (1.0 - 1e-12); t *= 0.5) taus.push_back(t);
    return taus;
}

namespace {

void require_g2(const DomainTriple& dom, int k, const pde::CoefficientMatrixField& a)
{
    NLSTAB_REQUIRE(dom.dim == 3, Unsupported, "g2 data requires n = 3");
    NLSTAB_REQUIRE(a.constant && (a(dom.x0) - Mat3::Identity()).cwiseAbs().maxCoeff() == 0.0, Unsupported,
                   "g2 data requires a = identity");
    NLSTAB_REQUIRE(k >= 1 && k <= dom.dim, InvalidArgument, "g2 data: component k must lie in 1..n");
}

void check_tau(const DomainTriple& dom, double tau)
{
    NLSTAB_REQUIRE(tau > 0 && tau < dom.delta, InvalidArgument,
                   "singular data: tau must lie in (0, delta) = (0, " + std::to_string(dom.delta) + ")");
}

/// Sweeps value_at from the Ω' boundary into Ω' with -div(a grad .) and sets
/// g = value_at - sweep on the Ω boundary (Ω keeps the Ω' node ids).
void finish(const DomainTriple& dom, SingularData& d, const std::function<double(int)>& value_at,
            std::shared_ptr<const pde::DirichletSolver> sweep)
{
    const auto& mp = *dom.omega_prime;
    d.leading_prime.resize(mp.num_boundary_nodes());
    for (int b = 0; b < mp.num_boundary_nodes(); ++b) d.leading_prime[b] = value_at(mp.boundary_nodes[b]);
    if (!sweep) sweep = sweep_operator(dom, d.a);
    NLSTAB_REQUIRE(sweep->space().mesh->id == mp.id, InvalidArgument, "singular data: sweep operator is not on Omega'");
    d.sweep = sweep->solve(d.leading_prime);

    const auto& m = *dom.omega;
    d.g.mesh_id = m.id;
    d.g.values.resize(m.num_boundary_nodes());
    for (int b = 0; b < m.num_boundary_nodes(); ++b) {
        const int v = m.boundary_nodes[b];
        // Nodes on the shared boundary carry the sweep data exactly.
        d.g.values[b] = mp.boundary_index[v] >= 0 ? 0.0 : value_at(v) - d.sweep[v];
    }
    d.g.support = dom.S.node_in;
    d.g.validate(m);
}

} // namespace

std::shared_ptr<const pde::DirichletSolver> sweep_operator(const DomainTriple& dom,
                                                           const pde::CoefficientMatrixField& a)
{
    pde::LinearSpec spec;
    spec.a = a;
    return pde::linear_operator(spec, pde::FESpace::of(dom.omega_prime));
}

SingularData make_g1(const DomainTriple& dom, double tau, const pde::CoefficientMatrixField& a,
                     const ParametrixOptions& popts, std::shared_ptr<const pde::DirichletSolver> sweep)
{
    check_tau(dom, tau);
    SingularData d;
    d.kind = DataKind::G1;
    d.tau = tau;
    d.y = exterior_point(dom, tau);
    d.a = a;
    ParametrixOptions po = popts;
    po.compute_residual = false;
    const Parametrix P = parametrix(a, d.y, dom, po);
    d.H = P.H;
    finish(dom, d, [&](int v) { return P.at_node(v); }, std::move(sweep));
    return d;
}

SingularData make_g2(const DomainTriple& dom, double tau, int k, const pde::CoefficientMatrixField& a,
                     std::shared_ptr<const pde::DirichletSolver> sweep)
{
    require_g2(dom, k, a);
    check_tau(dom, tau);
    SingularData d;
    d.kind = DataKind::G2;
    d.k = k;
    d.tau = tau;
    d.y = exterior_point(dom, tau);
    d.a = a;
    NLSTAB_REQUIRE(!geometry::inside_omega(dom, d.y), InvalidArgument, "g2 data: pole inside Omega");
    d.H = SingularKernel(a, d.y, dom.dim);
    const auto& nodes = dom.omega_prime->nodes;
    finish(dom, d, [&](int v) { return d.H.derivative(nodes[v], k - 1); }, std::move(sweep));
    return d;
}

std::shared_ptr<const pde::DirichletSolver> problem_operator(const DomainTriple& dom, const SingularProblem& problem,
                                                             const pde::CoefficientMatrixField& a,
                                                             const pde::SolverOptions& opts)
{
    const auto V = pde::FESpace::of(dom.omega);
    if (problem.schrodinger) {
        const Vector q = problem.q.size() ? problem.q : Vector::Zero(dom.omega->num_nodes());
        NLSTAB_REQUIRE(q.size() == dom.omega->num_nodes(), InvalidArgument, "singular_solve: potential size mismatch");
        NLSTAB_REQUIRE(q.minCoeff() >= 0.0, InvalidArgument, "singular_solve: potential must be non-negative");
        return pde::schrodinger_operator(q, V);
    }
    NLSTAB_REQUIRE(problem.s > 0, InvalidArgument, "singular_solve: scale s must be positive");
    pde::LinearSpec spec;
    spec.a = a;
    spec.s = problem.s;
    spec.B = problem.B;
    spec.adjoint = problem.adjoint;
    return pde::linear_operator(spec, V, opts);
}

namespace {

std::string problem_tag(const SingularProblem& p)
{
    return p.schrodinger ? "schrodinger" : p.adjoint ? "linear-adjoint" : "linear";
}

} // namespace

SingularSolveResult singular_solve(const DomainTriple& dom, const SingularData& data, const SingularProblem& problem,
                                   const pde::CoefficientMatrixField& a, const pde::SolverOptions& opts)
{
    return singular_solve(dom, data, *problem_operator(dom, problem, a, opts), problem_tag(problem));
}

SingularSolveResult singular_solve(const DomainTriple& dom, const SingularData& data, const pde::DirichletSolver& op,
                                   const std::string& tag)
{
    NLSTAB_REQUIRE(data.g.mesh_id == dom.omega->id, InvalidArgument, "singular_solve: data built on another domain");
    NLSTAB_REQUIRE(op.space().mesh->id == dom.omega->id, InvalidArgument, "singular_solve: operator is not on Omega");
    const auto& V = op.space();
    SingularSolveResult out;
    const Vector w = op.solve(data.g.values);
    out.solution = pde::make_solution(op, w, data.g, tag);
    out.solution.params["tau"] = std::to_string(data.tau);
    out.solution.params["kind"] = kind_name(data.kind);

    const pde::ScalarField f = [&](const Point& x) { return data.leading(x); };
    const pde::VectorField gf = [&](const Point& x) { return data.leading_gradient(x); };
    constexpr int order = 5;
    auto& row = out.row;
    row.tau = data.tau;
    const auto hn = pde::h1_error(V, Vector(), f, gf, order);
    row.h_l2 = hn.first;
    row.h_h1 = hn.second;
    row.remainder_h1 = pde::h1_error(V, w, f, gf, order).second;
    row.data_h12 = dn::BoundarySpace::of(dom.omega)->norm_plus(data.g.values);
    row.ratio = row.h_h1 > 0 ? row.remainder_h1 / row.h_h1 : 0.0;
    row.resolved = data.tau >= resolution_floor(dom) * (1.0 - 1e-12);
    return out;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y)
{
    NLSTAB_REQUIRE(x.size() == y.size() && x.size() >= 2, InvalidArgument, "fit_line: need >= 2 paired points");
    const int n = static_cast<int>(x.size());
    double mx = 0, my = 0;
    for (int i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    NLSTAB_REQUIRE(sxx > 0, InvalidArgument, "fit_line: abscissae are all equal");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    f.points = n;
    return f;
}

LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y)
{
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        NLSTAB_REQUIRE(x[i] > 0 && y[i] > 0, InvalidArgument, "fit_loglog: values must be positive");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    return fit_line(lx, ly);
}

DecompositionReport decomposition_sweep(const DomainTriple& dom, const std::vector<double>& taus, DataKind kind,
                                        int k, const SingularProblem& problem,
                                        const pde::CoefficientMatrixField& a, int workers)
{
    NLSTAB_REQUIRE(taus.size() >= 4, InvalidArgument, "decomposition_sweep: need at least 4 tau values");
    std::vector<double> ts = taus;
    std::sort(ts.begin(), ts.end(), std::greater<>());
    NLSTAB_REQUIRE(std::adjacent_find(ts.begin(), ts.end()) == ts.end(), InvalidArgument,
                   "decomposition_sweep: tau values must be distinct");
    DecompositionReport rep;
    rep.kind = kind;
    rep.k = kind == DataKind::G2 ? k : 0;
    rep.dim = dom.dim;
    rep.rows.resize(ts.size());
    if (kind == DataKind::G2) require_g2(dom, k, a);
    const auto sweep = sweep_operator(dom, a);
    const auto op = problem_operator(dom, problem, a);
    const std::string tag = problem_tag(problem);
    parallel_for(static_cast<int>(ts.size()), workers, [&](int i) {
        const SingularData d =
            kind == DataKind::G1 ? make_g1(dom, ts[i], a, {}, sweep) : make_g2(dom, ts[i], k, a, sweep);
        rep.rows[i] = singular_solve(dom, d, *op, tag).row;
    });

    std::vector<double> t, gn, lt, g2, zn;
    for (const auto& r : rep.rows) {
        if (!r.resolved) continue;
        t.push_back(r.tau);
        gn.push_back(r.data_h12);
        lt.push_back(std::abs(std::log(r.tau)));
        g2.push_back(r.data_h12 * r.data_h12);
        zn.push_back(r.remainder_h1);
    }
    if (t.size() >= 2) {
        rep.data_fit = fit_loglog(t, gn);
        rep.data_log_fit = fit_line(lt, g2);
        if (std::all_of(zn.begin(), zn.end(), [](double z) { return z > 0; })) rep.remainder_fit = fit_loglog(t, zn);
    }
    rep.ratio_monotone = t.size() >= 2;
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& r : rep.rows) {
        if (!r.resolved) continue;
        if (!(r.ratio < prev)) rep.ratio_monotone = false;
        prev = r.ratio;
    }
    return rep;
}

std::vector<std::filesystem::path> write_decomposition(const DecompositionReport& rep,
                                                       const std::filesystem::path& csv_path)
{
    using harness::format_number;
    harness::CsvTable t;
    t.header = {"tau", "h_l2", "h_h1", "remainder_h1", "data_h12", "ratio", "resolved"};
    for (const auto& r : rep.rows)
        t.rows.push_back({format_number(r.tau), format_number(r.h_l2), format_number(r.h_h1),
                          format_number(r.remainder_h1), format_number(r.data_h12), format_number(r.ratio),
                          r.resolved ? "1" : "0"});
    if (csv_path.has_parent_path()) std::filesystem::create_directories(csv_path.parent_path());
    harness::write_csv(csv_path, t);

    auto fit_json = [](const LineFit& f) {
        return nlohmann::json{{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}, {"points", f.points}};
    };
    nlohmann::json j;
    j["kind"] = kind_name(rep.kind);
    j["k"] = rep.k;
    j["dim"] = rep.dim;
    j["rows"] = rep.rows.size();
    j["data_fit"] = fit_json(rep.data_fit);
    j["data_log_fit"] = fit_json(rep.data_log_fit);
    j["remainder_fit"] = fit_json(rep.remainder_fit);
    j["ratio_monotone"] = rep.ratio_monotone;
    std::filesystem::path jp = csv_path;
    jp.replace_extension(".json");
    std::ofstream out(jp);
    NLSTAB_REQUIRE(out.good(), InvalidArgument, "cannot write " + jp.string());
    out << j.dump(2) << "\n";
    return {csv_path, jp};
}

} // namespace nlstab::singular
