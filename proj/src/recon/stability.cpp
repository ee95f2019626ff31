#include "nlstab/recon/stability.hpp"

#include "nlstab/harness/csv.hpp"
#include "nlstab/parallel.hpp"
#include "nlstab/recon/curve.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace nlstab::recon {

StabilityMode parse_stability_mode(const std::string& name)
{
    if (name == "lipschitz") return StabilityMode::Lipschitz;
    if (name == "hoelder") return StabilityMode::Hoelder;
    throw InvalidArgument("unknown stability mode '" + name + "' (lipschitz, hoelder)");
}

std::string stability_mode_name(StabilityMode m) { return m == StabilityMode::Lipschitz ? "lipschitz" : "hoelder"; }

bool StabilityReport::bounded_by(double c, double rel_slack) const
{
    for (const auto& r : rows)
        if (!r.excluded && r.left > c * r.right * (1.0 + rel_slack)) return false;
    return true;
}

namespace {

double law_difference(const pde::ProblemSpec& p1, const pde::ProblemSpec& p2, double t)
{
    if (p1.condition == pde::Condition::Quasilinear) return std::abs(p1.gamma.gamma(t) - p2.gamma.gamma(t));
    return std::abs(p1.G.G(t) - p2.G.G(t));
}

void check_member(const pde::ProblemSpec& base, const pde::ProblemSpec& p, const StabilityOptions& opts,
                  const std::vector<double>& dense, const geometry::Mesh& mesh)
{
    NLSTAB_REQUIRE(p.condition == base.condition, LawViolation, "stability family: member changes the condition");
    if (p.condition == pde::Condition::Quasilinear) {
        p.gamma.check(dense);
        if (!p.drift.zero) p.drift.check(mesh.nodes, dense);
        return;
    }
    p.G.check(dense);
    if (opts.mode == StabilityMode::Hoelder)
        NLSTAB_REQUIRE(std::abs(p.G.G(0.0) - base.G.G(0.0)) <= 1e-12, LawViolation,
                       "stability family: hoelder mode needs G_2(0) = G_1(0)");
}

dn::Background background_at(const StabilityOptions& opts, double lambda)
{
    return opts.use_cutoff ? dn::Background::with_cutoff(lambda, opts.chi) : dn::Background::constant(lambda);
}

} // namespace

void check_family(const StabilityFamily& family, const StabilityOptions& opts, const geometry::Mesh& mesh)
{
    NLSTAB_REQUIRE(opts.R > 0, InvalidArgument, "stability sweep: R must be positive");
    NLSTAB_REQUIRE(!family.s_values.empty() && !opts.lambdas.empty(), InvalidArgument,
                   "stability sweep: empty family or lambda grid");
    NLSTAB_REQUIRE(static_cast<bool>(family.member), InvalidArgument, "stability sweep: no family member map");
    const auto dense = lambda_grid(opts.R, opts.dense_step);
    std::vector<double> ts = dense;
    ts.insert(ts.end(), opts.lambdas.begin(), opts.lambdas.end());
    check_member(family.base, family.base, opts, ts, mesh);
    for (double s : family.s_values) check_member(family.base, family.member(s), opts, ts, mesh);
}

StabilityReport stability_sweep(const StabilityFamily& family, const geometry::DomainTriple& dom,
                                const dn::Dictionary& dict, const StabilityOptions& opts)
{
    check_family(family, opts, *dom.omega);
    StabilityReport rep;
    rep.mode = opts.mode;
    rep.condition = family.base.condition;
    rep.R = opts.R;
    rep.h = dom.h();
    rep.dictionary_size = dict.size();
    rep.lambdas = opts.lambdas;

    const int nl = static_cast<int>(opts.lambdas.size());
    const int ns = static_cast<int>(family.s_values.size());
    std::vector<pde::ProblemSpec> members;
    for (double s : family.s_values) members.push_back(family.member(s));

    std::vector<dn::BoundaryOperatorSample> base(nl);
    parallel_for(nl, opts.workers, [&](int i) {
        const dn::LinearizedDN op(family.base, background_at(opts, opts.lambdas[i]), dom.omega, dom.S, opts.solver);
        base[i] = dn::sample_operator(op, dict);
    });

    const auto dense = lambda_grid(opts.R, opts.dense_step);
    rep.rows.resize(ns);
    for (int k = 0; k < ns; ++k) {
        auto& row = rep.rows[k];
        row.s = family.s_values[k];
        row.excluded = row.s == 0.0;
        for (double t : dense) {
            const double d = law_difference(family.base, members[k], t);
            if (d > row.left) {
                row.left = d;
                row.lambda_left = t;
            }
        }
    }
    Matrix meas = Matrix::Zero(ns, nl);
    parallel_for(ns * nl, opts.workers, [&](int idx) {
        const int k = idx / nl, i = idx % nl;
        if (rep.rows[k].excluded) return;
        const dn::LinearizedDN op(members[k], background_at(opts, opts.lambdas[i]), dom.omega, dom.S, opts.solver);
        meas(k, i) = dn::measurement_functional(base[i], dn::sample_operator(op, dict));
    });

    double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0, cprime = 0.0;
    for (int k = 0; k < ns; ++k) {
        auto& row = rep.rows[k];
        if (row.excluded) continue;
        Eigen::Index imax = 0;
        row.measurement = meas.row(k).maxCoeff(&imax);
        row.lambda_right = opts.lambdas[imax];
        row.right = opts.mode == StabilityMode::Hoelder ? std::cbrt(row.measurement) : row.measurement;
        row.ratio = row.left / row.right;
        rmin = std::min(rmin, row.ratio);
        rmax = std::max(rmax, row.ratio);
        if (row.left > 0) cprime = std::max(cprime, row.measurement / row.left);
    }
    if (rmax > 0) {
        rep.C = rmax;
        rep.spread = rmax / rmin;
        rep.C_prime = cprime;
    }
    return rep;
}

std::vector<std::filesystem::path> write_stability(const StabilityReport& report,
                                                   const std::filesystem::path& csv_path)
{
    using harness::format_number;
    harness::CsvTable t;
    t.header = {"s",     "left",     "lambda_left", "measurement", "lambda_right",    "right",
                "ratio", "excluded", "h",           "mode",        "dictionary_size", "lambda_grid"};
    std::string grid;
    for (std::size_t i = 0; i < report.lambdas.size(); ++i)
        grid += (i ? ";" : "") + format_number(report.lambdas[i]);
    for (const auto& r : report.rows)
        t.rows.push_back({format_number(r.s), format_number(r.left), format_number(r.lambda_left),
                          format_number(r.measurement), format_number(r.lambda_right), format_number(r.right),
                          format_number(r.ratio), r.excluded ? "1" : "0", format_number(report.h),
                          stability_mode_name(report.mode), std::to_string(report.dictionary_size), grid});
    if (csv_path.has_parent_path()) std::filesystem::create_directories(csv_path.parent_path());
    harness::write_csv(csv_path, t);

    nlohmann::json j;
    j["mode"] = stability_mode_name(report.mode);
    j["condition"] = report.condition == pde::Condition::Quasilinear ? "quasilinear" : "semilinear";
    j["rows"] = report.rows.size();
    j["R"] = report.R;
    j["h"] = report.h;
    j["dictionary_size"] = report.dictionary_size;
    j["lambda_grid"] = report.lambdas;
    j["C"] = report.C;
    j["C_prime"] = report.C_prime;
    j["spread"] = report.spread;
    std::filesystem::path jp = csv_path;
    jp.replace_extension(".json");
    std::ofstream out(jp);
    NLSTAB_REQUIRE(out.good(), InvalidArgument, "cannot write " + jp.string());
    out << j.dump(2) << "\n";
    return {csv_path, jp};
}

} // namespace nlstab::recon
