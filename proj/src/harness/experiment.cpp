#include "nlstab/harness/experiment.hpp"

#include "nlstab/dn/measurement.hpp"
#include "nlstab/dn/operator_io.hpp"
#include "nlstab/geometry/mesh_io.hpp"
#include "nlstab/harness/catalog.hpp"
#include "nlstab/harness/csv.hpp"
#include "nlstab/pde/solution_io.hpp"
#include "nlstab/recon/gamma.hpp"
#include "nlstab/recon/semilinear.hpp"
#include "nlstab/recon/stability.hpp"

#include <json.hpp>

#include <chrono>
#include <fstream>
#include <optional>
#include <set>

namespace nlstab::harness {

std::string tool_version() { return "1.0.0"; }

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Setup {
    geometry::DomainTriple dom;
    pde::ProblemSpec p1;
    std::optional<pde::ProblemSpec> p2;
    std::vector<double> dense;
};

pde::ProblemSpec make_problem(const ExperimentConfig& c, const std::string& gamma, const std::string& drift,
                              const std::string& G, int dim)
{
    pde::ProblemSpec p;
    p.condition = c.condition == "semilinear" ? pde::Condition::Semilinear : pde::Condition::Quasilinear;
    p.a = coefficient_field(c.a);
    p.gamma = gamma_law(gamma);
    p.drift = drift_law(drift, dim);
    p.G = semilinear_law(G);
    return p;
}

void check_problem(const pde::ProblemSpec& p, const Setup& s)
{
    if (p.condition == pde::Condition::Quasilinear) {
        p.gamma.check(s.dense);
        if (!p.drift.zero) p.drift.check(s.dom.omega->nodes, s.dense);
    } else {
        p.G.check(s.dense);
    }
}

Setup prepare(const ExperimentConfig& c)
{
    c.validate();
    Setup s;
    s.dom = geometry::build_domain(c.domain);
    const int dim = s.dom.dim;
    s.p1 = make_problem(c, c.gamma, c.drift, c.G, dim);
    if (!c.gamma2.empty() || !c.drift2.empty() || !c.G2.empty())
        s.p2 = make_problem(c, c.gamma2.empty() ? c.gamma : c.gamma2, c.drift2.empty() ? c.drift : c.drift2,
                            c.G2.empty() ? c.G : c.G2, dim);
    s.dense = recon::lambda_grid(c.R, 0.01);
    for (double l : c.lambda_grid()) s.dense.push_back(l);
    s.dense.push_back(c.lambda);
    check_problem(s.p1, s);
    if (s.p2) check_problem(*s.p2, s);
    if (!c.perturbation.empty()) {
        if (s.p1.condition == pde::Condition::Quasilinear)
            gamma_law(c.perturbation);
        else
            semilinear_law(c.perturbation);
    }
    boundary_data(c.data);
    return s;
}

class Writer {
public:
    explicit Writer(fs::path dir) : dir_(std::move(dir)) {}
    fs::path path(const std::string& name) const { return dir_ / name; }
    void add(const std::vector<fs::path>& ps)
    {
        for (const auto& p : ps) files_.insert(fs::relative(p, dir_).generic_string());
    }
    void add(const fs::path& p) { add(std::vector<fs::path>{p}); }
    void json_file(const std::string& name, const json& j)
    {
        std::ofstream out(path(name));
        NLSTAB_REQUIRE(out.good(), InvalidArgument, "cannot write " + path(name).string());
        out << j.dump(2) << "\n";
        add(path(name));
    }
    const std::set<std::string>& files() const { return files_; }

private:
    fs::path dir_;
    std::set<std::string> files_;
};

dn::Background background(const Setup& s, double lambda)
{
    if (s.p1.condition == pde::Condition::Semilinear)
        return dn::Background::with_cutoff(lambda, geometry::boundary_cutoff(s.dom));
    return dn::Background::constant(lambda);
}

dn::Dictionary dictionary(const ExperimentConfig& c, const Setup& s)
{
    return dn::make_dictionary(s.dom.omega, s.dom.S, c.dictionary, dn::parse_dictionary_kind(c.dictionary_kind));
}

void run_solve(const ExperimentConfig& c, const Setup& s, Writer& w)
{
    const auto g = pde::boundary_values(*s.dom.omega, boundary_data(c.data));
    const pde::FieldSolution sol =
        s.p1.condition == pde::Condition::Quasilinear
            ? pde::solve_quasilinear(s.p1.a, s.p1.gamma, s.p1.drift, g, s.dom.omega)
            : pde::solve_semilinear(s.p1.G, g, s.dom.omega);
    geometry::write_mesh(w.path("mesh.txt").string(), *s.dom.omega);
    w.add(w.path("mesh.txt"));
    pde::write_solution(w.path("solution.txt").string(), sol);
    w.add(w.path("solution.txt"));
    w.json_file("solve.json", json{{"tag", sol.tag},
                                   {"residual", sol.residual},
                                   {"iterations", sol.iterations},
                                   {"continuation_steps", sol.continuation_steps},
                                   {"nodes", s.dom.omega->num_nodes()}});
}

void run_dnmap(const ExperimentConfig& c, const Setup& s, Writer& w)
{
    const auto& mesh = *s.dom.omega;
    const auto g = pde::boundary_values(mesh, boundary_data(c.data));
    const auto flux = dn::dn_apply(s.p1, g, s.dom.omega, s.dom.S);
    CsvTable t;
    t.header = {"boundary_index", "node", "x", "y", "z", "g", "flux", "in_patch"};
    for (int b = 0; b < mesh.num_boundary_nodes(); ++b) {
        const int v = mesh.boundary_nodes[b];
        const auto& x = mesh.nodes[v];
        t.rows.push_back({std::to_string(b), std::to_string(v), format_number(x.x()), format_number(x.y()),
                          format_number(x.z()), format_number(g.values[b]), format_number(flux.values[b]),
                          flux.patch[b] ? "1" : "0"});
    }
    write_csv(w.path("dnmap.csv"), t);
    w.add(w.path("dnmap.csv"));
    const auto dict = dictionary(c, s);
    const dn::LinearizedDN op(s.p1, background(s, c.lambda), s.dom.omega, s.dom.S);
    const auto sample = dn::sample_operator(op, dict);
    w.add(dn::write_operator_sample(sample, w.path("linearized_operator.csv")));
    json j{{"lambda", c.lambda}, {"dictionary_size", dict.size()}, {"operator_norm", dn::operator_norm(sample)}};
    if (s.p2) {
        const dn::LinearizedDN op2(*s.p2, background(s, c.lambda), s.dom.omega, s.dom.S);
        j["measurement"] = dn::measurement_functional(sample, dn::sample_operator(op2, dict));
    }
    w.json_file("dnmap.json", j);
}

void run_frechet(const ExperimentConfig& c, const Setup& s, Writer& w)
{
    const auto h = pde::boundary_values(*s.dom.omega, boundary_data(c.data));
    const auto rep = dn::frechet_ratio(s.p1, background(s, c.lambda), h, c.eps, s.dom.omega, s.dom.S);
    CsvTable t;
    t.header = {"eps", "error", "relative", "floor"};
    for (std::size_t i = 0; i < rep.eps.size(); ++i)
        t.rows.push_back({format_number(rep.eps[i]), format_number(rep.errors[i]), format_number(rep.relative[i]),
                          format_number(rep.floors[i])});
    write_csv(w.path("frechet.csv"), t);
    w.add(w.path("frechet.csv"));
    w.json_file("frechet.json", json{{"order", rep.order},
                                     {"points_used", rep.points_used},
                                     {"exact_within_floor", rep.exact_within_floor},
                                     {"partial", rep.partial},
                                     {"lambda", c.lambda}});
}

void run_singular(const ExperimentConfig& c, const Setup& s, Writer& w, int workers)
{
    const auto taus = c.taus.empty() ? singular::tau_schedule(s.dom) : c.taus;
    singular::SingularProblem prob;
    const auto r1 = singular::decomposition_sweep(s.dom, taus, singular::DataKind::G1, 0, prob, s.p1.a, workers);
    w.add(singular::write_decomposition(r1, w.path("decomposition_g1.csv")));
    if (c.k > 0) {
        singular::SingularProblem q;
        q.schrodinger = true;
        const auto r2 = singular::decomposition_sweep(s.dom, taus, singular::DataKind::G2, c.k, q,
                                                      pde::CoefficientMatrixField::identity(), workers);
        w.add(singular::write_decomposition(r2, w.path("decomposition_g2.csv")));
    }
}

void attach_exact(recon::ReconstructionCurve& curve, const std::function<double(double)>& f)
{
    for (auto& p : curve.points) p.exact = f(p.lambda);
}

void run_gamma(const ExperimentConfig& c, const Setup& s, Writer& w, int workers)
{
    const auto taus = c.taus.empty() ? singular::tau_schedule(s.dom) : c.taus;
    const auto probes = recon::make_gamma_probes(s.dom, taus, s.p1.a, workers);
    const auto grid = c.lambda_grid();
    auto c1 = recon::reconstruct_gamma(s.p1, grid, s.dom, probes, {}, workers);
    attach_exact(c1, s.p1.gamma.gamma);
    w.add(recon::write_curve(c1, w.path("gamma.csv")));
    if (s.p2) {
        auto c2 = recon::reconstruct_gamma(*s.p2, grid, s.dom, probes, {}, workers);
        attach_exact(c2, s.p2->gamma.gamma);
        w.add(recon::write_curve(c2, w.path("gamma2.csv")));
        w.add(recon::write_curve(recon::difference_curve(c1, c2), w.path("gamma_difference.csv")));
    }
}

void run_semilinear(const ExperimentConfig& c, const Setup& s, Writer& w, int workers)
{
    const auto ctx = recon::make_gprime_context(s.dom, c.dictionary);
    auto r = recon::reconstruct_semilinear(s.p1.G, c.lambda_grid(), c.anchor, ctx, {}, workers);
    attach_exact(r.gprime, s.p1.G.dG);
    attach_exact(r.G, s.p1.G.G);
    w.add(recon::write_curve(r.gprime, w.path("gprime.csv")));
    w.add(recon::write_curve(r.G, w.path("G.csv")));
}

void run_stability(const ExperimentConfig& c, const Setup& s, Writer& w, int workers)
{
    recon::StabilityFamily f;
    f.base = s.p1;
    f.s_values = c.s_values;
    if (s.p1.condition == pde::Condition::Quasilinear) {
        const auto delta = gamma_law(c.perturbation);
        f.member = [base = s.p1, delta](double t) {
            auto p = base;
            p.gamma = perturb(base.gamma, delta, t);
            return p;
        };
    } else {
        const auto delta = semilinear_law(c.perturbation);
        f.member = [base = s.p1, delta](double t) {
            auto p = base;
            p.G = perturb(base.G, delta, t);
            return p;
        };
    }
    recon::StabilityOptions o;
    o.mode = recon::parse_stability_mode(c.mode);
    o.R = c.R;
    o.lambdas = c.lambda_grid();
    o.workers = workers;
    if (s.p1.condition == pde::Condition::Semilinear) {
        o.use_cutoff = true;
        o.chi = geometry::boundary_cutoff(s.dom);
    }
    const auto rep = recon::stability_sweep(f, s.dom, dictionary(c, s), o);
    w.add(recon::write_stability(rep, w.path("stability.csv")));
}

} // namespace

RunManifest run_experiment(const ExperimentConfig& config, const fs::path& out, int workers)
{
    using clock = std::chrono::steady_clock;
    RunManifest m;
    m.pipeline = config.pipeline;
    m.config_hash = hash_hex(config.hash());
    m.tool_version = tool_version();
    m.seed = config.seed;
    auto t0 = clock::now();
    const Setup s = prepare(config);
    m.timings.emplace_back("setup", std::chrono::duration<double>(clock::now() - t0).count());

    fs::create_directories(out);
    Writer w(out);
    {
        std::ofstream cfg(w.path("config.txt"));
        cfg << config.serialize();
    }
    w.add(w.path("config.txt"));
    t0 = clock::now();
    try {
        const auto& p = config.pipeline;
        if (p == "solve") run_solve(config, s, w);
        else if (p == "dnmap") run_dnmap(config, s, w);
        else if (p == "frechet-check") run_frechet(config, s, w);
        else if (p == "singular-check") run_singular(config, s, w, workers);
        else if (p == "reconstruct-gamma") run_gamma(config, s, w, workers);
        else if (p == "reconstruct-semilinear") run_semilinear(config, s, w, workers);
        else run_stability(config, s, w, workers);
        m.complete = true;
    } catch (const std::exception& e) {
        m.failures.push_back(config.pipeline + ": " + e.what());
    }
    m.timings.emplace_back(config.pipeline, std::chrono::duration<double>(clock::now() - t0).count());
    w.add(w.path("manifest.json"));
    m.files.assign(w.files().begin(), w.files().end());
    write_manifest(m, w.path("manifest.json"));
    return m;
}

void write_manifest(const RunManifest& m, const fs::path& path)
{
    json t = json::array();
    for (const auto& [step, sec] : m.timings) t.push_back(json{{"step", step}, {"seconds", sec}});
    const json j{{"pipeline", m.pipeline}, {"config_hash", m.config_hash}, {"tool_version", m.tool_version},
                 {"seed", m.seed},         {"timings", t},                 {"files", m.files},
                 {"complete", m.complete}, {"failures", m.failures}};
    std::ofstream out(path);
    NLSTAB_REQUIRE(out.good(), InvalidArgument, "cannot write " + path.string());
    out << j.dump(2) << "\n";
}

RunManifest read_manifest(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read manifest " + path.string());
    json j;
    try {
        j = json::parse(in);
        RunManifest m;
        m.pipeline = j.at("pipeline").get<std::string>();
        m.config_hash = j.at("config_hash").get<std::string>();
        m.tool_version = j.at("tool_version").get<std::string>();
        m.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& t : j.at("timings")) m.timings.emplace_back(t.at("step"), t.at("seconds"));
        m.files = j.at("files").get<std::vector<std::string>>();
        m.complete = j.at("complete").get<bool>();
        m.failures = j.at("failures").get<std::vector<std::string>>();
        return m;
    } catch (const json::exception& e) {
        throw ParseError("manifest " + path.string() + ": " + e.what());
    }
}

} // namespace nlstab::harness
