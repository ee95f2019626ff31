#include "nlstab/harness/config.hpp"

#include "nlstab/harness/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

namespace nlstab::harness {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v)
{
    const std::string t = trim(v);
    double x = 0.0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty())
        throw ParseError("config: '" + key + "' expects a number, got '" + v + "'");
    return x;
}

long long to_int(const std::string& key, const std::string& v)
{
    const std::string t = trim(v);
    long long x = 0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty())
        throw ParseError("config: '" + key + "' expects an integer, got '" + v + "'");
    return x;
}

bool to_bool(const std::string& key, const std::string& v)
{
    const std::string t = trim(v);
    if (t == "1" || t == "true" || t == "yes") return true;
    if (t == "0" || t == "false" || t == "no") return false;
    throw ParseError("config: '" + key + "' expects a boolean, got '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v)
{
    std::vector<double> out;
    if (trim(v).empty()) return out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
    return out;
}

std::string list(const std::vector<double>& xs)
{
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + format_number(xs[i]);
    return out;
}

Point to_point(const std::string& key, const std::string& v)
{
    const auto xs = to_list(key, v);
    if (xs.size() < 2 || xs.size() > 3) throw ParseError("config: '" + key + "' expects 2 or 3 coordinates");
    return Point(xs[0], xs[1], xs.size() == 3 ? xs[2] : 0.0);
}

std::string point(const Point& p) { return list({p.x(), p.y(), p.z()}); }

struct Field {
    std::string key;
    std::function<void(ExperimentConfig&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

#define NUM_FIELD(name, member)                                                                   \
    Field{name, [](ExperimentConfig& c, const std::string& v) { c.member = to_double(name, v); }, \
          [](const ExperimentConfig& c) { return format_number(c.member); }}
#define STR_FIELD(name, member)                                                      \
    Field{name, [](ExperimentConfig& c, const std::string& v) { c.member = trim(v); }, \
          [](const ExperimentConfig& c) { return c.member; }}
#define LIST_FIELD(name, member)                                                \
    Field{name, [](ExperimentConfig& c, const std::string& v) { c.member = to_list(name, v); }, \
          [](const ExperimentConfig& c) { return list(c.member); }}

const std::vector<Field>& fields()
{
    static const std::vector<Field> f = {
        STR_FIELD("pipeline", pipeline),
        Field{"shape", [](ExperimentConfig& c, const std::string& v) { c.domain.shape = geometry::parse_shape(trim(v)); },
              [](const ExperimentConfig& c) { return geometry::shape_name(c.domain.shape); }},
        NUM_FIELD("h", domain.h),
        Field{"x0", [](ExperimentConfig& c, const std::string& v) { c.domain.x0 = to_point("x0", v); },
              [](const ExperimentConfig& c) { return point(c.domain.x0); }},
        Field{"full_boundary", [](ExperimentConfig& c, const std::string& v) { c.domain.full_boundary = to_bool("full_boundary", v); },
              [](const ExperimentConfig& c) { return std::string(c.domain.full_boundary ? "1" : "0"); }},
        NUM_FIELD("patch_radius", domain.patch_radius),
        NUM_FIELD("subpatch_radius", domain.subpatch_radius),
        NUM_FIELD("outer_radius", domain.outer_radius),
        NUM_FIELD("bulge_height", domain.bulge_height),
        NUM_FIELD("grading", domain.grading),
        NUM_FIELD("x0_size", domain.x0_size),
        NUM_FIELD("size_growth", domain.size_growth),
        NUM_FIELD("delta_prime", domain.delta_prime),
        Field{"polygon",
              [](ExperimentConfig& c, const std::string& v) {
                  const auto xs = to_list("polygon", v);
                  if (xs.size() % 2) throw ParseError("config: 'polygon' expects x,y pairs");
                  c.domain.polygon.clear();
                  for (std::size_t i = 0; i < xs.size(); i += 2) c.domain.polygon.emplace_back(xs[i], xs[i + 1], 0.0);
              },
              [](const ExperimentConfig& c) {
                  std::vector<double> xs;
                  for (const auto& p : c.domain.polygon) {
                      xs.push_back(p.x());
                      xs.push_back(p.y());
                  }
                  return list(xs);
              }},
        Field{"box_lo", [](ExperimentConfig& c, const std::string& v) { c.domain.box_lo = to_point("box_lo", v); },
              [](const ExperimentConfig& c) { return point(c.domain.box_lo); }},
        Field{"box_hi", [](ExperimentConfig& c, const std::string& v) { c.domain.box_hi = to_point("box_hi", v); },
              [](const ExperimentConfig& c) { return point(c.domain.box_hi); }},
        STR_FIELD("mesh_file", domain.mesh_file),
        Field{"imported_dim", [](ExperimentConfig& c, const std::string& v) { c.domain.imported_dim = static_cast<int>(to_int("imported_dim", v)); },
              [](const ExperimentConfig& c) { return std::to_string(c.domain.imported_dim); }},
        STR_FIELD("condition", condition),
        STR_FIELD("a", a),
        STR_FIELD("gamma", gamma),
        STR_FIELD("drift", drift),
        STR_FIELD("G", G),
        STR_FIELD("gamma2", gamma2),
        STR_FIELD("drift2", drift2),
        STR_FIELD("G2", G2),
        STR_FIELD("perturbation", perturbation),
        LIST_FIELD("s_values", s_values),
        STR_FIELD("data", data),
        NUM_FIELD("R", R),
        NUM_FIELD("lambda_step", lambda_step),
        LIST_FIELD("lambdas", lambdas),
        NUM_FIELD("lambda", lambda),
        LIST_FIELD("taus", taus),
        LIST_FIELD("eps", eps),
        Field{"dictionary", [](ExperimentConfig& c, const std::string& v) { c.dictionary = static_cast<int>(to_int("dictionary", v)); },
              [](const ExperimentConfig& c) { return std::to_string(c.dictionary); }},
        STR_FIELD("dictionary_kind", dictionary_kind),
        STR_FIELD("mode", mode),
        NUM_FIELD("anchor", anchor),
        Field{"k", [](ExperimentConfig& c, const std::string& v) { c.k = static_cast<int>(to_int("k", v)); },
              [](const ExperimentConfig& c) { return std::to_string(c.k); }},
        Field{"seed", [](ExperimentConfig& c, const std::string& v) {
                  const long long s = to_int("seed", v);
                  if (s < 0) throw ParseError("config: 'seed' must be non-negative");
                  c.seed = static_cast<std::uint64_t>(s);
              },
              [](const ExperimentConfig& c) { return std::to_string(c.seed); }},
    };
    return f;
}

#undef NUM_FIELD
#undef STR_FIELD
#undef LIST_FIELD

bool strictly_monotone(const std::vector<double>& xs)
{
    bool inc = true, dec = true;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        inc = inc && xs[i] > xs[i - 1];
        dec = dec && xs[i] < xs[i - 1];
    }
    return inc || dec;
}

} // namespace

KeyValues parse_key_values(std::istream& in)
{
    KeyValues kv;
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError("config line " + std::to_string(n) + ": missing '='");
        const std::string key = trim(t.substr(0, eq));
        if (key.empty()) throw ParseError("config line " + std::to_string(n) + ": empty key");
        if (kv.count(key)) throw ParseError("config line " + std::to_string(n) + ": repeated key '" + key + "'");
        kv[key] = trim(t.substr(eq + 1));
    }
    return kv;
}

std::uint64_t fnv1a(const std::string& text)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hash_hex(std::uint64_t h)
{
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << h;
    return s.str();
}

ExperimentConfig config_from(const KeyValues& kv)
{
    ExperimentConfig c;
    for (const auto& [key, value] : kv) {
        const auto& f = fields();
        const auto it = std::find_if(f.begin(), f.end(), [&](const Field& x) { return x.key == key; });
        if (it == f.end()) throw ParseError("config: unknown key '" + key + "'");
        it->set(c, value);
    }
    return c;
}

ExperimentConfig parse_config(const std::string& text)
{
    std::istringstream in(text);
    return config_from(parse_key_values(in));
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read config " + path.string());
    return config_from(parse_key_values(in));
}

std::string ExperimentConfig::serialize() const
{
    std::vector<std::pair<std::string, std::string>> lines;
    for (const auto& f : fields()) lines.emplace_back(f.key, f.get(*this));
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& [k, v] : lines) out += k + " = " + v + "\n";
    return out;
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a(serialize()); }

std::vector<double> ExperimentConfig::lambda_grid() const
{
    if (!lambdas.empty()) return lambdas;
    const int n = std::max(1, static_cast<int>(std::lround(2.0 * R / lambda_step)));
    std::vector<double> out(n + 1);
    for (int i = 0; i <= n; ++i) out[i] = -R + 2.0 * R * i / n;
    return out;
}

void ExperimentConfig::validate() const
{
    static const std::vector<std::string> pipelines = {"solve",          "dnmap",
                                                       "frechet-check",  "singular-check",
                                                       "reconstruct-gamma", "reconstruct-semilinear",
                                                       "stability-sweep"};
    NLSTAB_REQUIRE(std::find(pipelines.begin(), pipelines.end(), pipeline) != pipelines.end(), InvalidArgument,
                   "config: unknown pipeline '" + pipeline + "'");
    NLSTAB_REQUIRE(domain.h > 0, InvalidArgument, "config: h must be positive");
    NLSTAB_REQUIRE(R > 0, InvalidArgument, "config: R must be positive");
    NLSTAB_REQUIRE(lambda_step > 0, InvalidArgument, "config: lambda_step must be positive");
    NLSTAB_REQUIRE(condition == "quasilinear" || condition == "semilinear", InvalidArgument,
                   "config: condition must be quasilinear or semilinear");
    NLSTAB_REQUIRE(mode == "lipschitz" || mode == "hoelder", InvalidArgument,
                   "config: mode must be lipschitz or hoelder");
    NLSTAB_REQUIRE(dictionary_kind == "eigen" || dictionary_kind == "fourier", InvalidArgument,
                   "config: dictionary_kind must be eigen or fourier");
    NLSTAB_REQUIRE(dictionary > 0, InvalidArgument, "config: dictionary size must be positive");
    NLSTAB_REQUIRE(k >= 0 && k <= 3, InvalidArgument, "config: k must lie in 0..3");
    auto check_schedule = [](const std::vector<double>& xs, const std::string& name, bool allow_empty) {
        NLSTAB_REQUIRE(allow_empty || !xs.empty(), InvalidArgument, "config: " + name + " must not be empty");
        NLSTAB_REQUIRE(strictly_monotone(xs), InvalidArgument, "config: " + name + " must be strictly monotone");
    };
    check_schedule(lambdas, "lambdas", true);
    NLSTAB_REQUIRE(lambdas.size() < 2 || lambdas.front() < lambdas.back(), InvalidArgument,
                   "config: lambdas must increase");
    check_schedule(taus, "taus", true);
    for (double t : taus) NLSTAB_REQUIRE(t > 0, InvalidArgument, "config: taus must be positive");
    check_schedule(eps, "eps", false);
    for (double e : eps) NLSTAB_REQUIRE(e > 0, InvalidArgument, "config: eps must be positive");
    check_schedule(s_values, "s_values", pipeline != "stability-sweep");
    if (pipeline == "stability-sweep")
        NLSTAB_REQUIRE(!perturbation.empty(), InvalidArgument, "config: stability-sweep needs a perturbation");
    if (pipeline == "reconstruct-gamma")
        NLSTAB_REQUIRE(taus.empty() || taus.size() >= 4, InvalidArgument,
                       "config: reconstruct-gamma needs at least 4 taus");
}

} // namespace nlstab::harness
