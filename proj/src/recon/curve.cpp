#include "nlstab/recon/curve.hpp"

#include "nlstab/harness/csv.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace nlstab::recon {

std::vector<double> ReconstructionCurve::lambdas() const
{
    std::vector<double> out;
    for (const auto& p : points) out.push_back(p.lambda);
    return out;
}

std::vector<double> ReconstructionCurve::values() const
{
    std::vector<double> out;
    for (const auto& p : points) out.push_back(p.value);
    return out;
}

bool ReconstructionCurve::flagged() const
{
    return std::any_of(points.begin(), points.end(), [](const CurvePoint& p) { return !p.flags.empty(); });
}

void ReconstructionCurve::validate() const
{
    for (std::size_t i = 1; i < points.size(); ++i)
        NLSTAB_REQUIRE(points[i].lambda > points[i - 1].lambda, InvalidArgument,
                       "reconstruction curve: lambda grid must be strictly increasing");
}

CurveError curve_error(const ReconstructionCurve& curve, const std::function<double(double)>& exact)
{
    CurveError e;
    double sup_exact = 0.0;
    for (const auto& p : curve.points) {
        const double ex = exact(p.lambda);
        const double d = std::abs(p.value - ex);
        sup_exact = std::max(sup_exact, std::abs(ex));
        if (d > e.sup_abs) {
            e.sup_abs = d;
            e.worst_lambda = p.lambda;
        }
        if (ex != 0.0) e.pointwise_rel = std::max(e.pointwise_rel, d / std::abs(ex));
    }
    e.sup_rel = sup_exact > 0 ? e.sup_abs / sup_exact : e.sup_abs;
    return e;
}

ReconstructionCurve difference_curve(const ReconstructionCurve& c1, const ReconstructionCurve& c2)
{
    NLSTAB_REQUIRE(c1.points.size() == c2.points.size(), InvalidArgument, "difference curve: grids differ");
    ReconstructionCurve d = c1;
    d.quantity = c1.quantity + "-difference";
    double best = -1.0;
    for (std::size_t i = 0; i < c1.points.size(); ++i) {
        NLSTAB_REQUIRE(std::abs(c1.points[i].lambda - c2.points[i].lambda) <= 1e-12, InvalidArgument,
                       "difference curve: grids differ");
        auto& p = d.points[i];
        p.value = c1.points[i].value - c2.points[i].value;
        p.fit_residual = std::max(c1.points[i].fit_residual, c2.points[i].fit_residual);
        p.beta = p.tail = std::numeric_limits<double>::quiet_NaN();
        p.exact = c1.points[i].exact - c2.points[i].exact;
        p.flags.insert(p.flags.end(), c2.points[i].flags.begin(), c2.points[i].flags.end());
        if (std::abs(p.value) > best) {
            best = std::abs(p.value);
            d.lambda_R = p.lambda;
        }
    }
    return d;
}

namespace {

std::string join(const std::vector<std::string>& xs, const std::string& sep)
{
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
    return out;
}

std::string join_numbers(const std::vector<double>& xs)
{
    std::vector<std::string> s;
    for (double x : xs) s.push_back(harness::format_number(x));
    return join(s, ";");
}

} // namespace

std::vector<std::filesystem::path> write_curve(const ReconstructionCurve& curve,
                                               const std::filesystem::path& csv_path)
{
    using harness::format_number;
    curve.validate();
    harness::CsvTable t;
    t.header = {"lambda", "value", "exact", "fit_residual", "tau_min", "tau_max", "taus_used",
                "beta", "tail", "flags", "h", "dictionary_size", "tau_schedule"};
    const std::string sched = join_numbers(curve.taus);
    for (const auto& p : curve.points)
        t.rows.push_back({format_number(p.lambda), format_number(p.value), format_number(p.exact),
                          format_number(p.fit_residual),
                          format_number(p.tau_min), format_number(p.tau_max), std::to_string(p.taus_used),
                          format_number(p.beta), format_number(p.tail), join(p.flags, ";"),
                          format_number(curve.h), std::to_string(curve.dictionary_size), sched});
    if (csv_path.has_parent_path()) std::filesystem::create_directories(csv_path.parent_path());
    harness::write_csv(csv_path, t);

    nlohmann::json j;
    j["quantity"] = curve.quantity;
    j["points"] = curve.points.size();
    j["dim"] = curve.dim;
    j["h"] = curve.h;
    j["local_h"] = curve.local_h;
    j["dictionary_size"] = curve.dictionary_size;
    j["tau_schedule"] = curve.taus;
    if (!curve.points.empty()) {
        j["lambda_min"] = curve.points.front().lambda;
        j["lambda_max"] = curve.points.back().lambda;
    }
    if (std::isfinite(curve.lambda_R)) j["lambda_R"] = curve.lambda_R;
    double worst = 0.0;
    int flagged = 0;
    for (const auto& p : curve.points) {
        worst = std::max(worst, p.fit_residual);
        flagged += p.flags.empty() ? 0 : 1;
    }
    j["max_fit_residual"] = worst;
    j["flagged_points"] = flagged;
    std::filesystem::path jp = csv_path;
    jp.replace_extension(".json");
    std::ofstream out(jp);
    NLSTAB_REQUIRE(out.good(), InvalidArgument, "cannot write " + jp.string());
    out << j.dump(2) << "\n";
    return {csv_path, jp};
}

std::vector<double> lambda_grid(double R, double step)
{
    NLSTAB_REQUIRE(R > 0 && step > 0, InvalidArgument, "lambda grid: R and step must be positive");
    const int n = std::max(1, static_cast<int>(std::lround(2.0 * R / step)));
    std::vector<double> out(n + 1);
    for (int i = 0; i <= n; ++i) out[i] = -R + 2.0 * R * i / n;
    return out;
}

} // namespace nlstab::recon
