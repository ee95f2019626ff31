#include "nlstab/harness/report.hpp"

#include "nlstab/common.hpp"
#include "nlstab/harness/csv.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nlstab::harness {

namespace fs = std::filesystem;
using nlohmann::json;

bool Report::all_pass() const
{
    return errors.empty() && std::all_of(items.begin(), items.end(), [](const ReportItem& i) { return i.pass; });
}

namespace {

std::string fmt(double x)
{
    std::ostringstream s;
    s.precision(4);
    s << x;
    return s.str();
}

void plot(Report& r, const fs::path& plot_dir, const std::string& name, const CsvTable& t)
{
    if (plot_dir.empty()) return;
    fs::create_directories(plot_dir);
    const fs::path p = plot_dir / ("plot_" + name + ".csv");
    write_csv(p, t);
    r.plot_files.push_back(p);
}

CsvTable columns(const CsvTable& src, const std::vector<std::string>& names)
{
    CsvTable t;
    t.header = names;
    std::vector<int> idx;
    for (const auto& n : names) idx.push_back(src.column(n));
    for (const auto& row : src.rows) {
        std::vector<std::string> out;
        for (int i : idx) out.push_back(row[i]);
        t.rows.push_back(out);
    }
    return t;
}

ReportItem curve_item(const std::string& stem, const json& j, const CsvTable& t, const ReportThresholds& th)
{
    ReportItem it{stem, "curve", "", true};
    const std::string q = j.at("quantity").get<std::string>();
    const auto lam = t.numbers("lambda"), val = t.numbers("value"), ex = t.numbers("exact");
    double sup_abs = 0.0, sup_ex = 0.0, pointwise = 0.0;
    bool have_exact = true;
    for (std::size_t i = 0; i < val.size(); ++i) {
        if (!std::isfinite(ex[i])) {
            have_exact = false;
            continue;
        }
        const double d = std::abs(val[i] - ex[i]);
        sup_abs = std::max(sup_abs, d);
        sup_ex = std::max(sup_ex, std::abs(ex[i]));
        if (ex[i] != 0.0) pointwise = std::max(pointwise, d / std::abs(ex[i]));
    }
    std::string line = q + " on [" + fmt(lam.front()) + ", " + fmt(lam.back()) + "], " + std::to_string(val.size()) +
                       " points";
    if (j.contains("lambda_R")) line += ", lambda_R = " + fmt(j.at("lambda_R").get<double>());
    if (!have_exact) {
        it.line = line + ", no exact law recorded";
        return it;
    }
    if (q == "gamma") {
        it.pass = pointwise <= th.gamma_error;
        it.line = line + ", sup pointwise relative error " + fmt(pointwise) + " (limit " + fmt(th.gamma_error) + ")";
    } else {
        it.pass = sup_abs <= th.curve_error * sup_ex + 1e-9;
        it.line = line + ", sup error " + fmt(sup_abs) + " relative to sup |exact| " + fmt(sup_ex) + " (limit " +
                  fmt(th.curve_error) + ")";
    }
    const int flagged = j.value("flagged_points", 0);
    if (flagged) it.line += ", " + std::to_string(flagged) + " flagged point(s)";
    return it;
}

ReportItem stability_item(const std::string& stem, const json& j, const CsvTable& t, const ReportThresholds& th)
{
    ReportItem it{stem, "stability", "", true};
    const std::string mode = j.at("mode").get<std::string>();
    const auto s = t.numbers("s"), left = t.numbers("left"), right = t.numbers("right"), ratio = t.numbers("ratio");
    const auto excl = t.numbers("excluded");
    double rmin = INFINITY, rmax = 0.0;
    int first = -1;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (excl[i] != 0) continue;
        if (first < 0 || s[i] > s[first]) first = static_cast<int>(i);
        rmin = std::min(rmin, ratio[i]);
        rmax = std::max(rmax, ratio[i]);
    }
    if (first < 0) {
        it.pass = false;
        it.line = mode + " sweep with no nonzero perturbation";
        return it;
    }
    const double spread = rmax / rmin;
    if (mode == "lipschitz") {
        it.pass = spread <= th.lipschitz_spread;
        it.line = "lipschitz sweep over " + std::to_string(s.size()) + " members: C = " + fmt(rmax) +
                  ", ratio spread " + fmt(spread) + " (limit " + fmt(th.lipschitz_spread) + ")";
    } else {
        const double c0 = ratio[first];
        bool ok = true;
        for (std::size_t i = 0; i < s.size(); ++i)
            if (excl[i] == 0 && left[i] > c0 * right[i] * (1 + 1e-9)) ok = false;
        it.pass = ok;
        it.line = "hoelder sweep over " + std::to_string(s.size()) + " members: C = " + fmt(rmax) +
                  ", C from the largest s = " + fmt(c0) + (ok ? " bounds" : " does not bound") +
                  " every member, ratio spread " + fmt(spread);
    }
    return it;
}

ReportItem decomposition_item(const std::string& stem, const json& j)
{
    ReportItem it{stem, "decomposition", "", true};
    const bool mono = j.at("ratio_monotone").get<bool>();
    it.pass = mono;
    it.line = j.at("kind").get<std::string>() + " data: H^{1/2} log-log slope " +
              fmt(j.at("data_fit").at("slope").get<double>()) + ", remainder ratio " +
              (mono ? "decreasing" : "not monotone");
    return it;
}

} // namespace

Report emit_report(const fs::path& dir, const fs::path& plot_dir, const ReportThresholds& th)
{
    Report r;
    if (!fs::is_directory(dir)) {
        r.errors.push_back(dir.string() + ": not a directory");
        r.text = "error: " + r.errors.back() + "\n";
        return r;
    }
    std::vector<fs::path> jsons;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".json" && e.path().filename() != "manifest.json")
            jsons.push_back(e.path());
    std::sort(jsons.begin(), jsons.end());
    for (const auto& jp : jsons) {
        const std::string stem = jp.stem().string();
        json j;
        try {
            std::ifstream in(jp);
            j = json::parse(in);
        } catch (const std::exception& e) {
            r.errors.push_back(jp.filename().string() + ": cannot parse JSON (" + e.what() + ")");
            continue;
        }
        try {
            auto csv_for = [&]() {
                fs::path cp = jp;
                cp.replace_extension(".csv");
                if (!fs::exists(cp)) throw ParseError("missing " + cp.filename().string());
                return read_csv(cp);
            };
            if (j.contains("quantity")) {
                const CsvTable t = csv_for();
                r.items.push_back(curve_item(stem, j, t, th));
                plot(r, plot_dir, stem, columns(t, {"lambda", "value", "exact"}));
            } else if (j.contains("mode") && j.contains("spread")) {
                const CsvTable t = csv_for();
                r.items.push_back(stability_item(stem, j, t, th));
                plot(r, plot_dir, stem, columns(t, {"s", "left", "right", "ratio"}));
            } else if (j.contains("kind") && j.contains("ratio_monotone")) {
                const CsvTable t = csv_for();
                r.items.push_back(decomposition_item(stem, j));
                plot(r, plot_dir, stem, columns(t, {"tau", "h_h1", "remainder_h1", "data_h12"}));
            } else if (j.contains("order") && j.contains("exact_within_floor")) {
                const double order = j.at("order").is_number() ? j.at("order").get<double>() : NAN;
                const bool exact = j.at("exact_within_floor").get<bool>();
                ReportItem it{stem, "frechet", "", exact || order >= th.frechet_order};
                it.line = exact ? "Frechet quotients exact within the solver floor"
                                : "Frechet order " + fmt(order) + " (limit " + fmt(th.frechet_order) + ")";
                r.items.push_back(it);
                plot(r, plot_dir, stem, columns(csv_for(), {"eps", "error", "relative"}));
            } else if (j.contains("tag") && j.contains("residual")) {
                const double res = j.at("residual").get<double>();
                r.items.push_back({stem, "solve", j.at("tag").get<std::string>() + " solve, residual " + fmt(res),
                                   res <= th.solve_residual});
            } else if (j.contains("operator_norm")) {
                std::string line = "linearized operator norm " + fmt(j.at("operator_norm").get<double>());
                if (j.contains("measurement")) line += ", measurement " + fmt(j.at("measurement").get<double>());
                r.items.push_back({stem, "dnmap", line, true});
            }
        } catch (const std::exception& e) {
            r.errors.push_back(stem + ": " + e.what());
        }
    }
    std::ostringstream out;
    if (r.items.empty() && r.errors.empty()) {
        out << "no artifacts in " << dir.string() << "\n";
    } else {
        for (const auto& it : r.items)
            out << (it.pass ? "PASS " : "FAIL ") << it.artifact << " [" << it.kind << "] " << it.line << "\n";
        for (const auto& e : r.errors) out << "ERROR " << e << "\n";
    }
    r.text = out.str();
    return r;
}

} // namespace nlstab::harness
