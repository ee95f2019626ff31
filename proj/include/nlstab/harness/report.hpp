#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace nlstab::harness {

struct ReportItem {
    std::string artifact;
    /// curve, stability, decomposition, frechet, solve or dnmap.
    std::string kind;
    std::string line;
    bool pass = true;
};

struct Report {
    std::string text;
    std::vector<ReportItem> items;
    /// One entry per missing or unparsable artifact.
    std::vector<std::string> errors;
    std::vector<std::filesystem::path> plot_files;
    [[nodiscard]] bool all_pass() const;
};

/// Thresholds applied to the artifacts found in a run directory.
struct ReportThresholds {
    /// gamma curves: max pointwise relative error.
    double gamma_error = 0.05;
    /// Other curves: max |value - exact| / max |exact|.
    double curve_error = 0.05;
    /// Lipschitz sweeps: max ratio / min ratio.
    double lipschitz_spread = 2.0;
    double frechet_order = 0.8;
    double solve_residual = 1e-8;
};

/// Summarizes every artifact (JSON summary plus its CSV) in `dir` and writes
/// plot-data CSVs (lambda vs value, tau vs norms, s vs ratio) into `plot_dir`
/// (empty = no plot files).
Report emit_report(const std::filesystem::path& dir, const std::filesystem::path& plot_dir = {},
                   const ReportThresholds& thresholds = {});

} // namespace nlstab::harness
