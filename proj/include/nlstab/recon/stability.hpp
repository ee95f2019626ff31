#pragma once

#include "nlstab/dn/measurement.hpp"

#include <filesystem>
#include <functional>
#include <limits>
#include <string>

namespace nlstab::recon {

enum class StabilityMode { Lipschitz, Hoelder };

StabilityMode parse_stability_mode(const std::string& name);
std::string stability_mode_name(StabilityMode m);

/// p2(s) = member(s) compared against `base` for every s in `s_values`.
struct StabilityFamily {
    pde::ProblemSpec base;
    std::function<pde::ProblemSpec(double)> member;
    std::vector<double> s_values;
};

struct StabilityOptions {
    StabilityMode mode = StabilityMode::Lipschitz;
    /// The law difference is measured on [-R, R].
    double R = 2.0;
    /// Spacing of the dense grid for the left side.
    double dense_step = 0.005;
    /// Grid for the measurement sup (right side).
    std::vector<double> lambdas;
    /// Background lambda chi instead of the constant lambda (condition (ii)).
    bool use_cutoff = false;
    geometry::BoundaryFunction chi;
    pde::SolverOptions solver;
    int workers = 1;
};

struct StabilityRow {
    double s = 0.0;
    /// sup over the dense grid of |law_1 - law_2|.
    double left = 0.0;
    double lambda_left = 0.0;
    /// sup over the lambda grid of the measurement.
    double measurement = 0.0;
    double lambda_right = 0.0;
    /// measurement, or measurement^{1/3} in hoelder mode.
    double right = 0.0;
    /// left / right (NaN when excluded).
    double ratio = std::numeric_limits<double>::quiet_NaN();
    /// Zero perturbation: both sides vanish and the row is left out of C.
    bool excluded = false;
};

struct StabilityReport {
    StabilityMode mode = StabilityMode::Lipschitz;
    pde::Condition condition = pde::Condition::Quasilinear;
    std::vector<StabilityRow> rows;
    /// max ratio over the included rows.
    double C = std::numeric_limits<double>::quiet_NaN();
    /// max measurement / left over the included rows (consistency bound).
    double C_prime = std::numeric_limits<double>::quiet_NaN();
    /// max ratio / min ratio.
    double spread = std::numeric_limits<double>::quiet_NaN();
    double R = 0.0;
    double h = 0.0;
    int dictionary_size = 0;
    std::vector<double> lambdas;

    /// True when left <= c * right for every included row.
    [[nodiscard]] bool bounded_by(double c, double rel_slack = 1e-9) const;
};

/// Throws LawViolation before any solve when a member breaks admissibility:
/// gamma positivity, the drift sign (when the drift claims it), G'
/// nonnegativity, or G_2(0) != G_1(0) in hoelder mode.
void check_family(const StabilityFamily& family, const StabilityOptions& opts, const geometry::Mesh& mesh);

StabilityReport stability_sweep(const StabilityFamily& family, const geometry::DomainTriple& dom,
                                const dn::Dictionary& dict, const StabilityOptions& opts);

/// CSV with one row per s (mesh size, dictionary size and lambda grid on every
/// row) plus a JSON summary.
std::vector<std::filesystem::path> write_stability(const StabilityReport& report,
                                                   const std::filesystem::path& csv_path);

} // namespace nlstab::recon
