#pragma once

#include "nlstab/common.hpp"

#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace nlstab::recon {

/// One reconstructed value with its extrapolation diagnostics.
struct CurvePoint {
    double lambda = 0.0;
    double value = 0.0;
    /// Known value of the simulated law (NaN when unknown).
    double exact = std::numeric_limits<double>::quiet_NaN();
    /// Relative RMS misfit of the tau fit (0 when no fit is involved).
    double fit_residual = 0.0;
    double tau_min = 0.0;
    double tau_max = 0.0;
    int taus_used = 0;
    /// Fitted tail exponent and coefficient (NaN when not applicable).
    double beta = std::numeric_limits<double>::quiet_NaN();
    double tail = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::string> flags;
};

/// A reconstructed law on a strictly increasing lambda grid.
struct ReconstructionCurve {
    /// "gamma", "gamma-difference", "gprime" or "G".
    std::string quantity;
    std::vector<CurvePoint> points;
    /// Grid argmax of |value| (difference curves), NaN otherwise.
    double lambda_R = std::numeric_limits<double>::quiet_NaN();
    int dim = 0;
    double h = 0.0;
    double local_h = 0.0;
    int dictionary_size = 0;
    std::vector<double> taus;

    [[nodiscard]] std::vector<double> lambdas() const;
    [[nodiscard]] std::vector<double> values() const;
    [[nodiscard]] bool flagged() const;
    /// Throws InvalidArgument when the grid is not strictly increasing.
    void validate() const;
};

struct CurveError {
    /// max |value - exact|.
    double sup_abs = 0.0;
    /// sup_abs / max |exact|.
    double sup_rel = 0.0;
    /// max |value - exact| / |exact| over points with exact != 0.
    double pointwise_rel = 0.0;
    double worst_lambda = 0.0;
};

CurveError curve_error(const ReconstructionCurve& curve, const std::function<double(double)>& exact);

/// Pointwise difference c1 - c2 on a common grid; lambda_R is the argmax of
/// |difference|. Flags of both inputs are carried over.
ReconstructionCurve difference_curve(const ReconstructionCurve& c1, const ReconstructionCurve& c2);

/// CSV (one row per grid point, with the mesh size, dictionary size and tau
/// schedule on every row) plus a JSON summary next to it.
std::vector<std::filesystem::path> write_curve(const ReconstructionCurve& curve,
                                               const std::filesystem::path& csv_path);

/// Strictly increasing grid with spacing close to `step` covering [-R, R].
std::vector<double> lambda_grid(double R, double step);

} // namespace nlstab::recon
