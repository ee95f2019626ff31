#pragma once

#include "nlstab/recon/curve.hpp"
#include "nlstab/singular/singular_data.hpp"

namespace nlstab::recon {

/// Singular data g1_tau over a tau schedule together with the reference
/// pairings <Lref g, g> of the operator with gamma = 1, D = 0 and the same a.
struct ProbeSet {
    /// Strictly decreasing.
    std::vector<double> taus;
    std::vector<singular::SingularData> data;
    /// Column j holds the boundary values of data[j].
    Matrix G;
    Vector reference;
    pde::CoefficientMatrixField a;
    double local_h = 0.0;
    double h = 0.0;
    int dim = 0;
};

/// Requires at least 4 distinct tau values in (0, delta).
ProbeSet make_gamma_probes(const geometry::DomainTriple& dom, std::vector<double> taus,
                           const pde::CoefficientMatrixField& a = pde::CoefficientMatrixField::identity(),
                           int workers = 1);

/// Least-squares fit r(tau) = limit + tail * tau^beta with beta > 0 fitted.
struct PowerTailFit {
    double limit = 0.0;
    double tail = 0.0;
    double beta = 0.0;
    /// RMS misfit divided by the mean |r|.
    double rel_rms = 0.0;
    int points = 0;
};

/// Requires at least 4 points; beta is searched in [beta_min, beta_max].
PowerTailFit fit_power_tail(const std::vector<double>& taus, const std::vector<double>& r, double beta_min = 0.02,
                            double beta_max = 4.0);

struct GammaOptions {
    /// Relative RMS above which a non-monotone r(tau) flags the estimate.
    double residual_threshold = 1e-3;
    pde::SolverOptions solver;
};

struct GammaEstimate {
    double lambda = 0.0;
    double value = 0.0;
    PowerTailFit fit;
    std::vector<double> taus;
    std::vector<double> ratios;
    bool monotone = false;
    /// "poor-fit" (non-monotone with a misfit above the threshold),
    /// "out-of-theory" (drift without the admissibility flag).
    std::vector<std::string> flags;
};

/// gamma(lambda) as the tau -> 0 extrapolation of
/// r(tau) = <L g1_tau, g1_tau> / <Lref g1_tau, g1_tau>, where L is the
/// linearized partial DN map of `measured` at the constant lambda.
/// Throws LawViolation when the drift claims admissibility but div_x D > 0
/// at a mesh node.
GammaEstimate estimate_gamma_at(const pde::ProblemSpec& measured, double lambda, const geometry::DomainTriple& dom,
                                const ProbeSet& probes, const GammaOptions& opts = {});

/// estimate_gamma_at over a strictly increasing grid (grid points run in parallel).
ReconstructionCurve reconstruct_gamma(const pde::ProblemSpec& measured, const std::vector<double>& lambdas,
                                      const geometry::DomainTriple& dom, const ProbeSet& probes,
                                      const GammaOptions& opts = {}, int workers = 1);

} // namespace nlstab::recon
