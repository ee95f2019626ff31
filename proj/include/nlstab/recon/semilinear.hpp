#pragma once

#include "nlstab/dn/measurement.hpp"
#include "nlstab/recon/curve.hpp"
#include "nlstab/singular/singular_data.hpp"

#include <limits>

namespace nlstab::recon {

/// Operators shared by every grid point: the zero-potential reference, the
/// boundary cutoff chi, the Omega' sweep operator and the dictionary used to
/// measure m.
struct GprimeContext {
    const geometry::DomainTriple* dom = nullptr;
    geometry::BoundaryFunction chi;
    std::shared_ptr<const pde::DirichletSolver> sweep;
    std::shared_ptr<const pde::DirichletSolver> reference;
    dn::Dictionary dict;
    dn::BoundaryOperatorSample reference_sample;
};

/// Requires n = 3. `dictionary_size` Eigen modes on S.
GprimeContext make_gprime_context(const geometry::DomainTriple& dom, int dictionary_size = 16);

struct GprimeOptions {
    /// Ghat' below -negative_tolerance flags a consistency violation.
    double negative_tolerance = 1e-3;
    /// Fixed tau (0 = the clamp(m^{1/3}, [4h, delta/2]) rule).
    double tau = 0.0;
    pde::SolverOptions solver;
};

struct GprimeEstimate {
    double lambda = 0.0;
    double value = 0.0;
    double tau = 0.0;
    /// Measured operator-norm difference between D_{S,lambda} and the reference.
    double m = 0.0;
    double tau_floor = 0.0;
    double tau_ceiling = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
    /// "resolution" (clamped at 4h), "negative" (Ghat' < -tolerance).
    std::vector<std::string> flags;
};

/// G'(lambda) from sum_k <(D_{S,lambda} - D0) g2_k, g2_k> / sum_k int |d_k H|^2
/// with the background lambda chi. `m` < 0 measures m on the dictionary.
GprimeEstimate estimate_gprime_at(const pde::SemilinearLaw& G, double lambda, const GprimeContext& ctx,
                                  const GprimeOptions& opts = {}, double m = -1.0);

struct SemilinearReconstruction {
    ReconstructionCurve gprime;
    ReconstructionCurve G;
};

/// Ghat(lambda) = anchor + trapezoidal integral of Ghat' from 0 to lambda on a
/// strictly increasing grid containing 0 in its range.
SemilinearReconstruction reconstruct_semilinear(const pde::SemilinearLaw& G, const std::vector<double>& lambdas,
                                                double anchor, const GprimeContext& ctx,
                                                const GprimeOptions& opts = {}, int workers = 1);

/// The integration step alone: values of anchor + int_0^lambda of the
/// piecewise linear interpolant of (lambdas, derivative).
std::vector<double> integrate_from_zero(const std::vector<double>& lambdas, const std::vector<double>& derivative,
                                        double anchor);

} // namespace nlstab::recon
