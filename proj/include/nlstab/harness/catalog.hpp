#pragma once

#include "nlstab/pde/fe_space.hpp"
#include "nlstab/pde/laws.hpp"

#include <string>
#include <vector>

namespace nlstab::harness {

/// Builtin closed-form laws named `name:p1:p2...`. Unknown names and wrong
/// parameter counts raise InvalidArgument. Gamma laws are not checked for
/// positivity here (they also serve as perturbations); QuasilinearLaw::check
/// does that on a sample grid. G laws must be monotone (c >= 0).
///
/// gamma:  const:c | affine:c0:c1 (c0 + c1 u) | quadratic:c0:c2 (c0 + c2 u^2)
///         | sin:c:a (c + a sin u) | cos:c:a (c + a cos u) | tanh:c:a (c + a tanh u)
/// drift:  zero | rotation:s (s u (-x2, x1, 0), divergence-free)
///         | radial:s (-s (1 + u^2) x) | linear-radial:s (-s u x, sign-indefinite,
///         not flagged admissible)
/// G:      zero | linear:c (c u) | cubic:c (c u^3 / 3) | linear-cubic:a:b (a u + b u^3 / 3)
///         | atan:c (c atan u) | sinh:c (c sinh u)
/// a:      identity | scalar-linear:c ((1 + c x1) I) | diag:a1:a2:a3
/// data:   const:c | x1:c (c x1) | angular:k (cos k theta about the origin)
///         | saddle (x1^2 - x2^2)
pde::QuasilinearLaw gamma_law(const std::string& spec);
pde::DriftLaw drift_law(const std::string& spec, int dim);
pde::SemilinearLaw semilinear_law(const std::string& spec);
pde::CoefficientMatrixField coefficient_field(const std::string& spec);
pde::ScalarField boundary_data(const std::string& spec);

/// base + s * delta (derivatives and growth majorant included).
pde::QuasilinearLaw perturb(const pde::QuasilinearLaw& base, const pde::QuasilinearLaw& delta, double s);
pde::SemilinearLaw perturb(const pde::SemilinearLaw& base, const pde::SemilinearLaw& delta, double s);

/// One-line descriptions of every entry, for --help output.
std::vector<std::string> catalog_entries();

} // namespace nlstab::harness
