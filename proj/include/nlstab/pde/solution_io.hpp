#pragma once

#include "nlstab/pde/solvers.hpp"

#include <iosfwd>
#include <string>

namespace nlstab::pde {

/// Plain-text export: a '#'-prefixed provenance header (equation tag and
/// parameters, residual, iteration count) followed by `field: node_id value`
/// records.
void write_solution(std::ostream& out, const FieldSolution& sol);
void write_solution(const std::string& path, const FieldSolution& sol);

/// Reads the records back into a nodal vector of the given size.
Vector read_solution_values(std::istream& in, int num_nodes);

} // namespace nlstab::pde
