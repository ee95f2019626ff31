#pragma once

#include "nlstab/dn/measurement.hpp"

#include <filesystem>

namespace nlstab::dn {

/// Writes the pairing matrix T_ij = <Lambda f_j, f_i> as a dense CSV and a JSON
/// sidecar (same stem, .json) naming the background, dictionary and patch.
/// Returns the two paths written.
std::vector<std::filesystem::path> write_operator_sample(const BoundaryOperatorSample& sample,
                                                         const std::filesystem::path& csv_path);

/// Reads a dense numeric CSV matrix (no header). Throws ParseError on malformed rows.
Matrix read_dense_csv(const std::filesystem::path& path);

} // namespace nlstab::dn
