#pragma once

#include "nlstab/geometry/mesh.hpp"

#include <iosfwd>
#include <string>

namespace nlstab::geometry {

// Text format, one record per line, whitespace separated:
//   dim 3
//   nodes: <id> <x> <y> [<z>]
//   cells: <id> <v1> <v2> <v3> [<v4>]
//   bfacets: <id> <v1> <v2> [<v3>] <patch_tag>
// Blank lines and lines starting with '#' are ignored. Ids must be 0..N-1.
// `dim` may be omitted; it is then inferred from the cell arity.

void write_mesh(std::ostream& out, const Mesh& mesh);
void write_mesh(const std::string& path, const Mesh& mesh);

/// Throws ParseError with the offending line number on malformed input.
Mesh read_mesh(std::istream& in);
Mesh read_mesh(const std::string& path);

} // namespace nlstab::geometry
