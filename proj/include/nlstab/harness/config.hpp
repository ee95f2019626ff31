#pragma once

#include "nlstab/geometry/domain.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace nlstab::harness {

/// Flat `key = value` text. Blank lines and lines starting with '#' are
/// ignored; arrays are comma-separated values.
using KeyValues = std::map<std::string, std::string>;

/// Throws ParseError (with the line number) on a line without '=', an empty
/// key or a repeated key.
KeyValues parse_key_values(std::istream& in);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& text);

struct ExperimentConfig {
    /// solve, dnmap, frechet-check, singular-check, reconstruct-gamma,
    /// reconstruct-semilinear or stability-sweep.
    std::string pipeline = "stability-sweep";
    geometry::DomainSpec domain;
    /// quasilinear (condition (i)) or semilinear (condition (ii)).
    std::string condition = "quasilinear";
    /// Catalog names, see catalog.hpp.
    std::string a = "identity";
    std::string gamma = "const:1";
    std::string drift = "zero";
    std::string G = "zero";
    /// Second law for comparisons (empty = none).
    std::string gamma2;
    std::string drift2;
    std::string G2;
    /// Law perturbation for stability sweeps: law_2 = law_1 + s * perturbation.
    std::string perturbation;
    std::vector<double> s_values;
    /// Boundary data for solve / dnmap / frechet-check.
    std::string data = "angular:1";
    double R = 2.0;
    double lambda_step = 0.25;
    /// Explicit lambda grid (overrides R and lambda_step when non-empty).
    std::vector<double> lambdas;
    /// Background for dnmap / frechet-check.
    double lambda = 0.0;
    std::vector<double> taus;
    std::vector<double> eps = {1e-1, 1e-2, 1e-3, 1e-4};
    int dictionary = 16;
    std::string dictionary_kind = "eigen";
    std::string mode = "lipschitz";
    double anchor = 0.0;
    /// Component of the differentiated data in singular-check (0 = g1 only).
    int k = 0;
    std::uint64_t seed = 0;

    /// Throws InvalidArgument on the first violated invariant.
    void validate() const;
    /// Canonical text: one `key = value` line per key, sorted by key.
    [[nodiscard]] std::string serialize() const;
    /// fnv1a of serialize().
    [[nodiscard]] std::uint64_t hash() const;
    /// `lambdas`, or the grid on [-R, R] with spacing lambda_step.
    [[nodiscard]] std::vector<double> lambda_grid() const;
};

/// Unknown keys and malformed values raise ParseError.
ExperimentConfig config_from(const KeyValues& kv);
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text);

std::string hash_hex(std::uint64_t h);

} // namespace nlstab::harness
