#pragma once

#include "nlstab/common.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace nlstab::harness {

/// A CSV table with a header row.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by name; throws ParseError when absent.
    [[nodiscard]] int column(const std::string& name) const;
    /// Numeric column by name (cells must parse as doubles, "nan"/"inf" allowed).
    [[nodiscard]] std::vector<double> numbers(const std::string& name) const;
};

/// Quotes a field when it contains a comma, quote, CR or LF (RFC 4180).
std::string csv_escape(const std::string& field);

/// Shortest round-trip decimal representation ("nan", "inf", "-inf" for non-finite values).
std::string format_number(double x);

void write_csv(std::ostream& out, const CsvTable& table);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Parses RFC 4180 text: quoted fields may contain commas, doubled quotes
/// and line breaks. The first record is the header. Throws ParseError on
/// unterminated quotes or ragged records.
CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

} // namespace nlstab::harness
