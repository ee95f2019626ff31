#include "nlstab/harness/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nlstab::harness {

int CsvTable::column(const std::string& name) const
{
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    throw ParseError("CSV: no column named '" + name + "'");
}

std::vector<double> CsvTable::numbers(const std::string& name) const
{
    const int c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::string& s = rows[r][c];
        if (s == "nan") {
            out.push_back(std::nan(""));
            continue;
        }
        if (s == "inf" || s == "-inf") {
            out.push_back(s[0] == '-' ? -INFINITY : INFINITY);
            continue;
        }
        double v = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size())
            throw ParseError("CSV: row " + std::to_string(r + 2) + ", column '" + name + "': not a number: '" + s +
                             "'");
        out.push_back(v);
    }
    return out;
}

std::string csv_escape(const std::string& field)
{
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

std::string format_number(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const CsvTable& table)
{
    auto record = [&](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << csv_escape(fields[i]);
        out << "\r\n";
    };
    record(table.header);
    for (const auto& r : table.rows) {
        NLSTAB_REQUIRE(r.size() == table.header.size(), InvalidArgument, "CSV: row width differs from the header");
        record(r);
    }
}

void write_csv(const std::filesystem::path& path, const CsvTable& table)
{
    std::ofstream out(path, std::ios::binary);
    NLSTAB_REQUIRE(out, InvalidArgument, "cannot write " + path.string());
    write_csv(out, table);
}

CsvTable read_csv(std::istream& in)
{
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> rec;
    std::string field;
    bool quoted = false, any = false, field_started = false;
    char ch;
    int line = 1;
    auto end_field = [&] {
        rec.push_back(field);
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(rec));
        rec.clear();
    };
    while (in.get(ch)) {
        any = true;
        if (quoted) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    in.get(ch);
                    field += '"';
                } else {
                    quoted = false;
                }
            } else {
                if (ch == '\n') ++line;
                field += ch;
            }
            continue;
        }
        if (ch == '"' && !field_started && field.empty()) {
            quoted = true;
            field_started = true;
        } else if (ch == ',') {
            end_field();
        } else if (ch == '\r') {
            if (in.peek() == '\n') in.get(ch);
            end_record();
            ++line;
        } else if (ch == '\n') {
            end_record();
            ++line;
        } else {
            field += ch;
            field_started = true;
        }
    }
    if (quoted) throw ParseError("CSV: unterminated quoted field at line " + std::to_string(line));
    if (any && (!rec.empty() || !field.empty() || field_started)) end_record();

    CsvTable t;
    if (records.empty()) throw ParseError("CSV: empty input (no header)");
    t.header = std::move(records.front());
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].size() == 1 && records[i][0].empty()) continue;
        if (records[i].size() != t.header.size())
            throw ParseError("CSV: record " + std::to_string(i + 1) + " has " + std::to_string(records[i].size()) +
                             " fields, header has " + std::to_string(t.header.size()));
        t.rows.push_back(std::move(records[i]));
    }
    return t;
}

CsvTable read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    try {
        return read_csv(in);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

} // namespace nlstab::harness
