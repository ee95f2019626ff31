#include "nlstab/dn/operator_io.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <sstream>

namespace nlstab::dn {

std::vector<std::filesystem::path> write_operator_sample(const BoundaryOperatorSample& sample,
                                                         const std::filesystem::path& csv_path)
{
    const Matrix T = sample.pairing_matrix();
    {
        std::ofstream out(csv_path);
        NLSTAB_REQUIRE(out, InvalidArgument, "cannot write " + csv_path.string());
        out << std::setprecision(17);
        for (Eigen::Index i = 0; i < T.rows(); ++i) {
            for (Eigen::Index j = 0; j < T.cols(); ++j) out << (j ? "," : "") << T(i, j);
            out << '\n';
        }
    }
    auto json_path = csv_path;
    json_path.replace_extension(".json");
    nlohmann::json j;
    j["lambda"] = sample.lambda;
    j["background"] = sample.background;
    j["patch"] = sample.patch_name;
    j["dictionary"] = {{"kind", dictionary_kind_name(sample.dict.kind)},
                       {"size", sample.dict.size()},
                       {"boundary_nodes", sample.dict.F.rows()}};
    j["matrix"] = {{"file", csv_path.filename().string()},
                   {"rows", T.rows()},
                   {"cols", T.cols()},
                   {"meaning", "T_ij = <Lambda f_j, f_i>, dictionary orthonormal in H^{1/2}"}};
    j["operator_norm"] = operator_norm(sample);
    std::ofstream js(json_path);
    NLSTAB_REQUIRE(js, InvalidArgument, "cannot write " + json_path.string());
    js << j.dump(2) << '\n';
    return {csv_path, json_path};
}

Matrix read_dense_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    NLSTAB_REQUIRE(in, ParseError, "cannot open " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t pos = 0;
                row.push_back(std::stod(cell, &pos));
                if (cell.find_first_not_of(" \t\r", pos) != std::string::npos) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw ParseError(path.string() + ":" + std::to_string(lineno) + ": not a number: '" + cell + "'");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": ragged row");
        rows.push_back(std::move(row));
    }
    Matrix M(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) M(i, j) = rows[i][j];
    return M;
}

} // namespace nlstab::dn
