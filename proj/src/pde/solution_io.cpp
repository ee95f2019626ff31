#include "nlstab/pde/solution_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace nlstab::pde {

void write_solution(std::ostream& out, const FieldSolution& sol)
{
    out << "# equation " << sol.tag << '\n';
    for (const auto& [k, v] : sol.params) out << "# param " << k << ' ' << v << '\n';
    out << std::setprecision(17);
    out << "# residual " << sol.residual << '\n';
    out << "# iterations " << sol.iterations << '\n';
    out << "# nodes " << sol.u.size() << '\n';
    for (Eigen::Index i = 0; i < sol.u.size(); ++i) out << "field: " << i << ' ' << sol.u[i] << '\n';
}

void write_solution(const std::string& path, const FieldSolution& sol)
{
    std::ofstream out(path);
    NLSTAB_REQUIRE(out, InvalidArgument, "write_solution: cannot open " + path);
    write_solution(out, sol);
}

Vector read_solution_values(std::istream& in, int num_nodes)
{
    Vector u = Vector::Constant(num_nodes, std::numeric_limits<double>::quiet_NaN());
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string kw;
        long id;
        double value;
        if (!(ss >> kw >> id >> value) || kw != "field:" || id < 0 || id >= num_nodes)
            throw ParseError("solution line " + std::to_string(lineno) + ": malformed record");
        u[id] = value;
    }
    if (!u.allFinite()) throw ParseError("solution: missing node values");
    return u;
}

} // namespace nlstab::pde
