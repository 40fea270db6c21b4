#pragma once
// Grid text format: `# key = value` metadata lines, a `delta_mhz,control,signal`
// header, then one row per grid point in row-major order with 9 significant
// digits. Grids produced by the sweep re-parse bit for bit.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "qutrit/grid.hpp"

namespace qutrit {

class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* csv_header = "delta_mhz,control,signal";

inline void write_csv(const SpectrumGrid& g, std::ostream& os) {
    g.validate();
    for (const auto& [k, v] : g.meta) os << "# " << k << " = " << v << '\n';
    os << csv_header << '\n';
    char buf[96];
    for (std::size_t c = 0; c < g.rows(); ++c)
        for (std::size_t d = 0; d < g.cols(); ++d) {
            std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g\n", g.delta_axis[d], g.control_axis[c],
                          g.at(c, d));
            os << buf;
        }
}

inline void emit_csv(const SpectrumGrid& g, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw io_error("cannot open '" + path + "' for writing");
    write_csv(g, f);
    f.flush();
    if (!f) throw io_error("write to '" + path + "' failed");
}

inline SpectrumGrid parse_csv(std::istream& is) {
    SpectrumGrid g;
    std::string line;
    int line_no = 0;
    bool header = false;
    auto fail = [&](const std::string& msg) {
        throw parameter_error("csv line " + std::to_string(line_no) + ": " + msg);
    };
    auto number = [&](const std::string& s) {
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (s.empty() || *end != '\0') fail("bad number '" + s + "'");
        return v;
    };

    std::vector<double> deltas, controls, values;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header) {
            if (line.rfind("# ", 0) == 0) {
                const auto eq = line.find(" = ");
                if (eq == std::string::npos) fail("metadata line without ' = '");
                g.meta[line.substr(2, eq - 2)] = line.substr(eq + 3);
                continue;
            }
            if (line != csv_header) fail("expected header '" + std::string(csv_header) + "'");
            header = true;
            continue;
        }
        std::stringstream ss(line);
        std::string a, b, c, extra;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c, ',') ||
            std::getline(ss, extra, ','))
            fail("expected 3 fields");
        deltas.push_back(number(a));
        controls.push_back(number(b));
        values.push_back(number(c));
    }
    if (!header) throw parameter_error("csv: missing header line");
    if (values.empty()) throw parameter_error("csv: no data rows");

    std::size_t cols = 1;
    while (cols < controls.size() && controls[cols] == controls[0]) ++cols;
    if (values.size() % cols != 0) throw parameter_error("csv: rows do not form a grid");
    const std::size_t rows = values.size() / cols;
    g.delta_axis.assign(deltas.begin(), deltas.begin() + static_cast<long>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        g.control_axis.push_back(controls[r * cols]);
        for (std::size_t d = 0; d < cols; ++d) {
            const std::size_t i = r * cols + d;
            if (controls[i] != controls[r * cols] || deltas[i] != g.delta_axis[d])
                throw parameter_error("csv: data row " + std::to_string(i + 1) +
                                      " breaks the grid layout");
        }
    }
    g.values = std::move(values);
    g.validate();
    return g;
}

inline SpectrumGrid read_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot open '" + path + "'");
    return parse_csv(f);
}

}  // namespace qutrit
