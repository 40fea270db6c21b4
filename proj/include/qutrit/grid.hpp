#pragma once
// 2D spectrum container: signal over (control, detuning), row-major with one
// row per control value.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "qutrit/core.hpp"

namespace qutrit {

/// Rounds to the nearest value with 9 significant decimal digits, so the
/// CSV text form re-parses to the same double.
inline double quantize9(double x) {
    if (!std::isfinite(x)) return x;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return std::strtod(buf, nullptr);
}

/// count evenly spaced points from start to stop inclusive.
inline std::vector<double> linspace(double start, double stop, int count) {
    if (count < 1) throw parameter_error("axis count must be >= 1");
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = start;
        return out;
    }
    const double step = (stop - start) / (count - 1);
    for (int i = 0; i < count; ++i) out[i] = start + i * step;
    out.back() = stop;
    return out;
}

struct SpectrumGrid {
    std::vector<double> delta_axis;    // MHz, ascending
    std::vector<double> control_axis;  // dBm or MHz, see meta["control_kind"]
    std::vector<double> values;        // values[c * cols() + d]; NaN marks a failed point
    std::map<std::string, std::string> meta;

    SpectrumGrid() = default;
    SpectrumGrid(std::vector<double> delta, std::vector<double> control)
        : delta_axis(std::move(delta)), control_axis(std::move(control)),
          values(delta_axis.size() * control_axis.size(), 0.0) {}

    [[nodiscard]] std::size_t rows() const { return control_axis.size(); }
    [[nodiscard]] std::size_t cols() const { return delta_axis.size(); }
    [[nodiscard]] double& at(std::size_t c, std::size_t d) { return values[c * cols() + d]; }
    [[nodiscard]] double at(std::size_t c, std::size_t d) const { return values[c * cols() + d]; }
    [[nodiscard]] std::vector<double> row(std::size_t c) const {
        if (c >= rows()) throw parameter_error("row index out of range");
        return {values.begin() + c * cols(), values.begin() + (c + 1) * cols()};
    }

    [[nodiscard]] std::size_t missing() const {
        return static_cast<std::size_t>(
            std::count_if(values.begin(), values.end(), [](double v) { return std::isnan(v); }));
    }

    void validate() const {
        auto ascending = [](const std::vector<double>& a) {
            for (std::size_t i = 1; i < a.size(); ++i)
                if (!(a[i] > a[i - 1])) return false;
            return !a.empty();
        };
        if (!ascending(delta_axis)) throw parameter_error("delta axis must be strictly ascending");
        if (!ascending(control_axis))
            throw parameter_error("control axis must be strictly ascending");
        if (values.size() != rows() * cols())
            throw parameter_error("grid values do not match the axis sizes");
    }

    void quantize() {
        for (double& v : delta_axis) v = quantize9(v);
        for (double& v : control_axis) v = quantize9(v);
        for (double& v : values) v = quantize9(v);
    }
};

/// Scales values so the largest finite one is 1. Running it twice is a
/// no-op. Returns the divisor (1 when the grid has no positive value).
inline double normalize(SpectrumGrid& g) {
    double peak = 0.0;
    for (double v : g.values)
        if (std::isfinite(v)) peak = std::max(peak, v);
    if (!(peak > 0.0)) return 1.0;
    for (double& v : g.values) v /= peak;
    return peak;
}

}  // namespace qutrit
