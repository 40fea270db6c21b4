#pragma once
// Run configuration: a flat `key = value` file with `#` comments and
// optional `[section]` headers. Unknown keys are errors; every key left at
// its default is recorded so it can be echoed next to the results.

#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qutrit/core.hpp"

namespace qutrit {

class config_error : public parameter_error {
public:
    config_error(const std::string& key, int line, const std::string& msg)
        : parameter_error(format(key, line, msg)), key_(key), line_(line) {}

    [[nodiscard]] const std::string& key() const { return key_; }
    [[nodiscard]] int line() const { return line_; }

private:
    static std::string format(const std::string& key, int line, const std::string& msg) {
        std::string out;
        if (line > 0) out += "line " + std::to_string(line) + ": ";
        if (!key.empty()) out += key + ": ";
        return out + msg;
    }
    std::string key_;
    int line_;
};

enum class Backend { Lindblad, Floquet, Gvv, Analytic };

inline std::string_view to_string(Backend b) {
    switch (b) {
    case Backend::Lindblad: return "lindblad";
    case Backend::Floquet: return "floquet";
    case Backend::Gvv: return "gvv";
    case Backend::Analytic: return "analytic";
    }
    return "?";
}

inline Backend parse_backend(std::string_view s) {
    if (s == "lindblad") return Backend::Lindblad;
    if (s == "floquet") return Backend::Floquet;
    if (s == "gvv") return Backend::Gvv;
    if (s == "analytic") return Backend::Analytic;
    throw parameter_error("unknown backend '" + std::string(s) + "'");
}

enum class ControlKind { PowerDbm, RabiMhz };

inline std::string_view to_string(ControlKind k) {
    return k == ControlKind::PowerDbm ? "power_dbm" : "rabi_mhz";
}

inline ControlKind parse_control_kind(std::string_view s) {
    if (s == "power_dbm" || s == "dbm") return ControlKind::PowerDbm;
    if (s == "rabi_mhz" || s == "mhz") return ControlKind::RabiMhz;
    throw parameter_error("unknown control axis kind '" + std::string(s) + "'");
}

struct AxisSpec {
    double start = 0.0;
    double stop = 0.0;
    int count = 1;
};

/// Everything needed to reproduce a sweep, in human units.
struct RunConfig {
    Backend backend = Backend::Lindblad;
    Scheme scheme = Scheme::Complementary;
    double tau_ns = 50.0;
    double probe_dbm = -31.0;
    double probe_mhz = NAN;  // overrides probe_dbm when set
    double gamma_10_mhz = 2.267;
    double gamma_21_mhz = 4.534;
    double gamma_11_mhz = 0.9165;
    double gamma_22_mhz = 0.9165;
    double gamma_d_mhz = NAN;  // GVV damping; NaN selects Gamma/2
    int n_slits = 0;           // analytic grating; 0 selects round(1/(Gamma tau))

    AxisSpec delta{-60.0, 60.0, 241};
    ControlKind control_kind = ControlKind::PowerDbm;
    AxisSpec control{-20.0, 0.0, 41};

    double dt_ns = 0.1;
    double tol = 1e-4;
    int max_periods = 400;
    int n_c = 40;
    int q_max = 160;

    bool normalize = true;
    std::string output;

    std::vector<std::string> defaulted;  // keys not set explicitly

    [[nodiscard]] QutritParams params() const {
        QutritParams p;
        p.omega_p = std::isnan(probe_mhz) ? dbm_to_rabi(probe_dbm) : mhz_to_angular(probe_mhz);
        p.gamma_10 = mhz_to_angular(gamma_10_mhz);
        p.gamma_21 = mhz_to_angular(gamma_21_mhz);
        p.gamma_11 = mhz_to_angular(gamma_11_mhz);
        p.gamma_22 = mhz_to_angular(gamma_22_mhz);
        return p;
    }
    [[nodiscard]] DriveSchedule schedule() const { return {scheme, ns_to_us(tau_ns)}; }
    [[nodiscard]] double control_to_rabi(double value) const {
        return control_kind == ControlKind::PowerDbm ? dbm_to_rabi(value) : mhz_to_angular(value);
    }
    [[nodiscard]] double gamma_d() const {
        return std::isnan(gamma_d_mhz) ? 0.5 * params().total_gamma()
                                       : mhz_to_angular(gamma_d_mhz);
    }
};

/// Rejects backend/scheme pairs that have no model behind them.
inline void check_backend_scheme(Backend b, Scheme s) {
    if (b == Backend::Analytic && s == Scheme::Unmodulated)
        throw parameter_error("the analytic backend needs a modulated scheme");
    if (b == Backend::Floquet && s == Scheme::Unmodulated)
        throw parameter_error("the floquet backend needs a modulated scheme");
    if (b == Backend::Gvv && s != Scheme::Complementary)
        throw parameter_error("the gvv backend needs the complementary scheme");
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::string format_number(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

struct KeyBinding {
    const char* section;
    void (*apply)(RunConfig&, std::string_view, const std::string&, int);
    std::string (*show)(const RunConfig&);
};

inline double to_double(std::string_view v, const std::string& key, int line) {
    double out = 0.0;
    const auto* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end || !std::isfinite(out))
        throw config_error(key, line, "expected a number, got '" + std::string(v) + "'");
    return out;
}

inline int to_int(std::string_view v, const std::string& key, int line) {
    int out = 0;
    const auto* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end)
        throw config_error(key, line, "expected an integer, got '" + std::string(v) + "'");
    return out;
}

inline bool to_bool(std::string_view v, const std::string& key, int line) {
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw config_error(key, line, "expected true or false, got '" + std::string(v) + "'");
}

template <class F>
auto wrap(F&& f, const std::string& key, int line) {
    try {
        return f();
    } catch (const config_error&) {
        throw;
    } catch (const std::exception& e) {
        throw config_error(key, line, e.what());
    }
}

#define QUTRIT_NUM(section, name, field)                                                      \
    {name,                                                                                    \
     {section,                                                                                \
      [](RunConfig& c, std::string_view v, const std::string& k, int l) {                     \
          c.field = to_double(v, k, l);                                                       \
      },                                                                                      \
      [](const RunConfig& c) { return format_number(c.field); }}}
#define QUTRIT_INT(section, name, field)                                                      \
    {name,                                                                                    \
     {section,                                                                                \
      [](RunConfig& c, std::string_view v, const std::string& k, int l) {                     \
          c.field = to_int(v, k, l);                                                          \
      },                                                                                      \
      [](const RunConfig& c) { return std::to_string(c.field); }}}

inline const std::map<std::string, KeyBinding>& key_table() {
    static const std::map<std::string, KeyBinding> table = {
        {"backend",
         {"model",
          [](RunConfig& c, std::string_view v, const std::string& k, int l) {
              c.backend = wrap([&] { return parse_backend(v); }, k, l);
          },
          [](const RunConfig& c) { return std::string(to_string(c.backend)); }}},
        {"scheme",
         {"model",
          [](RunConfig& c, std::string_view v, const std::string& k, int l) {
              c.scheme = wrap([&] { return parse_scheme(v); }, k, l);
          },
          [](const RunConfig& c) { return std::string(to_string(c.scheme)); }}},
        QUTRIT_NUM("model", "tau_ns", tau_ns),
        QUTRIT_NUM("model", "probe_dbm", probe_dbm),
        QUTRIT_NUM("model", "probe_mhz", probe_mhz),
        QUTRIT_NUM("model", "gamma_10_mhz", gamma_10_mhz),
        QUTRIT_NUM("model", "gamma_21_mhz", gamma_21_mhz),
        QUTRIT_NUM("model", "gamma_11_mhz", gamma_11_mhz),
        QUTRIT_NUM("model", "gamma_22_mhz", gamma_22_mhz),
        QUTRIT_NUM("model", "gamma_d_mhz", gamma_d_mhz),
        QUTRIT_INT("model", "n_slits", n_slits),
        QUTRIT_NUM("grid", "delta_start_mhz", delta.start),
        QUTRIT_NUM("grid", "delta_stop_mhz", delta.stop),
        QUTRIT_INT("grid", "delta_count", delta.count),
        {"control_kind",
         {"grid",
          [](RunConfig& c, std::string_view v, const std::string& k, int l) {
              c.control_kind = wrap([&] { return parse_control_kind(v); }, k, l);
          },
          [](const RunConfig& c) { return std::string(to_string(c.control_kind)); }}},
        QUTRIT_NUM("grid", "control_start", control.start),
        QUTRIT_NUM("grid", "control_stop", control.stop),
        QUTRIT_INT("grid", "control_count", control.count),
        QUTRIT_NUM("solver", "dt_ns", dt_ns),
        QUTRIT_NUM("solver", "tol", tol),
        QUTRIT_INT("solver", "max_periods", max_periods),
        QUTRIT_INT("solver", "n_c", n_c),
        QUTRIT_INT("solver", "q_max", q_max),
        {"normalize",
         {"output",
          [](RunConfig& c, std::string_view v, const std::string& k, int l) {
              c.normalize = to_bool(v, k, l);
          },
          [](const RunConfig& c) { return std::string(c.normalize ? "true" : "false"); }}},
        {"output",
         {"output",
          [](RunConfig& c, std::string_view v, const std::string&, int) { c.output = v; },
          [](const RunConfig& c) { return c.output; }}},
    };
    return table;
}

#undef QUTRIT_NUM
#undef QUTRIT_INT

}  // namespace detail

/// Constraint checks on a fully populated config. `lines` maps keys to the
/// line that set them, for error messages.
inline void validate_config(const RunConfig& c, const std::map<std::string, int>& lines = {}) {
    auto fail = [&](const std::string& key, const std::string& msg) {
        auto it = lines.find(key);
        throw config_error(key, it == lines.end() ? 0 : it->second, msg);
    };
    if (!(c.tau_ns > 0.0)) fail("tau_ns", "must be > 0");
    if (!std::isnan(c.probe_mhz) && !(c.probe_mhz >= 0.0)) fail("probe_mhz", "must be >= 0");
    for (auto [key, v] : {std::pair{"gamma_10_mhz", c.gamma_10_mhz},
                          std::pair{"gamma_21_mhz", c.gamma_21_mhz},
                          std::pair{"gamma_11_mhz", c.gamma_11_mhz},
                          std::pair{"gamma_22_mhz", c.gamma_22_mhz}})
        if (v < 0.0) fail(key, "must be >= 0");
    if (!std::isnan(c.gamma_d_mhz) && c.gamma_d_mhz < 0.0) fail("gamma_d_mhz", "must be >= 0");
    if (c.n_slits < 0) fail("n_slits", "must be >= 0");
    if (c.delta.count < 1) fail("delta_count", "must be >= 1");
    if (c.delta.count > 1 && !(c.delta.start < c.delta.stop))
        fail("delta_stop_mhz", "must exceed delta_start_mhz");
    if (c.control.count < 1) fail("control_count", "must be >= 1");
    if (c.control.count > 1 && !(c.control.start < c.control.stop))
        fail("control_stop", "must exceed control_start");
    if (c.control_kind == ControlKind::RabiMhz && c.control.start < 0.0)
        fail("control_start", "Rabi strength must be >= 0");
    if (!(c.dt_ns > 0.0)) fail("dt_ns", "must be > 0");
    if (!(c.tol > 0.0)) fail("tol", "must be > 0");
    if (c.max_periods < 2) fail("max_periods", "must be >= 2");
    if (c.n_c < 1) fail("n_c", "must be >= 1");
    if (c.q_max < 1) fail("q_max", "must be >= 1");
    try {
        check_backend_scheme(c.backend, c.scheme);
    } catch (const parameter_error& e) {
        fail(lines.count("backend") ? "backend" : "scheme", e.what());
    }
}

/// Parses `text`, then applies `overrides` (key, value) on top as if they
/// were extra lines; overrides may replace keys set in the file.
inline RunConfig parse_config(std::string_view text,
                              const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
    const auto& table = detail::key_table();
    RunConfig cfg;
    std::map<std::string, int> seen;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto hash = raw.find('#'); hash != std::string_view::npos)
            raw = raw.substr(0, hash);
        const std::string_view line = detail::trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw config_error("", line_no, "malformed section header");
            section = std::string(detail::trim(line.substr(1, line.size() - 2)));
            if (section != "model" && section != "grid" && section != "solver" &&
                section != "output")
                throw config_error("", line_no, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw config_error("", line_no, "expected 'key = value'");
        const std::string key(detail::trim(line.substr(0, eq)));
        std::string_view value = detail::trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);

        const auto it = table.find(key);
        if (it == table.end()) throw config_error(key, line_no, "unknown key");
        if (!section.empty() && section != it->second.section)
            throw config_error(key, line_no,
                               "belongs in [" + std::string(it->second.section) + "]");
        if (seen.count(key)) throw config_error(key, line_no, "set twice");
        if (value.empty()) throw config_error(key, line_no, "missing value");
        it->second.apply(cfg, value, key, line_no);
        seen[key] = line_no;
    }
    for (const auto& [key, value] : overrides) {
        const auto it = table.find(key);
        if (it == table.end()) throw config_error(key, 0, "unknown key");
        const std::string_view v = detail::trim(value);
        if (v.empty()) throw config_error(key, 0, "missing value");
        it->second.apply(cfg, v, key, 0);
        seen[key] = 0;
    }
    if (seen.count("probe_dbm") && seen.count("probe_mhz"))
        throw config_error("probe_mhz", seen["probe_mhz"], "set either probe_dbm or probe_mhz");

    validate_config(cfg, seen);
    for (const auto& [key, binding] : table)
        if (!seen.count(key)) cfg.defaulted.push_back(key);
    return cfg;
}

/// key -> value for every config key, as echoed into output metadata.
inline std::map<std::string, std::string> config_metadata(const RunConfig& c) {
    std::map<std::string, std::string> out;
    for (const auto& [key, binding] : detail::key_table()) out[key] = binding.show(c);
    if (std::isnan(c.gamma_d_mhz))
        out["gamma_d_mhz"] = detail::format_number(angular_to_mhz(c.gamma_d()));
    std::string list;
    for (const auto& k : c.defaulted) list += (list.empty() ? "" : ",") + k;
    out["defaulted"] = list.empty() ? "none" : list;
    return out;
}

}  // namespace qutrit
