#pragma once
// Command-line front end. Exit codes: 0 success, 1 usage or input error,
// 2 numerical failure (non-convergence, failed grid points, failed fits).

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qutrit/analysis.hpp"
#include "qutrit/config.hpp"
#include "qutrit/csv.hpp"
#include "qutrit/sweep.hpp"

namespace qutrit {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_numerical = 2;

namespace detail {

inline std::string read_text(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct RunOptions {
    std::string config_path;
    std::string backend;
    std::string scheme;
    std::string out;
    std::vector<std::string> sets;
};

inline void add_run_options(CLI::App* cmd, RunOptions& o) {
    cmd->add_option("--config", o.config_path, "configuration file (key = value)");
    cmd->add_option("--backend", o.backend, "lindblad | floquet | gvv | analytic");
    cmd->add_option("--scheme", o.scheme, "unmodulated | simultaneous | complementary");
    cmd->add_option("--out", o.out, "output CSV path (default: config output, else stdout)");
    cmd->add_option("--set", o.sets, "override a config key, key=value (repeatable)");
}

inline RunConfig load_config(const RunOptions& o,
                             std::vector<std::pair<std::string, std::string>> extra = {}) {
    const std::string text = o.config_path.empty() ? std::string() : read_text(o.config_path);
    std::vector<std::pair<std::string, std::string>> overrides;
    for (const auto& s : o.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw parameter_error("--set expects key=value, got '" + s + "'");
        overrides.emplace_back(std::string(trim(s.substr(0, eq))), s.substr(eq + 1));
    }
    if (!o.backend.empty()) overrides.emplace_back("backend", o.backend);
    if (!o.scheme.empty()) overrides.emplace_back("scheme", o.scheme);
    for (auto& e : extra) overrides.push_back(std::move(e));
    return parse_config(text, overrides);
}

inline int run_and_write(const RunConfig& cfg, const RunOptions& o, std::ostream& out,
                         std::ostream& err) {
    SweepResult r = sweep(cfg);
    r.grid.meta["created"] = utc_timestamp();
    const std::string path = !o.out.empty() ? o.out : cfg.output;
    if (path.empty() || path == "-")
        write_csv(r.grid, out);
    else
        emit_csv(r.grid, path);
    if (r.failures > 0) {
        err << "error: " << r.failures << " of " << r.grid.values.size()
            << " grid points failed; first: " << r.first_failure << '\n';
        return exit_numerical;
    }
    return exit_ok;
}

}  // namespace detail

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
    CLI::App app{"Driven-qutrit spectra: sweeps, comparisons and peak analysis", "qutrit"};
    app.require_subcommand(1);

    detail::RunOptions sweep_opt;
    auto* sweep_cmd = app.add_subcommand("sweep", "evaluate a backend over the configured 2D grid");
    detail::add_run_options(sweep_cmd, sweep_opt);

    detail::RunOptions spec_opt;
    double control_value = 0.0;
    auto* spec_cmd = app.add_subcommand("spectrum", "single control-value slice of a sweep");
    detail::add_run_options(spec_cmd, spec_opt);
    spec_cmd->add_option("--control", control_value, "control value in the configured axis kind")
        ->required();

    std::string cmp_a, cmp_b;
    double cmp_prominence = 0.05;
    auto* cmp_cmd = app.add_subcommand("compare", "residual report between two grids");
    cmp_cmd->add_option("--a", cmp_a, "first grid CSV")->required();
    cmp_cmd->add_option("--b", cmp_b, "second grid CSV")->required();
    cmp_cmd->add_option("--prominence", cmp_prominence, "minimum peak prominence");

    std::string peaks_in;
    std::size_t peaks_row = 0;
    double peaks_prominence = 0.05;
    double fit_half_width = 0.0;
    auto* peaks_cmd = app.add_subcommand("peaks", "peak centres (and optional fits) of one row");
    peaks_cmd->add_option("--in", peaks_in, "grid CSV")->required();
    peaks_cmd->add_option("--row", peaks_row, "row (control) index");
    peaks_cmd->add_option("--prominence", peaks_prominence, "minimum peak prominence");
    peaks_cmd->add_option("--fit", fit_half_width,
                          "fit a Lorentzian within +-MHz of each peak (0 = no fit)");

    std::optional<double> conv_dbm, conv_mhz;
    auto* conv_cmd = app.add_subcommand("convert", "dBm <-> linear Rabi MHz");
    auto* dbm_opt = conv_cmd->add_option("--dbm", conv_dbm, "power in dBm");
    auto* mhz_opt = conv_cmd->add_option("--mhz", conv_mhz, "Rabi strength Omega/2pi in MHz");
    dbm_opt->excludes(mhz_opt);
    conv_cmd->require_option(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return exit_ok;
        }
        err << "error: " << e.what() << "\n\n" << app.help();
        return exit_usage;
    }

    try {
        if (*sweep_cmd) return detail::run_and_write(detail::load_config(sweep_opt), sweep_opt, out, err);

        if (*spec_cmd) {
            const std::string v = detail::fmt(control_value);
            RunConfig cfg = detail::load_config(
                spec_opt, {{"control_start", v}, {"control_stop", v}, {"control_count", "1"}});
            return detail::run_and_write(cfg, spec_opt, out, err);
        }

        if (*cmp_cmd) {
            const CompareReport rep = compare(read_csv(cmp_a), read_csv(cmp_b), cmp_prominence);
            out << "max_abs_diff = " << detail::fmt(rep.max_abs) << '\n'
                << "mean_abs_diff = " << detail::fmt(rep.mean_abs) << '\n'
                << "compared_points = " << rep.compared_points << '\n';
            for (const auto& r : rep.rows)
                out << "row control=" << detail::fmt(r.control) << " matched=" << r.matched
                    << " unmatched=" << r.unmatched
                    << " max_peak_offset_mhz=" << detail::fmt(r.max_peak_offset) << '\n';
            return exit_ok;
        }

        if (*peaks_cmd) {
            const SpectrumGrid g = read_csv(peaks_in);
            const std::vector<double> row = g.row(peaks_row);
            const auto peaks = find_peaks(g.delta_axis, row, peaks_prominence);
            out << "control = " << detail::fmt(g.control_axis[peaks_row]) << '\n';
            int status = exit_ok;
            for (const Peak& p : peaks) {
                out << "peak center_mhz=" << detail::fmt(p.center) << " value=" << detail::fmt(p.value)
                    << " prominence=" << detail::fmt(p.prominence);
                if (fit_half_width > 0.0) {
                    try {
                        const PeakFit f = fit_lorentzian(g.delta_axis, row, p.center - fit_half_width,
                                                         p.center + fit_half_width);
                        out << " fit_center_mhz=" << detail::fmt(f.center)
                            << " fwhm_mhz=" << detail::fmt(f.fwhm)
                            << " amplitude=" << detail::fmt(f.amplitude)
                            << " residual_rms=" << detail::fmt(f.residual_rms)
                            << (f.poor() ? " poor_fit" : "");
                    } catch (const fit_error& e) {
                        out << " fit_failed";
                        err << "error: " << e.what() << '\n';
                        status = exit_numerical;
                    }
                }
                out << '\n';
            }
            if (peaks.empty()) out << "no peaks above prominence " << detail::fmt(peaks_prominence) << '\n';
            return status;
        }

        if (*conv_cmd) {
            if (conv_dbm) {
                out << detail::fmt(angular_to_mhz(dbm_to_rabi(*conv_dbm))) << " MHz\n";
            } else {
                out << detail::fmt(rabi_to_dbm(mhz_to_angular(*conv_mhz))) << " dBm\n";
            }
            return exit_ok;
        }
    } catch (const convergence_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_numerical;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const io_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_numerical;
    }
    err << app.help();
    return exit_usage;
}

}  // namespace qutrit
