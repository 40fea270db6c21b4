#pragma once
// Evaluates a backend over the (control, detuning) grid of a RunConfig.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "qutrit/config.hpp"
#include "qutrit/floquet.hpp"
#include "qutrit/grating.hpp"
#include "qutrit/grid.hpp"
#include "qutrit/gvv.hpp"
#include "qutrit/lindblad.hpp"

namespace qutrit {

inline constexpr const char* workers_env = "QUTRIT_WORKERS";

/// Worker count from QUTRIT_WORKERS, else the hardware concurrency.
inline int default_workers() {
    if (const char* s = std::getenv(workers_env)) {
        char* end = nullptr;
        const long n = std::strtol(s, &end, 10);
        if (end != s && *end == '\0' && n >= 1) return static_cast<int>(std::min(n, 256L));
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs task(i) for i in [0, n) on up to `workers` threads. Each index is
/// written by exactly one task, so results do not depend on scheduling.
inline void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& task) {
    const std::size_t threads = std::min<std::size_t>(std::max(1, workers), n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) task(i);
        });
    for (auto& th : pool) th.join();
}

struct SweepResult {
    SpectrumGrid grid;
    std::size_t failures = 0;
    std::string first_failure;
};

/// Signal at one grid point for the lindblad, floquet and analytic
/// backends. Throws convergence_error when the steady state is not reached.
inline double evaluate_point(const RunConfig& cfg, const QutritParams& params,
                             const DriveSchedule& schedule) {
    switch (cfg.backend) {
    case Backend::Lindblad: {
        SteadyStateOptions opt;
        opt.dt = ns_to_us(cfg.dt_ns);
        opt.tol = cfg.tol;
        opt.max_periods = cfg.max_periods;
        const SteadyStateResult r = steady_state_signal(params, schedule, opt);
        if (!r.converged)
            throw convergence_error("steady state not reached", r.periods_used);
        return r.signal;
    }
    case Backend::Floquet:
        return floquet::floquet_signal(params, schedule, cfg.n_c).signal();
    case Backend::Analytic: {
        const int n = cfg.n_slits > 0 ? cfg.n_slits : grating::default_slit_count(params, schedule);
        return schedule.scheme() == Scheme::Simultaneous
                   ? grating::modulated_at_signal(params, schedule, n)
                   : grating::mid_signal(params, schedule, n);
    }
    case Backend::Gvv: break;
    }
    throw parameter_error("gvv points are evaluated row-wise");
}

inline SweepResult sweep(const RunConfig& cfg, int workers = default_workers()) {
    validate_config(cfg);
    const DriveSchedule schedule = cfg.schedule();
    const QutritParams base = cfg.params();
    base.validate();

    SweepResult out;
    SpectrumGrid& grid = out.grid;
    grid = SpectrumGrid(linspace(cfg.delta.start, cfg.delta.stop, cfg.delta.count),
                        linspace(cfg.control.start, cfg.control.stop, cfg.control.count));
    grid.quantize();  // evaluate at exactly the axis values that get written out
    const std::size_t cols = grid.cols();

    std::mutex failure_mutex;
    std::size_t first_index = 0;
    auto record_failure = [&](std::size_t index, const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        // Keep the lowest index so the summary does not depend on scheduling.
        if (out.failures++ == 0 || index < first_index) {
            first_index = index;
            out.first_failure = e.what();
        }
    };

    if (cfg.backend == Backend::Lindblad) {
        const double period = schedule.modulated() ? schedule.tau() / 2.0
                                                   : SteadyStateOptions{}.unmodulated_window;
        detail::aligned_steps(period, ns_to_us(cfg.dt_ns),
                              schedule.modulated() ? "half period" : "averaging window");
    }

    if (cfg.backend == Backend::Gvv) {
        // The envelope depends only on the detuning, so it is shared by all rows.
        const gvv::Cutoffs cutoffs{cfg.q_max, gvv::Cutoffs{}.l_margin};
        std::vector<double> envelope(cols, NAN);
        parallel_for(cols, workers, [&](std::size_t d) {
            try {
                envelope[d] = gvv::envelope_at_detuning(mhz_to_angular(grid.delta_axis[d]), base,
                                                        schedule, cutoffs);
            } catch (const std::exception& e) {
                record_failure(d, e);
            }
        });
        const double gamma_d = cfg.gamma_d();
        for (std::size_t c = 0; c < grid.rows(); ++c) {
            QutritParams p = base;
            p.omega_c = cfg.control_to_rabi(grid.control_axis[c]);
            for (std::size_t d = 0; d < cols; ++d) {
                p.delta = mhz_to_angular(grid.delta_axis[d]);
                grid.at(c, d) = std::isnan(envelope[d])
                                    ? NAN
                                    : gvv::spectrum_point(p.delta, envelope[d], p, schedule, gamma_d);
            }
        }
    } else {
        parallel_for(grid.values.size(), workers, [&](std::size_t i) {
            QutritParams p = base;
            p.omega_c = cfg.control_to_rabi(grid.control_axis[i / cols]);
            p.delta = mhz_to_angular(grid.delta_axis[i % cols]);
            try {
                grid.values[i] = evaluate_point(cfg, p, schedule);
            } catch (const std::exception& e) {
                grid.values[i] = NAN;
                record_failure(i, e);
            }
        });
    }

    const double scale = cfg.normalize ? normalize(grid) : 1.0;
    grid.quantize();

    grid.meta = config_metadata(cfg);
    grid.meta["normalization"] = cfg.normalize ? "per-grid max" : "none";
    grid.meta["normalization_divisor"] = detail::format_number(scale);
    grid.meta["control_kind"] = std::string(to_string(cfg.control_kind));
    grid.meta["missing_points"] = std::to_string(grid.missing());
    return out;
}

}  // namespace qutrit
