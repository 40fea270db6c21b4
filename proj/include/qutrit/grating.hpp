#pragma once
// Closed-form time-domain grating model of the weak-probe, dissipationless
// qutrit: single-slit diffraction D, N-slit interference G, and the
// modulated-AT (simultaneous) and MID (complementary) signals built from them.

#include <cmath>

#include "qutrit/core.hpp"

namespace qutrit::grating {

/// Below this |sin(2x)| the interference function uses its limit N^2.
inline constexpr double singular_threshold = 1e-8;

/// D(x) = sin^2 x / x^2 with D(0) = 1.
inline double diffraction_d(double x) {
    const double ax = std::abs(x);
    if (ax < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 3.0 + 2.0 * x2 * x2 / 45.0;
    }
    const double s = std::sin(x);
    return s * s / (x * x);
}

/// G(x) = sin^2(2Nx) / sin^2(2x), equal to N^2 wherever sin(2x) = 0.
inline double interference_g(double x, int n_slits) {
    if (n_slits < 1) throw parameter_error("n_slits must be >= 1");
    const double s = std::sin(2.0 * x);
    if (std::abs(s) < singular_threshold) {
        // Near x = k*pi/2: sin(2Nx)/sin(2x) -> (+-1)^(N-1) N.
        const double n = n_slits;
        return n * n;
    }
    const double num = std::sin(2.0 * n_slits * x);
    return num * num / (s * s);
}

struct GratingConfig {
    int n_slits = 4;
    PhaseTriple period_phases;
};

/// Effective slit count round(1/(Gamma_linear * tau)) with Gamma in linear
/// frequency units; at least 1.
inline int default_slit_count(const QutritParams& params, const DriveSchedule& schedule) {
    const double gamma_linear = angular_to_mhz(params.total_gamma());
    if (!(gamma_linear > 0.0)) return 1;
    const long n = std::lround(1.0 / (gamma_linear * schedule.tau()));
    return n < 1 ? 1 : static_cast<int>(n);
}

inline GratingConfig make_config(const QutritParams& params, const DriveSchedule& schedule,
                                 int n_slits) {
    if (n_slits < 1) throw parameter_error("n_slits must be >= 1");
    return {n_slits, period_phases(params, schedule)};
}

/// Simultaneous modulation: two independent gratings moving apart.
inline double modulated_at_signal(const GratingConfig& cfg) {
    const double tp = cfg.period_phases.theta_p;
    const double tq = cfg.period_phases.theta_q;
    return diffraction_d((3.0 * tp - tq) / 8.0) * interference_g(tp / 4.0, cfg.n_slits) +
           diffraction_d((3.0 * tq - tp) / 8.0) * interference_g(tq / 4.0, cfg.n_slits);
}

/// Complementary modulation: the envelope depends only on theta_3.
inline double mid_signal(const GratingConfig& cfg) {
    const auto& ph = cfg.period_phases;
    return diffraction_d(ph.theta_3 / 8.0) *
           (interference_g(ph.theta_p / 4.0, cfg.n_slits) +
            interference_g(ph.theta_q / 4.0, cfg.n_slits));
}

inline double modulated_at_signal(const QutritParams& params, const DriveSchedule& schedule,
                                  int n_slits) {
    if (schedule.scheme() != Scheme::Simultaneous)
        throw parameter_error("modulated AT signal needs the simultaneous scheme");
    return modulated_at_signal(make_config(params, schedule, n_slits));
}

inline double mid_signal(const QutritParams& params, const DriveSchedule& schedule,
                         int n_slits) {
    if (schedule.scheme() != Scheme::Complementary)
        throw parameter_error("MID signal needs the complementary scheme");
    return mid_signal(make_config(params, schedule, n_slits));
}

}  // namespace qutrit::grating
