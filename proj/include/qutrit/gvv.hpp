#pragma once
// Generalized Van Vleck effective model for the complementary scheme.
//
// In the |0~>, |P>, |Q> basis the control field only shifts the doublet
// energies, so the probe coupling to quasi-level n is a Fourier coefficient
// of (probe square wave) x exp(i B tri(omega t)). The phase factor expands
// into nested Bessel sums over the odd harmonics of the triangle wave,
//   E_m = sum_{l_1 + 3 l_2 + 5 l_3 + ... = m} J_{l_1}(B) J_{l_2}(-B/9) J_{l_3}(B/25) ...
// with B = -Omega_c / (omega pi), and the coupling convolves E with the probe
// harmonics (DC term -1/(4 sqrt 2), odd terms A_j = (-1)^j / (2 sqrt 2 (2j-1) pi)).
// Each nested index is evaluated shell by shell as a strided convolution.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "qutrit/bessel.hpp"
#include "qutrit/core.hpp"

namespace qutrit::gvv {

/// Truncation of the nested sums: q_max triangle-wave harmonics, and for each
/// shell a Bessel index range of ceil(|argument|) + l_margin.
struct Cutoffs {
    int q_max = 160;
    int l_margin = 16;
};

/// Bessel coefficient B = -Omega_c / (omega pi).
inline double bessel_argument(double omega_c, double omega) {
    return -omega_c / (omega * std::numbers::pi);
}

/// Fourier coefficients E_m, |m| <= half_width, of exp(i sum_q b_q sin((2q-1)x))
/// with b_q = (-1)^(q-1) b / (2q-1)^2. `previous` holds the same series
/// without the last shell, for the cutoff check.
struct PhaseHarmonics {
    int half_width = 0;
    std::vector<double> coeffs;
    std::vector<double> previous;

    [[nodiscard]] double at(int m) const {
        return std::abs(m) > half_width ? 0.0 : coeffs[m + half_width];
    }
    [[nodiscard]] double previous_at(int m) const {
        return std::abs(m) > half_width ? 0.0 : previous[m + half_width];
    }
};

inline int harmonic_half_width(double b, const Cutoffs& c) {
    return 4 * c.q_max + static_cast<int>(std::ceil(std::abs(b))) + 8 * c.l_margin + 64;
}

inline PhaseHarmonics phase_harmonics(double b, const Cutoffs& c) {
    if (c.q_max < 1 || c.l_margin < 1) throw parameter_error("GVV cutoffs must be >= 1");
    PhaseHarmonics out;
    const int k = harmonic_half_width(b, c);
    out.half_width = k;
    const int len = 2 * k + 1;

    // First shell: E_m = J_m(b).
    out.coeffs.assign(len, 0.0);
    {
        const int top = std::min(k, static_cast<int>(std::ceil(std::abs(b))) + c.l_margin + 40);
        const std::vector<double> j = bessel_j_table(top, b);
        for (int m = 0; m <= top; ++m) {
            out.coeffs[k + m] = j[m];
            out.coeffs[k - m] = (m % 2 == 0) ? j[m] : -j[m];
        }
    }
    out.previous = out.coeffs;

    std::vector<double> next(len);
    for (int q = 2; q <= c.q_max; ++q) {
        const int stride = 2 * q - 1;
        const double arg = ((q % 2 == 0) ? -b : b) / (stride * stride);
        const int span = static_cast<int>(std::ceil(std::abs(arg))) + c.l_margin;
        const std::vector<double> j = bessel_j_table(span, arg);

        std::fill(next.begin(), next.end(), 0.0);
        for (int l = -span; l <= span; ++l) {
            const int al = std::abs(l);
            const double jl = (l < 0 && (al % 2 == 1)) ? -j[al] : j[al];
            if (std::abs(jl) < 1e-20) continue;  // below double resolution of |E| <= 1
            const long shift = static_cast<long>(l) * stride;
            if (std::abs(shift) >= len) continue;
            // next[m] += J_l * E[m - shift]
            const long lo = std::max(0L, shift);
            const long hi = std::min(static_cast<long>(len), len + shift);
            for (long m = lo; m < hi; ++m) next[m] += jl * out.coeffs[m - shift];
        }
        if (q == c.q_max) out.previous = out.coeffs;
        out.coeffs.swap(next);
    }
    return out;
}

namespace detail {

/// -E_n/(4 sqrt 2) + sum_j A_j (E_{n+2j-1} + E_{n-(2j-1)}), with E supplied
/// by `e(m)`.
template <class Series>
double probe_convolution(int n, int half_width, Series&& e) {
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    double sum = -e(n) * inv_sqrt2 / 4.0;
    const int j_max = (half_width + std::abs(n) + 1) / 2 + 1;
    for (int j = 1; j <= j_max; ++j) {
        const int h = 2 * j - 1;
        const double a = ((j % 2 == 0) ? 1.0 : -1.0) * inv_sqrt2 / (2.0 * h * std::numbers::pi);
        sum += a * (e(n + h) + e(n - h));
    }
    return sum;
}

}  // namespace detail

struct GvvCoupling {
    int n = 0;
    double p = 0.0;  // Omega_n^P (rad/us)
    double q = 0.0;  // Omega_n^Q (rad/us)
    double last_shell_change = 0.0;
    bool cutoff_warning = false;
};

/// Couplings for an explicit Bessel coefficient B; omega_c enters only
/// through B, so negative control strengths are meaningful here.
inline GvvCoupling coupling_for_argument(int n, double b, double omega_p, const Cutoffs& c) {
    const PhaseHarmonics ep = phase_harmonics(b, c);
    const PhaseHarmonics eq = phase_harmonics(-b, c);
    const int k = ep.half_width;

    GvvCoupling out;
    out.n = n;
    out.p = omega_p * detail::probe_convolution(n, k, [&](int m) { return ep.at(m); });
    out.q = -omega_p * detail::probe_convolution(n, k, [&](int m) { return eq.at(m); });
    const double p_prev =
        omega_p * detail::probe_convolution(n, k, [&](int m) { return ep.previous_at(m); });
    out.last_shell_change = std::abs(out.p - p_prev);
    // Near envelope zeros the partial sum itself vanishes, so the check is
    // floored at 1e-3 of the zero-control coupling scale.
    const double scale = std::max(std::abs(out.p), 1e-3 * omega_p / (4.0 * std::numbers::sqrt2));
    out.cutoff_warning = out.last_shell_change > 1e-6 * scale;
    return out;
}

inline void require_complementary(const DriveSchedule& schedule) {
    if (schedule.scheme() != Scheme::Complementary)
        throw parameter_error("the GVV model is defined for the complementary scheme");
}

/// Omega_n^P and Omega_n^Q for quasi-level index n.
inline GvvCoupling gvv_coupling(int n, const QutritParams& params, const DriveSchedule& schedule,
                                const Cutoffs& cutoffs = {}) {
    require_complementary(schedule);
    return coupling_for_argument(n, bessel_argument(params.omega_c, schedule.omega()),
                                 params.omega_p, cutoffs);
}

/// Envelope Omega^2 at probe detuning `delta`. Uses the shift relation
/// (Omega_n^P)^2 = Omega^2(0, Omega_c/4 + n omega): the envelope at a
/// resonance Delta_n^P is the n = 0 coupling with Omega_c' = -4 Delta.
inline double envelope_at_detuning(double delta, const QutritParams& params,
                                   const DriveSchedule& schedule, const Cutoffs& cutoffs = {}) {
    require_complementary(schedule);
    const double b = bessel_argument(-4.0 * delta, schedule.omega());
    const double c = coupling_for_argument(0, b, params.omega_p, cutoffs).p;
    return c * c;
}

/// Omega^2(alpha) with alpha = Delta tau / 4.
inline double envelope_omega_sq(double alpha, const QutritParams& params,
                                const DriveSchedule& schedule, const Cutoffs& cutoffs = {}) {
    return envelope_at_detuning(4.0 * alpha / schedule.tau(), params, schedule, cutoffs);
}

/// Resonance positions Delta_n^P = -n omega - Omega_c/4 and
/// Delta_m^Q = -m omega + Omega_c/4 for indices in [n_min, n_max].
struct ResonanceGrid {
    int n_min = 0;
    int n_max = 0;
    std::vector<double> p_positions;
    std::vector<double> q_positions;
};

inline double resonance_p(int n, const QutritParams& params, const DriveSchedule& s) {
    return -n * s.omega() - params.omega_c / 4.0;
}
inline double resonance_q(int m, const QutritParams& params, const DriveSchedule& s) {
    return -m * s.omega() + params.omega_c / 4.0;
}

inline ResonanceGrid resonance_grid(const QutritParams& params, const DriveSchedule& schedule,
                                    int n_min, int n_max) {
    if (n_min > n_max) throw parameter_error("empty resonance window");
    ResonanceGrid g{n_min, n_max, {}, {}};
    for (int n = n_min; n <= n_max; ++n) {
        g.p_positions.push_back(resonance_p(n, params, schedule));
        g.q_positions.push_back(resonance_q(n, params, schedule));
    }
    return g;
}

/// Gamma = sqrt(Gamma_d^2 + 4 Omega^2(alpha)).
inline double total_linewidth(double gamma_d, double omega_sq) {
    return std::sqrt(gamma_d * gamma_d + 4.0 * omega_sq);
}

/// sum over all integers n of 1 / ((x + n omega)^2 + gamma^2), gamma > 0.
inline double lorentzian_comb(double x, double omega, double gamma) {
    const double a = two_pi * gamma / omega;
    const double ea = std::exp(-a);
    const double c = std::cos(two_pi * x / omega);
    // sinh(a) / (cosh(a) - c) written in decaying exponentials.
    const double ratio = (1.0 - ea * ea) / (1.0 + ea * ea - 2.0 * c * ea);
    return std::numbers::pi / (omega * gamma) * ratio;
}

/// Lorentzian-series spectrum at each detuning, with the envelope and
/// linewidth evaluated at that detuning.
inline double spectrum_point(double delta, double omega_sq, const QutritParams& params,
                             const DriveSchedule& schedule, double gamma_d) {
    const double gamma = total_linewidth(gamma_d, omega_sq);
    if (gamma == 0.0) return 0.0;  // omega_sq == 0 and no damping
    const double w = schedule.omega();
    return omega_sq * (lorentzian_comb(delta + params.omega_c / 4.0, w, gamma) +
                       lorentzian_comb(delta - params.omega_c / 4.0, w, gamma));
}

inline std::vector<double> gvv_spectrum(const std::vector<double>& delta_grid,
                                        const QutritParams& params,
                                        const DriveSchedule& schedule, double gamma_d,
                                        const Cutoffs& cutoffs = {}) {
    require_complementary(schedule);
    if (!(gamma_d >= 0.0) || !std::isfinite(gamma_d))
        throw parameter_error("gamma_d must be finite and >= 0");
    std::vector<double> out;
    out.reserve(delta_grid.size());
    for (double d : delta_grid) {
        if (!std::isfinite(d)) throw parameter_error("detuning grid must be finite");
        const double env = envelope_at_detuning(d, params, schedule, cutoffs);
        out.push_back(spectrum_point(d, env, params, schedule, gamma_d));
    }
    return out;
}

}  // namespace qutrit::gvv
