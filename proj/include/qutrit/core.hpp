#pragma once
// Physical parameter records, modulation waveforms and the level/relative
// phase functions shared by every backend.
//
// Internal units: angular frequency in rad/us, time in us. Human-facing
// values (config files, CSV, CLI) are linear MHz (i.e. Omega/2pi) and ns;
// convert at the boundary with the helpers below.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qutrit {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Linear frequency in MHz -> angular frequency in rad/us.
constexpr double mhz_to_angular(double f_mhz) { return two_pi * f_mhz; }
constexpr double angular_to_mhz(double w) { return w / two_pi; }
constexpr double ns_to_us(double t_ns) { return 1e-3 * t_ns; }
constexpr double us_to_ns(double t_us) { return 1e3 * t_us; }

class parameter_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Rates, strengths and detuning of the driven three-level system, all in
/// angular units (rad/us).
struct QutritParams {
    double delta = 0.0;    // probe detuning
    double omega_p = 0.0;  // probe Rabi strength
    double omega_c = 0.0;  // control Rabi strength
    double gamma_10 = mhz_to_angular(2.267);
    double gamma_21 = mhz_to_angular(4.534);
    double gamma_11 = mhz_to_angular(0.9165);
    double gamma_22 = mhz_to_angular(0.9165);

    /// Total damping of the |1>-|2> coherence. Always derived, never stored.
    [[nodiscard]] double total_gamma() const {
        return 0.5 * (gamma_10 + gamma_21) + gamma_11 + gamma_22;
    }

    void validate() const {
        auto check = [](double v, const char* name) {
            if (!std::isfinite(v) || v < 0.0)
                throw parameter_error(std::string(name) + " must be finite and >= 0");
        };
        if (!std::isfinite(delta)) throw parameter_error("delta must be finite");
        check(omega_p, "omega_p");
        check(omega_c, "omega_c");
        check(gamma_10, "gamma_10");
        check(gamma_21, "gamma_21");
        check(gamma_11, "gamma_11");
        check(gamma_22, "gamma_22");
    }

    /// Same record with every dissipator switched off.
    [[nodiscard]] QutritParams without_dissipation() const {
        QutritParams p = *this;
        p.gamma_10 = p.gamma_21 = p.gamma_11 = p.gamma_22 = 0.0;
        return p;
    }
};

enum class Scheme { Unmodulated, Simultaneous, Complementary };

inline std::string_view to_string(Scheme s) {
    switch (s) {
    case Scheme::Unmodulated: return "unmodulated";
    case Scheme::Simultaneous: return "simultaneous";
    case Scheme::Complementary: return "complementary";
    }
    return "?";
}

inline Scheme parse_scheme(std::string_view s) {
    if (s == "unmodulated" || s == "none") return Scheme::Unmodulated;
    if (s == "simultaneous") return Scheme::Simultaneous;
    if (s == "complementary") return Scheme::Complementary;
    throw parameter_error("unknown modulation scheme '" + std::string(s) + "'");
}

/// Square-wave modulation with a 50% duty cycle. The probe-on half (and the
/// both-on half of the simultaneous scheme) is [0, tau/2) modulo tau.
class DriveSchedule {
public:
    static constexpr double duty = 0.5;

    DriveSchedule() = default;
    DriveSchedule(Scheme scheme, double tau_us) : scheme_(scheme), tau_(tau_us) {
        if (!(tau_us > 0.0) || !std::isfinite(tau_us))
            throw parameter_error("modulation period tau must be > 0");
    }

    [[nodiscard]] Scheme scheme() const { return scheme_; }
    [[nodiscard]] double tau() const { return tau_; }
    [[nodiscard]] double omega() const { return two_pi / tau_; }
    [[nodiscard]] bool modulated() const { return scheme_ != Scheme::Unmodulated; }

private:
    Scheme scheme_ = Scheme::Unmodulated;
    double tau_ = 0.05;
};

struct Envelope {
    int probe = 1;
    int control = 1;
    friend bool operator==(const Envelope&, const Envelope&) = default;
};

/// On/off state of the probe and control fields at time t (us).
inline Envelope drive_envelope(const DriveSchedule& schedule, double t) {
    if (!schedule.modulated()) return {1, 1};
    const double tau = schedule.tau();
    double phase = std::fmod(t, tau);
    if (phase < 0.0) phase += tau;
    const bool first_half = phase < DriveSchedule::duty * tau;
    if (schedule.scheme() == Scheme::Simultaneous)
        return first_half ? Envelope{1, 1} : Envelope{0, 0};
    return first_half ? Envelope{1, 0} : Envelope{0, 1};
}

struct LevelPhases {
    double ground = 0.0;  // phi_0
    double p = 0.0;       // phi_P
    double q = 0.0;       // phi_Q
};

/// theta_P, theta_Q relative to the ground level and the three-level
/// phase theta_3 = theta_P + theta_Q.
struct PhaseTriple {
    double theta_p = 0.0;
    double theta_q = 0.0;
    double theta_3 = 0.0;

    static PhaseTriple from_pair(double theta_p, double theta_q) {
        return {theta_p, theta_q, theta_p + theta_q};
    }
};

/// Weak-probe phases of |0~>, |P>, |Q> under constant drives.
inline LevelPhases level_phases(const QutritParams& params, double t) {
    if (t < 0.0) throw parameter_error("time must be >= 0");
    return {-params.delta * t / 2.0,
            (params.delta - params.omega_c) * t / 2.0,
            (params.delta + params.omega_c) * t / 2.0};
}

inline PhaseTriple relative_phases(const QutritParams& params, double t) {
    const LevelPhases phi = level_phases(params, t);
    return PhaseTriple::from_pair(phi.p - phi.ground, phi.q - phi.ground);
}

/// Phases accumulated over one modulation period; these drive the grating
/// formulas.
inline PhaseTriple period_phases(const QutritParams& params, const DriveSchedule& schedule) {
    if (!schedule.modulated())
        throw parameter_error("period phases need a modulated schedule");
    const double tau = schedule.tau();
    return PhaseTriple::from_pair(params.delta * tau - params.omega_c * tau / 4.0,
                                  params.delta * tau + params.omega_c * tau / 4.0);
}

// Empirical power calibration: P[dBm] = 10 log10(1.38e-4 * Omega^2), with
// Omega in linear MHz.
inline constexpr double dbm_calibration = 1.38e-4;

/// Microwave power (dBm) -> Rabi strength (rad/us).
inline double dbm_to_rabi(double power_dbm) {
    return mhz_to_angular(std::sqrt(std::pow(10.0, power_dbm / 10.0) / dbm_calibration));
}

/// Rabi strength (rad/us) -> microwave power (dBm).
inline double rabi_to_dbm(double omega) {
    if (!(omega > 0.0)) throw parameter_error("Rabi strength must be > 0 to convert to dBm");
    const double f = angular_to_mhz(omega);
    return 10.0 * std::log10(dbm_calibration * f * f);
}

}  // namespace qutrit
