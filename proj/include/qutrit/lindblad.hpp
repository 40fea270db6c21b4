#pragma once
// Time-dependent Lindblad master equation for the driven qutrit: fixed-step
// RK4 aligned to the square-wave switching times, period-averaged steady
// state of rho_11 + rho_22, and the transmission observable.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qutrit/core.hpp"

namespace qutrit {

using cplx = std::complex<double>;
using Matrix3c = Eigen::Matrix3cd;
using Matrix3r = Eigen::Matrix3d;

/// Raised when an integration step would straddle an envelope switch.
class step_alignment_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// 3x3 density matrix in the dressed basis (|0~>, |1~>, |2~>).
class DensityMatrix {
public:
    static constexpr double hermiticity_tol = 1e-10;
    static constexpr double trace_tol = 1e-9;
    static constexpr double positivity_tol = 1e-8;

    DensityMatrix() : rho_(Matrix3c::Zero()) { rho_(0, 0) = 1.0; }
    explicit DensityMatrix(const Matrix3c& rho) : rho_(rho) {}

    static DensityMatrix ground() { return DensityMatrix(); }
    static DensityMatrix basis_state(int level) {
        Matrix3c m = Matrix3c::Zero();
        m(level, level) = 1.0;
        return DensityMatrix(m);
    }

    [[nodiscard]] const Matrix3c& matrix() const { return rho_; }
    [[nodiscard]] double population(int level) const { return rho_(level, level).real(); }
    [[nodiscard]] double excited_population() const { return population(1) + population(2); }
    [[nodiscard]] double trace() const { return rho_.trace().real(); }
    [[nodiscard]] double purity() const { return (rho_ * rho_).trace().real(); }
    [[nodiscard]] double hermiticity_error() const {
        return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
    }
    [[nodiscard]] double min_eigenvalue() const {
        const Matrix3c herm = 0.5 * (rho_ + rho_.adjoint());
        Eigen::SelfAdjointEigenSolver<Matrix3c> es(herm, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }
    [[nodiscard]] bool is_valid() const {
        return hermiticity_error() < hermiticity_tol && std::abs(trace() - 1.0) < trace_tol &&
               min_eigenvalue() >= -positivity_tol;
    }

private:
    Matrix3c rho_;
};

/// Rotating-frame Hamiltonian at time t. A field that is "on" contributes an
/// off-diagonal of -Omega/2; "off" contributes zero.
inline Matrix3r hamiltonian_at(const QutritParams& params, const DriveSchedule& schedule,
                               double t) {
    if (t < 0.0) throw parameter_error("time must be >= 0");
    const Envelope env = drive_envelope(schedule, t);
    const double wp = env.probe * params.omega_p / 2.0;
    const double wc = env.control * params.omega_c / 2.0;
    Matrix3r h;
    h << -params.delta / 2.0, -wp, 0.0,
         -wp, params.delta / 2.0, -wc,
         0.0, -wc, params.delta / 2.0;
    return h;
}

/// Right-hand side of the master equation for a fixed Hamiltonian.
inline Matrix3c lindblad_rhs(const Matrix3r& h, const QutritParams& p, const Matrix3c& rho) {
    const Matrix3c hc = h.cast<cplx>();
    const cplx i(0.0, 1.0);
    Matrix3c d = -i * (hc * rho - rho * hc);

    // Decay |1> -> |0> at gamma_10 and |2> -> |1> at gamma_21.
    d(0, 0) += p.gamma_10 * rho(1, 1);
    d(1, 1) += p.gamma_21 * rho(2, 2) - p.gamma_10 * rho(1, 1);
    d(2, 2) += -p.gamma_21 * rho(2, 2);
    d(0, 1) += -0.5 * p.gamma_10 * rho(0, 1);
    d(1, 0) += -0.5 * p.gamma_10 * rho(1, 0);
    d(0, 2) += -0.5 * p.gamma_21 * rho(0, 2);
    d(2, 0) += -0.5 * p.gamma_21 * rho(2, 0);
    d(1, 2) += -0.5 * (p.gamma_10 + p.gamma_21) * rho(1, 2);
    d(2, 1) += -0.5 * (p.gamma_10 + p.gamma_21) * rho(2, 1);

    // Pure dephasing gamma_jj (2 s_jj rho s_jj - s_jj rho - rho s_jj): each
    // coherence touching level j decays at gamma_jj.
    for (int j = 1; j <= 2; ++j) {
        const double g = j == 1 ? p.gamma_11 : p.gamma_22;
        for (int k = 0; k < 3; ++k) {
            if (k == j) continue;
            d(j, k) -= g * rho(j, k);
            d(k, j) -= g * rho(k, j);
        }
    }
    return d;
}

/// One classical RK4 step with a Hamiltonian held constant over the step.
inline Matrix3c rk4_step(const Matrix3r& h, const QutritParams& p, const Matrix3c& rho,
                         double dt) {
    const Matrix3c k1 = lindblad_rhs(h, p, rho);
    const Matrix3c k2 = lindblad_rhs(h, p, rho + 0.5 * dt * k1);
    const Matrix3c k3 = lindblad_rhs(h, p, rho + 0.5 * dt * k2);
    const Matrix3c k4 = lindblad_rhs(h, p, rho + dt * k3);
    return rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace detail {

/// Number of dt steps in `span`, rejecting spans that dt does not divide.
inline std::size_t aligned_steps(double span, double dt, const char* what) {
    const double ratio = span / dt;
    const double n = std::round(ratio);
    if (n < 1.0 || std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio))
        throw step_alignment_error(std::string("dt must divide the ") + what + " exactly");
    return static_cast<std::size_t>(n);
}

}  // namespace detail

/// Integrates from t = 0 to t_end with fixed RK4 steps. For modulated
/// schedules dt must divide tau/2 so no step crosses a switch. The last step
/// is shortened if t_end is not a multiple of dt.
template <class Observer>
DensityMatrix evolve(const DensityMatrix& rho0, const QutritParams& params,
                     const DriveSchedule& schedule, double t_end, double dt, Observer&& observe) {
    if (!(dt > 0.0)) throw parameter_error("dt must be > 0");
    if (t_end < 0.0) throw parameter_error("t_end must be >= 0");
    if (schedule.modulated()) detail::aligned_steps(schedule.tau() / 2.0, dt, "half period");

    Matrix3c rho = rho0.matrix();
    double t = 0.0;
    std::size_t k = 0;
    while (t_end - t > 1e-12 * dt) {
        const double h = std::min(dt, t_end - t);
        rho = rk4_step(hamiltonian_at(params, schedule, t + 0.5 * h), params, rho, h);
        ++k;
        t = std::min(t_end, static_cast<double>(k) * dt);
        observe(t, rho);
    }
    return DensityMatrix(rho);
}

inline DensityMatrix evolve(const DensityMatrix& rho0, const QutritParams& params,
                            const DriveSchedule& schedule, double t_end, double dt) {
    return evolve(rho0, params, schedule, t_end, dt, [](double, const Matrix3c&) {});
}

using Liouvillian = Eigen::Matrix<cplx, 9, 9>;
using VecRho = Eigen::Matrix<cplx, 9, 1>;

inline VecRho vec(const Matrix3c& rho) {
    VecRho v;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) v(3 * i + j) = rho(i, j);
    return v;
}

inline Matrix3c unvec(const VecRho& v) {
    Matrix3c rho;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) rho(i, j) = v(3 * i + j);
    return rho;
}

/// Superoperator of lindblad_rhs, assembled column by column.
inline Liouvillian liouvillian(const Matrix3r& h, const QutritParams& p) {
    Liouvillian l;
    for (int k = 0; k < 9; ++k) {
        Matrix3c e = Matrix3c::Zero();
        e(k / 3, k % 3) = 1.0;
        l.col(k) = vec(lindblad_rhs(h, p, e));
    }
    return l;
}

/// For a linear autonomous system one RK4 step is the degree-4 Taylor
/// polynomial of exp(dt L); applying this matrix is the same RK4 step.
inline Liouvillian rk4_step_map(const Liouvillian& l, double dt) {
    const Liouvillian a = dt * l;
    Liouvillian term = Liouvillian::Identity();
    Liouvillian sum = Liouvillian::Identity();
    for (int m = 1; m <= 4; ++m) {
        term = (term * a) / static_cast<double>(m);
        sum += term;
    }
    return sum;
}

struct SteadyStateOptions {
    double dt = 0.0;            // us; 0 selects window/500
    double tol = 1e-4;          // relative change between period averages
    int max_periods = 400;
    double unmodulated_window = 0.05;  // us, averaging window without modulation
};

struct SteadyStateResult {
    double signal = 0.0;  // period-averaged rho_11 + rho_22
    int periods_used = 0;
    bool converged = false;
    DensityMatrix rho_final;
};

namespace detail {

/// (S^n, sum_{k<n} S^k) by binary splitting.
inline std::pair<Liouvillian, Liouvillian> power_and_sum(const Liouvillian& s, std::size_t n) {
    if (n == 0) return {Liouvillian::Identity(), Liouvillian::Zero()};
    if (n % 2 == 1) {
        auto [a, b] = power_and_sum(s, n - 1);
        return {s * a, Liouvillian::Identity() + s * b};
    }
    auto [a, b] = power_and_sum(s, n / 2);
    return {a * a, b + a * b};
}

}  // namespace detail

/// Integrates from rho_00 = 1 one period at a time until the period average
/// of rho_11 + rho_22 changes by less than tol (relative).
///
/// RK4 steps are linear in rho, so a whole period collapses to one 9x9 map
/// and its trapezoid average to one linear functional; iterating those is
/// the same computation as stepping, up to rounding.
inline SteadyStateResult steady_state_signal(const QutritParams& params,
                                             const DriveSchedule& schedule,
                                             const SteadyStateOptions& opt = {}) {
    params.validate();
    if (opt.max_periods < 2) throw parameter_error("max_periods must be >= 2");
    if (!(opt.tol > 0.0)) throw parameter_error("tol must be > 0");

    const double period = schedule.modulated() ? schedule.tau() : opt.unmodulated_window;
    const double dt = opt.dt > 0.0 ? opt.dt : period / 500.0;

    std::vector<std::pair<double, std::size_t>> segments;  // (midpoint time, steps)
    if (schedule.modulated()) {
        const std::size_t n = detail::aligned_steps(period / 2.0, dt, "half period");
        segments = {{0.25 * period, n}, {0.75 * period, n}};
    } else {
        segments = {{0.0, detail::aligned_steps(period, dt, "averaging window")}};
    }

    Eigen::Matrix<cplx, 1, 9> excited = Eigen::Matrix<cplx, 1, 9>::Zero();
    excited(4) = excited(8) = 1.0;

    // Per segment: sum_{k<n} f_k + (f_n - f_0)/2 is the trapezoid sum.
    Liouvillian period_map = Liouvillian::Identity();
    Eigen::Matrix<cplx, 1, 9> average = Eigen::Matrix<cplx, 1, 9>::Zero();
    std::size_t steps_per_period = 0;
    for (const auto& [t_mid, steps] : segments) {
        const Liouvillian l = liouvillian(hamiltonian_at(params, schedule, t_mid), params);
        const auto [a, b] = detail::power_and_sum(rk4_step_map(l, dt), steps);
        const Liouvillian trap = b + 0.5 * (a - Liouvillian::Identity());
        average += excited * trap * period_map;
        period_map = a * period_map;
        steps_per_period += steps;
    }
    average /= static_cast<double>(steps_per_period);

    VecRho v = vec(DensityMatrix::ground().matrix());
    SteadyStateResult result;
    double previous = 0.0;
    for (int p = 1; p <= opt.max_periods; ++p) {
        const double value = (average * v)(0).real();
        v = period_map * v;
        result.signal = value;
        result.periods_used = p;
        if (p >= 2) {
            const double scale = std::max(std::abs(value), std::abs(previous));
            if (scale < 1e-300 || std::abs(value - previous) < opt.tol * scale) {
                result.converged = true;
                break;
            }
        }
        previous = value;
    }
    result.rho_final = DensityMatrix(unvec(v));
    return result;
}

/// Constant-drive steady-state ratio rho_22 / rho_11 of the isolated
/// |1>-|2> subsystem, valid for omega_p << omega_c.
inline double steady_state_ratio(const QutritParams& p) {
    const double g = p.total_gamma();
    const double oc2 = p.omega_c * p.omega_c;
    return oc2 / (2.0 * g * p.gamma_21 + oc2);
}

/// Cavity transmission T = norm_A * (rho_11 + rho_22).
inline double transmission(double signal, double norm_A) {
    if (!(norm_A > 0.0)) throw parameter_error("normalization constant must be > 0");
    return norm_A * signal;
}

}  // namespace qutrit
