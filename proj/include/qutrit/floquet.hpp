#pragma once
// Floquet treatment of the square-wave-driven qutrit: Fourier blocks of the
// periodic Hamiltonian, the truncated Floquet matrix, its quasi-energy
// decomposition, and time-averaged level populations.
//
// The blocks are real and even in k because they expand the square waves
// about the centre of the probe-on half: H_floquet(t) = H(t + tau/4), where
// H is the piecewise Hamiltonian used by the Lindblad integrator. Averaged
// observables do not depend on this time shift.

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "qutrit/core.hpp"
#include "qutrit/symmetric_eigen.hpp"

namespace qutrit::floquet {

using Block = Eigen::Matrix3d;

class FourierBlocks {
public:
    FourierBlocks(int max_harmonic, double omega)
        : max_k_(max_harmonic), omega_(omega), blocks_(2 * max_harmonic + 1, Block::Zero()) {}

    [[nodiscard]] int max_harmonic() const { return max_k_; }
    [[nodiscard]] double omega() const { return omega_; }

    /// H^[k]; zero outside the stored range.
    [[nodiscard]] const Block& operator[](int k) const {
        static const Block zero = Block::Zero();
        return std::abs(k) > max_k_ ? zero : blocks_[k + max_k_];
    }
    Block& at(int k) { return blocks_.at(k + max_k_); }

private:
    int max_k_;
    double omega_;
    std::vector<Block> blocks_;
};

/// Time offset between the Floquet expansion origin and the piecewise
/// schedule's origin.
inline double time_origin_offset(const DriveSchedule& schedule) { return schedule.tau() / 4.0; }

/// Fourier blocks H^[k] for |k| <= 2 n_c + 1. Odd harmonics 2n-1 carry the
/// square-wave amplitudes Omega/((2n-1) pi); even harmonics vanish.
inline FourierBlocks fourier_blocks(const QutritParams& params, const DriveSchedule& schedule,
                                    int n_c) {
    if (n_c < 1) throw parameter_error("Floquet cutoff n_c must be >= 1");
    if (!schedule.modulated())
        throw parameter_error("Fourier blocks need a modulated schedule");
    const bool complementary = schedule.scheme() == Scheme::Complementary;

    FourierBlocks out(2 * n_c + 1, schedule.omega());
    Block& h0 = out.at(0);
    h0 << -params.delta / 2.0, -params.omega_p / 4.0, 0.0,
          -params.omega_p / 4.0, params.delta / 2.0, -params.omega_c / 4.0,
          0.0, -params.omega_c / 4.0, params.delta / 2.0;

    for (int n = 1; 2 * n - 1 <= out.max_harmonic(); ++n) {
        const int k = 2 * n - 1;
        const double sign_n = (n % 2 == 0) ? 1.0 : -1.0;  // (-1)^n
        const double op_n = params.omega_p / (k * std::numbers::pi);
        const double oc_n = params.omega_c / (k * std::numbers::pi);
        const double probe = sign_n * op_n / 2.0;
        const double control = (complementary ? -sign_n : sign_n) * oc_n / 2.0;
        Block b = Block::Zero();
        b(0, 1) = b(1, 0) = probe;
        b(1, 2) = b(2, 1) = control;
        out.at(k) = b;
        out.at(-k) = b;
    }
    return out;
}

/// Truncated Fourier resummation sum_k H^[k] exp(-i k omega t); real because
/// the blocks are even in k.
inline Block resum(const FourierBlocks& blocks, double t) {
    Block h = blocks[0];
    for (int k = 1; k <= blocks.max_harmonic(); ++k)
        h += 2.0 * blocks[k] * std::cos(k * blocks.omega() * t);
    return h;
}

/// Composite-basis index of |alpha, n> for photon index n in [-n_c, n_c].
inline int composite_index(int alpha, int n, int n_c) { return 3 * (n + n_c) + alpha; }

/// Block-Toeplitz Floquet matrix of dimension 3(2 n_c + 1):
/// <alpha n|H_F|beta m> = H^[n-m]_{alpha beta} + n omega delta_{alpha beta} delta_{nm}.
inline Eigen::MatrixXd build_floquet_matrix(const FourierBlocks& blocks, int n_c) {
    if (n_c < 1) throw parameter_error("Floquet cutoff n_c must be >= 1");
    const int dim = 3 * (2 * n_c + 1);
    Eigen::MatrixXd hf = Eigen::MatrixXd::Zero(dim, dim);
    for (int n = -n_c; n <= n_c; ++n) {
        for (int m = -n_c; m <= n_c; ++m) {
            const Block& b = blocks[n - m];
            hf.block<3, 3>(composite_index(0, n, n_c), composite_index(0, m, n_c)) = b;
        }
        for (int a = 0; a < 3; ++a) {
            const int i = composite_index(a, n, n_c);
            hf(i, i) += n * blocks.omega();
        }
    }
    return hf;
}

struct FloquetDecomposition {
    int n_c = 0;
    double omega = 0.0;
    Eigen::VectorXd quasi_energies;  // ascending
    Eigen::MatrixXd eigenvectors;    // columns |q_{gamma l}> in the |alpha,n> basis
    int iterations = 0;

    [[nodiscard]] int dim() const { return static_cast<int>(quasi_energies.size()); }
};

inline FloquetDecomposition diagonalize(const Eigen::MatrixXd& hf, int n_c, double omega) {
    if (hf.rows() != 3 * (2 * n_c + 1))
        throw parameter_error("Floquet matrix dimension does not match n_c");
    SymmetricEigenResult es = symmetric_eigen(hf);
    return {n_c, omega, std::move(es.values), std::move(es.vectors), es.iterations};
}

/// Time-averaged probability of level alpha starting from |beta>:
/// sum_n sum_{gamma l} |<alpha n|q><q|beta 0>|^2. This is the average over
/// both elapsed time and the drive phase at which the evolution starts.
inline double time_averaged_population(const FloquetDecomposition& d, int alpha, int beta) {
    if (alpha < 0 || alpha > 2 || beta < 0 || beta > 2)
        throw parameter_error("level index must be 0, 1 or 2");
    const int n_c = d.n_c;
    const Eigen::RowVectorXd start = d.eigenvectors.row(composite_index(beta, 0, n_c));
    double total = 0.0;
    for (int g = 0; g < d.dim(); ++g) {
        const double w = start(g) * start(g);
        if (w == 0.0) continue;
        double weight_alpha = 0.0;
        for (int n = -n_c; n <= n_c; ++n) {
            const double c = d.eigenvectors(composite_index(alpha, n, n_c), g);
            weight_alpha += c * c;
        }
        total += weight_alpha * w;
    }
    return total;
}

struct FloquetSignal {
    std::array<double, 3> populations{};  // time-averaged rho_00, rho_11, rho_22
    [[nodiscard]] double signal() const { return populations[1] + populations[2]; }
};

/// Dissipationless Floquet prediction of the averaged excited population,
/// starting in the ground state.
inline FloquetSignal floquet_signal(const QutritParams& params, const DriveSchedule& schedule,
                                    int n_c) {
    const FourierBlocks blocks = fourier_blocks(params, schedule, n_c);
    const FloquetDecomposition d =
        diagonalize(build_floquet_matrix(blocks, n_c), n_c, blocks.omega());
    FloquetSignal out;
    for (int a = 0; a < 3; ++a) out.populations[a] = time_averaged_population(d, a, 0);
    return out;
}

}  // namespace qutrit::floquet
