#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "qutrit/lindblad.hpp"

using namespace qutrit;

namespace {

QutritParams drive(double delta_mhz, double op_mhz, double oc_mhz) {
    QutritParams p;
    p.delta = mhz_to_angular(delta_mhz);
    p.omega_p = mhz_to_angular(op_mhz);
    p.omega_c = mhz_to_angular(oc_mhz);
    return p;
}

const double op31 = angular_to_mhz(dbm_to_rabi(-31.0));

double signal(const QutritParams& p, Scheme s, double dt = 0.0, double tol = 1e-10) {
    SteadyStateOptions opt;
    opt.dt = dt;
    opt.tol = tol;
    opt.max_periods = 4000;
    const auto r = steady_state_signal(p, DriveSchedule(s, 0.05), opt);
    EXPECT_TRUE(r.converged);
    return r.signal;
}

}  // namespace

TEST(Hamiltonian, Structure) {
    const DriveSchedule s(Scheme::Unmodulated, 0.05);
    const Matrix3r h0 = hamiltonian_at(drive(7, 0, 0), s, 0.0);
    EXPECT_TRUE(h0.isApprox(Eigen::Vector3d(-0.5, 0.5, 0.5).asDiagonal().toDenseMatrix() *
                            mhz_to_angular(7)));
    const Matrix3r h = hamiltonian_at(drive(3, 2, 40), s, 0.123);
    EXPECT_EQ(h(0, 2), 0.0);
    EXPECT_EQ(h(2, 0), 0.0);
    EXPECT_NEAR(h(1, 2), -mhz_to_angular(20.0), 1e-12);
    EXPECT_NEAR(h(0, 1), -mhz_to_angular(1.0), 1e-12);
}

TEST(Hamiltonian, FollowsEnvelope) {
    const DriveSchedule s(Scheme::Complementary, 0.05);
    const QutritParams p = drive(0, 4, 40);
    EXPECT_EQ(hamiltonian_at(p, s, 0.01)(1, 2), 0.0);
    EXPECT_NE(hamiltonian_at(p, s, 0.01)(0, 1), 0.0);
    EXPECT_EQ(hamiltonian_at(p, s, 0.03)(0, 1), 0.0);
    EXPECT_NE(hamiltonian_at(p, s, 0.03)(1, 2), 0.0);
}

TEST(Liouvillian, MatchesKroneckerOracle) {
    const QutritParams p = drive(5, 3, 17);
    const Matrix3r h = hamiltonian_at(p, DriveSchedule(Scheme::Unmodulated, 0.05), 0.0);
    const Liouvillian a = liouvillian(h, p);
    const Liouvillian b = oracle::liouvillian_kron(h.cast<cplx>(), p);
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Liouvillian, StepMapEqualsRk4Step) {
    const QutritParams p = drive(5, 3, 17);
    const Matrix3r h = hamiltonian_at(p, DriveSchedule(Scheme::Unmodulated, 0.05), 0.0);
    Matrix3c rho = Matrix3c::Zero();
    rho(0, 0) = 0.6;
    rho(1, 1) = 0.4;
    rho(0, 1) = cplx(0.1, 0.2);
    rho(1, 0) = std::conj(rho(0, 1));
    const double dt = 1e-4;
    const Matrix3c a = rk4_step(h, p, rho, dt);
    const Matrix3c b = unvec(rk4_step_map(liouvillian(h, p), dt) * vec(rho));
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Evolve, NoDrivesNoRatesIsIdentity) {
    const QutritParams p = QutritParams{}.without_dissipation();
    Matrix3c m;
    m << 0.5, cplx(0.1, 0.1), 0.0, cplx(0.1, -0.1), 0.3, cplx(0, 0.05), 0.0, cplx(0, -0.05), 0.2;
    const DensityMatrix r = evolve(DensityMatrix(m), p, DriveSchedule(Scheme::Complementary, 0.05), 1.0, 1e-4);
    EXPECT_EQ(r.matrix(), m);
}

TEST(Evolve, PureDecayOfLevelOne) {
    QutritParams p;
    const double t = 0.3;
    const DensityMatrix r = evolve(DensityMatrix::basis_state(1), p, DriveSchedule(Scheme::Unmodulated, 0.05), t, 1e-4);
    EXPECT_NEAR(r.population(1), std::exp(-p.gamma_10 * t), 1e-10);
    EXPECT_NEAR(r.population(0), 1.0 - std::exp(-p.gamma_10 * t), 1e-10);
}

TEST(Evolve, RejectsMisalignedStep) {
    const QutritParams p = drive(0, 2, 20);
    EXPECT_THROW(evolve(DensityMatrix::ground(), p, DriveSchedule(Scheme::Complementary, 0.05), 0.1, 0.0003),
                 step_alignment_error);
    EXPECT_THROW(evolve(DensityMatrix::ground(), p, DriveSchedule(Scheme::Complementary, 0.05), 0.1, 0.0),
                 parameter_error);
    EXPECT_NO_THROW(evolve(DensityMatrix::ground(), p, DriveSchedule(Scheme::Unmodulated, 0.05), 0.1, 0.0003));
}

TEST(Evolve, InvariantsAlongTrajectory) {
    for (Scheme s : {Scheme::Unmodulated, Scheme::Simultaneous, Scheme::Complementary}) {
        const QutritParams p = drive(12, 8, 40);
        double worst_herm = 0.0, worst_trace = 0.0, worst_min = 0.0;
        int k = 0;
        evolve(DensityMatrix::ground(), p, DriveSchedule(s, 0.05), 1.0, 1e-4,
               [&](double, const Matrix3c& rho) {
                   if (++k % 25) return;
                   const DensityMatrix d(rho);
                   worst_herm = std::max(worst_herm, d.hermiticity_error());
                   worst_trace = std::max(worst_trace, std::abs(d.trace() - 1.0));
                   worst_min = std::min(worst_min, d.min_eigenvalue());
               });
        EXPECT_LT(worst_herm, DensityMatrix::hermiticity_tol);
        EXPECT_LT(worst_trace, DensityMatrix::trace_tol);
        EXPECT_GE(worst_min, -DensityMatrix::positivity_tol);
    }
}

TEST(Evolve, PurityConservedWithoutDissipation) {
    const QutritParams p = drive(9, 6, 40).without_dissipation();
    const DriveSchedule s(Scheme::Complementary, 0.05);
    const DensityMatrix r = evolve(DensityMatrix::ground(), p, s, 100 * 0.05, 1e-4);
    EXPECT_NEAR(r.purity(), 1.0, 1e-7);  // RK4 is not exactly unitary
    EXPECT_TRUE(r.is_valid());
}

TEST(Evolve, WeakProbeAtAutlerTownesResonanceIsLocalMaximum) {
    // Reference trajectory at dt/10 confirms the coarse run is converged.
    const DriveSchedule s(Scheme::Unmodulated, 0.05);
    auto excited = [&](double d, double dt) {
        return evolve(DensityMatrix::ground(), drive(d, op31, 20), s, 2.0, dt).excited_population();
    };
    const double at = excited(10.0, 1e-4);
    EXPECT_NEAR(at, excited(10.0, 1e-5), 1e-9);
    EXPECT_GT(at, excited(8.5, 1e-4));
    EXPECT_GT(at, excited(11.5, 1e-4));
}

TEST(SteadyState, NoProbeNoSignal) {
    const auto r = steady_state_signal(drive(3, 0, 40), DriveSchedule(Scheme::Complementary, 0.05));
    EXPECT_EQ(r.signal, 0.0);
    EXPECT_TRUE(r.converged);
}

TEST(SteadyState, RejectsBadOptions) {
    SteadyStateOptions opt;
    opt.max_periods = 1;
    EXPECT_THROW(steady_state_signal(drive(0, 1, 1), DriveSchedule(Scheme::Unmodulated, 0.05), opt),
                 parameter_error);
    opt = {};
    opt.dt = 3e-4;
    EXPECT_THROW(steady_state_signal(drive(0, 1, 1), DriveSchedule(Scheme::Complementary, 0.05), opt),
                 step_alignment_error);
}

TEST(SteadyState, ReportsNonConvergence) {
    SteadyStateOptions opt;
    opt.tol = 1e-15;
    opt.max_periods = 3;
    const auto r = steady_state_signal(drive(5, op31, 40), DriveSchedule(Scheme::Complementary, 0.05), opt);
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(r.periods_used, 3);
    EXPECT_GT(r.signal, 0.0);
}

TEST(SteadyState, MatchesMatrixExponentialFixedPoint) {
    struct Case {
        double d, oc;
        Scheme s;
    };
    for (const Case& c : {Case{9.73, 20, Scheme::Unmodulated}, Case{10, 40, Scheme::Complementary},
                          Case{0, 40, Scheme::Complementary}, Case{7.5, 30, Scheme::Simultaneous}}) {
        const QutritParams p = drive(c.d, op31, c.oc);
        const double lib = signal(p, c.s);
        const double ref =
            oracle::steady_signal_expm(p, c.s, 0.05, c.s == Scheme::Unmodulated ? 500 : 250);
        EXPECT_NEAR(lib, ref, 1e-7 * ref) << c.d << " " << c.oc;
    }
}

TEST(SteadyState, FrozenReferenceValues) {
    // Independent fixed-point evaluation with exact exponential sub-steps.
    EXPECT_NEAR(signal(drive(9.73, op31, 20), Scheme::Unmodulated), 0.2693426655657399, 1e-7);
    EXPECT_NEAR(signal(drive(0, op31, 20), Scheme::Unmodulated), 0.07668767266820656, 1e-7);
    EXPECT_NEAR(signal(drive(10, op31, 40), Scheme::Complementary), 0.1309829472840428, 1e-7);
    EXPECT_NEAR(signal(drive(0, op31, 40), Scheme::Complementary), 0.019662696681843967, 1e-8);
    EXPECT_NEAR(signal(drive(7.5, op31, 30), Scheme::Simultaneous), 0.09002379820075504, 1e-7);
}

TEST(SteadyState, InvariantUnderHalfPeriodOriginShift) {
    // The shifted schedule swaps which half comes first.
    for (Scheme s : {Scheme::Simultaneous, Scheme::Complementary}) {
        const QutritParams p = drive(13, op31, 40);
        const double lib = signal(p, s);
        const double shifted = oracle::steady_signal_expm(p, s, 0.05, 250, true);
        EXPECT_NEAR(lib, shifted, 1e-6 * lib);
    }
}

TEST(SteadyState, DetuningSymmetry) {
    for (Scheme s : {Scheme::Simultaneous, Scheme::Complementary, Scheme::Unmodulated})
        for (double d : {4.0, 11.0, 27.0}) {
            const double a = signal(drive(d, op31, 40), s, 0.0, 1e-6);
            const double b = signal(drive(-d, op31, 40), s, 0.0, 1e-6);
            EXPECT_NEAR(a, b, 1e-3 * std::max(a, b));
        }
}

TEST(SteadyState, HalvingStepChangesLittle) {
    for (Scheme s : {Scheme::Simultaneous, Scheme::Complementary}) {
        const QutritParams p = drive(10, 8, 40);
        EXPECT_NEAR(signal(p, s, 1e-4), signal(p, s, 5e-5), 1e-5);
    }
}

TEST(SteadyState, SignalWithinUnitInterval) {
    for (double d : {-30.0, 0.0, 10.0})
        for (Scheme s : {Scheme::Unmodulated, Scheme::Simultaneous, Scheme::Complementary}) {
            const auto r = steady_state_signal(drive(d, 30, 40), DriveSchedule(s, 0.05));
            EXPECT_GE(r.signal, 0.0);
            EXPECT_LE(r.signal, 1.0);
            EXPECT_TRUE(r.rho_final.is_valid());
        }
}

TEST(SteadyStateRatio, LimitAndPrediction) {
    QutritParams p;
    p.omega_c = 1e9;
    EXPECT_NEAR(steady_state_ratio(p), 1.0, 1e-9);
    p.omega_c = mhz_to_angular(30);
    const double g = angular_to_mhz(p.total_gamma()), g21 = angular_to_mhz(p.gamma_21);
    EXPECT_NEAR(steady_state_ratio(p), 900.0 / (900.0 + 2.0 * g * g21), 1e-12);
}

TEST(SteadyStateRatio, LindbladAgreesAtAutlerTownesResonance) {
    QutritParams p = drive(15, 3, 30);
    SteadyStateOptions opt;
    opt.tol = 1e-12;
    opt.max_periods = 4000;
    const auto r = steady_state_signal(p, DriveSchedule(Scheme::Unmodulated, 0.05), opt);
    const double ratio = r.rho_final.population(2) / r.rho_final.population(1);
    EXPECT_NEAR(ratio, steady_state_ratio(p), 0.05 * steady_state_ratio(p));
}

TEST(Transmission, Linear) {
    EXPECT_EQ(transmission(0.0, 3.0), 0.0);
    EXPECT_DOUBLE_EQ(transmission(0.3, 2.0), 0.6);
    EXPECT_THROW(transmission(0.3, 0.0), parameter_error);
}

TEST(DensityMatrix, Checks) {
    EXPECT_TRUE(DensityMatrix::ground().is_valid());
    Matrix3c bad = Matrix3c::Zero();
    bad(0, 0) = 1.2;
    bad(1, 1) = -0.2;
    EXPECT_FALSE(DensityMatrix(bad).is_valid());
    Matrix3c nonherm = DensityMatrix::ground().matrix();
    nonherm(0, 1) = 0.1;
    EXPECT_FALSE(DensityMatrix(nonherm).is_valid());
    EXPECT_DOUBLE_EQ(DensityMatrix::basis_state(2).excited_population(), 1.0);
}
