#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <random>

#include "oracles.hpp"
#include "qutrit/floquet.hpp"
#include "qutrit/lindblad.hpp"

using namespace qutrit;
using namespace qutrit::floquet;

namespace {

QutritParams drive(double delta_mhz, double op_mhz, double oc_mhz) {
    QutritParams p;
    p.delta = mhz_to_angular(delta_mhz);
    p.omega_p = mhz_to_angular(op_mhz);
    p.omega_c = mhz_to_angular(oc_mhz);
    return p;
}

const DriveSchedule comp(Scheme::Complementary, 0.05);

}  // namespace

TEST(SymmetricEigen, DiagonalInput) {
    Eigen::MatrixXd a = Eigen::Vector4d(3.0, -1.0, 2.0, 0.5).asDiagonal();
    const auto r = symmetric_eigen(a);
    EXPECT_TRUE(r.values.isApprox(Eigen::Vector4d(-1.0, 0.5, 2.0, 3.0)));
}

TEST(SymmetricEigen, AgreesWithReferenceSolver) {
    std::mt19937 rng(5);
    std::normal_distribution<double> g;
    for (int n : {1, 2, 7, 40, 123}) {
        Eigen::MatrixXd a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = g(rng);
        const auto mine = symmetric_eigen(a);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(a);
        EXPECT_LT((mine.values - ref.eigenvalues()).cwiseAbs().maxCoeff(), 1e-11 * n);
        const Eigen::MatrixXd gram = mine.vectors.transpose() * mine.vectors;
        EXPECT_LT((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-12 * n);
        const double norm = a.cwiseAbs().maxCoeff();
        for (int k = 0; k < n; ++k)
            EXPECT_LT((a * mine.vectors.col(k) - mine.values(k) * mine.vectors.col(k)).norm(), 1e-12 * n * norm);
    }
}

TEST(SymmetricEigen, IterationCapReported) {
    Eigen::MatrixXd a(3, 3);
    a << 1, 2, 0, 2, 1, 3, 0, 3, 1;
    try {
        symmetric_eigen(a, 0);
        FAIL() << "expected convergence_error";
    } catch (const convergence_error& e) {
        EXPECT_GE(e.iterations(), 1);
    }
}

TEST(FourierBlocks, ZeroDrives) {
    const auto b = fourier_blocks(drive(6, 0, 0), comp, 5);
    const Block expected = Eigen::Vector3d(-0.5, 0.5, 0.5).asDiagonal().toDenseMatrix() * mhz_to_angular(6);
    EXPECT_TRUE(b[0].isApprox(expected));
    for (int k = 1; k <= b.max_harmonic(); ++k) EXPECT_TRUE(b[k].isZero(0.0));
}

TEST(FourierBlocks, EvenHarmonicsVanishAndSymmetric) {
    const auto b = fourier_blocks(drive(3, 4, 40), comp, 10);
    for (int n = 1; 2 * n <= b.max_harmonic(); ++n) {
        EXPECT_TRUE(b[2 * n].isZero(0.0));
        EXPECT_TRUE(b[-2 * n].isZero(0.0));
    }
    for (int k = 1; k <= b.max_harmonic(); ++k) {
        EXPECT_EQ(b[k], b[-k]);
        EXPECT_EQ(b[k], b[k].transpose());
    }
}

TEST(FourierBlocks, OppositeSignsForComplementary) {
    const auto c = fourier_blocks(drive(0, 4, 40), comp, 3);
    const auto s = fourier_blocks(drive(0, 4, 40), DriveSchedule(Scheme::Simultaneous, 0.05), 3);
    for (int k : {1, 3, 5, 7}) {
        EXPECT_LT(c[k](0, 1) * c[k](1, 2), 0.0);
        EXPECT_GT(s[k](0, 1) * s[k](1, 2), 0.0);
    }
    EXPECT_NEAR(c[1](0, 1), -mhz_to_angular(4) / std::numbers::pi / 2.0, 1e-12);
    EXPECT_THROW(fourier_blocks(drive(0, 4, 40), DriveSchedule(Scheme::Unmodulated, 0.05), 3),
                 parameter_error);
}

TEST(FourierBlocks, ResummationMatchesPiecewiseHamiltonian) {
    for (Scheme sc : {Scheme::Complementary, Scheme::Simultaneous}) {
        const DriveSchedule s(sc, 0.05);
        const QutritParams p = drive(5, 8, 40);
        const auto b = fourier_blocks(p, s, 50);
        double err2 = 0.0, ref2 = 0.0;
        int count = 0;
        for (int i = 0; i < 400; ++i) {
            const double t = (i + 0.5) / 400.0 * 0.05;
            const double frac = std::fmod(t + time_origin_offset(s), 0.025) / 0.025;
            if (frac < 0.05 || frac > 0.95) continue;  // skip the switching instants
            const Block h = resum(b, t);
            const Matrix3r ref = hamiltonian_at(p, s, t + time_origin_offset(s));
            err2 += (h - ref).squaredNorm();
            ref2 += ref.squaredNorm();
            ++count;
        }
        ASSERT_GT(count, 300);
        EXPECT_LT(std::sqrt(err2 / ref2), 0.02);
    }
}

TEST(FloquetMatrix, SymmetricWithPhotonDiagonal) {
    const QutritParams p = drive(3, 4, 40);
    const auto b = fourier_blocks(p, comp, 4);
    const Eigen::MatrixXd hf = build_floquet_matrix(b, 4);
    EXPECT_EQ(hf.rows(), 27);
    EXPECT_TRUE(hf == hf.transpose());
    for (int n = -4; n <= 4; ++n)
        for (int a = 0; a < 3; ++a) {
            const int i = composite_index(a, n, 4);
            EXPECT_NEAR(hf(i, i), b[0](a, a) + n * b.omega(), 1e-9);
        }
    EXPECT_THROW(build_floquet_matrix(b, 0), parameter_error);
}

TEST(FloquetMatrix, UndrivenSpectrum) {
    const QutritParams p = drive(6, 0, 0);
    const auto b = fourier_blocks(p, comp, 1);
    const auto d = diagonalize(build_floquet_matrix(b, 1), 1, b.omega());
    std::vector<double> expected;
    for (int n = -1; n <= 1; ++n)
        for (double e : {-p.delta / 2, p.delta / 2, p.delta / 2}) expected.push_back(e + n * b.omega());
    std::sort(expected.begin(), expected.end());
    for (int i = 0; i < 9; ++i) EXPECT_NEAR(d.quasi_energies(i), expected[i], 1e-9);
}

TEST(Diagonalize, OrthonormalAndResidual) {
    const auto b = fourier_blocks(drive(7, 2.4, 40), comp, 20);
    const Eigen::MatrixXd hf = build_floquet_matrix(b, 20);
    const auto d = diagonalize(hf, 20, b.omega());
    const int n = d.dim();
    EXPECT_LT((d.eigenvectors.transpose() * d.eigenvectors - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(),
              1e-10);
    const double norm = hf.norm();
    for (int k = 0; k < n; ++k)
        EXPECT_LT((hf * d.eigenvectors.col(k) - d.quasi_energies(k) * d.eigenvectors.col(k)).norm(), 1e-9 * norm);
    EXPECT_THROW(diagonalize(hf, 19, b.omega()), parameter_error);
}

TEST(Diagonalize, QuasiEnergyLadder) {
    // Quasi-energies repeat modulo omega. Truncation breaks this slowly
    // (the square-wave harmonics fall off as 1/k), so only the zones next to
    // the centre are compared, at 1e-5 of omega.
    const int nc = 40;
    const auto b = fourier_blocks(drive(7, 2.4, 40), comp, nc);
    const auto d = diagonalize(build_floquet_matrix(b, nc), nc, b.omega());
    const double w = b.omega();
    std::vector<double> folded;
    for (int k = 0; k < d.dim(); ++k) {
        const double q = d.quasi_energies(k);
        if (std::abs(q) > 2.5 * w) continue;
        folded.push_back(q - w * std::floor(q / w + 0.5));
    }
    // Three quasi-energies per Brillouin zone; each must recur in every zone.
    std::vector<double> zone;
    for (int k = 0; k < d.dim(); ++k) {
        const double q = d.quasi_energies(k);
        if (q > -0.5 * w && q <= 0.5 * w) zone.push_back(q);
    }
    ASSERT_EQ(zone.size(), 3u);
    for (double f : folded) {
        double best = 1e9;
        for (double z : zone) best = std::min({best, std::abs(f - z), std::abs(std::abs(f - z) - w)});
        EXPECT_LT(best, 1e-5 * w);
    }
}

TEST(TimeAveraged, CompletenessAndUndriven) {
    const auto b = fourier_blocks(drive(3, 2.4, 40), comp, 20);
    const auto d = diagonalize(build_floquet_matrix(b, 20), 20, b.omega());
    for (int beta = 0; beta < 3; ++beta) {
        double s = 0.0;
        for (int a = 0; a < 3; ++a) s += time_averaged_population(d, a, beta);
        EXPECT_NEAR(s, 1.0, 1e-9);
    }
    const auto z = floquet_signal(drive(3, 0, 0), comp, 5);
    EXPECT_NEAR(z.populations[1], 0.0, 1e-15);
    EXPECT_NEAR(z.populations[2], 0.0, 1e-15);
    EXPECT_THROW(time_averaged_population(d, 3, 0), parameter_error);
}

TEST(FloquetSignal, FrozenReferenceValues) {
    // Independent dense diagonalization of the same truncated matrix.
    struct Ref {
        double d, p0, p1, p2;
    };
    for (const Ref& r : {Ref{0, 0.9882500695850117, 0.006606730661144179, 0.00514319975383993},
                         Ref{3, 0.9847048829686833, 0.010686266687664075, 0.004608850343651952},
                         Ref{10, 0.5003190663982047, 0.37483405629676514, 0.12484687730502776},
                         Ref{23, 0.9946602243232178, 0.00386803185726126, 0.001471743819518364}}) {
        const auto s = floquet_signal(drive(r.d, 2.399, 40), comp, 40);
        EXPECT_NEAR(s.populations[0], r.p0, 1e-9);
        EXPECT_NEAR(s.populations[1], r.p1, 1e-9);
        EXPECT_NEAR(s.populations[2], r.p2, 1e-9);
    }
}

TEST(FloquetSignal, MatchesDirectTimeAverage) {
    for (double d : {0.0, 7.0, 10.0, 23.0}) {
        const QutritParams p = drive(d, 2.399, 40);
        const double fl = floquet_signal(p, comp, 40).signal();
        const double direct = oracle::direct_time_average(p.delta, p.omega_p, p.omega_c, 0.05, true, 2000, 16);
        EXPECT_NEAR(fl, direct, 1e-3) << d;
    }
}

TEST(FloquetSignal, CutoffStabilityAndSymmetry) {
    for (double d : {0.0, 5.0, 10.0, 30.0}) {
        const double a = floquet_signal(drive(d, 2.399, 40), comp, 40).signal();
        const double b = floquet_signal(drive(d, 2.399, 40), comp, 50).signal();
        EXPECT_NEAR(a, b, 1e-3);
        const double m = floquet_signal(drive(-d, 2.399, 40), comp, 40).signal();
        EXPECT_NEAR(a, m, 1e-6);
    }
}
