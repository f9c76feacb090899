#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "symchaos/descriptors.hpp"
#include "test_util.hpp"

using namespace symchaos;

namespace {

Descriptor manual(const Eigen::MatrixXcd& spectrum, Eigen::Index M) {
    Descriptor d;
    d.canonical = Eigen::MatrixXd::Zero(M, spectrum.cols());
    d.spectrum = spectrum;
    return d;
}

Eigen::MatrixXd transform(const Eigen::MatrixXd& f, const Eigen::VectorXd& v, const Eigen::MatrixXd& R, double s) {
    return ((s * (R * f.transpose())).colwise() + v).transpose();
}

}  // namespace

TEST(Normalize, CanonicalInvariants) {
    std::mt19937_64 rng(1);
    for (std::size_t n : {1u, 2u, 3u, 4u}) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto d = normalize_polyline(oracle::random_fragment(40, n, rng));
            ASSERT_EQ(d.M(), 64u);
            ASSERT_EQ(d.q(), 8u);
            for (Eigen::Index j = 0; j < d.canonical.cols(); ++j) EXPECT_LT(std::abs(d.canonical.col(j).mean()), 1e-9);
            EXPECT_NEAR(std::sqrt(d.canonical.rowwise().squaredNorm().mean()), 1.0, 1e-9);
            const Eigen::MatrixXd RtR = d.pose.rotation.transpose() * d.pose.rotation;
            EXPECT_LT((RtR - Eigen::MatrixXd::Identity(RtR.rows(), RtR.cols())).norm(), 1e-9);
            EXPECT_GT(d.pose.scale, 0.0);
            for (Eigen::Index j = 0; j < d.canonical.cols(); ++j) {
                const std::vector<double> col(d.canonical.col(j).begin(), d.canonical.col(j).end());
                for (std::size_t i = 1; i <= d.q(); ++i)
                    EXPECT_LT(std::abs(d.spectrum(static_cast<Eigen::Index>(i - 1), j) - oracle::dft(col, i)), 1e-12);
                // Axis orientation: third moment along every axis is non-negative.
                EXPECT_GE(d.canonical.col(j).array().cube().mean(), -1e-12);
            }
            // Variances come out in descending order.
            for (Eigen::Index j = 1; j < d.canonical.cols(); ++j)
                EXPECT_GE(d.canonical.col(j - 1).squaredNorm(), d.canonical.col(j).squaredNorm() - 1e-12);
        }
    }
}

TEST(Normalize, PoseMapsCanonicalBackToResampledInput) {
    std::mt19937_64 rng(2);
    const auto f = oracle::random_fragment(50, 3, rng);
    const auto d = normalize_polyline(f);
    const Eigen::MatrixXd back = transform(d.canonical, d.pose.translation, d.pose.rotation, d.pose.scale);
    EXPECT_LT((back - detail::resample_arc_length(f, 64)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Normalize, CanonicalInputHasIdentityPose) {
    // Equal-length steps, so arc-length resampling at M = 64 returns the vertices
    // themselves and the canonical form is its own resampling.
    Eigen::MatrixXd walk(64, 2);
    walk.row(0).setZero();
    for (Eigen::Index k = 1; k < 64; ++k) {
        const double heading = 0.05 * static_cast<double>(k) + 0.3 * std::sin(0.4 * static_cast<double>(k));
        walk.row(k) = walk.row(k - 1) + Eigen::RowVector2d(std::cos(heading), std::sin(heading));
    }
    const auto first = normalize_polyline(walk);
    const auto again = normalize_polyline(first.canonical);
    EXPECT_LT(again.pose.translation.norm(), 1e-9);
    EXPECT_LT((again.pose.rotation - Eigen::MatrixXd::Identity(2, 2)).norm(), 1e-9);
    EXPECT_NEAR(again.pose.scale, 1.0, 1e-9);
    EXPECT_LT((again.canonical - first.canonical).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Normalize, SimilarityCopyRecoversTransform) {
    std::mt19937_64 rng(4);
    for (std::size_t n : {2u, 3u, 5u}) {
        const auto a = oracle::random_fragment(45, n, rng);
        const auto R = oracle::random_rotation(n, rng);
        Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(n), -3.0, 7.0);
        const auto b = transform(a, v, R, 5.0);
        const auto da = normalize_polyline(a);
        const auto db = normalize_polyline(b);
        EXPECT_LT((da.spectrum - db.spectrum).cwiseAbs().maxCoeff(), 1e-6);
        EXPECT_LT((da.canonical - db.canonical).cwiseAbs().maxCoeff(), 1e-6);
        const double s = db.pose.scale / da.pose.scale;
        const Eigen::MatrixXd Rr = db.pose.rotation * da.pose.rotation.transpose();
        const Eigen::VectorXd vr = db.pose.translation - s * Rr * da.pose.translation;
        EXPECT_NEAR(s, 5.0, 5e-6);
        EXPECT_LT((Rr - R).norm(), 1e-6);
        EXPECT_LT((vr - v).norm(), 1e-6 * v.norm());
        EXPECT_LT(symmetry_distance(da, db, SpectralWeights::uniform(8)), 1e-6);
    }
}

TEST(Normalize, ReflectionCoalesces) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = oracle::random_fragment(40, 3, rng);
        Eigen::MatrixXd mirror = a;
        mirror.col(trial % 3) *= -1.0;
        const auto da = normalize_polyline(a);
        const auto dm = normalize_polyline(mirror);
        if (da.degenerate || dm.degenerate) continue;
        EXPECT_LT(symmetry_distance(da, dm, SpectralWeights::uniform(8)), 1e-6);
    }
}

TEST(Normalize, SamplingDensityDoesNotMatter) {
    // The same straight-then-curved path sampled at two very different densities.
    const auto path = [](std::size_t rows) {
        Eigen::MatrixXd p(static_cast<Eigen::Index>(rows), 2);
        for (std::size_t r = 0; r < rows; ++r) {
            const double t = std::pow(static_cast<double>(r) / static_cast<double>(rows - 1), 1.7);
            p(static_cast<Eigen::Index>(r), 0) = t;
            p(static_cast<Eigen::Index>(r), 1) = 0.0;
        }
        return p;
    };
    const auto a = normalize_polyline(path(9));
    const auto b = normalize_polyline(path(400));
    EXPECT_LT((a.canonical - b.canonical).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Normalize, SpectrumPlusTailReconstructsCanonical) {
    std::mt19937_64 rng(6);
    const DescriptorOptions opts{32, 15};
    const auto d = normalize_polyline(oracle::random_fragment(25, 2, rng), opts);
    const std::size_t M = d.M();
    for (Eigen::Index j = 0; j < 2; ++j) {
        const std::vector<double> col(d.canonical.col(j).begin(), d.canonical.col(j).end());
        std::vector<std::complex<double>> X(M / 2 + 1);
        X[0] = 0.0;  // the mean is removed
        for (std::size_t k = 1; k <= d.q(); ++k) X[k] = d.spectrum(static_cast<Eigen::Index>(k - 1), j);
        for (std::size_t k = d.q() + 1; k <= M / 2; ++k) X[k] = oracle::dft(col, k);
        for (std::size_t m = 0; m < M; ++m) {
            double x = X[0].real();
            for (std::size_t k = 1; k < M / 2; ++k)
                x += 2.0 * (X[k] * std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k * m) / static_cast<double>(M))).real();
            x += X[M / 2].real() * (m % 2 ? -1.0 : 1.0);
            EXPECT_NEAR(x / static_cast<double>(M), col[m], 1e-12);
        }
    }
}

TEST(Normalize, DegenerateAxesFlaggedAndDeterministic) {
    Eigen::MatrixXd line(20, 3);
    for (Eigen::Index r = 0; r < 20; ++r) line.row(r) << std::pow(static_cast<double>(r), 1.3), 0.0, 0.0;
    const auto a = normalize_polyline(line);
    const auto b = normalize_polyline(line);
    EXPECT_TRUE(a.degenerate);
    EXPECT_EQ(a.pose.rotation, b.pose.rotation);
    const Eigen::MatrixXd RtR = a.pose.rotation.transpose() * a.pose.rotation;
    EXPECT_LT((RtR - Eigen::MatrixXd::Identity(3, 3)).norm(), 1e-9);
    std::mt19937_64 rng(7);
    EXPECT_FALSE(normalize_polyline(oracle::random_fragment(30, 3, rng)).degenerate);
}

TEST(Normalize, Errors) {
    EXPECT_THROW((void)normalize_polyline(Eigen::MatrixXd::Constant(10, 2, 1.0)), Error);
    std::mt19937_64 rng(8);
    const auto f = oracle::random_fragment(20, 2, rng);
    EXPECT_THROW((void)normalize_polyline(f, {48, 8}), Error);   // not a power of two
    EXPECT_THROW((void)normalize_polyline(f, {16, 8}), Error);   // M < 2q + 2
    EXPECT_THROW((void)normalize_polyline(f, {64, 0}), Error);
    EXPECT_THROW((void)normalize_polyline(f.topRows(3)), Error);
    const auto att = embed(testutil::series(testutil::sine(100, 20.0)), {5, 2});
    EXPECT_THROW((void)normalize(att, {90, 120, 0, Direction::increasing}), Error);
    try {
        (void)normalize_polyline(Eigen::MatrixXd::Constant(10, 2, 1.0));
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("zero-length polyline"), std::string::npos);
    }
}

TEST(SymmetryDistance, HandCase345) {
    Eigen::MatrixXcd sa = Eigen::MatrixXcd::Zero(1, 2);
    Eigen::MatrixXcd sb(1, 2);
    sb << std::complex<double>(0.0, 3.0), std::complex<double>(0.0, 4.0);
    EXPECT_EQ(symmetry_distance(manual(sa, 4), manual(sb, 4), SpectralWeights{{1.0}}), 5.0);
}

TEST(SymmetryDistance, MatchesFormulaOracle) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int trial = 0; trial < 30; ++trial) {
        const auto a = oracle::random_fragment(40, 3, rng);
        Eigen::MatrixXd b = transform(a, Eigen::Vector3d(1, 2, 3), oracle::random_rotation(3, rng), 2.5);
        std::normal_distribution<double> g(0.0, 1e-3);
        for (auto& x : b.reshaped()) x += g(rng);
        const auto da = normalize_polyline(a);
        const auto db = normalize_polyline(b);
        std::vector<double> betas(8);
        for (auto& x : betas) x = u(rng);
        const double D = symmetry_distance(da, db, SpectralWeights{betas});
        EXPECT_NEAR(D, oracle::distance(oracle::to_nested(da.spectrum), oracle::to_nested(db.spectrum), betas), 1e-12);
        EXPECT_LT(D, 1.0);
    }
}

TEST(SymmetryDistance, PseudometricLaws) {
    std::mt19937_64 rng(10);
    const auto w = SpectralWeights::uniform(8);
    for (int trial = 0; trial < 60; ++trial) {
        const auto a = normalize_polyline(oracle::random_fragment(30, 2, rng));
        const auto b = normalize_polyline(oracle::random_fragment(30, 2, rng));
        const auto c = normalize_polyline(oracle::random_fragment(30, 2, rng));
        EXPECT_EQ(symmetry_distance(a, a, w), 0.0);
        EXPECT_EQ(symmetry_distance(a, b, w), symmetry_distance(b, a, w));
        EXPECT_GE(symmetry_distance(a, b, w), 0.0);
        EXPECT_LE(symmetry_distance(a, c, w), symmetry_distance(a, b, w) + symmetry_distance(b, c, w) + 1e-12);
    }
}

TEST(SymmetryDistance, WeightLinearity) {
    std::mt19937_64 rng(11);
    const auto a = normalize_polyline(oracle::random_fragment(30, 3, rng));
    const auto b = normalize_polyline(oracle::random_fragment(30, 3, rng));
    const std::vector<double> betas{0.3, 1.0, 0.0, 2.0, 0.7, 1.1, 0.2, 5.0};
    const double base = symmetry_distance(a, b, SpectralWeights{betas});
    for (double c : {0.0, 0.5, 2.0, 3.7}) {
        auto scaled = betas;
        for (auto& x : scaled) x *= c;
        EXPECT_NEAR(symmetry_distance(a, b, SpectralWeights{scaled}), c * base, 1e-14 * base);
    }
    auto doubled = betas;
    for (auto& x : doubled) x *= 2.0;
    EXPECT_EQ(symmetry_distance(a, b, SpectralWeights{doubled}), 2.0 * base);
}

TEST(SymmetryDistance, Errors) {
    std::mt19937_64 rng(12);
    const auto f = oracle::random_fragment(30, 2, rng);
    const auto a = normalize_polyline(f);
    const auto b = normalize_polyline(oracle::random_fragment(30, 3, rng));
    const auto c = normalize_polyline(f, {32, 4});
    EXPECT_THROW((void)symmetry_distance(a, b, SpectralWeights::uniform(8)), Error);
    EXPECT_THROW((void)symmetry_distance(a, c, SpectralWeights::uniform(4)), Error);
    EXPECT_THROW((void)symmetry_distance(a, a, SpectralWeights::uniform(9)), Error);
    EXPECT_THROW((void)symmetry_distance(a, a, SpectralWeights{{1.0, -1.0}}), Error);
    EXPECT_THROW((void)symmetry_distance(a, a, SpectralWeights{}), Error);
}
