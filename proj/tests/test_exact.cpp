#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "qbm/errors.hpp"
#include "qbm/exact.hpp"

using namespace qbm;

namespace {

PhysParams params(double Gamma, double alpha, double kT) {
    return PhysParams::dimensionless(Gamma, alpha, kT);
}

double rel(const Mat2& a, const Mat2& b) { return (a - b).norm() / b.norm(); }

// Trapezoid in both s and w (the w-integrand is even, so the w rule is
// spectrally accurate), four times the panel quadrature's range, with the
// far tail from the leading 1/w^2 behaviour of |F|^2.
struct BruteNoise {
    double X, Y, Xdot;
};

BruteNoise brute_noise(const PhysParams& p, double t) {
    const ResponseFunction resp(p);
    const int ns = 8000;
    const double hs = t / ns;
    std::vector<double> A(ns + 1), Ad(ns + 1);
    for (int k = 0; k <= ns; ++k) {
        A[k] = resp(k * hs, 0);
        Ad[k] = resp(k * hs, 1);
    }
    const double kappa = p.kappa_eff();
    const double W = 80.0 * std::max(p.alpha, 1.0 / t);
    const double hw = 0.1;
    const long nw = static_cast<long>(W / hw);
    BruteNoise out{0, 0, 0};
    for (long j = 0; j <= nw; ++j) {
        const double w = j * hw;
        std::complex<double> F0 = 0, F1 = 0;
        const std::complex<double> step = std::polar(1.0, w * hs);
        std::complex<double> e = 1.0;
        for (int k = 0; k <= ns; ++k) {
            const double wt = (k == 0 || k == ns) ? 0.5 : 1.0;
            F0 += wt * e * A[k];
            F1 += wt * e * Ad[k];
            e *= step;
        }
        F0 *= hs;
        F1 *= hs;
        const double x = w / (2.0 * p.kT());
        const double xc = x < 1e-8 ? 1.0 : x / std::tanh(x);
        const double weight = 0.5 * (2.0 / std::numbers::pi) * kappa * p.alpha * p.alpha *
                              2.0 * p.kT() * xc / (p.alpha * p.alpha + w * w);
        const double wt = (j == 0 || j == nw) ? 0.5 * hw : hw;
        out.X += wt * weight * std::norm(F0);
        out.Y += wt * weight * std::norm(F1);
        out.Xdot += wt * weight * 2.0 * (std::conj(F0) * std::polar(1.0, w * t) * A[ns]).real();
    }
    const double c = 0.5 * (2.0 / std::numbers::pi) * kappa * p.alpha * p.alpha;
    out.X += c * A[ns] * A[ns] / (2.0 * W * W);
    out.Y += c * (Ad[ns] * Ad[ns] + 1.0) / (2.0 * W * W);
    out.Xdot += c * A[ns] * Ad[ns] / (W * W);
    return out;
}

}  // namespace

TEST_CASE("trajectory at the origin") {
    const PhysParams p = params(0.1, 100.0, 10.0);
    const ResponseFunction resp(p);
    CHECK(std::abs(resp(0.0, 0)) < 1e-15);
    const TrajectoryCoeffs c = trajectory(p, 0.0);
    CHECK(c.A == 0.0);
    const double h = 1e-5;
    CHECK((resp(h) - resp(-h)) / (2 * h) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(resp(0.0, 1) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(c.Omega == doctest::Approx(std::sqrt(100.0 / 99.8 - 0.01)));
}

TEST_CASE("trajectory regime errors") {
    CHECK_THROWS_AS(trajectory(params(0.1, 0.15, 1.0), 1.0), InvalidRegime);
    CHECK_THROWS_AS(trajectory(params(1.5, 100.0, 1.0), 1.0), InvalidRegime);
    CHECK_NOTHROW(trajectory(params(0.1, 100.0, 1.0), 3.0));
}

TEST_CASE("analytic derivatives against centered differences, second order") {
    const PhysParams p = params(0.1, 100.0, 10.0);
    const ResponseFunction resp(p);
    for (double t : {0.05, 0.7, 2.0, 6.0}) {
        for (int n = 0; n < 2; ++n) {
            double prev = 0.0;
            for (double h : {1e-2, 5e-3}) {
                const double fd = (resp(t + h, n) - resp(t - h, n)) / (2 * h);
                const double err = std::abs(fd - resp(t, n + 1));
                if (prev > 0.0 && prev > 1e-11) CHECK(err < 0.3 * prev);
                prev = err;
            }
        }
    }
}

TEST_CASE("noise moments vanish at t = 0 and stay nonnegative") {
    const PhysParams p = params(0.05, 50.0, 10.0);
    const NoiseMoments z = noise_moments(p, 0.0);
    CHECK(z.X == 0.0);
    CHECK(z.Y == 0.0);
    CHECK(z.lamPlus == 0.0);
    CHECK(z.lamMinus == 0.0);
    std::mt19937_64 rng(2);
    for (int k = 0; k < 12; ++k) {
        const PhysParams q =
            params(0.02 + 0.2 * uniform01(rng), 20 + 200 * uniform01(rng), 0.2 + 20 * uniform01(rng));
        const double t = 0.01 + 4.0 * uniform01(rng);
        const NoiseMoments n = noise_moments(q, t);
        CHECK(n.lamPlus >= 0.0);
        CHECK(n.lamMinus >= -1e-12 * n.lamPlus);
    }
}

TEST_CASE("noise moments against brute-force double quadrature") {
    const PhysParams p = params(0.05, 50.0, 10.0);
    const double t = 0.5;
    const NoiseMoments n = noise_moments(p, t);
    const BruteNoise b = brute_noise(p, t);
    CHECK(std::abs(n.X - b.X) / b.X < 1e-6);
    CHECK(std::abs(n.Y - b.Y) / b.Y < 1e-6);
    CHECK(std::abs(n.Xdot - b.Xdot) / std::abs(b.Xdot) < 1e-6);
}

TEST_CASE("Xdot is the derivative of X") {
    const PhysParams p = params(0.1, 40.0, 3.0);
    const double t = 1.3, h = 1e-3;
    const double fd = (noise_moments(p, t + h).X - noise_moments(p, t - h).X) / (2 * h);
    CHECK(noise_moments(p, t).Xdot == doctest::Approx(fd).epsilon(1e-5));
}

TEST_CASE("diagonalization conventions") {
    NoiseDiagonal d = diagonalize_noise(0.3, 0.0, 0.3);
    CHECK(d.lamPlus == 0.3);
    CHECK(d.lamMinus == doctest::Approx(0.3));
    CHECK(d.S.determinant() == doctest::Approx(-1.0));

    d = diagonalize_noise(0.0, 0.0, 1.0);
    CHECK(d.lamPlus == 1.0);
    CHECK(d.lamMinus == 0.0);
    Mat2 anti;
    anti << 0, 1, 1, 0;
    CHECK(d.S == anti);
    Mat2 scaled;
    scaled << d.S(0, 1), d.S(1, 1), d.S(0, 0), d.S(1, 0);
    CHECK(scaled.determinant() == doctest::Approx(1.0));

    d = diagonalize_noise(1.0, 0.0, 0.0);
    Mat2 diag;
    diag << 1, 0, 0, -1;
    CHECK(d.S == diag);
}

TEST_CASE("diagonalization against a symmetric eigensolver") {
    std::mt19937_64 rng(9);
    for (int k = 0; k < 500; ++k) {
        const double a = std::exp(4 * standard_normal(rng));
        const double c = std::exp(4 * standard_normal(rng));
        const double b = 2.0 * std::sqrt(a * c) * (2 * uniform01(rng) - 1);
        const NoiseDiagonal d = diagonalize_noise(a, b, c);
        Mat2 M;
        M << a, b / 2, b / 2, c;
        Eigen::SelfAdjointEigenSolver<Mat2> es(M);
        const double scale = M.norm();
        CHECK(std::abs(d.lamPlus - es.eigenvalues()(1)) < 1e-13 * scale);
        CHECK(std::abs(d.lamMinus - es.eigenvalues()(0)) < 1e-12 * scale);
        const Mat2 D = d.S.transpose() * M * d.S;
        CHECK(std::abs(D(0, 1)) < 1e-12 * scale);
        CHECK(std::abs(D(0, 0) - d.lamPlus) < 1e-12 * scale);
        CHECK((d.S.transpose() * d.S - Mat2::Identity()).norm() < 1e-12);
        CHECK(d.S.determinant() == doctest::Approx(-1.0).epsilon(1e-12));
        // Sign rule: the first column is (|b|, sgn(b)(d + r)) up to normalization.
        CHECK(d.S(0, 0) >= 0.0);
        CHECK(d.S(1, 0) * b >= 0.0);
    }
}

TEST_CASE("exact channel at t = 0 and without coupling") {
    const PhysParams p = params(0.1, 100.0, 10.0);
    const GaussianChannel id = exact_channel(p, 0.0);
    CHECK(id.trans == Mat2::Identity());
    CHECK(id.noise == Mat2::Zero());

    PhysParams weak = params(1e-8, 100.0, 1.0);
    for (double t : {0.5, 2.0, 5.0}) {
        const GaussianChannel ch = exact_channel(weak, t);
        Mat2 rot;
        rot << std::cos(t), std::sin(t), -std::sin(t), std::cos(t);
        CHECK((ch.trans - rot).norm() < 1e-6);
        CHECK(ch.noise.norm() < 1e-6);
    }
}

TEST_CASE("exact channel preserves physicality") {
    std::mt19937_64 rng(21);
    const StateSampler sampler{100.0, 1.0, 0.5};
    for (int k = 0; k < 20; ++k) {
        const PhysParams p =
            params(0.02 + 0.3 * uniform01(rng), 20 + 100 * uniform01(rng), 0.1 + 10 * uniform01(rng));
        const double t = 0.05 + 5 * uniform01(rng);
        const GaussianChannel ch = exact_channel(p, t);
        CHECK(min_noise_eigenvalue(ch) >= 0.0);
        CHECK(is_completely_positive(ch, p, 1e-10));
        for (int s = 0; s < 10; ++s) {
            const GaussianState in = sampler(rng, p);
            CHECK(physicality_deficit(apply_channel(ch, in), p) >= -1e-10);
        }
    }
}

TEST_CASE("factorized channel reproduces the exact channel") {
    std::mt19937_64 rng(4);
    for (int k = 0; k < 20; ++k) {
        PhysParams p =
            params(0.02 + 0.3 * uniform01(rng), 20 + 100 * uniform01(rng), 0.1 + 10 * uniform01(rng));
        p.m = 0.5 + uniform01(rng);
        p.omega = 0.7 + 0.6 * uniform01(rng);
        p.hbar = 0.5 + uniform01(rng);
        const double t = 0.01 + 5 * uniform01(rng);
        const auto factors = factorized_channel(p, t);
        REQUIRE(factors.size() == 5);
        const GaussianChannel total = compose_sequence(factors);
        const GaussianChannel ex = exact_channel(p, t);
        CHECK((total.trans - ex.trans).cwiseAbs().maxCoeff() < 1e-9 * ex.trans.norm());
        CHECK((total.noise - ex.noise).cwiseAbs().maxCoeff() < 1e-9 * ex.noise.norm());
        CHECK(factors[0].trans.determinant() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(factors[1].trans.determinant() == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("dilation and smearing factors") {
    const PhysParams p = params(0.1, 100.0, 10.0);
    const auto factors = factorized_channel(p, 1.0);
    const double R = trajectory(p, 1.0).R;
    GaussianState s;
    s.mean = Vec2(0.3, -0.2);
    s.cov = {0.7, 0.4, 0.1};
    const GaussianState d = apply_channel(factors[4], s);
    CHECK((d.mean - R * s.mean).norm() < 1e-15);
    CHECK((d.cov.matrix() - R * R * s.cov.matrix()).norm() < 1e-15);

    // Smearing along Q adds variance to the conjugate quadrature only.
    const GaussianChannel q = smearing_channel(1.0, 0.0, 0.2, p);
    const GaussianState v = apply_channel(q, GaussianState::vacuum(p));
    CHECK(v.cov.qq == doctest::Approx(0.5));
    CHECK(v.cov.pp == doctest::Approx(0.5 + 2 * 0.2));
    CHECK(v.cov.qp == 0.0);
}
