#include <doctest.h>

#include <cmath>
#include <random>

#include "qbm/exact.hpp"
#include "qbm/inner.hpp"

using namespace qbm;

namespace {

PhysParams layer_params(double alpha) { return PhysParams::dimensionless(0.05, alpha, 10.0); }

NoiseOptions high_temperature() {
    NoiseOptions o;
    o.kernel = NoiseKernel::HighTemperature;
    return o;
}

}  // namespace

TEST_CASE("bracket functions against 50-digit references") {
    struct Ref {
        double x, B, R;
    };
    const Ref refs[] = {{1e-6, 1.6666659722224007936e-20, 4.9999983333337499999e-13},
                        {1e-3, 1.6659724007589340821e-11, 4.9983337499166805536e-7},
                        {0.5, 0.0017000869254155382858, 0.1065306597126334236},
                        {0.999999, 0.011209151994399211755, 0.36787880905106743282},
                        {1.0, 0.011209181395176219487, 0.3678794411714423216},
                        {1.000001, 0.01120921079599714538, 0.36788007329218508981},
                        {2.0, 0.062662766860107949545, 1.1353352832366126919},
                        {30.0, 4.5022222222221689877, 29.000000000000093576}};
    for (const Ref& r : refs) {
        CHECK(lambda_minus_bracket(r.x) == doctest::Approx(r.B).epsilon(1e-12));
        CHECK(relu_exp(r.x) == doctest::Approx(r.R).epsilon(1e-14));
    }
    CHECK(lambda_minus_bracket(0.0) == 0.0);
    CHECK(relu_exp(0.0) == 0.0);
}

TEST_CASE("inner lambdas are nonnegative and nondecreasing") {
    const PhysParams p = layer_params(1e3);
    const InnerLambdas zero = inner_lambdas(p, InnerParams::at(p, 0.0));
    CHECK(zero.lamPlus == 0.0);
    CHECK(zero.lamMinus == 0.0);
    InnerLambdas prev = zero;
    for (int k = 1; k <= 400; ++k) {
        const double t = 1e-7 * std::pow(1.05, k);
        const InnerLambdas l = inner_lambdas(p, InnerParams::at(p, t));
        CHECK(l.lamPlus >= prev.lamPlus);
        CHECK(l.lamMinus >= prev.lamMinus);
        prev = l;
    }
    CHECK(InnerParams::at(p, 0.2).outside_layer);
    CHECK_FALSE(InnerParams::at(p, 0.002).outside_layer);
}

TEST_CASE("inner lambdas converge to the full pipeline") {
    double err_plus[2], err_minus[2];
    int k = 0;
    for (double alpha : {1e3, 1e4}) {
        const PhysParams p = layer_params(alpha);
        const double t = 2.0 / alpha;
        const InnerLambdas l = inner_lambdas(p, InnerParams::at(p, t));
        const NoiseMoments full = noise_moments(p, t, high_temperature());
        err_plus[k] = std::abs(l.lamPlus - full.lamPlus) / full.lamPlus;
        err_minus[k] = std::abs(l.lamMinus - full.lamMinus) / full.lamMinus;
        CHECK(err_plus[k] <= 0.02);
        CHECK(err_minus[k] <= 0.02);
        ++k;
    }
    CHECK(err_plus[1] < err_plus[0]);
    CHECK(err_minus[1] < err_minus[0]);
}

TEST_CASE("inner S") {
    CHECK(inner_S(1.0, 0.0) == (Mat2() << 0, 1, 1, 0).finished());
    const Mat2 s = inner_S(1.0, 1e-3);
    CHECK(s(0, 0) == 5e-4);
    CHECK(s(1, 1) == -5e-4);
    CHECK(s(0, 1) == 1.0);
    const Mat2 n = inner_S_normalized(1.0, 0.3);
    CHECK((n.transpose() * n - Mat2::Identity()).norm() < 1e-15);
    CHECK(n.determinant() == doctest::Approx(-1.0));

    const PhysParams p = layer_params(1e4);
    for (double at : {0.5, 2.0, 5.0}) {
        const double t = at / p.alpha;
        const Mat2 full = noise_moments(p, t, high_temperature()).S;
        const double bound = 10.0 * (p.omega * t + 1.0 / p.alpha);
        CHECK((full - inner_S(p.omega, t)).cwiseAbs().maxCoeff() < bound);
    }
}

TEST_CASE("inner channel basics") {
    const PhysParams p = layer_params(1e3);
    const GaussianChannel id = inner_channel(p, 0.0);
    CHECK(id.trans == Mat2::Identity());
    CHECK(id.noise == Mat2::Zero());
    std::mt19937_64 rng(8);
    const StateSampler sampler{100.0, 1.0, 1.0};
    for (int k = 0; k < 200; ++k) {
        const double dt = 10.0 * uniform01(rng) / p.alpha;
        const GaussianChannel ch = inner_channel(p, dt);
        CHECK(ch.cp_certified);
        CHECK(min_noise_eigenvalue(ch) >= 0.0);
        CHECK(is_completely_positive(ch, p, 1e-14));
        CHECK(ch.trans.determinant() == doctest::Approx(1.0).epsilon(1e-12));
        const GaussianState in = sampler(rng, p);
        CHECK(physicality_deficit(apply_channel(ch, in), p) >= physicality_deficit(in, p) - 1e-12);
    }
    const GaussianState pure = GaussianState::squeezed(p, 30.0, 0.4);
    CHECK(linear_entropy(apply_channel(inner_channel(p, 2.0 / p.alpha), pure), p) > 0.0);
}

TEST_CASE("inner channel against the exact channel inside the layer") {
    // The inner second derivative drops the -omega^2 t part of Addot, a relative
    // O(omega^2 / (Gamma alpha)) error in T21 (2.3% at alpha = 1e3); transition
    // entries are therefore compared on the scale of the matrix at alpha = 1e3
    // and entrywise at alpha = 1e4.
    for (double alpha : {1e3, 1e4}) {
        const PhysParams p = layer_params(alpha);
        const double dt = 2.0 / p.alpha;
        const GaussianChannel in = inner_channel(p, dt);
        const GaussianChannel ex = exact_channel(p, dt, high_temperature());
        const double tscale = ex.trans.cwiseAbs().maxCoeff();
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const double ref = alpha > 5e3 ? std::abs(ex.trans(i, j)) : tscale;
                CHECK(std::abs(in.trans(i, j) - ex.trans(i, j)) <= 0.02 * ref);
                CHECK(std::abs(in.noise(i, j) - ex.noise(i, j)) <= 0.02 * std::abs(ex.noise(i, j)));
            }
    }
}

TEST_CASE("coherent-state entropy") {
    const PhysParams p = layer_params(1e3);
    CHECK(coherent_entropy(p, 0.0) == 0.0);
    double prev = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double t = 0.1 * k / p.alpha;
        const double h = coherent_entropy(p, t);
        CHECK(h > prev);
        prev = h;
        const double oracle = linear_entropy(coherent_inner_state(p, t), p);
        CHECK(std::abs(h - oracle) <= 1e-8);
    }
}

TEST_CASE("uncertainty floors") {
    const PhysParams p = layer_params(1e3);
    const UncertaintyFloors z = uncertainty_floors(p, 0.0);
    CHECK(z.dq2 == 0.0);
    CHECK(z.dp2 == 0.0);

    const UncertaintyFloors one = uncertainty_floors(p, 1.0 / p.alpha);
    const double expected = 4.0 * p.Gamma * p.m * p.kT() / p.alpha * 0.36787944117144233;
    CHECK(one.dp2_asymptotic == doctest::Approx(expected).epsilon(1e-14));
    CHECK(one.dp2 == doctest::Approx(one.dp2_asymptotic).epsilon(1e-4));
    CHECK(one.dq2 == doctest::Approx(one.dq2_asymptotic).epsilon(1e-4));

    std::mt19937_64 rng(17);
    const StateSampler sampler;
    for (int k = 0; k < 500; ++k) {
        const double dt = 8.0 * uniform01(rng) / p.alpha;
        const UncertaintyFloors f = uncertainty_floors(p, dt);
        const GaussianState out = apply_channel(inner_channel(p, dt), sampler(rng, p));
        CHECK(out.cov.qq >= f.dq2);
        CHECK(out.cov.pp >= f.dp2);
    }
}

TEST_CASE("floors are approached by squeezed inputs") {
    const PhysParams p = layer_params(1e3);
    const double dt = 3.0 / p.alpha;
    const UncertaintyFloors f = uncertainty_floors(p, dt);
    const GaussianChannel ch = inner_channel(p, dt);
    // Squeeze the input along T^t e_i so that T Sigma T^t is negligible in that quadrature.
    for (int which = 0; which < 2; ++which) {
        const Vec2 v = ch.trans.row(which).transpose();
        const double angle = std::atan2(v(1) * std::sqrt(p.hbar * p.m * p.omega),
                                        v(0) * std::sqrt(p.hbar / (p.m * p.omega)));
        GaussianState s = GaussianState::squeezed(p, 1e9, angle);
        const GaussianState out = apply_channel(ch, s);
        const double got = which == 0 ? out.cov.qq : out.cov.pp;
        const double floor = which == 0 ? f.dq2 : f.dp2;
        CHECK(got <= 1.05 * floor);
    }
}
