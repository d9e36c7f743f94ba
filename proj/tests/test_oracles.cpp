#include <doctest.h>

#include <cmath>

#include "qbm/errors.hpp"
#include "qbm/exact.hpp"
#include "qbm/oracles.hpp"

using namespace qbm;

namespace {

PhysParams warm() { return PhysParams::dimensionless(0.1, 100.0, 10.0); }

double min_symplectic(const Eigen::MatrixXd& S) {
    const int n = static_cast<int>(S.rows()) / 2;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    J.topRightCorner(n, n).setIdentity();
    J.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
    const Eigen::VectorXcd ev = (J * S).eigenvalues();
    double best = 1e300;
    for (int i = 0; i < ev.size(); ++i) best = std::min(best, std::abs(ev(i)));
    return best;
}

}  // namespace

TEST_CASE("identity 14 by quadrature") {
    const PhysParams p = warm();
    const FockSpace fs = FockSpace::standard(p, 30);
    const FockDensity coh = fock_from_gaussian(GaussianState::squeezed(p, 1.0, 0.0, Vec2(0.5, 0.3)), fs, p);
    const FockDensity sq = fock_from_gaussian(GaussianState::squeezed(p, 2.0, 0.6), fs, p);
    for (double xi : {0.05, 0.1, 0.5})
        for (int b = 0; b < 2; ++b) {
            const Identity14Result r = verify_identity_14(p, b == 0, b == 1, xi, coh);
            CHECK(r.residual < 1e-8);
            CHECK(r.quad_error < 1e-10);
            CHECK(r.min_eig_quadrature > -1e-12);
        }
    CHECK(verify_identity_14(p, 0.6, 0.8, 0.1, sq).residual < 1e-8);
    CHECK_THROWS_AS(verify_identity_14(p, 1.0, 0.0, 0.0, coh), ConfigError);
}

TEST_CASE("relation 16 scales moments") {
    const PhysParams p = warm();
    const Relation16Result zero = verify_relation_16(p, 0.0, 30);
    CHECK(zero.residual < 1e-14);
    CHECK(zero.scale_found == doctest::Approx(1.0));
    for (double tau : {0.02, -0.05, 0.1}) {
        const Relation16Result r = verify_relation_16(p, tau, 30);
        CHECK(r.residual < 1e-8);
        CHECK(r.sign == -1);
        CHECK(r.scale_found == doctest::Approx(std::exp(-2.0 * p.hbar * tau)).epsilon(1e-8));
        CHECK(r.trace_error < 1e-12);
    }
    CHECK_THROWS_AS(verify_relation_16(p, 0.2, 30), TruncationUnreliable);
}

TEST_CASE("closed algebra table") {
    const PhysParams p = warm();
    const AlgebraResult r20 = verify_algebra_table(p, 20);
    const AlgebraResult r30 = verify_algebra_table(p, 30);
    REQUIRE(r30.entries.size() == 10);
    CHECK(r20.max_residual < 1e-9);
    CHECK(r30.max_residual < 1e-6);
    int zeros = 0;
    for (const AlgebraEntry& e : r30.entries) zeros += e.claimed_zero;
    CHECK(zeros == 4);
    for (int k = 0; k < 10; ++k) {
        const AlgebraResult bad = verify_algebra_table(p, 20, k, 1.01);
        CHECK(bad.max_residual > 1e-3);
    }
    CHECK_THROWS_AS(verify_algebra_table(p, 3), DimensionTooSmall);
}

TEST_CASE("bare generator violates positivity in Fock space") {
    const PhysParams p = warm();
    const ViolationCertificate c = demo_violation(p, 40);
    CHECK(c.min_eig < -1e-6);
    CHECK(c.gaussian_deficit < 0.0);
    CHECK(c.evaluated > 0);

    const ViolationCertificate at = evaluate_violation(p, 40, FockPropagator::Bare, c.squeeze, c.t, {});
    CHECK(at.min_eig == doctest::Approx(c.min_eig));
}

TEST_CASE("Gao generator stays positive in Fock space") {
    const PhysParams p = warm();
    ViolationSearch box;
    box.n_squeeze = 4;
    box.n_t = 4;
    box.refine = 0;
    CHECK_THROWS_AS(demo_violation(p, 30, FockPropagator::Gao, box), NoViolationFound);
    const ViolationCertificate c = evaluate_violation(p, 30, FockPropagator::Gao, 20.0, 0.02, box);
    CHECK(c.min_eig > -1e-8);
    CHECK(c.gaussian_deficit >= -1e-10);
}

TEST_CASE("Wei-Norman factorization as Fock superoperators") {
    const PhysParams p = PhysParams::dimensionless(0.05, 100.0, 10.0);
    REQUIRE(condition_28(p, 0.3));
    const double res = wei_norman_fock_residual(p, 0.3, 0.05, 10, NoisePairing::LambdaPlusOnQ,
                                                MiddleReading::Resolved,
                                                Eq26Prefactor::NoiseCoefficient, 12);
    const double swapped = wei_norman_fock_residual(p, 0.3, 0.05, 10, NoisePairing::LambdaMinusOnQ,
                                                    MiddleReading::Resolved,
                                                    Eq26Prefactor::NoiseCoefficient, 12);
    CHECK(res < 1e-4);
    CHECK(swapped > 1e-2);
}

TEST_CASE("finite bath without coupling rotates freely") {
    PhysParams p = PhysParams::dimensionless(0.0, 20.0, 10.0);
    const GaussianState s0 = GaussianState::squeezed(p, 3.0, 0.2, Vec2(1.0, 0.0));
    const std::vector<double> ts{0.5, 1.0, 2.0};
    const auto out = microscopic_simulate(p, 50, {}, s0, ts);
    for (size_t i = 0; i < ts.size(); ++i) {
        const GaussianState want = apply_channel(exact_channel(p, ts[i]), s0);
        CHECK((out[i].mean - want.mean).norm() < 1e-10);
        CHECK((out[i].cov.matrix() - want.cov.matrix()).norm() < 1e-10);
    }
}

TEST_CASE("finite bath states stay physical") {
    const PhysParams p = PhysParams::dimensionless(0.05, 20.0, 10.0);
    const GaussianState s0 = GaussianState::squeezed(p, 5.0);
    const ReservoirModel m = build_reservoir(p, 30, {}, s0);
    CHECK(m.nModes == 30);
    CHECK(m.scheme == "equal-weight");
    for (double t : {0.0, 0.7, 2.0}) CHECK(min_symplectic(total_covariance(m, p, t)) >= 0.5 * p.hbar - 1e-9);
    CHECK_THROWS_AS(build_reservoir(p, 1, {}, s0), ConfigError);
    CHECK_THROWS_AS(microscopic_simulate(p, 10, {}, s0, {100.0}), RecurrenceHorizonExceeded);
}

TEST_CASE("finite bath converges to the exact channel") {
    const PhysParams p = PhysParams::dimensionless(0.05, 20.0, 10.0);
    std::vector<double> ts;
    for (int k = 1; k <= 10; ++k) ts.push_back(0.5 * k);
    for (const GaussianState& s0 : {GaussianState::vacuum(p), GaussianState::squeezed(p, 4.0, 0.5)}) {
        double prev = 1e300;
        for (int N : {50, 100, 200}) {
            const auto out = microscopic_simulate(p, N, {}, s0, ts);
            double err = 0.0;
            for (size_t i = 0; i < ts.size(); ++i) {
                const Mat2 want = apply_channel(exact_channel(p, ts[i]), s0).cov.matrix();
                err = std::max(err, (out[i].cov.matrix() - want).norm() / want.norm());
            }
            CHECK(err < prev);
            prev = err;
        }
        CHECK(prev < 1e-3);
    }
}

TEST_CASE("oracle report serializes") {
    OracleReport r{"algebra", {{"dim", 20}}, 20, 1e-12, 1e-6, true, {}};
    const nlohmann::json j = r;
    CHECK(j.at("check_name") == "algebra");
    CHECK(j.at("pass") == true);
}
