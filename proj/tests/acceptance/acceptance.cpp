// One line per acceptance criterion; exit status 0 iff every line passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "qbm/errors.hpp"
#include "qbm/exact.hpp"
#include "qbm/inner.hpp"
#include "qbm/oracles.hpp"

using namespace qbm;

namespace {

struct Line {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Line ac1() {
    const auto t0 = std::chrono::steady_clock::now();
    const PhysParams p = PhysParams::dimensionless(0.1, 100.0, 10.0);
    const ViolationCertificate c = demo_violation(p, 40);
    const double secs = seconds_since(t0);
    const bool agree = (c.min_eig < 0.0) == (c.gaussian_deficit < 0.0);
    return {c.min_eig < -1e-6 && c.gaussian_deficit < 0.0 && agree && secs < 120.0,
            fmt("squeeze %.4g, omega t %.4g: Fock minEig %.3e, Gaussian deficit %.3e, %.1f s", c.squeeze,
                c.t, c.min_eig, c.gaussian_deficit, secs)};
}

Line ac2() {
    const auto t0 = std::chrono::steady_clock::now();
    const PhysParams p = PhysParams::dimensionless(0.05, 20.0, 10.0);
    std::vector<double> ts;
    for (int k = 0; k <= 20; ++k) ts.push_back(0.25 * k);
    const std::vector<int> Ns = {50, 100, 200, 400};
    bool ok = true;
    std::string d;
    for (const GaussianState& s0 : {GaussianState::vacuum(p), GaussianState::squeezed(p, 4.0, 0.5)}) {
        double prev = 1e300;
        d += d.empty() ? "vacuum" : "; squeezed";
        for (int N : Ns) {
            const auto out = microscopic_simulate(p, N, {}, s0, ts);
            double err = 0.0;
            for (size_t i = 0; i < ts.size(); ++i) {
                const Mat2 want = apply_channel(exact_channel(p, ts[i]), s0).cov.matrix();
                err = std::max(err, (out[i].cov.matrix() - want).norm() / want.norm());
            }
            ok = ok && err < prev;
            prev = err;
            d += fmt(" N=%d:%.2e", N, err);
        }
        ok = ok && prev <= 1e-3;
    }
    const double secs = seconds_since(t0);
    return {ok && secs < 180.0, d + fmt(", %.1f s", secs)};
}

std::vector<double> patch_grid(double dt, double tmax, int n) {
    std::vector<double> g;
    for (int k = 0; k <= n; ++k) {
        const double f = double(k) / n;
        const double t = dt + (tmax - dt) * f * f * f;
        if (t > 0.0) g.push_back(t);
    }
    return g;
}

Line ac3() {
    const auto t0 = std::chrono::steady_clock::now();
    const PhysParams p = PhysParams::dimensionless(0.1, 100.0, 10.0);
    const double dt = 0.25;
    std::mt19937_64 rng(20240601);
    StateSampler sampler;
    sampler.max_squeeze = 100.0;
    std::vector<GaussianState> states;
    for (int k = 0; k < 10000; ++k) states.push_back(sampler(rng, p));

    const auto worst = [&](double patch, int& violations) {
        double w = 1e300;
        violations = 0;
        for (double t : patch_grid(patch, 10.0 / p.omega, 80)) {
            const GaussianChannel ch = patched_channel(p, patch, t).channel;
            for (const GaussianState& s : states) {
                const double d = physicality_deficit(apply_channel(ch, s), p);
                w = std::min(w, d);
                violations += d < -1e-10;
            }
        }
        return w;
    };
    int bad = 0, bad0 = 0;
    const double w = worst(dt, bad);
    const double w0 = worst(0.0, bad0);
    const bool c28 = condition_28(p, dt);
    const double secs = seconds_since(t0);
    return {p.underdamped_positivity_regime() && c28 && w >= -1e-10 && bad0 > 0 && secs < 120.0,
            fmt("dt %.2f (condition 28 %s, minimal %.4f): min deficit %.3e; dt 0: %d violations, min "
                "deficit %.3e; %.1f s",
                dt, c28 ? "true" : "false", minimal_patch_time(p), w, bad0, w0, secs)};
}

Line ac4() {
    double ep[2], em[2];
    int k = 0;
    std::string d;
    for (double alpha : {1e3, 1e4}) {
        const PhysParams p = PhysParams::dimensionless(0.05, alpha, 10.0);
        const double t = 2.0 / alpha;
        const InnerLambdas l = inner_lambdas(p, InnerParams::at(p, t));
        NoiseOptions ht;
        ht.kernel = NoiseKernel::HighTemperature;
        const NoiseMoments full = noise_moments(p, t, ht);
        ep[k] = std::abs(l.lamPlus - full.lamPlus) / full.lamPlus;
        em[k] = std::abs(l.lamMinus - full.lamMinus) / full.lamMinus;
        d += fmt("%salpha=%g: lambda+ %.2e, lambda- %.2e", k ? "; " : "", alpha, ep[k], em[k]);
        ++k;
    }
    const PhysParams p = PhysParams::dimensionless(0.05, 1e3, 10.0);
    const NoiseMoments exact = noise_moments(p, 2e-3);
    const InnerLambdas l = inner_lambdas(p, InnerParams::at(p, 2e-3));
    d += fmt(" (exact coth kernel lambda+ %.3g vs inner %.3g, informational)", exact.lamPlus, l.lamPlus);
    return {ep[0] <= 0.02 && em[0] <= 0.02 && ep[1] < ep[0] && em[1] < em[0], d};
}

Line ac5() {
    const PhysParams p = PhysParams::dimensionless(0.1, 100.0, 10.0);
    const MomentFlowCheck m = verify_moment_flow(p, 40, 10, 77, false, {0.05, 0.1, 0.25, 0.5});
    return {m.states == 10 && m.derivative <= 1e-6 && m.evolution <= 1e-5,
            fmt("d=40, %d states: derivative residual %.2e, t-grid moment residual %.2e", m.states,
                m.derivative, m.evolution)};
}

Line ac6() {
    const PhysParams p = PhysParams::dimensionless(0.1, 100.0, 10.0);
    const FockSpace fs = FockSpace::standard(p, 30);
    const FockDensity rho = fock_from_gaussian(GaussianState::squeezed(p, 1.0, 0.0, Vec2(0.5, 0.3)), fs, p);
    double worst = 0.0, quad = 0.0;
    for (double xi : {0.05, 0.1, 0.5})
        for (int b = 0; b < 2; ++b) {
            const Identity14Result r = verify_identity_14(p, b == 0, b == 1, xi, rho);
            worst = std::max(worst, r.residual);
            quad = std::max(quad, r.quad_error);
        }
    return {worst < 1e-8, fmt("d=30, B in {q,p}, xi in {0.05,0.1,0.5}: max residual %.2e, quadrature change %.1e",
                              worst, quad)};
}

Line ac7() {
    const PhysParams p = PhysParams::dimensionless(0.1, 100.0, 10.0);
    const double r20 = verify_algebra_table(p, 20).max_residual;
    const double r30 = verify_algebra_table(p, 30).max_residual;
    const double r40 = verify_algebra_table(p, 40).max_residual;
    const bool decreasing = r40 < r30;
    const bool floor = r30 <= 1e-10 && r40 <= 1e-10;
    return {r30 <= 1e-6 && (decreasing || floor),
            fmt("max residual d=20 %.2e, d=30 %.2e, d=40 %.2e; %s", r20, r30, r40,
                decreasing ? "decreasing" : "not decreasing, both at the roundoff floor (<= 1e-10)")};
}

Line ac8() {
    const auto t0 = std::chrono::steady_clock::now();
    const PhysParams p = PhysParams::dimensionless(0.05, 100.0, 10.0);
    const double pts[5][2] = {{0.3, 0.1}, {0.3, 0.3}, {0.5, 0.1}, {0.5, 0.2}, {0.8, 0.2}};
    bool ok = true;
    std::string d = "lambda+ on {Q,.,Q}, resolved middle factor, d=25:";
    for (const auto& pt : pts) {
        const bool c28 = condition_28(p, pt[0]);
        const double r = wei_norman_fock_residual(p, pt[0], pt[1], 25);
        ok = ok && c28 && r <= 1e-4;
        d += fmt(" (%.1f,%.1f)%s %.1e", pt[0], pt[1], c28 ? "" : "[outside regime]", r);
    }
    return {ok, d + fmt("; %.0f s", seconds_since(t0))};
}

Line ac9() {
    const PhysParams p = PhysParams::dimensionless(0.05, 1e3, 10.0);
    double err = 0.0, prev = -1.0;
    bool inc = true;
    for (int k = 0; k <= 40; ++k) {
        const double t = 0.2 * k / p.alpha;
        const double h = coherent_entropy(p, t);
        err = std::max(err, std::abs(h - linear_entropy(coherent_inner_state(p, t), p)));
        if (k > 0) inc = inc && h > prev;
        prev = h;
    }
    std::mt19937_64 rng(9);
    const StateSampler sampler;
    int ok = 0;
    for (int k = 0; k < 500; ++k) {
        const double dt = 8.0 * uniform01(rng) / p.alpha;
        const UncertaintyFloors f = uncertainty_floors(p, dt);
        const GaussianState s = apply_channel(inner_channel(p, dt), sampler(rng, p));
        ok += s.cov.qq >= f.dq2 && s.cov.pp >= f.dp2;
    }
    return {err <= 1e-8 && inc && ok == 500,
            fmt("entropy vs purity max diff %.1e, strictly increasing %s, %d/500 states above floors", err,
                inc ? "yes" : "no", ok)};
}

Line ac10() {
    const PhysParams p = PhysParams::dimensionless(0.1, 100.0, 10.0);
    std::mt19937_64 rng(31);
    StateSampler sampler;
    sampler.max_squeeze = 100.0;
    double worst = 1e300;
    for (double t : patch_grid(0.0, 10.0, 60)) {
        const GaussianChannel ch = outer_channel(p, t, true);
        for (int k = 0; k < 500; ++k) worst = std::min(worst, physicality_deficit(apply_channel(ch, sampler(rng, p)), p));
    }
    double min_eig = 1e300;
    int evaluated = 0;
    ViolationSearch box;
    for (double sq : {4.0, 20.0, 75.0, 200.0})
        for (double t : {1e-3, 0.01, 0.03, 0.1}) {
            try {
                const ViolationCertificate c = evaluate_violation(p, 40, FockPropagator::Gao, sq, t, box);
                min_eig = std::min(min_eig, c.min_eig);
                ++evaluated;
            } catch (const TruncationUnreliable&) {
            }
        }
    const GeneratorCoeffs c = caldeira_leggett_coeffs(p, true);
    const double ab = (c.A * c.B).real(), cc = std::norm(c.C);
    const double rel = std::abs(ab - cc) / cc;
    const double gao_pp = p.Gamma / (8.0 * p.m * p.kT());
    const bool coef = std::abs(gen::conventional(p, true).pp - gen::conventional(p, false).pp + gao_pp) <= 1e-15;
    return {worst >= -1e-10 && evaluated > 0 && min_eig >= -1e-8 && rel <= 1e-14 &&
                lindblad_representable(c) && coef,
            fmt("min deficit %.2e; Fock minEig %.2e over %d points; AB/|C|^2 - 1 = %.1e, Lindblad form %s",
                worst, min_eig, evaluated, rel, lindblad_representable(c) ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Line()>>> acs = {
        {"AC-1", ac1}, {"AC-2", ac2}, {"AC-3", ac3}, {"AC-4", ac4}, {"AC-5", ac5},
        {"AC-6", ac6}, {"AC-7", ac7}, {"AC-8", ac8}, {"AC-9", ac9}, {"AC-10", ac10}};
    const std::string only = argc > 1 ? argv[1] : "";
    int failed = 0;
    for (const auto& [name, f] : acs) {
        if (!only.empty() && only != name) continue;
        Line l;
        try {
            l = f();
        } catch (const std::exception& e) {
            l = {false, std::string("threw ") + e.what()};
        }
        failed += !l.pass;
        std::printf("%s %s: %s\n", name, l.pass ? "PASS" : "FAIL", l.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
