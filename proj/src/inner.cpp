#include "qbm/inner.hpp"

#include <cmath>

#include "qbm/errors.hpp"
#include "qbm/exact.hpp"

namespace qbm {

InnerParams InnerParams::at(const PhysParams& p, double t) {
    if (t < 0.0) throw ConfigError("inner-limit time must be >= 0");
    InnerParams ip;
    ip.alpha = p.alpha;
    ip.alphaTilde = p.alpha * t;
    ip.betaMax = p.hbar * p.alpha / p.kT();
    ip.outside_layer = p.omega * t > 0.1;
    return ip;
}

double relu_exp(double x) {
    if (x >= 1.0) return std::exp(-x) + x - 1.0;
    // sum_{n>=2} (-x)^n / n!
    double term = x * x / 2.0, sum = 0.0;
    for (int n = 2; n < 40 && term != 0.0; ++n) {
        sum += term;
        term *= -x / (n + 1);
    }
    return sum;
}

double lambda_minus_bracket(double x) {
    if (x >= 1.0) {
        const double e = std::exp(-x);
        return x / 6.0 - 0.5 - 0.5 * e - 2.0 * e / x + 2.0 * (1.0 - e) / (x * x);
    }
    // c_n = (-1)^n [-1/(2 n!) + 2/(n+1)! - 2/(n+2)!], n >= 3
    double sum = 0.0, xn = x * x * x, f = 6.0;  // f = n!
    for (int n = 3; n < 40; ++n) {
        const double c = (-0.5 + 2.0 / (n + 1) - 2.0 / ((n + 1.0) * (n + 2.0))) / f;
        const double term = (n % 2 == 0 ? c : -c) * xn;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        xn *= x;
        f *= n + 1;
    }
    return sum;
}

InnerLambdas inner_lambdas(const PhysParams& p, const InnerParams& ip) {
    const double x = ip.alphaTilde;
    InnerLambdas l;
    l.lamPlus = 4.0 * p.Gamma / (ip.betaMax * p.omega) * relu_exp(x);
    const double r = x / ip.alpha;
    l.lamMinus = 2.0 * p.Gamma * p.omega / ip.betaMax * r * r * lambda_minus_bracket(x);
    return l;
}

Mat2 inner_S(double omega, double t) {
    Mat2 S;
    S << 0.5 * omega * t, 1.0, 1.0, -0.5 * omega * t;
    return S;
}

Mat2 inner_S_normalized(double omega, double t) {
    const double x = 0.5 * omega * t;
    return inner_S(omega, t) / std::sqrt(1.0 + x * x);
}

double inner_Addot(const PhysParams& p, double t) {
    return 2.0 * p.Gamma * std::expm1(-p.alpha * t);
}

std::vector<GaussianChannel> inner_factors(const PhysParams& p, double dt) {
    const InnerParams ip = InnerParams::at(p, dt);
    const InnerLambdas lam = inner_lambdas(p, ip);
    const Mat2 S = inner_S_normalized(p.omega, dt);
    const Mat2 PS = metaplectic_matrix(S, p);
    const double Add = inner_Addot(p, dt);
    const double R = std::sqrt(1.0 - dt * Add);
    const double mw = p.m * p.omega;

    Mat2 Tin;
    Tin << 1.0, dt / p.m, p.m * Add, 1.0;
    GaussianChannel m_part;
    m_part.trans = PS * Tin / R;
    m_part.cp_certified = true;

    GaussianChannel n_part;
    n_part.trans = PS.inverse();
    n_part.cp_certified = true;

    const GaussianChannel q_noise =
        smearing_channel(S(0, 1), S(1, 1) / mw, mw * lam.lamPlus / (2.0 * p.hbar), p);
    const GaussianChannel p_noise =
        smearing_channel(mw * S(0, 0), S(1, 0), lam.lamMinus / (2.0 * p.hbar * mw), p);
    return {m_part, n_part, q_noise, p_noise};
}

GaussianChannel inner_channel(const PhysParams& p, double dt) {
    if (dt == 0.0) return GaussianChannel::identity();
    GaussianChannel ch = compose_sequence(inner_factors(p, dt));
    ch.cp_certified = min_noise_eigenvalue(ch) >= -1e-15 * ch.noise.norm();
    return ch;
}

double coherent_entropy(const PhysParams& p, double t) {
    const InnerLambdas l = inner_lambdas(p, InnerParams::at(p, t));
    return 0.5 * p.kB * (std::log1p(2.0 * l.lamPlus) + std::log1p(2.0 * l.lamMinus));
}

GaussianState coherent_inner_state(const PhysParams& p, double t) {
    auto factors = inner_factors(p, t);
    factors.erase(factors.begin());
    return apply_channel(compose_sequence(factors), GaussianState::vacuum(p));
}

UncertaintyFloors uncertainty_floors(const PhysParams& p, double dt) {
    const InnerParams ip = InnerParams::at(p, dt);
    const InnerLambdas l = inner_lambdas(p, ip);
    const Mat2 S = inner_S_normalized(p.omega, dt);
    UncertaintyFloors f;
    f.dq2 = p.hbar / (p.m * p.omega) *
            (l.lamMinus * S(1, 0) * S(1, 0) + l.lamPlus * S(1, 1) * S(1, 1));
    f.dp2 = p.m * p.hbar * p.omega *
            (l.lamMinus * S(0, 0) * S(0, 0) + l.lamPlus * S(0, 1) * S(0, 1));
    const double x = ip.alphaTilde;
    const double r = x / p.alpha;
    // 2x/3 - 1 - 2e^{-x}/x + 2(1 - e^{-x})/x^2 = B(x) + (e^{-x} + x - 1)/2
    const double bracket = lambda_minus_bracket(x) + 0.5 * relu_exp(x);
    f.dq2_asymptotic = 2.0 * p.Gamma * p.kT() / (p.m * p.alpha) * r * r * bracket;
    f.dp2_asymptotic = 4.0 * p.Gamma * p.m * p.kT() / p.alpha * relu_exp(x);
    return f;
}

void to_json(nlohmann::json& j, const InnerParams& ip) {
    j = {{"alphaTilde", ip.alphaTilde},
         {"betaMax", ip.betaMax},
         {"alpha", ip.alpha},
         {"outside_layer", ip.outside_layer}};
}

}  // namespace qbm
