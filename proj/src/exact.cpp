#include "qbm/exact.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qbm/errors.hpp"

namespace qbm {

namespace {

constexpr cplx I1(0.0, 1.0);

// exp(s) - 1 without cancellation for small |s|.
cplx expm1c(cplx s) {
    const double x = s.real();
    const double y = s.imag();
    const double sh = std::sin(0.5 * y);
    return {std::expm1(x) * std::cos(y) - 2.0 * sh * sh, std::exp(x) * std::sin(y)};
}

cplx pow_int(cplx z, int n) {
    cplx r(1.0, 0.0);
    for (int k = 0; k < n; ++k) r *= z;
    return r;
}

}  // namespace

ResponseFunction::ResponseFunction(const PhysParams& p) {
    const double G = p.Gamma;
    const double al = p.alpha;
    if (!(al > 2.0 * G)) throw InvalidRegime("alpha must exceed 2 Gamma");
    const double om2 = al * p.omega * p.omega / (al - 2.0 * G) - G * G;
    if (!(om2 > 0.0)) throw InvalidRegime("Omega^2 = alpha omega^2/(alpha - 2 Gamma) - Gamma^2 <= 0");
    Omega_ = std::sqrt(om2);
    const double den = (al - 3.0 * G) * (al - 3.0 * G) + om2;
    const double c1 = 2.0 * G / den;
    const double c2 = -2.0 * G / den;
    const double c3 = ((al - 2.0 * G) * (al - 2.0 * G) + om2 - G * G) / (Omega_ * den);
    z_ = {cplx(2.0 * G - al, 0.0), cplx(-G, Omega_), cplx(-G, -Omega_)};
    a_ = {cplx(c1, 0.0), 0.5 * c2 + c3 / (2.0 * I1), 0.5 * c2 - c3 / (2.0 * I1)};
}

double ResponseFunction::operator()(double t, int n) const {
    cplx s(0.0, 0.0);
    for (int k = 0; k < 3; ++k) s += a_[k] * pow_int(z_[k], n) * std::exp(z_[k] * t);
    return s.real();
}

cplx ResponseFunction::transform(double w, double t, int n) const {
    cplx s(0.0, 0.0);
    for (int k = 0; k < 3; ++k) {
        const cplx rate = z_[k] + I1 * w;
        const cplx st = rate * t;
        cplx ratio;
        if (std::abs(st) < 1e-3)
            ratio = t * (1.0 + st * (0.5 + st * (1.0 / 6.0 + st / 24.0)));
        else
            ratio = expm1c(st) / rate;
        s += a_[k] * pow_int(z_[k], n) * ratio;
    }
    return s;
}

void ResponseFunction::transform_parts(double w, double t, int n, cplx& P, cplx& Q) const {
    P = Q = cplx(0.0, 0.0);
    for (int k = 0; k < 3; ++k) {
        const cplx rate = z_[k] + I1 * w;
        const cplx amp = a_[k] * pow_int(z_[k], n) / rate;
        P += amp * std::exp(z_[k] * t);
        Q += amp;
    }
}

TrajectoryCoeffs trajectory(const PhysParams& p, double t, bool require_R) {
    if (t < 0.0) throw ConfigError("trajectory requires t >= 0");
    const ResponseFunction resp(p);
    TrajectoryCoeffs c;
    c.t = t;
    c.Omega = resp.Omega();
    if (t == 0.0) return c;
    c.A = resp(t, 0);
    c.Adot = resp(t, 1);
    c.Addot = resp(t, 2);
    const double rad = c.Adot * c.Adot - c.A * c.Addot;
    if (rad > 0.0) {
        c.R = std::sqrt(rad);
    } else {
        c.R_positive = false;
        c.R = std::nan("");
        if (require_R) throw RNotPositive("Adot^2 - A Addot <= 0 at t = " + std::to_string(t));
    }
    return c;
}

NoiseDiagonal diagonalize_noise(double a, double b, double c) {
    NoiseDiagonal out;
    const double d = c - a;
    const double r = std::hypot(d, b);
    const double tr = c + a;
    out.lamPlus = 0.5 * (tr + r);
    const double det = a * c - 0.25 * b * b;
    out.lamMinus = out.lamPlus > 0.0 ? det / out.lamPlus : 0.5 * (tr - r);
    if (r == 0.0) {
        out.S << 1.0, 1.0, 1.0, -1.0;
        out.S *= std::numbers::sqrt2 / 2.0;
        return out;
    }
    Vec2 v1, v2;
    if (d >= 0.0) {
        v1 = Vec2(b, d + r);
        if (b < 0.0) v1 = -v1;
        v2 = b == 0.0 ? Vec2(1.0, 0.0) : Vec2(1.0, -b / (d + r)) * (b > 0.0 ? 1.0 : -1.0);
    } else {
        v1 = Vec2(1.0, b / (r - d));
        v2 = Vec2(b, d - r);
    }
    out.S.col(0) = v1.normalized();
    out.S.col(1) = v2.normalized();
    return out;
}

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

struct NoiseIntegrand {
    const ResponseFunction& resp;
    double t;
    double prefactor;  // (hbar/2)(2/pi) kappa alpha^2 (2kT/hbar)
    double alpha2;
    double x_scale;  // hbar / 2kT
    NoiseKernel kernel;
    double A_t;

    double weight(double w) const {
        double xc = 1.0;
        if (kernel == NoiseKernel::Exact) {
            const double x = x_scale * w;
            xc = x < 1e-4 ? 1.0 + x * x / 3.0 : x / std::tanh(x);
        }
        return prefactor * xc / (alpha2 + w * w);
    }

    // which: 0 -> X, 1 -> Y, 2 -> Xdot
    double body(double w, int which) const {
        const double wt = weight(w);
        if (which == 1) return wt * std::norm(resp.transform(w, t, 1));
        const cplx F = resp.transform(w, t, 0);
        if (which == 0) return wt * std::norm(F);
        return wt * 2.0 * (std::conj(F) * std::exp(I1 * (w * t)) * A_t).real();
    }

    // Tail pieces: integrand = smooth(w) + Re(exp(i w t) osc(w)).
    double smooth(double w, int which) const {
        cplx P, Q;
        resp.transform_parts(w, t, which == 1 ? 1 : 0, P, Q);
        if (which == 2) return weight(w) * 2.0 * A_t * P.real();
        return weight(w) * (std::norm(P) + std::norm(Q));
    }
    cplx osc(double w, int which) const {
        cplx P, Q;
        resp.transform_parts(w, t, which == 1 ? 1 : 0, P, Q);
        if (which == 2) return weight(w) * (-2.0 * A_t) * std::conj(Q);
        return weight(w) * (-2.0) * P * std::conj(Q);
    }
};

double integrate_noise(const NoiseIntegrand& g, int which, double W, double rel_tol) {
    const double t = g.t;
    const double alpha = std::sqrt(g.alpha2);
    const double width = std::min(2.0 * std::numbers::pi / t, 0.5 * alpha);
    const int panels = std::max(1, static_cast<int>(std::ceil(W / width)));
    const double h = W / panels;
    auto f = [&](double w) { return g.body(w, which); };
    // A single-rule pass fixes the absolute accuracy target shared by all panels.
    std::vector<double> value(panels), error(panels), l1(panels);
    double l1_total = 0.0;
    for (int k = 0; k < panels; ++k) {
        value[k] = GK::integrate(f, k * h, (k + 1) * h, 0, rel_tol, &error[k], &l1[k]);
        l1_total += l1[k];
    }
    const double target = rel_tol * l1_total / panels;
    double total = 0.0, err_total = 0.0;
    for (int k = 0; k < panels; ++k) {
        if (error[k] > target) {
            const double tol = target / std::max(l1[k], 1e-300);
            value[k] = GK::integrate(f, k * h, (k + 1) * h, 10, tol, &error[k], &l1[k]);
        }
        total += value[k];
        err_total += error[k];
    }
    // Mapped non-oscillatory tail, w = W/u.
    double err = 0.0, tail_l1 = 0.0;
    auto tail = [&](double u) {
        if (u <= 0.0) return 0.0;
        const double w = W / u;
        return g.smooth(w, which) * W / (u * u);
    };
    total += GK::integrate(tail, 0.0, 1.0, 10, rel_tol, &err, &tail_l1);
    err_total += err;
    l1_total += tail_l1;
    // Oscillatory tail by repeated integration by parts.
    const double dh = 1e-3 * W;
    const cplx g0 = g.osc(W, which);
    const cplx gp = g.osc(W + dh, which);
    const cplx gm = g.osc(W - dh, which);
    const cplx d1 = (gp - gm) / (2.0 * dh);
    const cplx d2 = (gp - 2.0 * g0 + gm) / (dh * dh);
    const cplx it = I1 * t;
    total += (std::exp(I1 * (W * t)) * (-g0 / it + d1 / (it * it) - d2 / (it * it * it))).real();
    if (!std::isfinite(total) || err_total > 1e3 * rel_tol * l1_total + 1e-300)
        throw QuadratureFailure("noise integral did not converge (error " +
                                std::to_string(err_total) + ", L1 " + std::to_string(l1_total) +
                                ")");
    return total;
}

}  // namespace

NoiseMoments noise_moments(const PhysParams& p, double t, const NoiseOptions& opt) {
    if (t < 0.0) throw ConfigError("noise_moments requires t >= 0");
    NoiseMoments n;
    n.t = t;
    if (t > 0.0) {
        const ResponseFunction resp(p);
        const double kappa = p.kappa_eff();
        NoiseIntegrand g{resp,
                         t,
                         0.5 * p.hbar * (2.0 / std::numbers::pi) * kappa * p.alpha * p.alpha *
                             (2.0 * p.kT() / p.hbar),
                         p.alpha * p.alpha,
                         p.hbar / (2.0 * p.kT()),
                         opt.kernel,
                         resp(t, 0)};
        const double W = opt.omega_max > 0.0 ? opt.omega_max : 20.0 * std::max(p.alpha, 1.0 / t);
        n.X = integrate_noise(g, 0, W, opt.rel_tol);
        n.Y = integrate_noise(g, 1, W, opt.rel_tol);
        n.Xdot = integrate_noise(g, 2, W, opt.rel_tol);
    }
    n.a = p.omega * n.X / p.hbar;
    n.b = n.Xdot / p.hbar;
    n.c = n.Y / (p.hbar * p.omega);
    const NoiseDiagonal diag = diagonalize_noise(n.a, n.b, n.c);
    n.lamPlus = diag.lamPlus;
    n.lamMinus = diag.lamMinus;
    n.S = diag.S;
    return n;
}

GaussianChannel exact_channel(const PhysParams& p, double t, const NoiseOptions& opt) {
    const TrajectoryCoeffs tr = trajectory(p, t, false);
    const NoiseMoments nm = noise_moments(p, t, opt);
    GaussianChannel ch;
    ch.trans << tr.Adot, tr.A / p.m, p.m * tr.Addot, tr.Adot;
    ch.noise << nm.X / p.m, 0.5 * nm.Xdot, 0.5 * nm.Xdot, p.m * nm.Y;
    ch.cp_certified = nm.lamPlus >= 0.0 && nm.lamMinus >= 0.0;
    return ch;
}

Mat2 metaplectic_matrix(const Mat2& S, const PhysParams& p) {
    const double mw = p.m * p.omega;
    Mat2 P;
    P << S(0, 1), S(1, 1) / mw, mw * S(0, 0), S(1, 0);
    return P;
}

GaussianChannel smearing_channel(double u, double v, double xi, const PhysParams& p) {
    GaussianChannel ch;
    const Vec2 w(-v, u);
    ch.noise = 2.0 * p.hbar * p.hbar * xi * w * w.transpose();
    ch.cp_certified = xi >= 0.0;
    return ch;
}

std::vector<GaussianChannel> factorized_channel(const PhysParams& p, double t,
                                                const NoiseOptions& opt) {
    const TrajectoryCoeffs tr = trajectory(p, t, true);
    const NoiseMoments nm = noise_moments(p, t, opt);
    const Mat2& S = nm.S;
    const double mw = p.m * p.omega;
    const double R2 = tr.R * tr.R;

    Mat2 Tex;
    Tex << tr.Adot, tr.A / p.m, p.m * tr.Addot, tr.Adot;
    const Mat2 PS = metaplectic_matrix(S, p);

    GaussianChannel m_tilde;
    m_tilde.trans = PS * Tex / tr.R;
    m_tilde.cp_certified = true;

    GaussianChannel n_op;
    n_op.trans = PS.inverse();
    n_op.cp_certified = true;

    const GaussianChannel q_noise = smearing_channel(
        S(0, 1), S(1, 1) / mw, mw * std::max(nm.lamPlus, 0.0) / (2.0 * p.hbar * R2), p);
    const GaussianChannel p_noise = smearing_channel(
        mw * S(0, 0), S(1, 0), std::max(nm.lamMinus, 0.0) / (2.0 * mw * p.hbar * R2), p);

    GaussianChannel dilation;
    dilation.trans = tr.R * Mat2::Identity();
    dilation.cp_certified = std::abs(R2 - 1.0) < 1e-15;

    return {m_tilde, n_op, q_noise, p_noise, dilation};
}

GaussianChannel compose_sequence(const std::vector<GaussianChannel>& factors) {
    GaussianChannel total = GaussianChannel::identity();
    for (const auto& f : factors) total = compose(f, total);
    return total;
}

void to_json(nlohmann::json& j, const TrajectoryCoeffs& c) {
    j = {{"t", c.t},         {"A", c.A},   {"Adot", c.Adot},
         {"Addot", c.Addot}, {"Omega", c.Omega}, {"R", c.R_positive ? nlohmann::json(c.R) : nlohmann::json()},
         {"R_positive", c.R_positive}};
}

void to_json(nlohmann::json& j, const NoiseMoments& n) {
    j = {{"t", n.t},   {"X", n.X},   {"Y", n.Y},     {"Xdot", n.Xdot},
         {"a", n.a},   {"b", n.b},   {"c", n.c},     {"lamPlus", n.lamPlus},
         {"lamMinus", n.lamMinus},
         {"S", {n.S(0, 0), n.S(0, 1), n.S(1, 0), n.S(1, 1)}}};
}

}  // namespace qbm
