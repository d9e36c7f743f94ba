#include "qbm/outer.hpp"

#include <cmath>
#include <limits>

#include <unsupported/Eigen/MatrixFunctions>

#include "qbm/errors.hpp"

namespace qbm {

namespace {

constexpr cplx I1(0.0, 1.0);

using CMat4 = Eigen::Matrix<cplx, 4, 4>;

double rel_imag(const CMat2& m) {
    const double scale = m.cwiseAbs().maxCoeff();
    return scale == 0.0 ? 0.0 : m.imag().cwiseAbs().maxCoeff() / scale;
}

double rel_frobenius(const Mat2& a, const Mat2& b) {
    const double s = std::max(a.norm(), b.norm());
    return s == 0.0 ? 0.0 : (a - b).norm() / s;
}

void require_not_critical(const PhysParams& p) {
    if (std::abs(p.omega - p.Gamma) <= 1e-12 * p.omega)
        throw InvalidRegime("omega = Gamma is excluded");
}

}  // namespace

QuadGenerator& QuadGenerator::operator+=(const QuadGenerator& o) {
    cqq += o.cqq;
    cpp += o.cpp;
    csym += o.csym;
    qq += o.qq;
    pp += o.pp;
    qp += o.qp;
    pq += o.pq;
    return *this;
}

QuadGenerator operator*(cplx s, QuadGenerator g) {
    g.cqq *= s;
    g.cpp *= s;
    g.csym *= s;
    g.qq *= s;
    g.pp *= s;
    g.qp *= s;
    g.pq *= s;
    return g;
}

namespace gen {

cplx a_coef(const PhysParams& p) { return p.m * p.omega * p.omega / (2.0 * p.hbar * I1); }
cplx b_coef(const PhysParams& p) { return 1.0 / (2.0 * p.m * p.hbar * I1); }
cplx gamma_coef(const PhysParams& p) { return p.Gamma * I1 / (2.0 * p.hbar); }

QuadGenerator L_H(const PhysParams& p) {
    QuadGenerator g;
    g.cqq = a_coef(p);
    g.cpp = b_coef(p);
    g.csym = -gamma_coef(p);
    return g;
}

QuadGenerator G1(const PhysParams& p) {
    QuadGenerator g;
    g.qq = a_coef(p);
    g.pp = b_coef(p);
    return g;
}

QuadGenerator G2(const PhysParams& p) {
    QuadGenerator g;
    g.qq = a_coef(p);
    g.pp = -b_coef(p);
    return g;
}

QuadGenerator G3() {
    QuadGenerator g;
    g.qp = 1.0;
    g.pq = 1.0;
    return g;
}

QuadGenerator G4() {
    QuadGenerator g;
    g.qp = 1.0;
    g.pq = -1.0;
    return g;
}

QuadGenerator hamiltonian(const PhysParams& p) {
    QuadGenerator g;
    g.cqq = a_coef(p);
    g.cpp = b_coef(p);
    return g;
}

QuadGenerator conventional(const PhysParams& p, bool gao) {
    const cplx gm = gamma_coef(p);
    const double w2 = p.omega * p.omega;
    QuadGenerator g = L_H(p) + gm * (G4() - (4.0 * p.kT() / w2) * (G1(p) + G2(p)));
    if (gao) g.pp -= p.Gamma / (8.0 * p.m * p.kT());
    return g;
}

QuadGenerator dissipator(const GeneratorCoeffs& c) {
    QuadGenerator g;
    g.qq = -c.A;
    g.pp = -c.B;
    g.qp = -c.C;
    g.pq = -c.D;
    return g;
}

QuadGenerator smearing(double u, double v, double xi) {
    // {B,.,B} with B = u q + v p expands bilinearly; the mixed terms pair up.
    QuadGenerator g;
    g.qq = -xi * u * u;
    g.pp = -xi * v * v;
    g.qp = -xi * u * v;
    g.pq = -xi * u * v;
    return g;
}

GeneratorCoeffs coeffs_of(const QuadGenerator& g) { return {-g.qq, -g.pp, -g.qp, -g.pq}; }

}  // namespace gen

ComplexFlow flow_of(const QuadGenerator& g, const PhysParams& p) {
    const double h = p.hbar;
    const double h2 = h * h;
    ComplexFlow f;
    f.drift(1, 0) += -2.0 * I1 * h * g.cqq;
    f.drift(0, 1) += 2.0 * I1 * h * g.cpp;
    f.drift(0, 0) += 2.0 * I1 * h * g.csym;
    f.drift(1, 1) += -2.0 * I1 * h * g.csym;
    f.diffusion(1, 1) += -2.0 * h2 * g.qq;
    f.diffusion(0, 0) += -2.0 * h2 * g.pp;
    const cplx shift = I1 * h * (g.qp - g.pq);
    f.drift(0, 0) += shift;
    f.drift(1, 1) += shift;
    f.diffusion(0, 1) += h2 * (g.qp + g.pq);
    f.diffusion(1, 0) += h2 * (g.qp + g.pq);
    return f;
}

MomentFlow real_flow(const ComplexFlow& f, double tol) {
    const double im = std::max(rel_imag(f.drift), rel_imag(f.diffusion));
    if (im > tol) throw NonRealCriterion("moment flow has imaginary part " + std::to_string(im));
    return {f.drift.real(), f.diffusion.real()};
}

MomentFlow outer_flow(const PhysParams& p, bool gao) {
    return real_flow(flow_of(gen::conventional(p, gao), p));
}

MomentFlow coefficient_flow(const GeneratorCoeffs& c, const PhysParams& p) {
    return real_flow(flow_of(gen::hamiltonian(p) + gen::dissipator(c), p), 1e-9);
}

ComplexChannel flow_channel(const ComplexFlow& f, double t) {
    if (t < 0.0) throw ConfigError("flow time must be >= 0");
    CMat4 M = CMat4::Zero();
    M.topLeftCorner<2, 2>() = -f.drift * t;
    M.topRightCorner<2, 2>() = f.diffusion * t;
    M.bottomRightCorner<2, 2>() = f.drift.transpose() * t;
    const CMat4 E = M.exp();
    ComplexChannel ch;
    const CMat2 G22 = E.bottomRightCorner<2, 2>();
    ch.trans = G22.transpose();
    ch.noise = G22.transpose() * E.topRightCorner<2, 2>();
    ch.noise = 0.5 * (ch.noise + ch.noise.transpose()).eval();
    return ch;
}

GaussianChannel flow_channel(const MomentFlow& f, double t) {
    ComplexFlow c;
    c.drift = f.drift.cast<cplx>();
    c.diffusion = f.diffusion.cast<cplx>();
    GaussianChannel ch = real_channel(flow_channel(c, t));
    ch.cp_certified = false;
    return ch;
}

ComplexChannel compose(const ComplexChannel& outer, const ComplexChannel& inner) {
    ComplexChannel c;
    c.trans = outer.trans * inner.trans;
    c.noise = outer.trans * inner.noise * outer.trans.transpose() + outer.noise;
    return c;
}

GaussianChannel real_channel(const ComplexChannel& c, double tol) {
    const double im = std::max(rel_imag(c.trans), rel_imag(c.noise));
    if (im > tol) throw NonRealCriterion("channel has imaginary part " + std::to_string(im));
    GaussianChannel g;
    g.trans = c.trans.real();
    g.noise = c.noise.real();
    return g;
}

GaussianChannel outer_channel(const PhysParams& p, double t, bool gao) {
    if (t < 0.0) throw ConfigError("outer_channel requires t >= 0");
    if (t == 0.0) return GaussianChannel::identity();
    GaussianChannel ch = flow_channel(outer_flow(p, gao), t);
    ch.cp_certified = gao && lindblad_representable(caldeira_leggett_coeffs(p, true));
    return ch;
}

void wei_norman_cde(const PhysParams& p, double t, Eq26Prefactor reading, cplx& C, cplx& D,
                    cplx& E) {
    require_not_critical(p);
    const double h = p.hbar;
    const cplx gm = gen::gamma_coef(p);
    const cplx ab = gen::a_coef(p) * gen::b_coef(p);
    const cplx u = std::sqrt(gm * gm - ab);
    cplx pre;
    switch (reading) {
        case Eq26Prefactor::NoiseCoefficient:
            pre = -4.0 * p.kT() * gm / (p.omega * p.omega);
            break;
        case Eq26Prefactor::Unity:
            pre = 1.0;
            break;
        case Eq26Prefactor::Cutoff:
            pre = p.alpha;
            break;
    }
    const cplx mu = 4.0 * h * I1 * gm * t;
    const cplx x = 4.0 * h * t * u;
    const cplx den = 4.0 * h * u * u;
    const cplx lead = pre * std::exp(-mu) / den;
    C = lead * u * std::sin(x);
    D = lead * I1 * ab * (1.0 - std::cos(x));
    E = lead / (I1 * gm) * (ab * (1.0 - std::exp(mu)) + gm * gm * (std::exp(mu) - std::cos(x)));
}

WeiNormanFactors wei_norman_from(const PhysParams& p, double lamPlus, double lamMinus,
                                 const Mat2& S, double t2, Eq26Prefactor reading) {
    if (t2 < 0.0) throw ConfigError("Wei-Norman times must be >= 0");
    WeiNormanFactors w;
    w.lamPlus = lamPlus;
    w.lamMinus = lamMinus;
    w.S = S;
    const double K = S(0, 0) * S(0, 0) * lamMinus + S(0, 1) * S(0, 1) * lamPlus;
    if (K == 0.0) throw DivisionByZero("S11^2 lambda- + S12^2 lambda+ = 0");
    w.lam = lamPlus * lamMinus / K;
    w.s1 = -(S(0, 0) * S(1, 0) * lamMinus + S(0, 1) * S(1, 1) * lamPlus) / (2.0 * p.hbar);
    w.gamma = gen::gamma_coef(p);
    w.aCoef = gen::a_coef(p);
    w.bCoef = gen::b_coef(p);
    w.s2 = -(p.m * p.omega / (4.0 * p.hbar * w.aCoef)) * K;
    wei_norman_cde(p, t2, reading, w.Cc, w.Dd, w.Ee);
    return w;
}

WeiNormanFactors wei_norman_factors(const PhysParams& p, double t1, double t2, LambdaSource src,
                                    Eq26Prefactor reading, const NoiseOptions& opt) {
    if (t1 < 0.0 || t2 < 0.0) throw ConfigError("Wei-Norman times must be >= 0");
    WeiNormanFactors w;
    if (src == LambdaSource::Full) {
        const NoiseMoments nm = noise_moments(p, t1, opt);
        w = wei_norman_from(p, nm.lamPlus, nm.lamMinus, nm.S, t2, reading);
    } else {
        const InnerLambdas l = inner_lambdas(p, InnerParams::at(p, t1));
        w = wei_norman_from(p, l.lamPlus, l.lamMinus, inner_S_normalized(p.omega, t1), t2, reading);
    }
    w.source = src;
    return w;
}

WeiNormanGenerators wei_norman_generators(const PhysParams& p, const WeiNormanFactors& w,
                                          double t2, NoisePairing pairing, MiddleReading middle) {
    const double mw = p.m * p.omega;
    const double h = p.hbar;
    const Mat2& S = w.S;
    WeiNormanGenerators g;
    g.outer = gen::conventional(p, false);
    const double lq = pairing == NoisePairing::LambdaPlusOnQ ? w.lamPlus : w.lamMinus;
    const double lp = pairing == NoisePairing::LambdaPlusOnQ ? w.lamMinus : w.lamPlus;
    g.q_noise = gen::smearing(S(0, 1), S(1, 1) / mw, mw * lq / (2.0 * h));
    g.p_noise = gen::smearing(mw * S(0, 0), S(1, 0), lp / (2.0 * h * mw));
    g.hamiltonian = gen::L_H(p);

    const cplx mu = 4.0 * h * I1 * w.gamma * t2;
    const cplx phi = std::abs(mu) < 1e-300 ? cplx(1.0) : mu / (1.0 - std::exp(-mu));
    QuadGenerator K;
    K.qq = w.aCoef * (w.Ee + w.Cc);
    K.pp = w.bCoef * (w.Ee - w.Cc - I1 * w.lam / p.omega);
    K = K + w.Dd * gen::G3();
    const QuadGenerator mixed =
        middle == MiddleReading::Resolved ? w.gamma * t2 * gen::G4() : -w.gamma * t2 * gen::G3();
    g.middle = mixed + phi * K;

    const double r = std::sqrt(std::abs(2.0 * w.aCoef * w.s2));
    g.rank_one = r == 0.0 ? QuadGenerator{} : gen::smearing(r, -w.s1 / r, 1.0);
    return g;
}

IdentityResidual wei_norman_gaussian_residual(const PhysParams& p, const WeiNormanGenerators& g,
                                              double t2) {
    const auto ch = [&](const QuadGenerator& q, double t) { return flow_channel(flow_of(q, p), t); };
    const ComplexChannel left =
        compose(ch(g.outer, t2), compose(ch(g.q_noise, 1.0), ch(g.p_noise, 1.0)));
    const ComplexChannel right =
        compose(ch(g.hamiltonian, t2), compose(ch(g.middle, 1.0), ch(g.rank_one, 1.0)));
    const GaussianChannel l = real_channel(left, 1e-8);
    const GaussianChannel r = real_channel(right, 1e-8);
    return {rel_frobenius(l.trans, r.trans), rel_frobenius(l.noise, r.noise)};
}

Condition27 condition_27(const PhysParams& p, double t1, double t2, LambdaSource src, double tol,
                         const NoiseOptions& opt) {
    const WeiNormanFactors w = wei_norman_factors(p, t1, t2, src, Eq26Prefactor::NoiseCoefficient, opt);
    const double h = p.hbar;
    const cplx mu = 4.0 * h * I1 * w.gamma * t2;
    const cplx left = (std::exp(-mu) - 1.0) / (4.0 * h * I1) + w.Dd;
    const cplx ab = w.aCoef * w.bCoef;
    const cplx rhs = ab * (w.Ee + w.Cc) * (w.Ee - w.Cc - I1 * w.lam / p.omega);
    const cplx rhs2 = ab * (w.Ee + w.Cc) * (w.Ee - w.Cc - 2.0 * I1 * w.lam / p.omega);
    Condition27 c;
    const double scale = std::max({std::abs(rhs), std::abs(rhs2), std::norm(left),
                                   std::numeric_limits<double>::min()});
    c.imag_residual = std::max(std::abs(rhs.imag()), std::abs(rhs2.imag())) / scale;
    if (c.imag_residual > tol)
        throw NonRealCriterion("right side imaginary residual " + std::to_string(c.imag_residual));
    c.lhs = std::norm(left);
    c.rhs = rhs.real();
    c.rhs_printed = rhs2.real();
    c.holds = c.rhs >= c.lhs;
    c.holds_as_printed = c.rhs_printed >= c.lhs;
    return c;
}

double condition_28_lhs(const PhysParams& p, double lam) {
    const double th = p.reduced_temperature();
    return 4.5 * th * th * (4.0 * th * th - 1.0) * lam * lam;
}

bool condition_28(const PhysParams& p, double t1, LambdaSource src, const NoiseOptions& opt) {
    if (t1 == 0.0) return false;
    return condition_28_lhs(p, wei_norman_factors(p, t1, 0.0, src, Eq26Prefactor::NoiseCoefficient, opt).lam) > 1.0;
}

double minimal_patch_time(const PhysParams& p, LambdaSource src, double alpha_tilde_max,
                          const NoiseOptions& opt) {
    const int n = 80;
    const double lo = 1e-2;
    double prev = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double at = lo * std::pow(alpha_tilde_max / lo, double(k) / n);
        const double t = at / p.alpha;
        if (condition_28(p, t, src, opt)) {
            double a = prev, b = t;
            while (b - a > 1e-6 * b) {
                const double m = 0.5 * (a + b);
                (condition_28(p, m, src, opt) ? b : a) = m;
            }
            return b;
        }
        prev = t;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

PatchedChannel patched_channel(const PhysParams& p, double dt, double t, bool gao,
                               LambdaSource src) {
    require_not_critical(p);
    if (dt < 0.0 || t < 0.0) throw ConfigError("patched_channel requires t, dt >= 0");
    PatchedChannel pc;
    pc.underdamped = p.omega > p.Gamma;
    pc.condition28 = dt > 0.0 && condition_28(p, dt, src);
    if (t < dt) {
        pc.inner_only = true;
        pc.channel = inner_channel(p, t);
    } else {
        pc.channel = compose(outer_channel(p, t - dt, gao), inner_channel(p, dt));
    }
    pc.cp_certified = pc.underdamped && is_completely_positive(pc.channel, p, 1e-12);
    pc.channel.cp_certified = pc.cp_certified;
    return pc;
}

void to_json(nlohmann::json& j, const WeiNormanFactors& w) {
    const auto c = [](cplx z) { return nlohmann::json::array({z.real(), z.imag()}); };
    j = {{"lam", w.lam},
         {"s1", w.s1},
         {"s2", c(w.s2)},
         {"C", c(w.Cc)},
         {"D", c(w.Dd)},
         {"E", c(w.Ee)},
         {"gamma", c(w.gamma)},
         {"a", c(w.aCoef)},
         {"b", c(w.bCoef)},
         {"lamPlus", w.lamPlus},
         {"lamMinus", w.lamMinus},
         {"lambda_source", w.source == LambdaSource::Full ? "full" : "inner"}};
}

void to_json(nlohmann::json& j, const Condition27& c) {
    j = {{"holds", c.holds},
         {"holds_as_printed", c.holds_as_printed},
         {"lhs", c.lhs},
         {"rhs", c.rhs},
         {"rhs_printed", c.rhs_printed},
         {"imag_residual", c.imag_residual}};
}

}  // namespace qbm
