#include "qbm/phase_space.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "qbm/errors.hpp"

namespace qbm {

double PhysParams::kappa_eff() const {
    if (kappa) return *kappa;
    // Sum of pairwise products of the roots {2G - alpha, -G +- i Omega} of
    // the response cubic equals kappa*alpha + omega^2.
    const double a2g = alpha - 2.0 * Gamma;
    return 2.0 * Gamma * a2g / alpha + 2.0 * Gamma * omega * omega / (alpha * a2g);
}

void PhysParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw ConfigError(std::string(name) + " must be strictly positive and finite");
    };
    positive(m, "m");
    positive(omega, "omega");
    positive(Gamma, "Gamma");
    positive(alpha, "alpha");
    positive(T, "T");
    positive(hbar, "hbar");
    positive(kB, "kB");
    if (kappa) positive(*kappa, "kappa");
}

PhysParams PhysParams::dimensionless(double Gamma, double alpha, double kT_over_hbar_omega) {
    PhysParams p;
    p.Gamma = Gamma;
    p.alpha = alpha;
    p.T = kT_over_hbar_omega;
    return p;
}

namespace {

Mat2 scale_matrix(const PhysParams& p) {
    Mat2 d = Mat2::Zero();
    d(0, 0) = std::sqrt(p.hbar / (p.m * p.omega));
    d(1, 1) = std::sqrt(p.hbar * p.m * p.omega);
    return d;
}

Mat2 symmetrized(const Mat2& a) { return 0.5 * (a + a.transpose()); }

}  // namespace

GaussianState GaussianState::vacuum(const PhysParams& p) { return squeezed(p, 1.0); }

GaussianState GaussianState::squeezed(const PhysParams& p, double squeeze, double angle,
                                      Vec2 mean) {
    Mat2 rot;
    rot << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    Mat2 diag = Mat2::Zero();
    diag(0, 0) = 0.5 / squeeze;
    diag(1, 1) = 0.5 * squeeze;
    const Mat2 d = scale_matrix(p);
    GaussianState s;
    s.mean = mean;
    s.cov = Covariance::from_matrix(d * rot * diag * rot.transpose() * d);
    return s;
}

GaussianState apply_channel(const GaussianChannel& ch, const GaussianState& s) {
    GaussianState out;
    out.mean = ch.trans * s.mean;
    out.cov = Covariance::from_matrix(
        symmetrized(ch.trans * s.cov.matrix() * ch.trans.transpose() + ch.noise));
    return out;
}

GaussianChannel compose(const GaussianChannel& outer, const GaussianChannel& inner) {
    GaussianChannel out;
    out.trans = outer.trans * inner.trans;
    out.noise = symmetrized(outer.trans * inner.noise * outer.trans.transpose() + outer.noise);
    out.cp_certified = outer.cp_certified && inner.cp_certified;
    return out;
}

double physicality_deficit(const GaussianState& s, const PhysParams& p) {
    return s.cov.det() - 0.25 * p.hbar * p.hbar;
}

double linear_entropy(const GaussianState& s, const PhysParams& p, double tol) {
    const double deficit = physicality_deficit(s, p);
    if (deficit < -tol)
        throw NonPhysicalState("det(cov) below hbar^2/4 by " + std::to_string(-deficit));
    const double det = std::max(s.cov.det(), 0.25 * p.hbar * p.hbar);
    // -ln(hbar / (2 sqrt(det))) = 0.5 ln(4 det / hbar^2)
    return 0.5 * p.kB * std::log(4.0 * det / (p.hbar * p.hbar));
}

bool lindblad_representable(const GeneratorCoeffs& c, double tol) {
    if (std::abs(c.A.imag()) > tol || std::abs(c.B.imag()) > tol) return false;
    if (c.A.real() < -tol || c.B.real() < -tol) return false;
    if (std::abs(c.C - std::conj(c.D)) > tol) return false;
    return c.A.real() * c.B.real() - std::norm(c.C) >= -tol;
}

GeneratorCoeffs caldeira_leggett_coeffs(const PhysParams& p, bool gao) {
    const cplx i(0.0, 1.0);
    GeneratorCoeffs c;
    c.A = 2.0 * p.Gamma * p.m * p.kT() / (p.hbar * p.hbar);
    // (G/2 hbar i){p,.,q} - (G/2 hbar i){q,.,p} = -(C{q,.,p} + D{p,.,q})
    c.C = p.Gamma / (2.0 * p.hbar * i);
    c.D = -p.Gamma / (2.0 * p.hbar * i);
    if (gao) c.B = p.Gamma / (8.0 * p.m * p.kT());
    return c;
}

bool is_completely_positive(const GaussianChannel& ch, const PhysParams& p, double tol) {
    const Mat2 n = symmetrized(ch.noise);
    const double beta = 0.5 * p.hbar * (1.0 - ch.trans.determinant());
    const double mid = 0.5 * (n(0, 0) + n(1, 1));
    const double half_diff = 0.5 * (n(0, 0) - n(1, 1));
    const double rad = std::sqrt(half_diff * half_diff + n(0, 1) * n(0, 1) + beta * beta);
    return mid - rad >= -tol;
}

double min_noise_eigenvalue(const GaussianChannel& ch) {
    const Mat2 n = symmetrized(ch.noise);
    const double mid = 0.5 * (n(0, 0) + n(1, 1));
    const double half_diff = 0.5 * (n(0, 0) - n(1, 1));
    return mid - std::sqrt(half_diff * half_diff + n(0, 1) * n(0, 1));
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double standard_normal(std::mt19937_64& rng) {
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

GaussianState StateSampler::operator()(std::mt19937_64& rng, const PhysParams& p) const {
    const double squeeze = std::exp(uniform01(rng) * std::log(max_squeeze));
    const double angle = uniform01(rng) * std::numbers::pi;
    const double nq = standard_normal(rng);
    const double np = standard_normal(rng);
    const Vec2 mean(mean_sigma * nq * std::sqrt(0.5 * p.hbar / (p.m * p.omega)),
                    mean_sigma * np * std::sqrt(0.5 * p.hbar * p.m * p.omega));
    GaussianState s = GaussianState::squeezed(p, squeeze, angle, mean);
    if (max_thermal_occupation > 0.0) {
        const double factor = 1.0 + 2.0 * max_thermal_occupation * uniform01(rng);
        s.cov.qq *= factor;
        s.cov.pp *= factor;
        s.cov.qp *= factor;
    }
    return s;
}

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed,
                    const char* what) {
    if (!j.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!allowed.contains(key))
            throw ConfigError(std::string("unknown key '") + key + "' in " + what);
}

std::array<double, 4> row_major(const Mat2& a) { return {a(0, 0), a(0, 1), a(1, 0), a(1, 1)}; }

Mat2 from_row_major(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 4) throw ConfigError("expected a row-major 4-array");
    Mat2 a;
    a << j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>();
    return a;
}

}  // namespace

void to_json(nlohmann::json& j, const PhysParams& p) {
    j = {{"m", p.m},     {"omega", p.omega}, {"Gamma", p.Gamma}, {"alpha", p.alpha},
         {"T", p.T},     {"hbar", p.hbar},   {"kB", p.kB}};
    if (p.kappa) j["kappa"] = *p.kappa;
}

void from_json(const nlohmann::json& j, PhysParams& p) {
    reject_unknown(j, {"m", "omega", "Gamma", "alpha", "T", "hbar", "kB", "kappa"}, "params");
    p = PhysParams{};
    if (j.contains("m")) p.m = j["m"].get<double>();
    if (j.contains("omega")) p.omega = j["omega"].get<double>();
    if (j.contains("Gamma")) p.Gamma = j["Gamma"].get<double>();
    if (j.contains("alpha")) p.alpha = j["alpha"].get<double>();
    if (j.contains("T")) p.T = j["T"].get<double>();
    if (j.contains("hbar")) p.hbar = j["hbar"].get<double>();
    if (j.contains("kB")) p.kB = j["kB"].get<double>();
    if (j.contains("kappa") && !j["kappa"].is_null()) p.kappa = j["kappa"].get<double>();
    p.validate();
}

void to_json(nlohmann::json& j, const GaussianState& s) {
    j = {{"mean_q", s.mean(0)},  {"mean_p", s.mean(1)},  {"cov_qq", s.cov.qq},
         {"cov_pp", s.cov.pp},   {"cov_qp", s.cov.qp}};
}

void from_json(const nlohmann::json& j, GaussianState& s) {
    reject_unknown(j, {"mean_q", "mean_p", "cov_qq", "cov_pp", "cov_qp"}, "state");
    s.mean = Vec2(j.value("mean_q", 0.0), j.value("mean_p", 0.0));
    s.cov = {j.at("cov_qq").get<double>(), j.at("cov_pp").get<double>(),
             j.value("cov_qp", 0.0)};
}

void to_json(nlohmann::json& j, const GaussianChannel& ch) {
    j = {{"trans", row_major(ch.trans)},
         {"noise", row_major(symmetrized(ch.noise))},
         {"cp_certified", ch.cp_certified}};
}

void from_json(const nlohmann::json& j, GaussianChannel& ch) {
    reject_unknown(j, {"trans", "noise", "cp_certified"}, "channel");
    ch.trans = from_row_major(j.at("trans"));
    ch.noise = symmetrized(from_row_major(j.at("noise")));
    ch.cp_certified = j.value("cp_certified", false);
}

}  // namespace qbm
