#pragma once

// Outer limit: the conventional generator exp(tL) at the level of moments,
// its Wei-Norman factorization and the patched inner/outer propagator.

#include "qbm/exact.hpp"
#include "qbm/inner.hpp"
#include "qbm/phase_space.hpp"

namespace qbm {

/// d mean/dt = F mean, d Sigma/dt = F Sigma + Sigma F^t + D.
struct MomentFlow {
    Mat2 drift = Mat2::Zero();
    Mat2 diffusion = Mat2::Zero();
};

struct ComplexFlow {
    CMat2 drift = CMat2::Zero();
    CMat2 diffusion = CMat2::Zero();
};

/// Quadratic superoperator
///   cqq [q^2,.] + cpp [p^2,.] + csym [qp+pq,.]
///   + qq {q,.,q} + pp {p,.,p} + qp {q,.,p} + pq {p,.,q}
/// with {A,r,B} = B A^+ r + r B A^+ - 2 A^+ r B.
struct QuadGenerator {
    cplx cqq{}, cpp{}, csym{};
    cplx qq{}, pp{}, qp{}, pq{};

    QuadGenerator& operator+=(const QuadGenerator& o);
    friend QuadGenerator operator+(QuadGenerator a, const QuadGenerator& b) { return a += b; }
    friend QuadGenerator operator-(QuadGenerator a, const QuadGenerator& b) { return a += (-1.0) * b; }
    friend QuadGenerator operator*(cplx s, QuadGenerator g);
};

/// The generators named in the closed algebra, and their ingredients.
namespace gen {
cplx a_coef(const PhysParams& p);      ///< m omega^2 / (2 hbar i)
cplx b_coef(const PhysParams& p);      ///< 1 / (2 m hbar i)
cplx gamma_coef(const PhysParams& p);  ///< Gamma i / (2 hbar)
QuadGenerator L_H(const PhysParams& p);
QuadGenerator G1(const PhysParams& p);
QuadGenerator G2(const PhysParams& p);
QuadGenerator G3();
QuadGenerator G4();
/// [H,.]/(i hbar) with H = p^2/2m + m omega^2 q^2/2.
QuadGenerator hamiltonian(const PhysParams& p);
/// L = L_H + gamma (G4 - 4kT/omega^2 (G1 + G2)), optionally with -Gamma {p,.,p}/(8 m kT).
QuadGenerator conventional(const PhysParams& p, bool gao);
/// -(A{q,.,q} + B{p,.,p} + C{q,.,p} + D{p,.,q})
QuadGenerator dissipator(const GeneratorCoeffs& c);
/// -xi {B,.,B} for Hermitian B = u q + v p.
QuadGenerator smearing(double u, double v, double xi);
/// Reads back (A, B, C, D) of the double-bracket part.
GeneratorCoeffs coeffs_of(const QuadGenerator& g);
}  // namespace gen

ComplexFlow flow_of(const QuadGenerator& g, const PhysParams& p);
/// Throws NonRealCriterion when imaginary parts exceed tol (relative).
MomentFlow real_flow(const ComplexFlow& f, double tol = 1e-12);

MomentFlow outer_flow(const PhysParams& p, bool gao);
/// Oscillator Hamiltonian plus the dissipator with the given coefficients.
MomentFlow coefficient_flow(const GeneratorCoeffs& c, const PhysParams& p);

struct ComplexChannel {
    CMat2 trans = CMat2::Identity();
    CMat2 noise = CMat2::Zero();
};

/// Exact flow map by the Van Loan block exponential; valid for complex and
/// defective drifts alike.
ComplexChannel flow_channel(const ComplexFlow& f, double t);
GaussianChannel flow_channel(const MomentFlow& f, double t);
ComplexChannel compose(const ComplexChannel& outer, const ComplexChannel& inner);
GaussianChannel real_channel(const ComplexChannel& c, double tol = 1e-10);

GaussianChannel outer_channel(const PhysParams& p, double t, bool gao);

enum class LambdaSource { Full, Inner };
/// Which of the two printed noise pairings multiplies {Q,.,Q}.
enum class NoisePairing { LambdaPlusOnQ, LambdaMinusOnQ };
/// Candidate readings of the printed C, D, E prefactor.
enum class Eq26Prefactor { NoiseCoefficient, Unity, Cutoff };
/// Mixed-bracket part of the middle Wei-Norman factor.
enum class MiddleReading { Resolved, AsPrinted };

struct WeiNormanFactors {
    double lam = 0.0;
    double s1 = 0.0;
    cplx s2{};
    cplx Cc{}, Dd{}, Ee{};
    cplx gamma{}, aCoef{}, bCoef{};
    double lamPlus = 0.0;
    double lamMinus = 0.0;
    Mat2 S = Mat2::Identity();
    LambdaSource source = LambdaSource::Full;
};

/// C(t), D(t), E(t) in closed form. Throws InvalidRegime at omega = Gamma.
void wei_norman_cde(const PhysParams& p, double t, Eq26Prefactor reading, cplx& C, cplx& D,
                    cplx& E);

/// Throws DivisionByZero if S11^2 lambda- + S12^2 lambda+ = 0.
WeiNormanFactors wei_norman_factors(const PhysParams& p, double t1, double t2,
                                    LambdaSource src = LambdaSource::Full,
                                    Eq26Prefactor reading = Eq26Prefactor::NoiseCoefficient,
                                    const NoiseOptions& opt = {});

/// Same from given lambda+-, S.
WeiNormanFactors wei_norman_from(const PhysParams& p, double lamPlus, double lamMinus,
                                 const Mat2& S, double t2,
                                 Eq26Prefactor reading = Eq26Prefactor::NoiseCoefficient);

/// Generators of both sides of the factorization
///   exp(t2 L) exp(noise) exp(noise) = exp(t2 L_H) exp(middle) exp(rank_one).
struct WeiNormanGenerators {
    QuadGenerator outer;
    QuadGenerator q_noise;
    QuadGenerator p_noise;
    QuadGenerator hamiltonian;
    QuadGenerator middle;
    QuadGenerator rank_one;
};

WeiNormanGenerators wei_norman_generators(const PhysParams& p, const WeiNormanFactors& w,
                                          double t2,
                                          NoisePairing pairing = NoisePairing::LambdaPlusOnQ,
                                          MiddleReading middle = MiddleReading::Resolved);

struct IdentityResidual {
    double trans = 0.0;  ///< relative Frobenius
    double noise = 0.0;
    double max() const { return std::max(trans, noise); }
};

/// Moment-level check of the factorization (t2 factors exponentiated exactly).
IdentityResidual wei_norman_gaussian_residual(const PhysParams& p, const WeiNormanGenerators& g,
                                              double t2);

struct Condition27 {
    bool holds = false;
    bool holds_as_printed = false;  ///< with 2 i lambda / omega
    double lhs = 0.0;
    double rhs = 0.0;
    double rhs_printed = 0.0;
    double imag_residual = 0.0;
};

/// Throws NonRealCriterion if the right-hand side is not real to tol.
Condition27 condition_27(const PhysParams& p, double t1, double t2,
                         LambdaSource src = LambdaSource::Full, double tol = 1e-9,
                         const NoiseOptions& opt = {});

double condition_28_lhs(const PhysParams& p, double lam);
bool condition_28(const PhysParams& p, double t1, LambdaSource src = LambdaSource::Full,
                  const NoiseOptions& opt = {});

/// Smallest t1 (to relative 1e-6) at which condition_28 holds, searched on
/// alpha t1 in (0, alpha_tilde_max]; NaN if none.
double minimal_patch_time(const PhysParams& p, LambdaSource src = LambdaSource::Full,
                          double alpha_tilde_max = 200.0, const NoiseOptions& opt = {});

struct PatchedChannel {
    GaussianChannel channel;
    bool inner_only = false;
    bool condition28 = false;
    bool underdamped = false;
    bool cp_certified = false;
};

/// Outer propagation for t - dt after the inner propagator; inner_channel(t)
/// alone for t < dt. Throws InvalidRegime at omega = Gamma.
PatchedChannel patched_channel(const PhysParams& p, double dt, double t, bool gao = false,
                               LambdaSource src = LambdaSource::Full);

void to_json(nlohmann::json& j, const WeiNormanFactors& w);
void to_json(nlohmann::json& j, const Condition27& c);

}  // namespace qbm
