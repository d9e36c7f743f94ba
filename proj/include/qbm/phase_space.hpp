#pragma once

// Gaussian states and affine phase-space channels of a single bosonic mode.

#include <complex>
#include <cstdint>
#include <optional>
#include <random>

#include <Eigen/Dense>
#include <json.hpp>

namespace qbm {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;
using CMat2 = Eigen::Matrix2cd;

/// Physical constants and model parameters of the damped oscillator and its
/// Drude-regularized ohmic reservoir.
struct PhysParams {
    double m = 1.0;
    double omega = 1.0;
    double Gamma = 0.1;
    double alpha = 100.0;
    double T = 10.0;
    double hbar = 1.0;
    double kB = 1.0;
    /// Coupling strength of the spectral function. When unset the value that
    /// makes the reservoir consistent with the closed-form A(t) is used; it
    /// tends to 2*Gamma as alpha grows.
    std::optional<double> kappa;

    double kT() const { return kB * T; }
    double kappa_eff() const;
    /// kT / (hbar omega)
    double reduced_temperature() const { return kT() / (hbar * omega); }
    bool underdamped_positivity_regime() const { return omega > Gamma; }
    /// alpha / omega below 10 is reported; it is not an error.
    bool cutoff_warning() const { return alpha / omega < 10.0; }

    /// Throws ConfigError unless every constant is strictly positive.
    void validate() const;

    /// hbar = m = omega = kB = 1 units, temperature given as kT/(hbar omega).
    static PhysParams dimensionless(double Gamma, double alpha, double kT_over_hbar_omega);
};

/// Symmetric covariance stored as its three independent entries.
struct Covariance {
    double qq = 0.0;
    double pp = 0.0;
    double qp = 0.0;

    Mat2 matrix() const {
        Mat2 s;
        s << qq, qp, qp, pp;
        return s;
    }
    double det() const { return qq * pp - qp * qp; }
    static Covariance from_matrix(const Mat2& s) {
        return {s(0, 0), s(1, 1), 0.5 * (s(0, 1) + s(1, 0))};
    }
};

/// First moments and covariance. Unphysical covariances are valid values.
struct GaussianState {
    Vec2 mean = Vec2::Zero();
    Covariance cov;

    /// Ground state of H0 = p^2/2m + m omega^2 q^2/2.
    static GaussianState vacuum(const PhysParams& p);
    /// Pure state with q-variance divided by `squeeze` and p-variance
    /// multiplied by it, then rotated by `angle` in the scaled phase plane.
    static GaussianState squeezed(const PhysParams& p, double squeeze, double angle = 0.0,
                                  Vec2 mean = Vec2::Zero());
};

/// mean -> T mean, cov -> T cov T^t + N.
struct GaussianChannel {
    Mat2 trans = Mat2::Identity();
    Mat2 noise = Mat2::Zero();
    bool cp_certified = false;

    static GaussianChannel identity() { return {Mat2::Identity(), Mat2::Zero(), true}; }
};

/// Dissipator coefficients of -(A{q,.,q} + B{p,.,p} + C{q,.,p} + D{p,.,q}).
struct GeneratorCoeffs {
    cplx A{0.0, 0.0};
    cplx B{0.0, 0.0};
    cplx C{0.0, 0.0};
    cplx D{0.0, 0.0};
};

struct Tolerances {
    double phys = 1e-10;  ///< positivity deficit
    double alg = 1e-9;    ///< algebraic identities
};

GaussianState apply_channel(const GaussianChannel& ch, const GaussianState& s);
GaussianChannel compose(const GaussianChannel& outer, const GaussianChannel& inner);

/// det(cov) - hbar^2/4; nonnegative iff the state is a density operator.
double physicality_deficit(const GaussianState& s, const PhysParams& p);

/// -k ln Tr rho^2 with Tr rho^2 = hbar / (2 sqrt(det cov)).
/// Throws NonPhysicalState when the deficit is below -tol.
double linear_entropy(const GaussianState& s, const PhysParams& p, double tol = 1e-10);

/// A >= 0, B >= 0, C = conj(D), AB >= |C|^2, all to `tol`.
bool lindblad_representable(const GeneratorCoeffs& c, double tol = 1e-9);

/// Dissipator coefficients of the conventional generator, optionally with the
/// -Gamma {p,.,p}/(8 m kT) term added.
GeneratorCoeffs caldeira_leggett_coeffs(const PhysParams& p, bool gao);

/// Complete-positivity test of a Gaussian channel:
/// N + i (hbar/2) (J - T J T^t) >= -tol.
bool is_completely_positive(const GaussianChannel& ch, const PhysParams& p, double tol = 1e-12);

/// Smallest eigenvalue of the (symmetrized) noise matrix.
double min_noise_eigenvalue(const GaussianChannel& ch);

/// Random Gaussian-state generator used by sweeps and sampling tests.
/// Squeezing s is log-uniform on [1, max_squeeze] (variance ratio), the
/// squeezing axis uniform, the means normal with `mean_sigma` in vacuum units.
struct StateSampler {
    double max_squeeze = 100.0;
    double mean_sigma = 1.0;
    /// Occupation of the thermal core; 0 gives pure states.
    double max_thermal_occupation = 0.0;

    GaussianState operator()(std::mt19937_64& rng, const PhysParams& p) const;
};

/// Uniform double in [0, 1) built directly from generator bits so that
/// sequences are identical across standard-library implementations.
double uniform01(std::mt19937_64& rng);
double standard_normal(std::mt19937_64& rng);

void to_json(nlohmann::json& j, const PhysParams& p);
void from_json(const nlohmann::json& j, PhysParams& p);
void to_json(nlohmann::json& j, const GaussianState& s);
void from_json(const nlohmann::json& j, GaussianState& s);
void to_json(nlohmann::json& j, const GaussianChannel& ch);
void from_json(const nlohmann::json& j, GaussianChannel& ch);

}  // namespace qbm
