#pragma once

// Exact reduced dynamics of the oscillator coupled to the Drude reservoir.

#include <array>
#include <vector>

#include "qbm/phase_space.hpp"

namespace qbm {

/// Closed-form position response A(t) written as sum_k a_k exp(z_k t).
class ResponseFunction {
public:
    /// Throws InvalidRegime unless alpha > 2 Gamma and Omega^2 > 0.
    explicit ResponseFunction(const PhysParams& p);

    /// n-th time derivative of A at t.
    double operator()(double t, int n = 0) const;
    /// int_0^t exp(i w s) A^(n)(s) ds, in closed form.
    cplx transform(double w, double t, int n = 0) const;
    /// Splits transform(w, t, n) = exp(i w t) P - Q; both pieces are smooth in w.
    void transform_parts(double w, double t, int n, cplx& P, cplx& Q) const;

    double Omega() const { return Omega_; }
    const std::array<cplx, 3>& rates() const { return z_; }
    const std::array<cplx, 3>& amplitudes() const { return a_; }

private:
    std::array<cplx, 3> z_;
    std::array<cplx, 3> a_;
    double Omega_;
};

struct TrajectoryCoeffs {
    double t = 0.0;
    double A = 0.0;
    double Adot = 1.0;
    double Addot = 0.0;
    double Omega = 0.0;
    double R = 1.0;
    bool R_positive = true;
};

/// A, its derivatives and R = sqrt(Adot^2 - A Addot). With `require_R` a
/// nonpositive radicand throws RNotPositive; otherwise R is NaN and
/// R_positive false.
TrajectoryCoeffs trajectory(const PhysParams& p, double t, bool require_R = true);

/// coth kernel of the noise integrals. HighTemperature replaces
/// x coth x by 1, the leading term of the expansion in hbar omega / kT.
enum class NoiseKernel { Exact, HighTemperature };

struct NoiseOptions {
    NoiseKernel kernel = NoiseKernel::Exact;
    double rel_tol = 1e-10;
    /// Upper end of the panel quadrature; 0 selects 20 max(alpha, 1/t).
    double omega_max = 0.0;
};

struct NoiseDiagonal {
    double lamPlus = 0.0;
    double lamMinus = 0.0;
    Mat2 S = Mat2::Identity();
};

struct NoiseMoments {
    double t = 0.0;
    double X = 0.0;
    double Y = 0.0;
    double Xdot = 0.0;
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double lamPlus = 0.0;
    double lamMinus = 0.0;
    Mat2 S = Mat2::Identity();
};

/// Eigen-decomposition of [[a, b/2], [b/2, c]] with the column convention
/// (b, d + r), (b, d - r), d = c - a, r = sqrt(d^2 + b^2), first column
/// negated for b < 0. det S = -1 in every branch; the degenerate point uses
/// S = [[1, 1], [1, -1]]/sqrt(2).
NoiseDiagonal diagonalize_noise(double a, double b, double c);

/// X, Y, Xdot by panel Gauss-Kronrod quadrature over [0, omega_max] plus an
/// asymptotic tail. Throws QuadratureFailure.
NoiseMoments noise_moments(const PhysParams& p, double t, const NoiseOptions& opt = {});

/// mean -> [[Adot, A/m], [m Addot, Adot]] mean, noise [[X/m, Xdot/2], [Xdot/2, m Y]].
GaussianChannel exact_channel(const PhysParams& p, double t, const NoiseOptions& opt = {});

/// Scaled matrix [[S12, S22], [S11, S21]] carried to physical units; det = 1
/// whenever det S = -1.
Mat2 metaplectic_matrix(const Mat2& S, const PhysParams& p);

/// Channel of exp(-xi {B,.,B}) with B = u q + v p.
GaussianChannel smearing_channel(double u, double v, double xi, const PhysParams& p);

/// Five factors in application order: M-tilde, N, Q-noise (lambda+),
/// P-noise (lambda-), dilation by R. Throws RNotPositive.
std::vector<GaussianChannel> factorized_channel(const PhysParams& p, double t,
                                                const NoiseOptions& opt = {});

/// Applies a factor list in order (first element acts first).
GaussianChannel compose_sequence(const std::vector<GaussianChannel>& factors);

void to_json(nlohmann::json& j, const TrajectoryCoeffs& c);
void to_json(nlohmann::json& j, const NoiseMoments& n);

}  // namespace qbm
