#pragma once

// Brute-force checks built on the Fock engine and on a finite harmonic bath.

#include <cstdint>
#include <string>
#include <vector>

#include "qbm/fock.hpp"
#include "qbm/outer.hpp"

namespace qbm {

/// {check_name, params, dimension, residual, tolerance, pass}
struct OracleReport {
    std::string check_name;
    nlohmann::json params = nlohmann::json::object();
    int dimension = 0;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    nlohmann::json details = nlohmann::json::object();
};
void to_json(nlohmann::json& j, const OracleReport& r);

struct Identity14Result {
    double residual = 0.0;        ///< Frobenius norm on the interior block
    double quad_error = 0.0;      ///< change between two node counts
    double min_eig_quadrature = 0.0;
};

/// exp(-xi {B,.,B}) rho with B = u q + v p, by the superoperator exponential
/// and by Gauss-Hermite quadrature over the unitary mixture. Throws
/// QuadratureFailure if the quadrature has not converged to 1e-10.
Identity14Result verify_identity_14(const PhysParams& p, double u, double v, double xi,
                                    const FockDensity& rho);

struct Relation16Result {
    double residual = 0.0;     ///< against moments scaled by exp(-2 hbar tau)
    double scale_found = 1.0;  ///< first-moment scale factor
    int sign = 0;              ///< -1: moments shrink as exp(-2 hbar tau); +1: grow
    double trace_error = 0.0;
};

/// exp[i tau ({q,.,p} - {p,.,q})] on a displaced squeezed state.
/// Requires |2 hbar tau| <= 0.2; throws TruncationUnreliable.
Relation16Result verify_relation_16(const PhysParams& p, double tau, int dim);

struct AlgebraEntry {
    std::string name;
    double residual = 0.0;
    bool claimed_zero = false;
};

struct AlgebraResult {
    std::vector<AlgebraEntry> entries;
    double max_residual = 0.0;
};

/// All ten commutators of {L_H, G1, G2, G3, G4} against the table. A
/// non-negative `corrupt_entry` scales that claimed entry by `corrupt_scale`
/// (or adds L_H when the claim is zero).
AlgebraResult verify_algebra_table(const PhysParams& p, int dim, int corrupt_entry = -1,
                                   double corrupt_scale = 1.01);

enum class FockPropagator { Bare, Gao, Patched };

struct ViolationSearch {
    double squeeze_min = 4.0;
    double squeeze_max = 200.0;
    int n_squeeze = 8;
    double t_min = 1e-3;  ///< in units of 1/omega
    double t_max = 0.1;
    int n_t = 8;
    int refine = 2;
    double threshold = 1e-8;  ///< a violation is min_eig < -threshold
    double dt = 0.0;          ///< patch time for FockPropagator::Patched
    double max_top = 1e-6;
};

struct ViolationCertificate {
    double squeeze = 0.0;
    double t = 0.0;
    double min_eig = 0.0;
    double gaussian_deficit = 0.0;
    int evaluated = 0;
    int skipped = 0;
};

/// One point of the search: q-squeezed vacuum, Fock basis adapted to input
/// and output covariances.
ViolationCertificate evaluate_violation(const PhysParams& p, int dim, FockPropagator kind,
                                        double squeeze, double t, const ViolationSearch& box);

/// Coarse-to-fine search minimizing the Fock minimum eigenvalue. Throws
/// NoViolationFound (with the box) if nothing below -threshold is found.
ViolationCertificate demo_violation(const PhysParams& p, int dim,
                                    FockPropagator kind = FockPropagator::Bare,
                                    const ViolationSearch& box = {});

/// Relative Frobenius residual of the Wei-Norman factorization between Fock
/// propagators on the interior block of dimension `dim`. Each product is
/// composed in a working space with `guard` extra levels.
double wei_norman_fock_residual(const PhysParams& p, double t1, double t2, int dim,
                                NoisePairing pairing = NoisePairing::LambdaPlusOnQ,
                                MiddleReading middle = MiddleReading::Resolved,
                                Eq26Prefactor reading = Eq26Prefactor::NoiseCoefficient,
                                int guard = 15);

struct MomentFlowCheck {
    double derivative = 0.0;  ///< max |Fock t = 0 moment derivative - flow prediction|
    double evolution = 0.0;   ///< max |Fock exp(tL) moments - outer_channel moments|
    int states = 0;
};

/// Cross-check of outer_flow and outer_channel against the Fock generator on
/// seeded random Gaussian states and one squeezed state over `tGrid`.
MomentFlowCheck verify_moment_flow(const PhysParams& p, int dim, int n_states, std::uint64_t seed,
                                   bool gao, const std::vector<double>& tGrid);

enum class BathGrid { EqualWeight, Linear, Log };

struct BathOptions {
    BathGrid grid = BathGrid::EqualWeight;
    double omega_max_factor = 10.0;  ///< grid reaches omega_max_factor * alpha
    bool counterterm = true;
};

struct ReservoirModel {
    int nModes = 0;
    Eigen::VectorXd freqs;
    Eigen::VectorXd couplings;
    Eigen::VectorXd masses;
    double omega0_sq = 0.0;  ///< system frequency squared in H_T
    Eigen::MatrixXd totalCov;  ///< initial 2(N+1) covariance, (q0, q1.., p0, p1..)
    Eigen::VectorXd totalMean;
    std::string scheme;
    double omega_max = 0.0;
};

/// Throws ConfigError for N < 2, InvalidRegime if the bare potential is not
/// positive definite.
ReservoirModel build_reservoir(const PhysParams& p, int N, const BathOptions& opt,
                               const GaussianState& s0);

/// System marginals on tGrid. Throws RecurrenceHorizonExceeded if
/// max t >= 2 pi / (smallest frequency spacing).
std::vector<GaussianState> microscopic_simulate(const PhysParams& p, int N,
                                                const BathOptions& opt, const GaussianState& s0,
                                                const std::vector<double>& tGrid);

/// Full 2(N+1) covariance at time t.
Eigen::MatrixXd total_covariance(const ReservoirModel& model, const PhysParams& p, double t);

}  // namespace qbm
