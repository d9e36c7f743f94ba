#pragma once

// Inner (boundary-layer) limit: alpha -> infinity with alpha t fixed.

#include <vector>

#include "qbm/phase_space.hpp"

namespace qbm {

struct InnerParams {
    double alphaTilde = 0.0;  ///< alpha t
    double betaMax = 0.0;     ///< hbar alpha / kT
    double alpha = 0.0;
    /// omega t > 0.1: the layer formulas are being used outside their range.
    bool outside_layer = false;

    static InnerParams at(const PhysParams& p, double t);
};

struct InnerLambdas {
    double lamPlus = 0.0;
    double lamMinus = 0.0;
};

InnerLambdas inner_lambdas(const PhysParams& p, const InnerParams& ip);

/// exp(-x) + x - 1, accurate for all x >= 0.
double relu_exp(double x);
/// The bracket multiplying (alpha~/alpha)^2 in the lambda- asymptotic.
double lambda_minus_bracket(double x);

/// [[omega t/2, 1], [1, -omega t/2]], orthogonal only to leading order.
Mat2 inner_S(double omega, double t);
/// Column-normalized inner_S; exactly orthogonal with det -1.
Mat2 inner_S_normalized(double omega, double t);

/// Inner-limit second derivative 2 Gamma (exp(-alpha t) - 1).
double inner_Addot(const PhysParams& p, double t);

/// Factors of the inner propagator in application order: the R-normalized
/// linear map M, the metaplectic N, Q-smearing (lambda+), P-smearing (lambda-).
std::vector<GaussianChannel> inner_factors(const PhysParams& p, double dt);

/// Composition of inner_factors; CP-certified.
GaussianChannel inner_channel(const PhysParams& p, double dt);

/// (k/2) ln[(2 lambda+ + 1)(2 lambda- + 1)] with the inner lambdas.
double coherent_entropy(const PhysParams& p, double t);

/// The state J(t)[M^dagger |0><0| M] whose purity coherent_entropy describes.
GaussianState coherent_inner_state(const PhysParams& p, double t);

struct UncertaintyFloors {
    double dq2 = 0.0;
    double dp2 = 0.0;
    double dq2_asymptotic = 0.0;
    double dp2_asymptotic = 0.0;
};

UncertaintyFloors uncertainty_floors(const PhysParams& p, double dt);

void to_json(nlohmann::json& j, const InnerParams& ip);

}  // namespace qbm
