#pragma once

// Truncated Fock-space representation of density operators and of the
// quadratic superoperators, used as a brute-force oracle.

#include <Eigen/Sparse>

#include "qbm/outer.hpp"
#include "qbm/phase_space.hpp"

namespace qbm {

using CMatX = Eigen::MatrixXcd;
using CVecX = Eigen::VectorXcd;
using SpMat = Eigen::SparseMatrix<cplx>;

/// Number basis of ladder quadratures X = (a + a^+)/sqrt2, P = (a - a^+)/(i sqrt2),
/// mapped to the physical coordinates by q = f00 X + f01 P, p = f10 X + f11 P
/// with det f = hbar.
struct FockSpace {
    int dim = 40;
    Mat2 frame = Mat2::Identity();

    /// Oscillator eigenbasis of H0.
    static FockSpace standard(const PhysParams& p, int dim);
    /// Basis whose vacuum has covariance proportional to `cov`.
    static FockSpace adapted(const Mat2& cov, const PhysParams& p, int dim);

    CMatX q() const;
    CMatX p() const;
    /// Levels [0, interior()) are free of truncation effects for the checks.
    int interior() const { return static_cast<int>(0.8 * dim); }
};

struct FockDensity {
    FockSpace space;
    CMatX mat;

    /// Population of the top 10% of levels.
    double top_population() const;
    double min_eigenvalue() const;
};

/// Exact Gaussian density (built in an enlarged space, truncated, renormalized).
FockDensity fock_from_gaussian(const GaussianState& s, const FockSpace& fs, const PhysParams& p);
/// Means and covariance from traces against the truncated q, p.
GaussianState fock_moments(const FockDensity& rho);

struct FockSuperop {
    FockSpace space;
    SpMat mat;  ///< acts on column-major vec(rho)
};

/// Throws DimensionTooSmall for dim < 4.
FockSuperop build_superop(const PhysParams& p, const QuadGenerator& g, const FockSpace& fs);

/// Column-major vectorization helpers.
CVecX vec(const CMatX& m);
CMatX unvec(const CVecX& v, int dim);

/// exp(t A) v by norm-scaled Taylor steps.
CVecX expmv(const SpMat& A, const CVecX& v, double t);
/// Column block version.
CMatX expmv(const SpMat& A, const CMatX& v, double t);
/// Dense exp(t A); dim <= 50.
CMatX dense_propagator(const FockSuperop& sop, double t);

struct FockEvolution {
    FockDensity rho;
    double min_eig = 0.0;
};

/// Throws TruncationUnreliable if the top-level population of the input or
/// the result exceeds `max_top`.
FockEvolution evolve_fock(const FockSuperop& sop, const FockDensity& rho0, double t,
                          double max_top = 1e-6);

/// Generators realizing a Gaussian channel with det T = 1 and PSD noise:
/// the noise generators commute and act after the unitary one.
struct ChannelGenerators {
    QuadGenerator unitary;
    std::vector<QuadGenerator> noise;
};
ChannelGenerators channel_generators(const GaussianChannel& ch, const PhysParams& p);

/// Interior block P X P for a superoperator-sized matrix.
CMatX interior_block(const CMatX& m, int dim, int n);
/// ||A - B||_F / ||B||_F on the interior block, absolute when B's block vanishes.
double interior_residual(const CMatX& a, const CMatX& b, int dim);

}  // namespace qbm
