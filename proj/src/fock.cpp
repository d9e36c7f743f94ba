#include "qbm/fock.hpp"

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "qbm/errors.hpp"

namespace qbm {

namespace {

constexpr cplx I1(0.0, 1.0);

CMatX annihilation(int d) {
    CMatX a = CMatX::Zero(d, d);
    for (int n = 0; n + 1 < d; ++n) a(n, n + 1) = std::sqrt(double(n + 1));
    return a;
}

SpMat sparse(const CMatX& m) { return m.sparseView(0.0, 0.0); }

SpMat identity(int d) {
    SpMat id(d, d);
    id.setIdentity();
    return id;
}

SpMat comm(const SpMat& x, const SpMat& id) {
    SpMat a = Eigen::kroneckerProduct(id, x);
    SpMat b = Eigen::kroneckerProduct(SpMat(x.transpose()), id);
    return a - b;
}

// {A,.,B} for Hermitian A: BA r + r BA - 2 A r B
SpMat bracket(const SpMat& A, const SpMat& B, const SpMat& id) {
    const SpMat ba = B * A;
    SpMat a = Eigen::kroneckerProduct(id, ba);
    SpMat b = Eigen::kroneckerProduct(SpMat(ba.transpose()), id);
    SpMat c = Eigen::kroneckerProduct(SpMat(B.transpose()), A);
    return a + b - 2.0 * c;
}

double one_norm(const SpMat& A) {
    double best = 0.0;
    for (int k = 0; k < A.outerSize(); ++k) {
        double s = 0.0;
        for (SpMat::InnerIterator it(A, k); it; ++it) s += std::abs(it.value());
        best = std::max(best, s);
    }
    return best;
}

Mat2 sqrt_spd(const Mat2& m) {
    const double s = std::sqrt(m.determinant());
    return (m + s * Mat2::Identity()) / std::sqrt(m.trace() + 2.0 * s);
}

}  // namespace

FockSpace FockSpace::standard(const PhysParams& p, int dim) {
    FockSpace fs;
    fs.dim = dim;
    fs.frame = Mat2::Zero();
    fs.frame(0, 0) = std::sqrt(p.hbar / (p.m * p.omega));
    fs.frame(1, 1) = std::sqrt(p.hbar * p.m * p.omega);
    return fs;
}

FockSpace FockSpace::adapted(const Mat2& cov, const PhysParams& p, int dim) {
    const double det = cov.determinant();
    if (!(det > 0.0)) throw ConfigError("adapted Fock frame needs a positive-definite covariance");
    FockSpace fs;
    fs.dim = dim;
    fs.frame = sqrt_spd(cov) * std::sqrt(p.hbar / std::sqrt(det));
    return fs;
}

CMatX FockSpace::q() const {
    const CMatX a = annihilation(dim);
    const CMatX ad = a.adjoint();
    const CMatX X = (a + ad) / std::sqrt(2.0);
    const CMatX P = (a - ad) / (I1 * std::sqrt(2.0));
    return frame(0, 0) * X + frame(0, 1) * P;
}

CMatX FockSpace::p() const {
    const CMatX a = annihilation(dim);
    const CMatX ad = a.adjoint();
    const CMatX X = (a + ad) / std::sqrt(2.0);
    const CMatX P = (a - ad) / (I1 * std::sqrt(2.0));
    return frame(1, 0) * X + frame(1, 1) * P;
}

double FockDensity::top_population() const {
    const int d = space.dim;
    const int from = d - std::max(1, d / 10);
    double s = 0.0;
    for (int n = from; n < d; ++n) s += std::abs(mat(n, n).real());
    return s;
}

double FockDensity::min_eigenvalue() const {
    const CMatX h = 0.5 * (mat + mat.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatX> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

FockDensity fock_from_gaussian(const GaussianState& s, const FockSpace& fs, const PhysParams& p) {
    const Mat2 finv = fs.frame.inverse();
    const Mat2 cov = finv * s.cov.matrix() * finv.transpose();
    const Vec2 mean = finv * s.mean;
    Eigen::SelfAdjointEigenSolver<Mat2> es(cov);
    const double l1 = es.eigenvalues()(0), l2 = es.eigenvalues()(1);
    const double nu = std::sqrt(l1 * l2);
    if (nu < 0.5 * (1.0 - 1e-12)) throw NonPhysicalState("covariance below the uncertainty bound");
    const double r = 0.25 * std::log(l2 / l1);
    const Vec2 e = es.eigenvectors().col(0);
    const double theta = std::atan2(e(1), e(0));
    const double nbar = std::max(nu - 0.5, 0.0);
    const double x = nbar / (nbar + 1.0);

    const int D = 2 * fs.dim + 60;
    const CMatX a = annihilation(D);
    const CMatX ad = a.adjoint();
    const cplx zeta = std::polar(r, 2.0 * theta);
    const CMatX sq = (0.5 * (std::conj(zeta) * a * a - zeta * ad * ad)).exp();
    const cplx beta = (mean(0) + I1 * mean(1)) / std::sqrt(2.0);
    const CMatX disp = (beta * ad - std::conj(beta) * a).exp();
    CMatX th = CMatX::Zero(D, D);
    double w = 1.0 - x;
    for (int n = 0; n < D; ++n, w *= x) th(n, n) = w;
    const CMatX U = disp * sq;
    const CMatX big = U * th * U.adjoint();

    FockDensity rho;
    rho.space = fs;
    rho.mat = big.topLeftCorner(fs.dim, fs.dim);
    rho.mat = 0.5 * (rho.mat + rho.mat.adjoint()).eval();
    rho.mat /= rho.mat.trace().real();
    (void)p;
    return rho;
}

GaussianState fock_moments(const FockDensity& rho) {
    const CMatX q = rho.space.q();
    const CMatX p = rho.space.p();
    const auto ev = [&](const CMatX& op) { return (op * rho.mat).trace().real(); };
    GaussianState s;
    s.mean << ev(q), ev(p);
    s.cov.qq = ev(q * q) - s.mean(0) * s.mean(0);
    s.cov.pp = ev(p * p) - s.mean(1) * s.mean(1);
    s.cov.qp = 0.5 * ev(q * p + p * q) - s.mean(0) * s.mean(1);
    return s;
}

FockSuperop build_superop(const PhysParams& p, const QuadGenerator& g, const FockSpace& fs) {
    (void)p;
    if (fs.dim < 4) throw DimensionTooSmall("Fock dimension must be >= 4");
    const int d = fs.dim;
    const SpMat id = identity(d);
    const SpMat q = sparse(fs.q());
    const SpMat pm = sparse(fs.p());
    FockSuperop s;
    s.space = fs;
    s.mat.resize(d * d, d * d);
    const auto add = [&](cplx c, const SpMat& term) {
        if (c != cplx(0.0)) s.mat += c * term;
    };
    add(g.cqq, comm(SpMat(q * q), id));
    add(g.cpp, comm(SpMat(pm * pm), id));
    add(g.csym, comm(SpMat(q * pm + pm * q), id));
    add(g.qq, bracket(q, q, id));
    add(g.pp, bracket(pm, pm, id));
    add(g.qp, bracket(q, pm, id));
    add(g.pq, bracket(pm, q, id));
    s.mat.prune(cplx(0.0));
    return s;
}

CVecX vec(const CMatX& m) { return Eigen::Map<const CVecX>(m.data(), m.size()); }

CMatX unvec(const CVecX& v, int dim) { return Eigen::Map<const CMatX>(v.data(), dim, dim); }

CMatX expmv(const SpMat& A, const CMatX& v, double t) {
    const double norm = one_norm(A) * std::abs(t);
    const int steps = std::max(1, static_cast<int>(std::ceil(norm / 4.0)));
    const double h = t / steps;
    CMatX out = v;
    for (int s = 0; s < steps; ++s) {
        CMatX term = out;
        CMatX sum = out;
        for (int k = 1; k < 200; ++k) {
            term = (h / k) * (A * term);
            sum += term;
            if (term.lpNorm<Eigen::Infinity>() <= 1e-17 * sum.lpNorm<Eigen::Infinity>()) break;
        }
        out = sum;
    }
    return out;
}

CVecX expmv(const SpMat& A, const CVecX& v, double t) {
    return expmv(A, CMatX(v), t).col(0);
}

CMatX dense_propagator(const FockSuperop& sop, double t) {
    if (sop.space.dim > 50) throw ConfigError("dense propagators are limited to dimension 50");
    return (t * CMatX(sop.mat)).exp();
}

FockEvolution evolve_fock(const FockSuperop& sop, const FockDensity& rho0, double t,
                          double max_top) {
    const int d = sop.space.dim;
    if (rho0.space.dim != d) throw ConfigError("density and superoperator dimensions differ");
    if (rho0.top_population() > max_top)
        throw TruncationUnreliable("input population in the top levels " +
                                   std::to_string(rho0.top_population()));
    FockEvolution ev;
    ev.rho.space = rho0.space;
    ev.rho.mat = t == 0.0 ? rho0.mat : unvec(expmv(sop.mat, vec(rho0.mat), t), d);
    if (ev.rho.top_population() > max_top)
        throw TruncationUnreliable("evolved population in the top levels " +
                                   std::to_string(ev.rho.top_population()));
    ev.min_eig = ev.rho.min_eigenvalue();
    return ev;
}

ChannelGenerators channel_generators(const GaussianChannel& ch, const PhysParams& p) {
    const Mat2& T = ch.trans;
    if (std::abs(T.determinant() - 1.0) > 1e-9)
        throw ConfigError("channel generators need det T = 1");
    const double tr = T.trace();
    Mat2 F;
    if (std::abs(tr - 2.0) < 1e-14) {
        F = T - Mat2::Identity();
    } else if (tr < 2.0 && tr > -2.0) {
        const double th = std::acos(0.5 * tr);
        F = th / std::sin(th) * (T - std::cos(th) * Mat2::Identity());
    } else if (tr > 2.0) {
        const double th = std::acosh(0.5 * tr);
        F = th / std::sinh(th) * (T - std::cosh(th) * Mat2::Identity());
    } else {
        throw InvalidRegime("symplectic part has no real logarithm");
    }
    ChannelGenerators g;
    const cplx k = 2.0 * I1 * p.hbar;
    g.unitary.cqq = -F(1, 0) / k;
    g.unitary.cpp = F(0, 1) / k;
    g.unitary.csym = 0.5 * (F(0, 0) - F(1, 1)) / k;

    const Mat2 N = 0.5 * (ch.noise + ch.noise.transpose());
    Eigen::SelfAdjointEigenSolver<Mat2> es(N);
    const double scale = std::max(N.norm(), 1e-300);
    for (int i = 0; i < 2; ++i) {
        const double mu = es.eigenvalues()(i);
        if (mu < -1e-12 * scale) throw InvalidRegime("noise matrix is not positive semidefinite");
        if (mu <= 1e-15 * scale) continue;
        const Vec2 e = es.eigenvectors().col(i);
        g.noise.push_back(gen::smearing(e(1), -e(0), mu / (2.0 * p.hbar * p.hbar)));
    }
    return g;
}

CMatX interior_block(const CMatX& m, int dim, int n) {
    std::vector<int> idx;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) idx.push_back(i + j * dim);
    return m(idx, idx);
}

double interior_residual(const CMatX& a, const CMatX& b, int dim) {
    const int n = static_cast<int>(0.8 * dim);
    const CMatX A = interior_block(a, dim, n);
    const CMatX B = interior_block(b, dim, n);
    const double nb = B.norm();
    return nb == 0.0 ? (A - B).norm() : (A - B).norm() / nb;
}

}  // namespace qbm
