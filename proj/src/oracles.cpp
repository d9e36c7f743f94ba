#include "qbm/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "qbm/errors.hpp"
#include "qbm/inner.hpp"

namespace qbm {

namespace {

constexpr cplx I1(0.0, 1.0);

void gauss_hermite(int n, Eigen::VectorXd& x, Eigen::VectorXd& w) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(0.5 * k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    x = es.eigenvalues();
    w = std::sqrt(std::numbers::pi) * es.eigenvectors().row(0).transpose().array().square();
}

// sum_k w_k/sqrt(pi) cos(2 sqrt(xi) x_k (l_j - l_l))
Eigen::MatrixXd mixture_kernel(const Eigen::VectorXd& lam, double xi, int n) {
    Eigen::VectorXd x, w;
    gauss_hermite(n, x, w);
    const int D = lam.size();
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(D, D);
    for (int k = 0; k < n; ++k) {
        const double u = 2.0 * std::sqrt(xi) * x(k);
        const double wk = w(k) / std::sqrt(std::numbers::pi);
        for (int l = 0; l < D; ++l)
            for (int j = 0; j < D; ++j) K(j, l) += wk * std::cos(u * (lam(j) - lam(l)));
    }
    return K;
}

SpMat selection(int dim, int n) {
    SpMat S(dim * dim, n * n);
    std::vector<Eigen::Triplet<cplx>> t;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) t.emplace_back(i + j * dim, i + j * n, 1.0);
    S.setFromTriplets(t.begin(), t.end());
    return S;
}

double sparse_frobenius(const SpMat& m) {
    double s = 0.0;
    for (int k = 0; k < m.outerSize(); ++k)
        for (SpMat::InnerIterator it(m, k); it; ++it) s += std::norm(it.value());
    return std::sqrt(s);
}

GaussianChannel propagator_channel(const PhysParams& p, FockPropagator kind, double t,
                                   double dt) {
    switch (kind) {
        case FockPropagator::Bare:
            return outer_channel(p, t, false);
        case FockPropagator::Gao:
            return outer_channel(p, t, true);
        case FockPropagator::Patched:
            return patched_channel(p, dt, t).channel;
    }
    return GaussianChannel::identity();
}

FockDensity apply_generators(const PhysParams& p, const ChannelGenerators& g,
                             const FockDensity& rho, double max_top) {
    FockDensity r = evolve_fock(build_superop(p, g.unitary, rho.space), rho, 1.0, max_top).rho;
    for (const QuadGenerator& n : g.noise)
        r = evolve_fock(build_superop(p, n, rho.space), r, 1.0, max_top).rho;
    return r;
}

}  // namespace

void to_json(nlohmann::json& j, const OracleReport& r) {
    j = {{"check_name", r.check_name},
         {"params", r.params},
         {"dimension", r.dimension},
         {"residual", r.residual},
         {"tolerance", r.tolerance},
         {"pass", r.pass}};
    if (!r.details.empty()) j["details"] = r.details;
}

Identity14Result verify_identity_14(const PhysParams& p, double u, double v, double xi,
                                    const FockDensity& rho) {
    if (!(xi > 0.0)) throw ConfigError("identity check needs xi > 0");
    const int d = rho.space.dim;
    const FockSuperop sop = build_superop(p, gen::smearing(u, v, xi), rho.space);
    const CMatX direct = unvec(expmv(sop.mat, vec(rho.mat), 1.0), d);

    FockSpace big = rho.space;
    big.dim = 2 * d + 40;
    CMatX B = u * big.q() + v * big.p();
    B = 0.5 * (B + B.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMatX> es(B);
    const CMatX& W = es.eigenvectors();
    CMatX padded = CMatX::Zero(big.dim, big.dim);
    padded.topLeftCorner(d, d) = rho.mat;
    const CMatX tilde = W.adjoint() * padded * W;

    const auto mixture = [&](int n) {
        const Eigen::MatrixXd K = mixture_kernel(es.eigenvalues(), xi, n);
        const CMatX out = W * tilde.cwiseProduct(K.cast<cplx>()) * W.adjoint();
        return CMatX(out.topLeftCorner(d, d));
    };
    const CMatX quad = mixture(100);
    const CMatX quad2 = mixture(140);

    Identity14Result r;
    r.quad_error = (quad - quad2).norm();
    if (r.quad_error > 1e-10)
        throw QuadratureFailure("Gauss-Hermite mixture not converged: " + std::to_string(r.quad_error));
    const int n = rho.space.interior();
    r.residual = (direct.topLeftCorner(n, n) - quad2.topLeftCorner(n, n)).norm();
    FockDensity q;
    q.space = rho.space;
    q.mat = quad2;
    r.min_eig_quadrature = q.min_eigenvalue();
    return r;
}

Relation16Result verify_relation_16(const PhysParams& p, double tau, int dim) {
    if (std::abs(2.0 * p.hbar * tau) > 0.2) throw TruncationUnreliable("relation check needs |2 hbar tau| <= 0.2");
    const FockSpace fs = FockSpace::standard(p, dim);
    const double sq = std::sqrt(p.hbar / (2.0 * p.m * p.omega));
    const double sp = std::sqrt(p.hbar * p.m * p.omega / 2.0);
    const GaussianState in = GaussianState::squeezed(p, 2.0, 0.4, Vec2(0.8 * sq, -0.5 * sp));
    const FockDensity rho = fock_from_gaussian(in, fs, p);
    const FockSuperop sop = build_superop(p, (I1 * tau) * gen::G4(), fs);
    const FockEvolution ev = evolve_fock(sop, rho, 1.0);
    const GaussianState m0 = fock_moments(rho);
    const GaussianState m1 = fock_moments(ev.rho);

    Relation16Result r;
    r.trace_error = std::abs(ev.rho.mat.trace() - 1.0);
    const double k = std::exp(-2.0 * p.hbar * tau);
    r.scale_found = m1.mean(0) / m0.mean(0);
    if (tau != 0.0)
        r.sign = std::abs(r.scale_found - k) <= std::abs(r.scale_found - 1.0 / k) ? -1 : 1;
    const Vec2 mean_err = (m1.mean - k * m0.mean).cwiseQuotient(m0.mean);
    const Mat2 cov_pred = k * k * m0.cov.matrix();
    r.residual = std::max(mean_err.cwiseAbs().maxCoeff(),
                          (m1.cov.matrix() - cov_pred).norm() / cov_pred.norm());
    return r;
}

AlgebraResult verify_algebra_table(const PhysParams& p, int dim, int corrupt_entry,
                                   double corrupt_scale) {
    const FockSpace fs = FockSpace::standard(p, dim);
    const cplx g = gen::gamma_coef(p);
    const cplx ab = gen::a_coef(p) * gen::b_coef(p);
    const cplx k = 4.0 * p.hbar * I1;
    const QuadGenerator el[5] = {gen::L_H(p), gen::G1(p), gen::G2(p), gen::G3(), gen::G4()};
    const char* names[5] = {"L_H", "G1", "G2", "G3", "G4"};
    const QuadGenerator zero{};
    // claimed [X_i, X_j], i < j
    const QuadGenerator claims[10] = {
        (k * g) * el[2],                    // L_H, G1
        k * (g * el[1] - ab * el[3]),       // L_H, G2
        k * el[2],                          // L_H, G3
        zero,                               // L_H, G4
        zero,                               // G1, G2
        zero,                               // G1, G3
        -k * el[1],                         // G1, G4
        zero,                               // G2, G3
        -k * el[2],                         // G2, G4
        -k * el[3],                         // G3, G4
    };
    std::vector<SpMat> ops;
    for (const QuadGenerator& e : el) ops.push_back(build_superop(p, e, fs).mat);
    const int n = fs.interior();
    const SpMat S = selection(dim, n);
    const SpMat St = S.transpose();

    AlgebraResult res;
    int idx = 0;
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j, ++idx) {
            QuadGenerator claim = claims[idx];
            const bool is_zero = idx == 3 || idx == 4 || idx == 5 || idx == 7;
            if (idx == corrupt_entry)
                claim = is_zero ? cplx(corrupt_scale - 1.0) * el[0] : cplx(corrupt_scale) * claim;
            const SpMat c = build_superop(p, claim, fs).mat;
            const SpMat comm = SpMat(ops[i] * ops[j]) - SpMat(ops[j] * ops[i]);
            const SpMat diff = St * SpMat(comm - c) * S;
            const SpMat ref = St * c * S;
            const double nr = sparse_frobenius(ref);
            AlgebraEntry e;
            e.name = std::string("[") + names[i] + "," + names[j] + "]";
            e.claimed_zero = is_zero;
            e.residual = is_zero && nr == 0.0 ? sparse_frobenius(diff) : sparse_frobenius(diff) / nr;
            res.max_residual = std::max(res.max_residual, e.residual);
            res.entries.push_back(e);
        }
    return res;
}

ViolationCertificate evaluate_violation(const PhysParams& p, int dim, FockPropagator kind,
                                        double squeeze, double t, const ViolationSearch& box) {
    ViolationCertificate c;
    c.squeeze = squeeze;
    c.t = t;
    const GaussianState in = GaussianState::squeezed(p, squeeze, 0.0);
    const GaussianChannel ch = propagator_channel(p, kind, t, box.dt);
    const GaussianState out = apply_channel(ch, in);
    c.gaussian_deficit = physicality_deficit(out, p);
    const Mat2 sum = in.cov.matrix() + out.cov.matrix();
    const FockSpace fs = FockSpace::adapted(sum, p, dim);
    try {
        FockDensity rho = fock_from_gaussian(in, fs, p);
        if (kind == FockPropagator::Patched) {
            const double first = std::min(t, box.dt);
            if (first > 0.0) rho = apply_generators(p, channel_generators(inner_channel(p, first), p), rho, box.max_top);
            if (t > box.dt)
                rho = evolve_fock(build_superop(p, gen::conventional(p, false), fs), rho, t - box.dt, box.max_top).rho;
            c.min_eig = rho.min_eigenvalue();
        } else {
            const FockSuperop sop = build_superop(p, gen::conventional(p, kind == FockPropagator::Gao), fs);
            c.min_eig = evolve_fock(sop, rho, t, box.max_top).min_eig;
        }
        c.evaluated = 1;
    } catch (const TruncationUnreliable&) {
        c.min_eig = std::numeric_limits<double>::quiet_NaN();
        c.skipped = 1;
    }
    return c;
}

ViolationCertificate demo_violation(const PhysParams& p, int dim, FockPropagator kind,
                                    const ViolationSearch& box) {
    if (dim < 4) throw DimensionTooSmall("Fock dimension must be >= 4");
    const double ls0 = std::log(box.squeeze_min), ls1 = std::log(box.squeeze_max);
    const double lt0 = std::log(box.t_min / p.omega), lt1 = std::log(box.t_max / p.omega);
    ViolationCertificate best;
    best.min_eig = std::numeric_limits<double>::infinity();
    int evaluated = 0, skipped = 0;
    const auto visit = [&](double ls, double lt) {
        ls = std::clamp(ls, ls0, ls1);
        lt = std::clamp(lt, lt0, lt1);
        const ViolationCertificate c = evaluate_violation(p, dim, kind, std::exp(ls), std::exp(lt), box);
        evaluated += c.evaluated;
        skipped += c.skipped;
        if (c.evaluated && c.min_eig < best.min_eig) best = c;
    };
    const int ns = std::max(box.n_squeeze, 2), nt = std::max(box.n_t, 2);
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < nt; ++j)
            visit(ls0 + (ls1 - ls0) * i / (ns - 1), lt0 + (lt1 - lt0) * j / (nt - 1));
    double hs = (ls1 - ls0) / (ns - 1), ht = (lt1 - lt0) / (nt - 1);
    for (int r = 0; r < box.refine && std::isfinite(best.min_eig); ++r) {
        hs *= 0.5;
        ht *= 0.5;
        const double cs = std::log(best.squeeze), ct = std::log(best.t);
        for (int a = -1; a <= 1; ++a)
            for (int b = -1; b <= 1; ++b)
                if (a || b) visit(cs + a * hs, ct + b * ht);
    }
    best.evaluated = evaluated;
    best.skipped = skipped;
    if (!(best.min_eig < -box.threshold)) {
        std::ostringstream os;
        os << "squeeze in [" << box.squeeze_min << ", " << box.squeeze_max << "], omega t in ["
           << box.t_min << ", " << box.t_max << "], " << evaluated << " points evaluated, "
           << skipped << " skipped, lowest eigenvalue " << best.min_eig;
        throw NoViolationFound(os.str());
    }
    return best;
}

double wei_norman_fock_residual(const PhysParams& p, double t1, double t2, int dim,
                                NoisePairing pairing, MiddleReading middle,
                                Eq26Prefactor reading, int guard) {
    const int D = dim + std::max(guard, 0);
    const int n = static_cast<int>(0.8 * dim);
    const FockSpace fs = FockSpace::standard(p, D);
    const WeiNormanFactors w = wei_norman_factors(p, t1, t2, LambdaSource::Full, reading);
    const WeiNormanGenerators g = wei_norman_generators(p, w, t2, pairing, middle);
    const auto op = [&](const QuadGenerator& q) { return build_superop(p, q, fs).mat; };
    CMatX in = CMatX::Zero(D * D, n * n);
    std::vector<int> rows;
    for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) {
            in(a + b * D, a + b * n) = 1.0;
            rows.push_back(a + b * D);
        }
    const CMatX left = expmv(op(g.outer), expmv(op(g.q_noise + g.p_noise), in, 1.0), t2);
    const CMatX right =
        expmv(op(g.hamiltonian), expmv(op(g.middle), expmv(op(g.rank_one), in, 1.0), 1.0), t2);
    const CMatX L = left(rows, Eigen::all);
    const CMatX R = right(rows, Eigen::all);
    return (R - L).norm() / L.norm();
}

MomentFlowCheck verify_moment_flow(const PhysParams& p, int dim, int n_states, std::uint64_t seed,
                                   bool gao, const std::vector<double>& tGrid) {
    const FockSpace fs = FockSpace::standard(p, dim);
    const FockSuperop L = build_superop(p, gen::conventional(p, gao), fs);
    const MomentFlow f = outer_flow(p, gao);
    const CMatX q = fs.q(), pm = fs.p();
    const auto tr = [](const CMatX& a) { return a.trace().real(); };
    std::mt19937_64 rng(seed);
    StateSampler sampler;
    sampler.max_squeeze = 3.0;
    sampler.mean_sigma = 0.5;
    MomentFlowCheck out;
    for (int k = 0; k < n_states; ++k) {
        const GaussianState s = sampler(rng, p);
        const FockDensity rho = fock_from_gaussian(s, fs, p);
        const CMatX dr = unvec(L.mat * vec(rho.mat), dim);
        const Vec2 dm(tr(q * dr), tr(pm * dr));
        Mat2 dS;
        dS(0, 0) = tr(q * q * dr) - 2.0 * s.mean(0) * dm(0);
        dS(1, 1) = tr(pm * pm * dr) - 2.0 * s.mean(1) * dm(1);
        dS(0, 1) = dS(1, 0) = 0.5 * tr((q * pm + pm * q) * dr) - s.mean(0) * dm(1) - s.mean(1) * dm(0);
        const Mat2 S = s.cov.matrix();
        const Mat2 want = f.drift * S + S * f.drift.transpose() + f.diffusion;
        out.derivative = std::max({out.derivative, (dm - f.drift * s.mean).norm(), (dS - want).norm()});
        ++out.states;
    }
    const GaussianState s = GaussianState::squeezed(p, 2.0, 0.4, Vec2(0.5, -0.3));
    const FockDensity rho = fock_from_gaussian(s, fs, p);
    for (double t : tGrid) {
        const GaussianState got = fock_moments(evolve_fock(L, rho, t).rho);
        const GaussianState want = apply_channel(outer_channel(p, t, gao), s);
        out.evolution = std::max({out.evolution, (got.mean - want.mean).norm(),
                                  (got.cov.matrix() - want.cov.matrix()).norm()});
    }
    return out;
}

ReservoirModel build_reservoir(const PhysParams& p, int N, const BathOptions& opt,
                               const GaussianState& s0) {
    if (N < 2) throw ConfigError("bath needs at least 2 modes");
    const double al = p.alpha;
    const double wmax = opt.omega_max_factor * al;
    Eigen::VectorXd edges(N + 1);
    switch (opt.grid) {
        case BathGrid::EqualWeight: {
            const double th = std::atan(wmax / al);
            for (int k = 0; k <= N; ++k) edges(k) = al * std::tan(th * k / N);
            break;
        }
        case BathGrid::Linear:
            for (int k = 0; k <= N; ++k) edges(k) = wmax * k / N;
            break;
        case BathGrid::Log: {
            const double lo = 1e-3 * al;
            edges(0) = 0.0;
            for (int k = 1; k <= N; ++k) edges(k) = lo * std::pow(wmax / lo, double(k - 1) / (N - 1));
            break;
        }
    }
    ReservoirModel m;
    m.nModes = N;
    m.omega_max = wmax;
    m.scheme = opt.grid == BathGrid::EqualWeight ? "equal-weight" : opt.grid == BathGrid::Linear ? "linear" : "log";
    m.freqs.resize(N);
    m.couplings.resize(N);
    m.masses = Eigen::VectorXd::Constant(N, p.m);
    const double kap = p.kappa_eff();
    double shift = 0.0;
    for (int n = 0; n < N; ++n) {
        const double w = 0.5 * (edges(n) + edges(n + 1));
        // int over the bin of m kappa alpha^2/(alpha^2 + w^2)
        const double bin = p.m * kap * al * (std::atan(edges(n + 1) / al) - std::atan(edges(n) / al));
        const double e2 = 2.0 / std::numbers::pi * p.m * w * w * bin;
        m.freqs(n) = w;
        m.couplings(n) = std::sqrt(e2);
        shift += e2 / (p.m * m.masses(n) * w * w);
    }
    m.omega0_sq = p.omega * p.omega + (opt.counterterm ? shift : 0.0);
    if (!opt.counterterm && p.omega * p.omega <= shift)
        throw InvalidRegime("bare potential is not positive definite without the counterterm");

    const int M = N + 1;
    m.totalCov = Eigen::MatrixXd::Zero(2 * M, 2 * M);
    m.totalMean = Eigen::VectorXd::Zero(2 * M);
    m.totalCov(0, 0) = s0.cov.qq;
    m.totalCov(M, M) = s0.cov.pp;
    m.totalCov(0, M) = m.totalCov(M, 0) = s0.cov.qp;
    m.totalMean(0) = s0.mean(0);
    m.totalMean(M) = s0.mean(1);
    for (int n = 0; n < N; ++n) {
        const double w = m.freqs(n), mn = m.masses(n);
        const double c = 1.0 / std::tanh(p.hbar * w / (2.0 * p.kT()));
        m.totalCov(n + 1, n + 1) = p.hbar * c / (2.0 * mn * w);
        m.totalCov(M + n + 1, M + n + 1) = p.hbar * mn * w * c / 2.0;
    }
    return m;
}

namespace {

// Normal modes of the mass-weighted potential: x = M^{-1/2} q.
struct NormalModes {
    Eigen::MatrixXd U;
    Eigen::VectorXd Om;
    Eigen::VectorXd sqrt_mass;
};

NormalModes normal_modes(const ReservoirModel& m, const PhysParams& p) {
    const int M = m.nModes + 1;
    Eigen::VectorXd mass(M);
    mass(0) = p.m;
    mass.tail(m.nModes) = m.masses;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(M, M);
    K(0, 0) = p.m * m.omega0_sq;
    for (int n = 0; n < m.nModes; ++n) {
        K(n + 1, n + 1) = m.masses(n) * m.freqs(n) * m.freqs(n);
        K(0, n + 1) = K(n + 1, 0) = m.couplings(n);
    }
    const Eigen::VectorXd is = mass.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd Kw = is.asDiagonal() * K * is.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Kw);
    if (es.eigenvalues()(0) <= 0.0) throw InvalidRegime("total potential is not positive definite");
    return {es.eigenvectors(), es.eigenvalues().cwiseSqrt(), mass.cwiseSqrt()};
}

}  // namespace

std::vector<GaussianState> microscopic_simulate(const PhysParams& p, int N,
                                                const BathOptions& opt, const GaussianState& s0,
                                                const std::vector<double>& tGrid) {
    const ReservoirModel m = build_reservoir(p, N, opt, s0);
    Eigen::VectorXd w = m.freqs;
    std::sort(w.data(), w.data() + w.size());
    double dmin = std::numeric_limits<double>::infinity();
    for (int n = 1; n < w.size(); ++n) dmin = std::min(dmin, w(n) - w(n - 1));
    double tmax = 0.0;
    for (double t : tGrid) tmax = std::max(tmax, t);
    if (tmax >= 2.0 * std::numbers::pi / dmin)
        throw RecurrenceHorizonExceeded("t = " + std::to_string(tmax) + " beyond recurrence horizon " +
                                        std::to_string(2.0 * std::numbers::pi / dmin));

    const NormalModes nm = normal_modes(m, p);
    const int M = N + 1;
    const Eigen::VectorXd u0 = nm.U.row(0).transpose();
    const double s_sys = nm.sqrt_mass(0);
    std::vector<GaussianState> out;
    for (double t : tGrid) {
        const Eigen::ArrayXd c = (nm.Om.array() * t).cos();
        const Eigen::ArrayXd s = (nm.Om.array() * t).sin();
        // q0(t) = sum_j aq_j q_j + ap_j p_j,  p0(t) = sum_j bq_j q_j + bp_j p_j
        const Eigen::VectorXd rq = nm.U * (c * u0.array()).matrix();
        const Eigen::VectorXd rso = nm.U * (s * u0.array() / nm.Om.array()).matrix();
        const Eigen::VectorXd rsw = nm.U * (s * u0.array() * nm.Om.array()).matrix();
        Eigen::VectorXd aq(M), ap(M), bq(M), bp(M);
        for (int j = 0; j < M; ++j) {
            const double sj = nm.sqrt_mass(j);
            aq(j) = rq(j) * sj / s_sys;
            ap(j) = rso(j) / (s_sys * sj);
            bq(j) = -rsw(j) * s_sys * sj;
            bp(j) = rq(j) * s_sys / sj;
        }
        Eigen::VectorXd rowq(2 * M), rowp(2 * M);
        rowq << aq, ap;
        rowp << bq, bp;
        GaussianState g;
        g.mean << rowq.dot(m.totalMean), rowp.dot(m.totalMean);
        g.cov.qq = rowq.dot(m.totalCov * rowq);
        g.cov.pp = rowp.dot(m.totalCov * rowp);
        g.cov.qp = rowq.dot(m.totalCov * rowp);
        out.push_back(g);
    }
    return out;
}

Eigen::MatrixXd total_covariance(const ReservoirModel& m, const PhysParams& p, double t) {
    const NormalModes nm = normal_modes(m, p);
    const int M = m.nModes + 1;
    const Eigen::ArrayXd c = (nm.Om.array() * t).cos();
    const Eigen::ArrayXd s = (nm.Om.array() * t).sin();
    const Eigen::MatrixXd& U = nm.U;
    const auto sm = nm.sqrt_mass.asDiagonal();
    const auto ism = nm.sqrt_mass.cwiseInverse().asDiagonal();
    const Eigen::MatrixXd C = U * c.matrix().asDiagonal() * U.transpose();
    const Eigen::MatrixXd SO = U * (s / nm.Om.array()).matrix().asDiagonal() * U.transpose();
    const Eigen::MatrixXd SW = U * (s * nm.Om.array()).matrix().asDiagonal() * U.transpose();
    Eigen::MatrixXd Phi(2 * M, 2 * M);
    Phi.topLeftCorner(M, M) = ism * C * sm;
    Phi.topRightCorner(M, M) = ism * SO * ism;
    Phi.bottomLeftCorner(M, M) = -(sm * SW * sm);
    Phi.bottomRightCorner(M, M) = sm * C * ism;
    return Phi * m.totalCov * Phi.transpose();
}

}  // namespace qbm
