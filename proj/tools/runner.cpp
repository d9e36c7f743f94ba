#include "runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "qbm/errors.hpp"
#include "qbm/exact.hpp"
#include "qbm/inner.hpp"
#include "qbm/oracles.hpp"

namespace qbm::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string provenance(const std::string& op) { return op + "@qbm-" + kVersion; }

nlohmann::json grid(double start, double stop, int n, const char* scale = "linear") {
    return {{"start", start}, {"stop", stop}, {"n", n}, {"scale", scale}};
}

// Subtrees whose contents are checked by their own parsers.
const std::set<std::string> kFree = {
    "/params",          "/state",          "/evolve/time",       "/region_map/kT",
    "/region_map/alpha_tilde", "/region_map/t2", "/entropy_curve/alpha_t", "/sweep/axes",
    "/sweep/t2",        "/verify/wei_norman/points", "/verify/cross_times",
};

void check_keys(const nlohmann::json& doc, const nlohmann::json& defaults, const std::string& path) {
    if (!doc.is_object()) throw ConfigError("'" + path + "' must be a JSON object");
    for (const auto& [key, val] : doc.items()) {
        const std::string sub = path + "/" + key;
        if (!defaults.contains(key)) throw ConfigError("unknown key '" + sub + "'");
        if (kFree.contains(sub)) continue;
        if (defaults[key].is_object()) check_keys(val, defaults[key], sub);
    }
}

double get_number(const nlohmann::json& j, const char* key, const char* what) {
    if (!j.contains(key) || !j[key].is_number())
        throw ConfigError(std::string(what) + "." + key + " must be a number");
    return j[key].get<double>();
}

GaussianState parse_state(const nlohmann::json& j, const PhysParams& p) {
    static const std::set<std::string> allowed = {"squeeze", "angle",  "mean_q", "mean_p",
                                                  "cov_qq",  "cov_pp", "cov_qp"};
    if (!j.is_object()) throw ConfigError("state must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!allowed.contains(key)) throw ConfigError("unknown key '/state/" + key + "'");
    const Vec2 mean(j.value("mean_q", 0.0), j.value("mean_p", 0.0));
    if (j.contains("cov_qq") || j.contains("cov_pp")) {
        GaussianState s;
        s.mean = mean;
        s.cov = {get_number(j, "cov_qq", "state"), get_number(j, "cov_pp", "state"),
                 j.value("cov_qp", 0.0)};
        return s;
    }
    const double sq = j.value("squeeze", 1.0);
    if (!(sq > 0.0)) throw ConfigError("state.squeeze must be positive");
    return GaussianState::squeezed(p, sq, j.value("angle", 0.0), mean);
}

const std::set<std::string> kPropagators = {"exact", "inner", "outer", "gao", "patched"};

std::string propagator_for(const Config& cfg, const std::string& fallback) {
    const std::string& name = cfg.propagator.empty() ? fallback : cfg.propagator;
    return name;
}

GaussianChannel propagate(const Config& cfg, const std::string& kind, const PhysParams& p,
                          double dt, double t) {
    if (kind == "exact") return exact_channel(p, t);
    if (kind == "inner") return inner_channel(p, t);
    if (kind == "outer") return outer_channel(p, t, false);
    if (kind == "gao") return outer_channel(p, t, true);
    if (kind == "patched") return patched_channel(p, dt, t, false, cfg.lambda_source()).channel;
    throw ConfigError("unknown propagator '" + kind + "'");
}

std::string op_name(const std::string& kind) {
    if (kind == "exact") return "exact_channel";
    if (kind == "inner") return "inner_channel";
    if (kind == "outer") return "outer_channel";
    if (kind == "gao") return "outer_channel[gao]";
    return "patched_channel";
}

void set_param(PhysParams& p, const std::string& name, double v) {
    if (name == "m") p.m = v;
    else if (name == "omega") p.omega = v;
    else if (name == "Gamma") p.Gamma = v;
    else if (name == "alpha") p.alpha = v;
    else if (name == "T") p.T = v;
    else if (name == "hbar") p.hbar = v;
    else if (name == "kB") p.kB = v;
    else if (name == "kappa") p.kappa = v;
    else if (name == "kT") p.T = v * p.hbar * p.omega / p.kB;
    else throw ConfigError("unknown sweep axis '" + name + "'");
}

std::string write_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace

void Table::add(std::vector<std::string> row) {
    if (row.size() != columns.size()) throw std::logic_error("row width does not match the header");
    rows.push_back(std::move(row));
}

std::string Table::csv() const {
    std::ostringstream os;
    os << "# qbm-schema v1\n";
    for (size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << "\n";
    for (const auto& r : rows) {
        for (size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << "\n";
    }
    return os.str();
}

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string flag(bool b) { return b ? "1" : "0"; }

std::vector<double> parse_grid(const nlohmann::json& j, const char* what) {
    std::vector<double> out;
    if (j.is_array()) {
        for (const auto& v : j) {
            if (!v.is_number()) throw ConfigError(std::string(what) + " entries must be numbers");
            out.push_back(v.get<double>());
        }
    } else if (j.is_object()) {
        for (const auto& [key, _] : j.items())
            if (key != "start" && key != "stop" && key != "n" && key != "scale")
                throw ConfigError("unknown key '" + key + "' in grid " + what);
        const double a = get_number(j, "start", what), b = get_number(j, "stop", what);
        const int n = static_cast<int>(get_number(j, "n", what));
        const std::string scale = j.value("scale", std::string("linear"));
        if (n < 1) throw ConfigError(std::string(what) + ".n must be >= 1");
        if (scale != "linear" && scale != "log")
            throw ConfigError(std::string(what) + ".scale must be linear or log");
        if (scale == "log" && !(a > 0.0 && b > 0.0))
            throw ConfigError(std::string(what) + ": log grid needs positive bounds");
        for (int k = 0; k < n; ++k) {
            const double f = n == 1 ? 0.0 : double(k) / (n - 1);
            out.push_back(scale == "log" ? a * std::pow(b / a, f) : a + (b - a) * f);
        }
    } else {
        throw ConfigError(std::string(what) + " must be an array or a grid object");
    }
    if (out.empty()) throw ConfigError(std::string(what) + " is empty");
    for (size_t i = 1; i < out.size(); ++i)
        if (!(out[i] > out[i - 1])) throw ConfigError(std::string(what) + " must be strictly increasing");
    return out;
}

nlohmann::json default_config() {
    nlohmann::json d;
    d["params"] = PhysParams::dimensionless(0.1, 100.0, 10.0);
    d["seed"] = 1;
    d["propagator"] = nullptr;
    d["inner_lambda"] = false;
    d["tol_phys"] = 1e-10;
    d["fock_dim"] = 40;
    d["jobs"] = 1;
    d["out"] = "qbm-out";
    d["dt"] = 0.25;
    d["state"] = {{"squeeze", 1.0}, {"angle", 0.0}, {"mean_q", 0.0}, {"mean_p", 0.0}};
    d["evolve"] = {{"time", grid(0.0, 10.0, 101)}};
    d["region_map"] = {{"kT", grid(0.25, 100.0, 24, "log")},
                       {"alpha_tilde", grid(0.5, 200.0, 24, "log")},
                       {"t2", grid(0.05, 1.0, 8)}};
    d["entropy_curve"] = {{"alpha_t", grid(0.0, 8.0, 41)}, {"samples", 500}};
    d["violation"] = {{"squeeze_min", 4.0}, {"squeeze_max", 200.0}, {"n_squeeze", 8},
                      {"t_min", 1e-3},      {"t_max", 0.1},         {"n_t", 8},
                      {"refine", 2},        {"threshold", 1e-6}};
    d["verify"] = {{"dims", {20, 30, 40}},
                   {"identity_dim", 30},
                   {"xi", {0.05, 0.1, 0.5}},
                   {"tau", {0.02, -0.05, 0.1}},
                   {"relation_dim", 30},
                   {"cross_dim", 40},
                   {"cross_states", 10},
                   {"cross_times", {0.1, 0.25, 0.5}},
                   {"corrupt_entry", -1},
                   {"wei_norman", {{"points", {{0.3, 0.05}}}, {"dim", 10}, {"guard", 12}}},
                   {"tolerances",
                    {{"identity", 1e-8},
                     {"relation", 1e-8},
                     {"algebra", 1e-6},
                     {"cross_derivative", 1e-6},
                     {"cross_evolution", 1e-5},
                     {"wei_norman", 1e-4}}}};
    d["sweep"] = {{"axes", {{"Gamma", {0.05, 0.1}}, {"t1", {0.25, 0.5}}}},
                  {"t2", {0.1}},
                  {"samples", 200},
                  {"max_squeeze", 100.0}};
    return d;
}

void apply_override(nlohmann::json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override must look like path.to.key=value: " + assignment);
    std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    std::replace(path.begin(), path.end(), '.', '/');
    doc[nlohmann::json::json_pointer("/" + path)] = value;
}

Config load_config(const nlohmann::json& doc) {
    const nlohmann::json defaults = default_config();
    check_keys(doc, defaults, "");
    nlohmann::json merged = defaults;
    merged.merge_patch(doc);
    if (doc.contains("sweep") && doc["sweep"].contains("axes")) merged["sweep"]["axes"] = doc["sweep"]["axes"];
    if (doc.contains("state")) merged["state"] = doc["state"];

    Config c;
    c.raw = merged;
    try {
        c.params = merged["params"].get<PhysParams>();
        c.seed = merged["seed"].get<std::uint64_t>();
        if (!merged["propagator"].is_null()) c.propagator = merged["propagator"].get<std::string>();
        c.inner_lambda = merged["inner_lambda"].get<bool>();
        c.tol_phys = merged["tol_phys"].get<double>();
        c.fock_dim = merged["fock_dim"].get<int>();
        c.jobs = merged["jobs"].get<int>();
        c.out = merged["out"].get<std::string>();
        merged["dt"].get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad value type: ") + e.what());
    }
    if (!c.propagator.empty() && !kPropagators.contains(c.propagator))
        throw ConfigError("unknown propagator '" + c.propagator + "'");
    if (c.jobs < 1) throw ConfigError("jobs must be >= 1");
    if (c.fock_dim < 4) throw DimensionTooSmall("fock_dim must be >= 4");
    if (!(c.tol_phys >= 0.0)) throw ConfigError("tol_phys must be non-negative");
    if (!(c.dt() >= 0.0)) throw ConfigError("dt must be non-negative");
    parse_state(merged["state"], c.params);
    return c;
}

double Config::dt() const { return raw.at("dt").get<double>(); }

GaussianState Config::state() const { return parse_state(raw.at("state"), params); }

nlohmann::json Config::section(const char* name) const { return raw.at(name); }

std::vector<std::vector<std::string>> run_pool(int n, int jobs,
                                               const std::function<std::vector<std::string>(int)>& f) {
    std::vector<std::vector<std::string>> out(n);
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex m;
    const auto work = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                out[i] = f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(m);
                if (!err) err = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int k = 1; k < std::min(jobs, n); ++k) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
    return out;
}

Output cmd_evolve(const Config& cfg) {
    const std::string kind = propagator_for(cfg, "exact");
    const PhysParams& p = cfg.params;
    const GaussianState s0 = cfg.state();
    const std::vector<double> ts = parse_grid(cfg.section("evolve")["time"], "evolve.time");
    if (ts.front() < 0.0) throw ConfigError("evolve.time must be non-negative");
    Table tab;
    tab.columns = {"t", "propagator", "mean_q", "mean_p", "cov_qq", "cov_pp", "cov_qp",
                   "deficit", "linear_entropy", "floor_q_margin", "floor_p_margin", "flag",
                   "reason", "provenance"};
    int violations = 0;
    for (double t : ts) {
        const GaussianState s = apply_channel(propagate(cfg, kind, p, cfg.dt(), t), s0);
        const double def = physicality_deficit(s, p);
        std::vector<std::string> reasons;
        double ent = kNaN;
        if (def >= -cfg.tol_phys) ent = linear_entropy(s, p, cfg.tol_phys);
        else reasons.push_back("nonphysical");
        double mq = kNaN, mp = kNaN;
        if (!InnerParams::at(p, t).outside_layer) {
            const UncertaintyFloors f = uncertainty_floors(p, t);
            mq = s.cov.qq - f.dq2;
            mp = s.cov.pp - f.dp2;
        } else {
            reasons.push_back("outside_layer");
        }
        const bool bad = def < -cfg.tol_phys;
        violations += bad;
        std::string reason;
        for (size_t i = 0; i < reasons.size(); ++i) reason += (i ? ";" : "") + reasons[i];
        tab.add({num(t), kind, num(s.mean(0)), num(s.mean(1)), num(s.cov.qq), num(s.cov.pp),
                 num(s.cov.qp), num(def), num(ent), num(mq), num(mp), bad ? "VIOLATION" : "ok",
                 reason, provenance(op_name(kind))});
    }
    Output o;
    o.files["evolve.csv"] = tab.csv();
    std::ostringstream os;
    os << "evolve: " << ts.size() << " steps, propagator " << kind << ", " << violations
       << " violation(s)\n";
    o.summary = os.str();
    return o;
}

Output cmd_region_map(const Config& cfg) {
    const nlohmann::json sec = cfg.section("region_map");
    const std::vector<double> kts = parse_grid(sec["kT"], "region_map.kT");
    const std::vector<double> ats = parse_grid(sec["alpha_tilde"], "region_map.alpha_tilde");
    const std::vector<double> t2s = parse_grid(sec["t2"], "region_map.t2");
    const PhysParams base = cfg.params;
    const LambdaSource src = cfg.lambda_source();
    const int n = static_cast<int>(kts.size() * ats.size());
    std::vector<double> min_dt;
    for (const auto& r : run_pool(static_cast<int>(kts.size()), cfg.jobs, [&](int i) {
             PhysParams p = base;
             set_param(p, "kT", kts[i]);
             return std::vector<std::string>{num(minimal_patch_time(p, src))};
         }))
        min_dt.push_back(std::stod(r[0]));
    const auto cell = [&](int idx) {
        const double kt = kts[idx / ats.size()], at = ats[idx % ats.size()];
        PhysParams p = base;
        set_param(p, "kT", kt);
        const double t1 = at / p.alpha;
        std::string reason;
        double lam = kNaN, lhs = kNaN, mdt = kNaN;
        std::string c28 = "nan", c27 = "nan", c27n = "nan";
        try {
            const WeiNormanFactors w = wei_norman_factors(p, t1, t2s.front(), src);
            lam = w.lam;
            lhs = condition_28_lhs(p, lam);
            c28 = flag(condition_28(p, t1, src));
            mdt = min_dt[idx / ats.size()];
            if (std::isnan(mdt)) reason = "no_patch_time";
            int holds = 0;
            for (double t2 : t2s) holds += condition_27(p, t1, t2, src).holds;
            c27 = flag(holds == static_cast<int>(t2s.size()));
            c27n = std::to_string(holds);
        } catch (const Error& e) {
            reason = e.kind();
        }
        return std::vector<std::string>{num(kt), num(at), num(t1), num(lam), num(lhs), c28,
                                        num(mdt), c27, c27n, std::to_string(t2s.size()), reason,
                                        provenance("condition_28")};
    };
    Table tab;
    tab.columns = {"kT_over_hbar_omega", "alpha_tilde", "t1", "lambda", "condition_28_lhs",
                   "condition_28", "min_dt", "condition_27_all", "condition_27_count",
                   "condition_27_points", "reason", "provenance"};
    for (auto& r : run_pool(n, cfg.jobs, cell)) tab.add(std::move(r));
    Output o;
    o.files["region_map.csv"] = tab.csv();
    int certified = 0;
    for (const auto& r : tab.rows) certified += r[5] == "1";
    o.summary = "region-map: " + std::to_string(n) + " cells, condition 28 holds in " +
                std::to_string(certified) + "\n";
    return o;
}

Output cmd_verify(const Config& cfg) {
    const nlohmann::json sec = cfg.section("verify");
    const nlohmann::json tol = sec["tolerances"];
    const PhysParams& p = cfg.params;
    std::vector<OracleReport> reports;

    {
        const int d = sec["identity_dim"].get<int>();
        const FockSpace fs = FockSpace::standard(p, d);
        const FockDensity rho =
            fock_from_gaussian(GaussianState::squeezed(p, 1.0, 0.0, Vec2(0.5, 0.3)), fs, p);
        OracleReport r{"identity_14", {}, d, 0.0, tol["identity"].get<double>(), false, {}};
        for (double xi : sec["xi"].get<std::vector<double>>())
            for (int b = 0; b < 2; ++b) {
                const Identity14Result x = verify_identity_14(p, b == 0, b == 1, xi, rho);
                r.residual = std::max(r.residual, x.residual);
                r.details["cases"].push_back({{"B", b == 0 ? "q" : "p"}, {"xi", xi},
                                              {"residual", x.residual},
                                              {"quadrature_error", x.quad_error}});
            }
        r.params = {{"xi", sec["xi"]}};
        r.pass = r.residual <= r.tolerance;
        reports.push_back(r);
    }
    {
        const int d = sec["relation_dim"].get<int>();
        OracleReport r{"relation_16", {{"tau", sec["tau"]}}, d, 0.0, tol["relation"].get<double>(), true, {}};
        for (double tau : sec["tau"].get<std::vector<double>>()) {
            const Relation16Result x = verify_relation_16(p, tau, d);
            r.residual = std::max(r.residual, x.residual);
            if (tau != 0.0 && x.sign != -1) r.pass = false;
            r.details["cases"].push_back({{"tau", tau}, {"residual", x.residual},
                                          {"scale", x.scale_found}, {"sign", x.sign},
                                          {"trace_error", x.trace_error}});
        }
        r.pass = r.pass && r.residual <= r.tolerance;
        reports.push_back(r);
    }
    for (int d : sec["dims"].get<std::vector<int>>()) {
        const int corrupt = sec["corrupt_entry"].get<int>();
        const AlgebraResult a = verify_algebra_table(p, d, corrupt);
        OracleReport r{"algebra_table", {{"corrupt_entry", corrupt}}, d, a.max_residual,
                       tol["algebra"].get<double>(), a.max_residual <= tol["algebra"].get<double>(), {}};
        for (const AlgebraEntry& e : a.entries)
            r.details["entries"].push_back({{"name", e.name}, {"residual", e.residual},
                                            {"claimed_zero", e.claimed_zero}});
        reports.push_back(r);
    }
    {
        const int d = sec["cross_dim"].get<int>();
        const auto times = parse_grid(sec["cross_times"], "verify.cross_times");
        for (bool gao : {false, true}) {
            const MomentFlowCheck m =
                verify_moment_flow(p, d, sec["cross_states"].get<int>(), cfg.seed, gao, times);
            const double td = tol["cross_derivative"].get<double>(), te = tol["cross_evolution"].get<double>();
            OracleReport r{gao ? "cross_oracle_gao" : "cross_oracle", {{"states", m.states}}, d,
                           std::max(m.derivative / td, m.evolution / te), 1.0,
                           m.derivative <= td && m.evolution <= te,
                           {{"derivative", m.derivative}, {"evolution", m.evolution}}};
            reports.push_back(r);
        }
    }
    {
        const nlohmann::json wn = sec["wei_norman"];
        const int d = wn["dim"].get<int>(), guard = wn["guard"].get<int>();
        OracleReport r{"wei_norman", {{"reading", "lambda+ on {Q,.,Q}, resolved middle factor"}, {"guard", guard}},
                       d, 0.0, tol["wei_norman"].get<double>(), true, {}};
        for (const auto& pt : wn["points"]) {
            if (!pt.is_array() || pt.size() != 2) throw ConfigError("wei_norman points are [t1, t2] pairs");
            const double t1 = pt[0].get<double>(), t2 = pt[1].get<double>();
            const bool c28 = condition_28(p, t1, cfg.lambda_source());
            const double x = wei_norman_fock_residual(p, t1, t2, d, NoisePairing::LambdaPlusOnQ,
                                                      MiddleReading::Resolved,
                                                      Eq26Prefactor::NoiseCoefficient, guard);
            r.residual = std::max(r.residual, x);
            r.details["points"].push_back({{"t1", t1}, {"t2", t2}, {"residual", x}, {"condition_28", c28}});
        }
        r.pass = r.residual <= r.tolerance;
        reports.push_back(r);
    }

    Output o;
    nlohmann::json j = nlohmann::json::array();
    bool all = true;
    std::ostringstream os;
    for (const OracleReport& r : reports) {
        j.push_back(r);
        all = all && r.pass;
        os << (r.pass ? "PASS " : "FAIL ") << r.check_name << " d=" << r.dimension
           << " residual=" << num(r.residual) << " tol=" << num(r.tolerance) << "\n";
    }
    o.files["verify.json"] = write_json(j);
    o.summary = os.str();
    o.exit_code = all ? 0 : 1;
    return o;
}

Output cmd_entropy_curve(const Config& cfg) {
    const PhysParams& p = cfg.params;
    const nlohmann::json sec = cfg.section("entropy_curve");
    const std::vector<double> ats = parse_grid(sec["alpha_t"], "entropy_curve.alpha_t");
    if (ats.front() < 0.0) throw ConfigError("entropy_curve.alpha_t must be non-negative");
    const int samples = sec["samples"].get<int>();
    std::mt19937_64 rng(cfg.seed);
    const StateSampler sampler;
    Table tab;
    tab.columns = {"alpha_t", "t", "coherent_entropy", "purity_entropy", "entropy_error",
                   "increasing", "floor_dq2", "floor_dp2", "floor_dq2_asymptotic",
                   "floor_dp2_asymptotic", "samples", "samples_above_floors", "reason", "provenance"};
    bool ok = true;
    double prev = -1.0;
    for (size_t i = 0; i < ats.size(); ++i) {
        const double t = ats[i] / p.alpha;
        const double h = coherent_entropy(p, t);
        const double lin = linear_entropy(coherent_inner_state(p, t), p);
        const UncertaintyFloors f = uncertainty_floors(p, t);
        const GaussianChannel ch = inner_channel(p, t);
        int above = 0;
        for (int k = 0; k < samples; ++k) {
            const GaussianState s = apply_channel(ch, sampler(rng, p));
            above += s.cov.qq >= f.dq2 && s.cov.pp >= f.dp2;
        }
        const bool inc = i == 0 || h > prev;
        ok = ok && inc && std::abs(h - lin) <= 1e-8 && above == samples;
        prev = h;
        tab.add({num(ats[i]), num(t), num(h), num(lin), num(std::abs(h - lin)), flag(inc), num(f.dq2),
                 num(f.dp2), num(f.dq2_asymptotic), num(f.dp2_asymptotic), std::to_string(samples),
                 std::to_string(above), InnerParams::at(p, t).outside_layer ? "outside_layer" : "",
                 provenance("coherent_entropy")});
    }
    Output o;
    o.files["entropy_curve.csv"] = tab.csv();
    o.summary = std::string("entropy-curve: ") + std::to_string(ats.size()) + " points, " +
                (ok ? "increasing, purity match and floors hold" : "CHECK FAILED") + "\n";
    o.exit_code = ok ? 0 : 1;
    return o;
}

Output cmd_violation_demo(const Config& cfg) {
    const std::string kind = propagator_for(cfg, "outer");
    FockPropagator fp;
    if (kind == "outer") fp = FockPropagator::Bare;
    else if (kind == "gao") fp = FockPropagator::Gao;
    else if (kind == "patched") fp = FockPropagator::Patched;
    else throw ConfigError("violation-demo needs propagator outer, gao or patched");
    const nlohmann::json v = cfg.section("violation");
    ViolationSearch box;
    box.squeeze_min = v["squeeze_min"].get<double>();
    box.squeeze_max = v["squeeze_max"].get<double>();
    box.n_squeeze = v["n_squeeze"].get<int>();
    box.t_min = v["t_min"].get<double>();
    box.t_max = v["t_max"].get<double>();
    box.n_t = v["n_t"].get<int>();
    box.refine = v["refine"].get<int>();
    box.threshold = v["threshold"].get<double>();
    box.dt = cfg.dt();
    const ViolationCertificate c = demo_violation(cfg.params, cfg.fock_dim, fp, box);
    Table tab;
    tab.columns = {"propagator", "squeeze", "t", "fock_min_eig", "gaussian_deficit", "signs_agree",
                   "evaluated", "skipped", "provenance"};
    const bool agree = (c.min_eig < 0.0) == (c.gaussian_deficit < 0.0);
    tab.add({kind, num(c.squeeze), num(c.t), num(c.min_eig), num(c.gaussian_deficit), flag(agree),
             std::to_string(c.evaluated), std::to_string(c.skipped), provenance("demo_violation")});
    Output o;
    o.files["violation.csv"] = tab.csv();
    o.files["violation.json"] = write_json({{"propagator", kind},
                                            {"dim", cfg.fock_dim},
                                            {"params", cfg.params},
                                            {"squeeze", c.squeeze},
                                            {"t", c.t},
                                            {"fock_min_eig", c.min_eig},
                                            {"gaussian_deficit", c.gaussian_deficit},
                                            {"signs_agree", agree}});
    o.summary = "violation-demo: min eigenvalue " + num(c.min_eig) + " at squeeze " + num(c.squeeze) +
                ", t " + num(c.t) + "; Gaussian deficit " + num(c.gaussian_deficit) + "\n";
    o.exit_code = agree ? 0 : 1;
    return o;
}

Output cmd_sweep(const Config& cfg) {
    const std::string kind = propagator_for(cfg, "patched");
    const nlohmann::json sec = cfg.section("sweep");
    if (!sec["axes"].is_object() || sec["axes"].empty()) throw ConfigError("sweep.axes must be a non-empty object");
    std::vector<std::string> names;
    std::vector<std::vector<double>> axes;
    for (const auto& [name, g] : sec["axes"].items()) {
        if (name != "t1" && name != "t2") {
            PhysParams probe = cfg.params;
            set_param(probe, name, 1.0);
        }
        names.push_back(name);
        axes.push_back(parse_grid(g, ("sweep.axes." + name).c_str()));
    }
    const std::vector<double> t2default = parse_grid(sec["t2"], "sweep.t2");
    const int samples = sec["samples"].get<int>();
    StateSampler sampler;
    sampler.max_squeeze = sec["max_squeeze"].get<double>();
    int n = 1;
    for (const auto& a : axes) n *= static_cast<int>(a.size());
    const auto cell = [&](int idx) {
        PhysParams p = cfg.params;
        double t1 = cfg.dt(), t2 = t2default.front();
        std::vector<std::string> row;
        int rem = idx;
        std::vector<double> vals(axes.size());
        for (int k = static_cast<int>(axes.size()) - 1; k >= 0; --k) {
            vals[k] = axes[k][rem % axes[k].size()];
            rem /= static_cast<int>(axes[k].size());
        }
        for (size_t k = 0; k < axes.size(); ++k) {
            row.push_back(num(vals[k]));
            if (names[k] == "t1") t1 = vals[k];
            else if (names[k] == "t2") t2 = vals[k];
            else set_param(p, names[k], vals[k]);
        }
        double lp = kNaN, lm = kNaN, lam = kNaN, mdt = kNaN, worst = kNaN;
        std::string c27 = "nan", c28 = "nan", reason;
        int viol = 0;
        try {
            p.validate();
            const WeiNormanFactors w = wei_norman_factors(p, t1, t2, cfg.lambda_source());
            lp = w.lamPlus;
            lm = w.lamMinus;
            lam = w.lam;
            c28 = flag(condition_28(p, t1, cfg.lambda_source()));
            c27 = flag(condition_27(p, t1, t2, cfg.lambda_source()).holds);
            mdt = minimal_patch_time(p, cfg.lambda_source());
            const GaussianChannel ch = propagate(cfg, kind, p, t1, t1 + t2);
            std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(idx));
            worst = samples > 0 ? 1e300 : kNaN;
            for (int s = 0; s < samples; ++s) {
                const double d = physicality_deficit(apply_channel(ch, sampler(rng, p)), p);
                worst = std::min(worst, d);
                viol += d < -cfg.tol_phys;
            }
        } catch (const Error& e) {
            reason = e.kind();
        }
        for (const std::string& s : {num(t1), num(t2), num(lp), num(lm), num(lam), c27, c28, num(mdt),
                                     num(worst), std::to_string(viol),
                                     std::string(viol ? "VIOLATION" : "ok"), reason,
                                     provenance(op_name(kind))})
            row.push_back(s);
        return row;
    };
    Table tab;
    for (const auto& nm : names) tab.columns.push_back("axis_" + nm);
    for (const char* c : {"t1", "t2", "lambda_plus", "lambda_minus", "lambda", "condition_27",
                          "condition_28", "min_dt", "min_deficit", "violations", "flag", "reason",
                          "provenance"})
        tab.columns.push_back(c);
    int total = 0;
    for (auto& r : run_pool(n, cfg.jobs, cell)) {
        total += std::stoi(r[r.size() - 4]);
        tab.add(std::move(r));
    }
    Output o;
    o.files["sweep.csv"] = tab.csv();
    o.summary = "sweep: " + std::to_string(n) + " cells, propagator " + kind + ", " +
                std::to_string(total) + " violating sample(s)\n";
    return o;
}

}  // namespace qbm::cli
