#include "jmgt/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "jmgt/errors.hpp"
#include "jmgt/linear.hpp"
#include "jmgt/params.hpp"
#include "jmgt/spaces.hpp"

namespace jmgt {

double InequalityReport::extra(const std::string& key) const {
    for (const auto& [k, v] : extras)
        if (k == key) return v;
    throw ContractViolation("InequalityReport: no extra named " + key);
}

namespace {

InequalityReport finish(std::string name, double lhs, double rhs) {
    InequalityReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    if (rhs == 0.0) {
        r.degenerate = true;
        r.ratio = lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        r.message = lhs == 0.0 ? "0 <= 0" : "right side vanishes while left side does not";
    } else {
        r.ratio = lhs / rhs;
        r.message = "ok";
    }
    return r;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

bool exponent_open(double p) { return p > 1.0 && p < kInf; }

// Pointwise product of two grid functions given by their spectra.
SpectralArray product(const FrequencyGrid& grid, std::span<const cplx> f, std::span<const cplx> g) {
    return pseudospectral_product(grid, f, g, DealiasRule::none);
}

double lp(const FrequencyGrid& grid, std::span<const cplx> f_hat, double p) {
    return lebesgue_norm(grid, inverse_transform(grid, f_hat), p);
}

}  // namespace

InequalityReport check_algebra_prop_3_6(const FrequencyGrid& grid, const std::vector<SpectralArray>& g1,
                                        const std::vector<SpectralArray>& g2, double dt, double alpha, double s,
                                        double sigma, DealiasRule rule) {
    if (s < 0.5 * grid.dims() - sigma) throw ConfigError("s", "needs s >= n/2 - sigma");
    if (g1.size() != g2.size() || g1.empty()) throw ContractViolation("algebra check: histories must match");
    const Mask oct = grid.octant_mask(0.0);
    for (const auto* h : {&g1, &g2})
        for (const auto& a : *h) {
            require_shape(grid, a.size(), "algebra check history");
            for (std::size_t i = 0; i < a.size(); ++i)
                if (a[i] != 0.0 && !oct[i]) throw ContractViolation("algebra check: support leaves the first octant");
        }
    std::vector<SpectralArray> prod(g1.size());
    for (std::size_t n = 0; n < g1.size(); ++n) prod[n] = pseudospectral_product(grid, g1[n], g2[n], rule);
    const double r = s + sigma;
    const double lhs = mixed_time_norm(grid, prod, dt, NormSpec{alpha, r, TimeExponent::one});
    const double rhs = mixed_time_norm(grid, g1, dt, NormSpec{alpha, r, TimeExponent::two}) *
                       mixed_time_norm(grid, g2, dt, NormSpec{alpha, r, TimeExponent::two});
    return finish("algebra", lhs, rhs);
}

double gns_beta(int n, const GnsParams& q) {
    return (1.0 / q.p0 - 1.0 / q.p + q.kappa / n) / (1.0 / q.p0 - 1.0 / q.p1 + q.s / n);
}

InequalityReport check_gns(const FrequencyGrid& grid, std::span<const cplx> f_hat, const GnsParams& q) {
    if (!exponent_open(q.p)) throw ConfigError("p", "must lie in (1, inf)");
    if (!exponent_open(q.p0)) throw ConfigError("p0", "must lie in (1, inf)");
    if (!exponent_open(q.p1)) throw ConfigError("p1", "must lie in (1, inf)");
    if (!(q.s > 0.0)) throw ConfigError("s", "must be > 0");
    if (!(q.kappa >= 0.0 && q.kappa < q.s)) throw ConfigError("kappa", "must lie in [0, s)");
    const double beta = gns_beta(grid.dims(), q);
    if (!(beta >= q.kappa / q.s - 1e-14 && beta <= 1.0 + 1e-14))
        throw ConfigError("beta", "beta = " + std::to_string(beta) + " must lie in [kappa/s, 1]");
    const double lhs = hom_sobolev_lp_norm(grid, f_hat, q.kappa, q.p);
    const double a = lp(grid, f_hat, q.p0);
    const double b = hom_sobolev_lp_norm(grid, f_hat, q.s, q.p1);
    const double rhs = (beta == 0.0 ? 1.0 : std::pow(b, beta)) * (beta == 1.0 ? 1.0 : std::pow(a, 1.0 - beta));
    auto r = finish("gns", lhs, rhs);
    r.extras = {{"beta", beta}, {"lebesgue_p0", a}, {"hdot_s_p1", b}};
    return r;
}

InequalityReport check_embedding(const FrequencyGrid& grid, std::span<const cplx> f_hat, double alpha0,
                                 double beta0) {
    const int n = grid.dims();
    if (!(2.0 * alpha0 < n && n < 2.0 * beta0)) throw ConfigError("alpha0/beta0", "needs 2*alpha0 < n < 2*beta0");
    require_shape(grid, f_hat.size(), "check_embedding");
    auto mags = grid.magnitudes();
    if (alpha0 < 0.0)
        for (std::size_t i = 0; i < f_hat.size(); ++i)
            if (mags[i] == 0.0 && f_hat[i] != 0.0)
                throw DomainError("check_embedding: the zero mode must vanish when alpha0 < 0");
    const double lhs = lebesgue_norm(grid, inverse_transform(grid, f_hat), kInf);
    const double A = sobolev_hom_norm(grid, f_hat, alpha0);
    const double B = sobolev_hom_norm(grid, f_hat, beta0);
    const double d = beta0 - alpha0;
    const double rhs = (A == 0.0 || B == 0.0) ? 0.0
                                              : std::pow(A, (2.0 * beta0 - n) / (2.0 * d)) *
                                                    std::pow(B, (n - 2.0 * alpha0) / (2.0 * d));
    auto r = finish("embedding", lhs, rhs);
    double l1 = 0.0;
    for (auto z : f_hat) l1 += std::abs(z);
    l1 /= std::sqrt(static_cast<double>(grid.size()));
    r.extras.push_back({"l1_bound", l1});
    if (A > 0.0 && B > 0.0) {
        // Balance point of the two-term split.
        const double lam0 = std::exp((std::log(B) - std::log(A)) / d);
        const double low = std::pow(lam0, 0.5 * n - alpha0) * A;
        const double high = std::pow(lam0, 0.5 * n - beta0) * B;
        r.extras.push_back({"lambda0", lam0});
        r.extras.push_back({"split_low", low});
        r.extras.push_back({"split_high", high});
        r.extras.push_back({"balance_defect", std::abs(low - high) / std::max(low, high)});
    }
    return r;
}

InequalityReport check_leibniz(const FrequencyGrid& grid, std::span<const cplx> f_hat, std::span<const cplx> g_hat,
                               const LeibnizParams& q) {
    if (!(q.s > 0.0)) throw ConfigError("s", "must be > 0");
    if (!(q.r >= 1.0)) throw ConfigError("r", "must lie in [1, inf]");
    for (auto [name, v] : {std::pair{"p1", q.p1}, {"p2", q.p2}, {"q1", q.q1}, {"q2", q.q2}})
        if (!(v > 1.0)) throw ConfigError(name, "must lie in (1, inf]");
    auto inv = [](double p) { return std::isinf(p) ? 0.0 : 1.0 / p; };
    if (std::abs(inv(q.r) - inv(q.p1) - inv(q.p2)) > 1e-12)
        throw ConfigError("p1/p2", "Hoelder relation 1/r = 1/p1 + 1/p2 fails");
    if (std::abs(inv(q.r) - inv(q.q1) - inv(q.q2)) > 1e-12)
        throw ConfigError("q1/q2", "Hoelder relation 1/r = 1/q1 + 1/q2 fails");
    require_shape(grid, f_hat.size(), "check_leibniz f");
    require_shape(grid, g_hat.size(), "check_leibniz g");
    const auto fg = product(grid, f_hat, g_hat);
    const double lhs = hom_sobolev_lp_norm(grid, fg, q.s, q.r);
    const double t1 = hom_sobolev_lp_norm(grid, f_hat, q.s, q.p1) * lp(grid, g_hat, q.p2);
    const double t2 = lp(grid, f_hat, q.q1) * hom_sobolev_lp_norm(grid, g_hat, q.s, q.q2);
    auto r = finish("leibniz", lhs, t1 + t2);
    r.extras = {{"term_f_derivative", t1}, {"term_g_derivative", t2}};
    return r;
}

std::vector<InequalityReport> check_data_estimates_prop_4_8(const FrequencyGrid& grid, std::span<const cplx> u1,
                                                            std::span<const cplx> v1, double s, double sigma,
                                                            double m1, double m2) {
    if (!(s > std::max(0.5 * grid.dims() - sigma, 0.0))) throw ConfigError("s", "needs s > [n/2 - sigma]_+");
    for (double m : {m1, m2})
        if (!(m >= 1.0 && m < 2.0)) throw ConfigError("m", "must lie in [1, 2)");
    require_shape(grid, u1.size(), "u1");
    require_shape(grid, v1.size(), "v1");
    const double rhs = std::pow(sobolev_norm(grid, u1, s + sigma), 2) + std::pow(sobolev_norm(grid, v1, s + sigma), 2);
    auto uu = product(grid, u1, u1);
    const auto vv = product(grid, v1, v1);
    for (std::size_t i = 0; i < uu.size(); ++i) uu[i] -= vv[i];
    const auto uv = product(grid, u1, v1);
    auto lhs = [&](const SpectralArray& f, double m) { return sobolev_norm(grid, f, s) + lp(grid, f, m); };
    return {finish("data_difference", lhs(uu, m1), rhs), finish("data_product", lhs(uv, m2), rhs)};
}

std::vector<InequalityReport> check_nonlinearity_estimates_prop_4_9(const FrequencyGrid& grid,
                                                                    const std::vector<SpectralArray>& du,
                                                                    const std::vector<SpectralArray>& dv,
                                                                    std::span<const double> times, double p,
                                                                    double m1, double m2, double s, double sigma) {
    if (!(p >= 1.0 && p <= 2.0)) throw ConfigError("p", "must lie in [1, 2]");
    if (!(s > std::max(0.5 * grid.dims() - sigma, 0.0))) throw ConfigError("s", "needs s > [n/2 - sigma]_+");
    if (du.size() != times.size() || dv.size() != times.size())
        throw ContractViolation("nonlinearity check: histories and times differ in length");
    const int n = grid.dims();
    const double mmax = std::max(m1, m2);
    const double r = s + sigma;
    const double eL = -(n / (2.0 * sigma)) * (2.0 / mmax - 1.0 / p);
    const double eH = -(n / (2.0 * sigma)) * (2.0 / mmax - 0.5 + r / n);
    InequalityReport worst_l, worst_h;
    worst_l.name = "nonlinearity_lebesgue";
    worst_h.name = "nonlinearity_hdot";
    worst_l.message = worst_h.message = "0 <= 0";
    worst_l.degenerate = worst_h.degenerate = true;
    double ysup = 0.0;
    auto consider = [](InequalityReport& w, double lhs, double rhs, double t) {
        const double ratio = rhs == 0.0 ? (lhs == 0.0 ? 0.0 : kInf) : lhs / rhs;
        if (w.degenerate || ratio > w.ratio) {
            w.lhs = lhs;
            w.rhs = rhs;
            w.ratio = ratio;
            w.degenerate = rhs == 0.0;
            w.extras = {{"worst_t", t}};
            w.message = rhs == 0.0 ? (lhs == 0.0 ? "0 <= 0" : "right side vanishes") : "ok";
        }
    };
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double t = times[k];
        const std::vector<SpectralArray> hu{du[k]}, hv{dv[k]};
        const double tk[1] = {t};
        ysup = std::max(ysup, y_weighted_norm(grid, hu, tk, m1, s, sigma) + y_weighted_norm(grid, hv, tk, m2, s, sigma));
        const auto uu = product(grid, du[k], du[k]);
        const auto vv = product(grid, dv[k], dv[k]);
        for (double sign : {1.0, -1.0}) {
            SpectralArray f(uu.size());
            for (std::size_t i = 0; i < f.size(); ++i) f[i] = uu[i] + sign * vv[i];
            const double y2 = ysup * ysup;
            consider(worst_l, lp(grid, f, p), std::pow(1.0 + t, eL) * y2, t);
            consider(worst_h, sobolev_hom_norm(grid, f, r), std::pow(1.0 + t, eH) * y2, t);
        }
    }
    return {worst_l, worst_h};
}

const char* inequality_name(InequalityKind k) noexcept {
    switch (k) {
        case InequalityKind::algebra: return "algebra";
        case InequalityKind::gns: return "gns";
        case InequalityKind::embedding: return "embedding";
        case InequalityKind::leibniz: return "leibniz";
        case InequalityKind::data_estimates: return "data_estimates";
        case InequalityKind::nonlinearity: return "nonlinearity";
        case InequalityKind::e_norm_equivalence: return "e_norm_equivalence";
    }
    return "?";
}

InequalityKind inequality_from_name(const std::string& name) {
    for (auto k : {InequalityKind::algebra, InequalityKind::gns, InequalityKind::embedding, InequalityKind::leibniz,
                   InequalityKind::data_estimates, InequalityKind::nonlinearity, InequalityKind::e_norm_equivalence})
        if (name == inequality_name(k)) return k;
    throw ConfigError("inequality", "unknown checker '" + name + "'");
}

namespace {

struct TrialResult {
    double ratio = 0.0;
    double balance = 0.0;
};

// Time-decaying octant history g(t) = Σ_k ĝ_k e^{-(c_k + i ω_k) t}; rates and
// phases come from the trial seed so both resolutions see the same function.
std::vector<SpectralArray> octant_history(const FrequencyGrid& grid, const SpectralArray& g0, std::uint64_t seed,
                                          std::size_t S, double dt) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> rate(0.2, 1.0), freq(-2.0, 2.0);
    const double c = rate(rng), w = freq(rng);
    std::vector<SpectralArray> h(S, SpectralArray(grid.size(), 0.0));
    for (std::size_t n = 0; n < S; ++n) {
        const cplx e = std::exp(cplx(-c, -w) * (static_cast<double>(n) * dt));
        for (std::size_t i = 0; i < grid.size(); ++i) h[n][i] = g0[i] * e;
    }
    return h;
}

TrialResult run_trial(InequalityKind kind, const FrequencyGrid& grid, const EnsembleOptions& opt,
                      std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    RandomFieldOptions ro;
    ro.bandlimit = 3.0;
    ro.width = 1.5;
    TrialResult out;
    switch (kind) {
        case InequalityKind::algebra: {
            ro.octant_radius = 0.0;
            const auto a = random_field(grid, rng, ro);
            const auto b = random_field(grid, rng, ro);
            const std::size_t S = 41;
            const double dt = 0.1;
            const auto g1 = octant_history(grid, a, seed + 1, S, dt);
            const auto g2 = octant_history(grid, b, seed + 2, S, dt);
            out.ratio = check_algebra_prop_3_6(grid, g1, g2, dt, opt.alpha, opt.s, opt.sigma).ratio;
            break;
        }
        case InequalityKind::gns: {
            ro.hermitian = true;
            const auto f = random_field(grid, rng, ro);
            std::uniform_real_distribution<double> pick(0.0, 1.0);
            GnsParams q;
            const double ps[3] = {2.0, 3.0, 4.0};
            q.s = 1.0 + pick(rng);
            q.p = ps[static_cast<int>(3.0 * pick(rng)) % 3];
            q.p0 = 2.0;
            q.p1 = 2.0;
            // keeps beta <= 1: n(1/2 - 1/p) + kappa <= s
            q.kappa = 0.9 * pick(rng) * (q.s - grid.dims() * (0.5 - 1.0 / q.p));
            out.ratio = check_gns(grid, f, q).ratio;
            break;
        }
        case InequalityKind::embedding: {
            ro.hermitian = true;
            ro.min_magnitude = 0.5;
            const auto f = random_field(grid, rng, ro);
            const auto r = check_embedding(grid, f, 0.0, opt.s + opt.sigma);
            out.ratio = r.ratio;
            out.balance = r.extra("balance_defect");
            break;
        }
        case InequalityKind::leibniz: {
            ro.hermitian = true;
            const auto f = random_field(grid, rng, ro);
            const auto g = random_field(grid, rng, ro);
            out.ratio = check_leibniz(grid, f, g, LeibnizParams{opt.s + opt.sigma, 2.0, 4.0, 4.0, 4.0, 4.0}).ratio;
            break;
        }
        case InequalityKind::data_estimates: {
            ro.hermitian = true;
            const auto u = random_field(grid, rng, ro);
            const auto v = random_field(grid, rng, ro);
            const auto reps = check_data_estimates_prop_4_8(grid, u, v, opt.s, opt.sigma, 1.0, 1.0);
            out.ratio = std::max(reps[0].ratio, reps[1].ratio);
            break;
        }
        case InequalityKind::nonlinearity: {
            ro.hermitian = true;
            ro.min_magnitude = 0.5;
            LinearData du = LinearData::zeros(grid), dv = LinearData::zeros(grid);
            du.w1 = random_field(grid, rng, ro);
            dv.w1 = random_field(grid, rng, ro);
            const ModelParams p(1.0, 1.0, 2.0, opt.sigma);
            const auto times = geometric_time_grid(20.0, 2, 0.05);
            const auto hu = propagate_dt(grid, du, p, times);
            const auto hv = propagate_dt(grid, dv, p, times);
            const auto reps = check_nonlinearity_estimates_prop_4_9(grid, hu, hv, times, 1.0, 1.0, 1.0, opt.s,
                                                                    opt.sigma);
            out.ratio = std::max(reps[0].ratio, reps[1].ratio);
            break;
        }
        case InequalityKind::e_norm_equivalence: {
            ro.bandlimit = 6.0;
            ro.width = 3.0;
            const auto f = random_field(grid, rng, ro);
            out.ratio = e_norm_decomposed(grid, f, opt.alpha, opt.s) / e_norm(grid, f, opt.alpha, opt.s);
            break;
        }
    }
    return out;
}

}  // namespace

EnsembleReport run_inequality_ensemble(InequalityKind kind, const EnsembleOptions& opt) {
    if (opt.trials < 1) throw ConfigError("trials", "must be >= 1");
    const FrequencyGrid coarse(opt.dims, opt.modes, opt.period), fine(opt.dims, 2 * opt.modes, opt.period);
    EnsembleReport rep;
    rep.name = inequality_name(kind);
    rep.trials = opt.trials;
    std::vector<TrialResult> rc(opt.trials), rf(opt.trials);
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < opt.trials; ++t) {
        const std::uint64_t seed = opt.seed + 7919ULL * static_cast<std::uint64_t>(t);
        rc[t] = run_trial(kind, coarse, opt, seed);
        rf[t] = run_trial(kind, fine, opt, seed);
    }
    rep.c_min = kInf;
    bool finite = true;
    for (int t = 0; t < opt.trials; ++t) {
        rep.c_coarse = std::max(rep.c_coarse, rc[t].ratio);
        rep.c_fine = std::max(rep.c_fine, rf[t].ratio);
        rep.c_min = std::min(rep.c_min, rc[t].ratio);
        rep.worst_balance_defect = std::max({rep.worst_balance_defect, rc[t].balance, rf[t].balance});
        finite = finite && std::isfinite(rc[t].ratio) && std::isfinite(rf[t].ratio);
    }
    rep.finite = finite && rep.c_coarse > 0.0;
    rep.drift = rep.c_coarse > 0.0 ? std::abs(rep.c_fine - rep.c_coarse) / rep.c_coarse : kInf;
    rep.stable = rep.finite && rep.drift < 0.3;
    return rep;
}

}  // namespace jmgt
