#include "jmgt/dispersion.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include "jmgt/errors.hpp"

namespace jmgt {

const char* regime_name(Regime r) noexcept {
    switch (r) {
        case Regime::small_freq: return "small_freq";
        case Regime::transition: return "transition";
        case Regime::large_freq: return "large_freq";
    }
    return "?";
}

double symbol_at(double xi_mag, const ModelParams& p) {
    if (!(xi_mag >= 0.0)) throw DomainError("|xi| must be nonnegative");
    const double eta = xi_mag / p.lambda();
    return eta == 0.0 ? 0.0 : std::pow(eta, 2.0 * p.sigma());
}

namespace {

struct Cubic {
    double tau, b, a;
    double eval(double m) const { return ((tau * m + 1.0) * m + b) * m + a; }
    double deriv(double m) const { return (3.0 * tau * m + 2.0) * m + b; }
};

double discriminant_from_symbol(double a, double tau, double delta) {
    const double S = delta + tau;
    const double K = 18.0 * tau * S + S * S - 27.0 * tau * tau;
    return a * ((-4.0 * tau * S * S * S * a + K) * a - 4.0);
}

double newton_real(const Cubic& c, double m) {
    double best = m, best_res = std::abs(c.eval(m));
    for (int it = 0; it < 8; ++it) {
        const double d = c.deriv(m);
        if (d == 0.0) break;
        const double step = c.eval(m) / d;
        m -= step;
        const double r = std::abs(c.eval(m));
        if (r < best_res) {
            best = m;
            best_res = r;
        }
        if (std::abs(step) <= 4e-16 * std::abs(m)) break;
    }
    return best;
}

double min_distance(const RootTriple& r) {
    return std::min({std::abs(r.mu1 - r.mu2), std::abs(r.mu1 - r.mu3), std::abs(r.mu2 - r.mu3)});
}

}  // namespace

double discriminant(double xi_mag, const ModelParams& p) {
    return discriminant_from_symbol(symbol_at(xi_mag, p), p.tau(), p.delta());
}

double cubic_residual(std::complex<double> mu, double xi_mag, const ModelParams& p) {
    const double a = symbol_at(xi_mag, p);
    const double b = (p.delta() + p.tau()) * a;
    return std::abs(((p.tau() * mu + 1.0) * mu + b) * mu + a);
}

RootTriple characteristic_roots(double xi_mag, const ModelParams& p) {
    const double tau = p.tau();
    const double a = symbol_at(xi_mag, p);
    const double b = (p.delta() + tau) * a;
    RootTriple r;
    r.eta_mag = xi_mag / p.lambda();
    r.discriminant = discriminant_from_symbol(a, tau, p.delta());
    if (a == 0.0) {
        r.mu1 = -1.0 / tau;
        r.mu2 = r.mu3 = 0.0;
        r.regime = Regime::small_freq;
        r.near_degenerate = true;
        return r;
    }

    // Companion matrix of the monic cubic in ν = μ/s; s balances the entries
    // when the conjugate pair grows like sqrt(b/τ).
    const double s = std::max(1.0, std::sqrt(b / tau));
    Eigen::Matrix3d C;
    C << -1.0 / (tau * s), -b / (tau * s * s), -a / (tau * s * s * s), 1.0, 0.0, 0.0, 0.0, 1.0, 0.0;
    Eigen::EigenSolver<Eigen::Matrix3d> es(C, false);
    std::complex<double> ev[3];
    for (int i = 0; i < 3; ++i) ev[i] = es.eigenvalues()[i] * s;

    const Cubic cubic{tau, b, a};
    const double mu_fast = a >= 1.0 ? -1.0 / (p.delta() + tau) : -1.0 / tau;

    // Index of the root with the smallest |Im|; ties go to the most negative real part.
    int i1 = 0;
    for (int i = 1; i < 3; ++i) {
        const double di = std::abs(ev[i].imag()), d1 = std::abs(ev[i1].imag());
        if (di < d1 - 1e-14 * std::abs(ev[i]) ||
            (std::abs(di - d1) <= 1e-14 * std::abs(ev[i]) && ev[i].real() < ev[i1].real()))
            i1 = i;
    }

    bool three_real = r.discriminant > 0.0;
    if (three_real) {
        double re[3];
        for (int i = 0; i < 3; ++i) re[i] = newton_real(cubic, ev[i].real());
        std::sort(re, re + 3);
        int pick = 0;
        for (int i = 1; i < 3; ++i)
            if (std::abs(re[i] - mu_fast) < std::abs(re[pick] - mu_fast)) pick = i;
        r.mu1 = re[pick];
        double rest[2];
        for (int i = 0, j = 0; i < 3; ++i)
            if (i != pick) rest[j++] = re[i];
        r.mu2 = std::max(rest[0], rest[1]);
        r.mu3 = std::min(rest[0], rest[1]);
        r.mu_R = 0.5 * (rest[0] + rest[1]);
        r.mu_I = 0.0;
    } else {
        const double m1 = newton_real(cubic, ev[i1].real());
        r.mu1 = m1;
        // Deflate: τμ³ + μ² + bμ + a = (μ - μ1)(τμ² + qμ + c) with c = -a/μ1 and
        // q = 1 + τμ1 = -(b + a/μ1)/μ1. Pick the form with the smaller rounding
        // amplification: the first cancels near μ1 = -1/τ (small |η|), the second
        // near μ1 = -a/b (large |η|).
        const double c = -a / m1;
        const double am = std::abs(m1);
        const double amp1 = (1.0 + 2.0 * tau * am) / std::max(std::abs(1.0 + tau * m1), 1e-300);
        const double q2 = -(b + a / m1) / m1;
        const double amp2 = 3.0 * (b + a / am) / am / std::max(std::abs(q2), 1e-300);
        const double q = amp1 <= amp2 ? 1.0 + tau * m1 : q2;
        const double disc_q = q * q - 4.0 * tau * c;
        r.mu_R = -q / (2.0 * tau);
        if (disc_q < 0.0) {
            r.mu_I = std::sqrt(-disc_q) / (2.0 * tau);
            r.mu2 = {r.mu_R, r.mu_I};
            r.mu3 = {r.mu_R, -r.mu_I};
        } else {
            const double sq = std::sqrt(disc_q);
            const double big = -(q + std::copysign(sq, q)) / (2.0 * tau);
            const double small = big != 0.0 ? c / (tau * big) : 0.0;
            r.mu2 = std::max(big, small);
            r.mu3 = std::min(big, small);
            r.mu_I = 0.0;
        }
    }

    r.near_degenerate = min_distance(r) < 1e-6;
    const Thresholds th = thresholds(p);
    if (r.near_degenerate)
        r.regime = Regime::transition;
    else if (r.eta_mag >= th.n0)
        r.regime = Regime::large_freq;
    else if (r.eta_mag <= th.eps0)
        r.regime = Regime::small_freq;
    else
        r.regime = Regime::transition;
    return r;
}

namespace {

struct DominanceTest {
    double tau, S, K;
    // a^3 coefficient magnitude and the lower-order terms of Δ/a = Q(a).
    bool large_ok(double a) const {
        const double lead = 4.0 * tau * S * S * S * a * a;
        const double rest = std::abs(K * a - 4.0);
        return (-lead + K * a - 4.0) < 0.0 && lead >= 2.0 * rest;
    }
    bool small_ok(double a) const {
        const double rest = std::abs(K * a - 4.0 * tau * S * S * S * a * a);
        return (-4.0 * tau * S * S * S * a * a + K * a - 4.0) < 0.0 && 4.0 >= 2.0 * rest;
    }
};

constexpr double kSweepMin = 1e-8;
constexpr double kSweepCap = 1e4;
constexpr int kSweepPoints = 4001;

template <class Pred>
double bisect(Pred ok, double lo_bad, double hi_good) {
    // ok(lo_bad) false, ok(hi_good) true; returns the transition point.
    for (int it = 0; it < 200 && hi_good - lo_bad > 1e-15 * hi_good; ++it) {
        const double mid = std::sqrt(lo_bad * hi_good);
        if (ok(mid))
            hi_good = mid;
        else
            lo_bad = mid;
    }
    return hi_good;
}

Thresholds compute_thresholds(double tau, double delta, double sigma) {
    const double S = delta + tau;
    const DominanceTest dt{tau, S, 18.0 * tau * S + S * S - 27.0 * tau * tau};
    auto sym = [sigma](double r) { return std::pow(r, 2.0 * sigma); };
    std::vector<double> rs(kSweepPoints);
    const double lmin = std::log(kSweepMin), lmax = std::log(kSweepCap);
    for (int i = 0; i < kSweepPoints; ++i)
        rs[i] = std::exp(lmin + (lmax - lmin) * i / (kSweepPoints - 1));

    auto trace_of = [&](auto pred) {
        std::vector<double> t;
        for (int i = 0; i < kSweepPoints; i += 40) {
            t.push_back(rs[i]);
            t.push_back(pred(sym(rs[i])) ? 1.0 : 0.0);
        }
        return t;
    };

    Thresholds th;
    int last_bad = -1;
    for (int i = 0; i < kSweepPoints; ++i)
        if (!dt.large_ok(sym(rs[i]))) last_bad = i;
    if (last_bad == kSweepPoints - 1)
        throw NonConvergence("threshold_N0: dominance of the |eta|^{6 sigma} term not reached by |eta|=1e4",
                             trace_of([&](double a) { return dt.large_ok(a); }));
    th.n0_raw = last_bad < 0 ? rs[0]
                             : bisect([&](double r) { return dt.large_ok(sym(r)); }, rs[last_bad],
                                      rs[last_bad + 1]);

    int first_bad = -1;
    for (int i = 0; i < kSweepPoints; ++i)
        if (!dt.small_ok(sym(rs[i]))) {
            first_bad = i;
            break;
        }
    if (first_bad <= 0)
        throw NonConvergence("threshold_eps0: small-frequency dominance fails at the sweep floor or never ends",
                             trace_of([&](double a) { return dt.small_ok(a); }));
    // sup of the good interval: ok on the left, bad on the right
    {
        double lo = rs[first_bad - 1], hi = rs[first_bad];
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            const double mid = std::sqrt(lo * hi);
            if (dt.small_ok(sym(mid)))
                lo = mid;
            else
                hi = mid;
        }
        th.eps0_raw = lo;
    }
    th.n0 = 1.1 * th.n0_raw;
    th.eps0 = th.eps0_raw / 1.1;
    return th;
}

}  // namespace

Thresholds thresholds(const ModelParams& p) {
    static std::mutex mu;
    static std::map<std::tuple<double, double, double>, Thresholds> cache;
    const auto key = std::make_tuple(p.tau(), p.delta(), p.sigma());
    {
        std::lock_guard lock(mu);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    Thresholds th = compute_thresholds(p.tau(), p.delta(), p.sigma());
    std::lock_guard lock(mu);
    cache.emplace(key, th);
    return th;
}

double threshold_N0(const ModelParams& p) { return thresholds(p).n0; }
double threshold_eps0(const ModelParams& p) { return thresholds(p).eps0; }

RootTriple asymptotic_roots_large(double xi_mag, const ModelParams& p) {
    const Thresholds th = thresholds(p);
    if (!(xi_mag >= th.n0 * p.lambda()))
        throw DomainError("asymptotic_roots_large: |xi|=" + std::to_string(xi_mag) + " below N0*lambda=" +
                          std::to_string(th.n0 * p.lambda()));
    const double tau = p.tau(), S = p.delta() + tau;
    RootTriple r;
    r.eta_mag = xi_mag / p.lambda();
    r.mu1 = -1.0 / S;
    r.mu_R = -p.delta() / (2.0 * tau * S);
    r.mu_I = std::sqrt(S / tau) * std::pow(r.eta_mag, p.sigma());
    r.mu2 = {r.mu_R, r.mu_I};
    r.mu3 = {r.mu_R, -r.mu_I};
    r.discriminant = discriminant(xi_mag, p);
    r.regime = Regime::large_freq;
    return r;
}

RootTriple asymptotic_roots_small(double xi_mag, const ModelParams& p) {
    if (p.lambda() != 1.0) throw DomainError("asymptotic_roots_small: requires lambda = 1");
    const Thresholds th = thresholds(p);
    if (!(xi_mag >= 0.0) || xi_mag > th.eps0)
        throw DomainError("asymptotic_roots_small: |xi|=" + std::to_string(xi_mag) + " above eps0=" +
                          std::to_string(th.eps0));
    RootTriple r;
    r.eta_mag = xi_mag;
    const double a = symbol_at(xi_mag, p);
    r.mu1 = -1.0 / p.tau();
    r.mu_R = -0.5 * p.delta() * a;
    r.mu_I = std::sqrt(a);
    r.mu2 = {r.mu_R, r.mu_I};
    r.mu3 = {r.mu_R, -r.mu_I};
    r.discriminant = discriminant(xi_mag, p);
    r.regime = Regime::small_freq;
    return r;
}

double spectral_abscissa(const RootTriple& r) noexcept {
    return std::max({r.mu1.real(), r.mu2.real(), r.mu3.real()});
}

}  // namespace jmgt
