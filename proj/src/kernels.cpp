#include "jmgt/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jmgt/errors.hpp"
#include "jmgt/ode.hpp"

namespace jmgt {

using C = std::complex<double>;

ModeKernel::ModeKernel(double xi_mag, const ModelParams& p)
    : xi_(xi_mag), a_(symbol_at(xi_mag, p)), tau_(p.tau()) {
    b_ = (p.delta() + p.tau()) * a_;
    roots_ = characteristic_roots(xi_mag, p);
    fallback_ = roots_.near_degenerate;
    mu_ = {roots_.mu1, roots_.mu2, roots_.mu3};
    if (!fallback_) {
        // Lagrange basis of the Vandermonde system: e^{μ_i t} enters K̂_2 with
        // 1/D_i, K̂_1 with -(μ_m+μ_p)/D_i and K̂_0 with μ_m μ_p/D_i.
        for (int i = 0; i < 3; ++i) {
            const C mm = mu_[(i + 1) % 3], mp = mu_[(i + 2) % 3];
            const C d = (mu_[i] - mm) * (mu_[i] - mp);
            coeff_[0][i] = mm * mp / d;
            coeff_[1][i] = -(mm + mp) / d;
            coeff_[2][i] = 1.0 / d;
        }
    }
}

KernelTriple ModeKernel::at(double t) const {
    const double times[1] = {t};
    return at(std::span<const double>(times, 1)).front();
}

namespace {

std::vector<KernelTriple> integrate_kernels(std::span<const double> times, double xi, double tau, double b,
                                            double a, double rtol) {
    for (double t : times)
        if (!(t >= 0.0)) throw DomainError("kernel_eval: t must be >= 0");
    // Sort the requested times, integrate once, then scatter back.
    std::vector<std::size_t> order(times.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto l, auto r) { return times[l] < times[r]; });
    std::vector<double> sorted(times.size());
    for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = times[order[i]];

    std::vector<C> y0(9, 0.0);
    for (int j = 0; j < 3; ++j) y0[3 * j + j] = 1.0;
    auto rhs = [tau, b, a](double, const std::vector<C>& y, std::vector<C>& dy) {
        for (int j = 0; j < 3; ++j) {
            dy[3 * j] = y[3 * j + 1];
            dy[3 * j + 1] = y[3 * j + 2];
            dy[3 * j + 2] = -(y[3 * j + 2] + b * y[3 * j + 1] + a * y[3 * j]) / tau;
        }
    };
    OdeOptions opt;
    opt.rtol = rtol;
    opt.atol = rtol * 1e-3;
    auto states = integrate_dopri5(rhs, y0, 0.0, sorted, opt);
    std::vector<KernelTriple> out(times.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        auto& kt = out[order[i]];
        kt.t = sorted[i];
        kt.xi_mag = xi;
        kt.ode_fallback = true;
        for (int j = 0; j < 3; ++j)
            for (int d = 0; d < 3; ++d) kt.value[d][j] = states[i][3 * j + d];
    }
    return out;
}

}  // namespace

std::vector<KernelTriple> ModeKernel::at(std::span<const double> times) const {
    if (fallback_) return integrate_kernels(times, xi_, tau_, b_, a_, 1e-12);
    std::vector<KernelTriple> out(times.size());
    for (std::size_t n = 0; n < times.size(); ++n) {
        const double t = times[n];
        if (!(t >= 0.0)) throw DomainError("kernel_eval: t must be >= 0");
        KernelTriple& kt = out[n];
        kt.t = t;
        kt.xi_mag = xi_;
        C e[3], me[3], mme[3];
        for (int i = 0; i < 3; ++i) {
            e[i] = std::exp(mu_[i] * t);
            me[i] = mu_[i] * e[i];
            mme[i] = mu_[i] * me[i];
        }
        for (int j = 0; j < 3; ++j) {
            kt.value[0][j] = coeff_[j][0] * e[0] + coeff_[j][1] * e[1] + coeff_[j][2] * e[2];
            kt.value[1][j] = coeff_[j][0] * me[0] + coeff_[j][1] * me[1] + coeff_[j][2] * me[2];
            kt.value[2][j] = coeff_[j][0] * mme[0] + coeff_[j][1] * mme[1] + coeff_[j][2] * mme[2];
        }
        // The initial rows are exact by construction; pin them so t = 0
        // reproduces the identity without Vandermonde rounding.
        if (t == 0.0)
            for (int d = 0; d < 3; ++d)
                for (int j = 0; j < 3; ++j) kt.value[d][j] = d == j ? 1.0 : 0.0;
    }
    return out;
}

KernelTriple kernel_eval(double t, double xi_mag, const ModelParams& p) { return ModeKernel(xi_mag, p).at(t); }

std::vector<KernelTriple> kernel_eval_ode(std::span<const double> times, double xi_mag, const ModelParams& p,
                                          double rtol) {
    const double a = symbol_at(xi_mag, p);
    return integrate_kernels(times, xi_mag, p.tau(), (p.delta() + p.tau()) * a, a, rtol);
}

namespace {

void update(BoundFit& f, double ratio, double t, double xi) {
    if (ratio > f.C) {
        f.C = ratio;
        f.worst_t = t;
        f.worst_xi = xi;
    }
}

}  // namespace

LargeFreqBoundReport check_large_freq_bounds(const ModelParams& p, std::span<const double> t_grid,
                                             std::span<const double> xi_grid) {
    LargeFreqBoundReport rep;
    if (t_grid.empty() || xi_grid.empty()) {
        rep.message = "empty grid";
        return rep;
    }
    const double n0l = threshold_N0(p) * p.lambda();
    double abscissa_mag = std::numeric_limits<double>::infinity();
    double worst_xi = 0.0;
    std::vector<ModeKernel> modes;
    modes.reserve(xi_grid.size());
    for (double xi : xi_grid) {
        if (xi < n0l) throw DomainError("check_large_freq_bounds: |xi| below N0*lambda");
        modes.emplace_back(xi, p);
        const double s = -spectral_abscissa(modes.back().roots());
        if (s < abscissa_mag) {
            abscissa_mag = s;
            worst_xi = xi;
        }
    }
    if (!(abscissa_mag > 0.0)) {
        rep.message = "no admissible decay rate: spectral abscissa >= 0 at |xi|=" + std::to_string(worst_xi);
        rep.grouped.worst_xi = worst_xi;
        return rep;
    }
    rep.c = 0.95 * abscissa_mag;
    rep.grouped.name = "dk0+dk1+ddk2";
    rep.dk2.name = "dk2";
    rep.per_term = {{"dk0"}, {"dk1"}, {"ddk2"}};
    for (const auto& mk : modes) {
        const double eta_pow = std::pow(mk.xi_mag() / p.lambda(), -p.sigma());
        for (const auto& kt : mk.at(t_grid)) {
            const double env = std::exp(rep.c * kt.t);
            const double g0 = std::abs(kt.dk(0)), g1 = std::abs(kt.dk(1)), g2 = std::abs(kt.ddk(2));
            update(rep.grouped, (g0 + g1 + g2) * env, kt.t, kt.xi_mag);
            update(rep.dk2, std::abs(kt.dk(2)) * env / eta_pow, kt.t, kt.xi_mag);
            update(rep.per_term[0], g0 * env, kt.t, kt.xi_mag);
            update(rep.per_term[1], g1 * env, kt.t, kt.xi_mag);
            update(rep.per_term[2], g2 * env, kt.t, kt.xi_mag);
        }
    }
    rep.ok = std::isfinite(rep.grouped.C) && std::isfinite(rep.dk2.C) && rep.c > 0.0;
    rep.message = rep.ok ? "ok" : "non-finite fitted constant";
    return rep;
}

SmallFreqBoundReport check_small_freq_bounds(const ModelParams& p, std::span<const double> t_grid,
                                             std::span<const double> xi_grid) {
    SmallFreqBoundReport rep;
    if (p.lambda() != 1.0) throw DomainError("check_small_freq_bounds: requires lambda = 1");
    if (t_grid.empty() || xi_grid.empty()) {
        rep.message = "empty grid";
        return rep;
    }
    const double eps0 = threshold_eps0(p);
    double slow = std::numeric_limits<double>::infinity(), fast = slow;
    std::vector<ModeKernel> modes;
    for (double xi : xi_grid) {
        if (!(xi > 0.0) || xi > eps0) throw DomainError("check_small_freq_bounds: need 0 < |xi| <= eps0");
        modes.emplace_back(xi, p);
        const auto& r = modes.back().roots();
        slow = std::min(slow, -r.mu_R / symbol_at(xi, p));
        fast = std::min(fast, -r.mu1.real());
    }
    if (!(slow > 0.0) || !(fast > 0.0)) {
        rep.message = "no admissible decay rate";
        return rep;
    }
    rep.c_slow = 0.95 * slow;
    rep.c_fast = 0.95 * fast;
    rep.fits = {{"dk0"}, {"dk1"}, {"dk2"}, {"ddk2"}};
    for (const auto& mk : modes) {
        const double a = symbol_at(mk.xi_mag(), p), ra = std::sqrt(a);
        for (const auto& kt : mk.at(t_grid)) {
            const double es = std::exp(-rep.c_slow * a * kt.t), ef = std::exp(-rep.c_fast * kt.t);
            update(rep.fits[0], std::abs(kt.dk(0)) / (ra * es + a * ef), kt.t, kt.xi_mag);
            update(rep.fits[1], std::abs(kt.dk(1)) / (es + a * ef), kt.t, kt.xi_mag);
            update(rep.fits[2], std::abs(kt.dk(2)) / (es + ef), kt.t, kt.xi_mag);
            update(rep.fits[3], std::abs(kt.ddk(2)) / (ra * es + ef), kt.t, kt.xi_mag);
        }
    }
    rep.ok = std::all_of(rep.fits.begin(), rep.fits.end(), [](const BoundFit& f) { return std::isfinite(f.C); });
    rep.message = rep.ok ? "ok" : "non-finite fitted constant";
    return rep;
}

C small_freq_representation(double t, double xi_mag, const ModelParams& p, C w0, C w1, C w2) {
    if (p.lambda() != 1.0) throw DomainError("small_freq_representation: requires lambda = 1");
    if (xi_mag > threshold_eps0(p)) throw DomainError("small_freq_representation: |xi| above eps0");
    const RootTriple r = characteristic_roots(xi_mag, p);
    if (!(r.mu_I > 0.0)) throw DomainError("small_freq_representation: roots not in the conjugate regime");
    const double m1 = r.mu1.real(), mr = r.mu_R, mi = r.mu_I;
    const double d = 2.0 * mr * m1 - mi * mi - mr * mr - m1 * m1;
    const double cs = std::cos(mi * t), sn = std::sin(mi * t), er = std::exp(mr * t);
    const C t1 = (-(mi * mi + mr * mr) * w0 + 2.0 * mr * w1 - w2) / d * m1 * std::exp(m1 * t);
    const C t2 = ((2.0 * mr * m1 - m1 * m1) * w0 - 2.0 * mr * w1 + w2) / d * (cs * mr - sn * mi) * er;
    const C t3 = (m1 * (mr * m1 + mi * mi - mr * mr) * w0 + (mr * mr - mi * mi - m1 * m1) * w1 - (mr - m1) * w2) /
                 (mi * d) * (sn * mr + cs * mi) * er;
    return t1 + t2 + t3;
}

std::vector<double> geometric_time_grid(double t_max, int per_octave, double t_first) {
    if (!(t_max > 0.0) || per_octave < 1 || !(t_first > 0.0))
        throw ConfigError("t_grid", "needs t_max > 0, per_octave >= 1, t_first > 0");
    std::vector<double> t{0.0};
    for (int k = 0;; ++k) {
        const double v = t_first * std::exp2(static_cast<double>(k) / per_octave);
        if (v > t_max * (1.0 + 1e-12)) break;
        t.push_back(v);
    }
    if (t.back() < t_max * (1.0 - 1e-12)) t.push_back(t_max);
    return t;
}

}  // namespace jmgt
