#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "jmgt/errors.hpp"

namespace jmgt {

struct OdeOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double initial_step = 0.0;  // 0 picks a step from the first derivative
    double min_step = 1e-13;    // relative to max(1, |t|)
    std::size_t max_steps = 20'000'000;
};

struct OdeStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evals = 0;
};

/// Adaptive Dormand-Prince 5(4) for y' = f(t, y) on complex vectors. Returns the
/// state at every requested output time (sorted, >= t0); steps are clipped to
/// land on each output exactly. Throws NonConvergence on step-size underflow.
template <class Rhs>
std::vector<std::vector<std::complex<double>>> integrate_dopri5(
    Rhs&& rhs, std::vector<std::complex<double>> y, double t0, std::span<const double> t_out,
    const OdeOptions& opt = {}, OdeStats* stats = nullptr);

/// Taylor-series integrator for τy''' + y'' + b y' + a y = 0 with complex state
/// (y, y', y''), carried in long double. Used as an independent reference.
class TaylorModeIntegrator {
public:
    TaylorModeIntegrator(double tau, double b, double a, int order = 30);
    /// Advance `state` from 0 to t (t >= 0).
    std::array<std::complex<long double>, 3> advance(std::array<std::complex<long double>, 3> state,
                                                     double t) const;

private:
    long double tau_, b_, a_;
    int order_;
    long double step_;
};

// ---------------------------------------------------------------------------

namespace detail {

using CVec = std::vector<std::complex<double>>;

inline double error_norm(const CVec& err, const CVec& y0, const CVec& y1, const OdeOptions& o) {
    double acc = 0.0;
    for (std::size_t i = 0; i < err.size(); ++i) {
        const double sc = o.atol + o.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double r = std::abs(err[i]) / sc;
        acc += r * r;
    }
    return err.empty() ? 0.0 : std::sqrt(acc / static_cast<double>(err.size()));
}

}  // namespace detail

template <class Rhs>
std::vector<std::vector<std::complex<double>>> integrate_dopri5(
    Rhs&& rhs, std::vector<std::complex<double>> y, double t0, std::span<const double> t_out,
    const OdeOptions& opt, OdeStats* stats) {
    using detail::CVec;
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    const std::size_t n = y.size();
    OdeStats local;
    OdeStats& st = stats ? *stats : local;
    std::vector<CVec> out;
    out.reserve(t_out.size());

    CVec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y1(n), err(n);
    double t = t0;
    rhs(t, y, k1);
    ++st.rhs_evals;

    double h = opt.initial_step;
    if (!(h > 0.0)) {
        double yn = 0.0, fn = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            yn = std::max(yn, std::abs(y[i]));
            fn = std::max(fn, std::abs(k1[i]));
        }
        h = fn > 0.0 ? 0.01 * std::max(yn, opt.atol / opt.rtol) / fn : 1e-3;
        h = std::min(std::max(h, 1e-10), 0.1);
    }

    for (double target : t_out) {
        if (target < t) throw ContractViolation("integrate_dopri5: output times must be sorted");
        while (t < target) {
            if (st.accepted + st.rejected > opt.max_steps)
                throw NonConvergence("integrate_dopri5: step budget exhausted at t=" + std::to_string(t));
            bool last = false;
            double hs = h;
            if (t + hs >= target) {
                hs = target - t;
                last = true;
            }
            auto stage = [&](CVec& dst, std::initializer_list<std::pair<double, const CVec*>> terms) {
                for (std::size_t i = 0; i < n; ++i) {
                    std::complex<double> acc = y[i];
                    for (const auto& [c, k] : terms) acc += hs * c * (*k)[i];
                    dst[i] = acc;
                }
            };
            stage(tmp, {{a21, &k1}});
            rhs(t + c2 * hs, tmp, k2);
            stage(tmp, {{a31, &k1}, {a32, &k2}});
            rhs(t + c3 * hs, tmp, k3);
            stage(tmp, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
            rhs(t + c4 * hs, tmp, k4);
            stage(tmp, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
            rhs(t + c5 * hs, tmp, k5);
            stage(tmp, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
            rhs(t + hs, tmp, k6);
            stage(y1, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
            rhs(t + hs, y1, k7);
            st.rhs_evals += 6;
            for (std::size_t i = 0; i < n; ++i)
                err[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                               e7 * k7[i]);
            const double en = detail::error_norm(err, y, y1, opt);
            if (!std::isfinite(en))
                throw NonConvergence("integrate_dopri5: non-finite state at t=" + std::to_string(t));
            if (en <= 1.0) {
                t = last ? target : t + hs;
                y.swap(y1);
                k1.swap(k7);
                ++st.accepted;
                const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
                if (!last || fac < 1.0) h = hs * fac;
            } else {
                ++st.rejected;
                h = hs * std::max(0.2, 0.9 * std::pow(en, -0.2));
            }
            if (h < opt.min_step * std::max(1.0, std::abs(t)))
                throw NonConvergence("integrate_dopri5: step-size underflow (stiff system?) at t=" +
                                         std::to_string(t),
                                     {t, h});
        }
        out.push_back(y);
    }
    return out;
}

}  // namespace jmgt
