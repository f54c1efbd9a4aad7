// Independent reference computations used by the unit tests. None of these
// call into the library beyond grid indexing.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "jmgt/grid.hpp"

namespace oracle {

using cld = std::complex<long double>;

// Durand-Kerner iteration for τμ³ + μ² + bμ + a in long double.
inline std::array<cld, 3> cubic_roots(long double tau, long double b, long double a) {
    const cld c2 = 1.0L / tau, c1 = b / tau, c0 = a / tau;
    auto f = [&](cld z) { return ((z + c2) * z + c1) * z + c0; };
    const long double r = 1.0L + std::max({std::abs(c2), std::abs(c1), std::abs(c0)});
    std::array<cld, 3> z = {cld(0.4L, 0.9L) * r, cld(0.4L, 0.9L) * cld(0.4L, 0.9L) * r,
                            cld(0.4L, 0.9L) * cld(0.4L, 0.9L) * cld(0.4L, 0.9L) * r};
    for (int it = 0; it < 2000; ++it) {
        long double move = 0.0L;
        for (int i = 0; i < 3; ++i) {
            cld den = 1.0L;
            for (int j = 0; j < 3; ++j)
                if (j != i) den *= z[i] - z[j];
            const cld step = f(z[i]) / den;
            z[i] -= step;
            move = std::max(move, std::abs(step) / std::max(std::abs(z[i]), 1e-300L));
        }
        if (move < 1e-19L) break;
    }
    // One Newton polish per root.
    for (auto& x : z) {
        const cld d = (3.0L * x + 2.0L * c2) * x + c1;
        if (std::abs(d) > 0.0L) x -= f(x) / d;
    }
    return z;
}

// Distance between root multisets (greedy matching).
inline double root_set_distance(std::array<std::complex<double>, 3> a, std::array<cld, 3> b) {
    double worst = 0.0;
    std::array<bool, 3> used{};
    for (const auto& x : a) {
        int best = -1;
        long double bd = 1e300L;
        for (int j = 0; j < 3; ++j) {
            if (used[j]) continue;
            const long double d = std::abs(cld(x.real(), x.imag()) - b[j]);
            if (d < bd) {
                bd = d;
                best = j;
            }
        }
        used[best] = true;
        worst = std::max(worst, static_cast<double>(bd / std::max(1.0L, std::abs(b[best]))));
    }
    return worst;
}

// Kernel K_j(t) and two derivatives from the Taylor series of
// τy''' + y'' + by' + ay = 0 with y^{(d)}(0) = δ_dj. Good for small |μ|t.
inline std::array<double, 3> taylor_kernel(int j, double t, double tau, double b, double a, int terms = 200) {
    std::vector<long double> c(terms + 3, 0.0L);  // derivatives at 0
    c[j] = 1.0L;
    for (int k = 0; k < terms; ++k) c[k + 3] = -(c[k + 2] + b * c[k + 1] + a * c[k]) / tau;
    std::array<double, 3> out{};
    for (int d = 0; d < 3; ++d) {
        long double sum = 0.0L, term = 1.0L;  // t^k / k!
        for (int k = 0; k + d < terms + 3; ++k) {
            sum += c[k + d] * term;
            term *= t / (k + 1);
        }
        out[d] = static_cast<double>(sum);
    }
    return out;
}

// Classic fixed-step RK4 on the mode ODE for (y, y', y''), complex data.
inline std::array<std::complex<double>, 3> rk4_mode(std::array<std::complex<double>, 3> y, double t_end,
                                                     double tau, double b, double a, int steps) {
    using C = std::complex<double>;
    auto rhs = [&](const std::array<C, 3>& v) {
        return std::array<C, 3>{v[1], v[2], -(v[2] + b * v[1] + a * v[0]) / tau};
    };
    const double h = t_end / steps;
    for (int s = 0; s < steps; ++s) {
        const auto k1 = rhs(y);
        std::array<C, 3> tmp;
        for (int i = 0; i < 3; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        const auto k2 = rhs(tmp);
        for (int i = 0; i < 3; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        const auto k3 = rhs(tmp);
        for (int i = 0; i < 3; ++i) tmp[i] = y[i] + h * k3[i];
        const auto k4 = rhs(tmp);
        for (int i = 0; i < 3; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return y;
}

// O(N^2) circular convolution of unitary coefficients: the spectrum of the
// pointwise product f g is (1/sqrt(N^n)) Σ_{p+q=k mod N} f̂_p ĝ_q.
inline jmgt::SpectralArray direct_product(const jmgt::FrequencyGrid& g, const jmgt::SpectralArray& f,
                                          const jmgt::SpectralArray& h) {
    const int N = g.modes_per_axis();
    jmgt::SpectralArray out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (f[i] == 0.0) continue;
        const auto ki = g.mode_index(i);
        for (std::size_t j = 0; j < g.size(); ++j) {
            if (h[j] == 0.0) continue;
            const auto kj = g.mode_index(j);
            jmgt::ModeIndex k{};
            for (int d = 0; d < g.dims(); ++d) {
                int v = ((ki[d] + kj[d]) % N + N) % N;
                k[d] = v >= N / 2 ? v - N : v;
            }
            out[*g.flat_index(k)] += f[i] * h[j];
        }
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(g.size()));
    for (auto& v : out) v *= scale;
    return out;
}

// Composite trapezoid with two Richardson steps: O(h^6) for smooth integrands.
inline double richardson_integral(const std::function<double(double)>& f, double a, double b, int n = 64) {
    auto trap = [&](int m) {
        const double h = (b - a) / m;
        double s = 0.5 * (f(a) + f(b));
        for (int i = 1; i < m; ++i) s += f(a + i * h);
        return s * h;
    };
    const double t1 = trap(n), t2 = trap(2 * n), t4 = trap(4 * n);
    const double r1 = (4.0 * t2 - t1) / 3.0, r2 = (4.0 * t4 - t2) / 3.0;
    return (16.0 * r2 - r1) / 15.0;
}

}  // namespace oracle
