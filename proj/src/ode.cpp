#include "jmgt/ode.hpp"

#include <algorithm>

namespace jmgt {

TaylorModeIntegrator::TaylorModeIntegrator(double tau, double b, double a, int order)
    : tau_(tau), b_(b), a_(a), order_(order) {
    if (!(tau > 0.0) || order < 8) throw ConfigError("TaylorModeIntegrator", "needs tau > 0, order >= 8");
    // Fujiwara bound on the root magnitudes; with |μ|h <= 1 the k-th series term
    // is below 1/k!, so order 30 is far past long double precision.
    const long double rho = 2.0L * std::max({1.0L / tau_, std::sqrt(b_ / tau_),
                                             std::cbrt(a_ / (2.0L * tau_))});
    step_ = 1.0L / rho;
}

std::array<std::complex<long double>, 3> TaylorModeIntegrator::advance(
    std::array<std::complex<long double>, 3> state, double t) const {
    using C = std::complex<long double>;
    if (t < 0.0) throw ContractViolation("TaylorModeIntegrator: negative time");
    const int K = order_;
    std::vector<C> c(K + 3);
    long double done = 0.0L;
    const long double total = t;
    while (done < total) {
        const long double h = std::min(step_, total - done);
        // y(s) = Σ c_k s^k; c_{k+3}(k+3)(k+2)(k+1)τ = -[c_{k+2}(k+2)(k+1) + b c_{k+1}(k+1) + a c_k]
        c[0] = state[0];
        c[1] = state[1];
        c[2] = state[2] / 2.0L;
        for (int k = 0; k < K; ++k) {
            const long double kk = k;
            c[k + 3] = -(c[k + 2] * ((kk + 2) * (kk + 1)) + b_ * c[k + 1] * (kk + 1) + a_ * c[k]) /
                       (tau_ * (kk + 3) * (kk + 2) * (kk + 1));
        }
        C y = 0, dy = 0, ddy = 0;
        for (int k = K + 2; k >= 0; --k) {
            y = y * h + c[k];
            if (k >= 1) dy = dy * h + c[k] * static_cast<long double>(k);
            if (k >= 2) ddy = ddy * h + c[k] * (static_cast<long double>(k) * (k - 1));
        }
        state = {y, dy, ddy};
        done += h;
    }
    return state;
}

}  // namespace jmgt
