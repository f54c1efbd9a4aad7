#pragma once

#include <array>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "jmgt/dispersion.hpp"
#include "jmgt/params.hpp"

namespace jmgt {

/// K̂_j(t, |ξ|; λ) for j = 0, 1, 2 with first and second time derivatives.
/// Row d of `value` holds ∂ₜ^d K̂_j, column j the kernel index.
struct KernelTriple {
    std::array<std::array<std::complex<double>, 3>, 3> value{};
    double t = 0.0;
    double xi_mag = 0.0;
    bool ode_fallback = false;

    std::complex<double> k(int j) const { return value[0][j]; }
    std::complex<double> dk(int j) const { return value[1][j]; }
    std::complex<double> ddk(int j) const { return value[2][j]; }
};

/// Per-mode kernel evaluator. Distinct roots use the eigen-expansion
/// Σ_i c_ij e^{μ_i t}; roots closer than 1e-6 switch to integrating the mode
/// ODE with the adaptive Dormand-Prince scheme.
class ModeKernel {
public:
    ModeKernel(double xi_mag, const ModelParams& p);

    KernelTriple at(double t) const;
    /// Evaluate at several times; for the ODE path this integrates once.
    std::vector<KernelTriple> at(std::span<const double> times) const;

    const RootTriple& roots() const noexcept { return roots_; }
    bool uses_fallback() const noexcept { return fallback_; }
    double xi_mag() const noexcept { return xi_; }

private:
    double xi_;
    double a_, b_, tau_;
    RootTriple roots_;
    bool fallback_;
    std::array<std::complex<double>, 3> mu_{};
    // coeff_[j][i]: weight of e^{μ_i t} in K̂_j
    std::array<std::array<std::complex<double>, 3>, 3> coeff_{};
};

KernelTriple kernel_eval(double t, double xi_mag, const ModelParams& p);

/// Force the ODE path (used for cross-checks).
std::vector<KernelTriple> kernel_eval_ode(std::span<const double> times, double xi_mag, const ModelParams& p,
                                          double rtol = 1e-12);

/// Fitted pointwise bound: |value| <= C * shape(t, ξ) with the decay rates fixed.
struct BoundFit {
    std::string name;
    double C = 0.0;
    double worst_t = 0.0;
    double worst_xi = 0.0;
};

struct LargeFreqBoundReport {
    bool ok = false;
    std::string message;
    double c = 0.0;             ///< 0.95 * min_ξ |spectral abscissa|
    BoundFit grouped;           ///< |∂ₜK̂₀| + |∂ₜK̂₁| + |∂ₜ²K̂₂| <= C e^{-ct}
    BoundFit dk2;               ///< |∂ₜK̂₂| <= C λ^σ |ξ|^{-σ} e^{-ct}
    std::vector<BoundFit> per_term;  ///< informational single-term fits
};

LargeFreqBoundReport check_large_freq_bounds(const ModelParams& p, std::span<const double> t_grid,
                                             std::span<const double> xi_grid);

struct SmallFreqBoundReport {
    bool ok = false;
    std::string message;
    double c_slow = 0.0;  ///< rate in e^{-c|ξ|^{2σ}t}
    double c_fast = 0.0;  ///< rate in e^{-ct}
    std::vector<BoundFit> fits;  ///< ∂ₜK̂₀, ∂ₜK̂₁, ∂ₜK̂₂, ∂ₜ²K̂₂
};

SmallFreqBoundReport check_small_freq_bounds(const ModelParams& p, std::span<const double> t_grid,
                                             std::span<const double> xi_grid);

/// ∂ₜŵ(t, ξ) from the explicit three-term small-frequency formula written with
/// μ1, μ_R, μ_I. DomainError outside |ξ| <= ε0 or off the conjugate regime.
std::complex<double> small_freq_representation(double t, double xi_mag, const ModelParams& p,
                                               std::complex<double> w0, std::complex<double> w1,
                                               std::complex<double> w2);

/// {0} ∪ {0.01 * 2^(k/per_octave)} up to t_max, with t_max appended.
std::vector<double> geometric_time_grid(double t_max, int per_octave = 1, double t_first = 0.01);

}  // namespace jmgt
