#pragma once

#include <complex>
#include <vector>

#include "jmgt/params.hpp"

namespace jmgt {

enum class Regime { small_freq, transition, large_freq };

const char* regime_name(Regime r) noexcept;

/// Roots of τμ³ + μ² + (δ+τ)aμ + a = 0 with a = |η|^{2σ}, η = ξ/λ.
struct RootTriple {
    std::complex<double> mu1;  ///< the real root
    std::complex<double> mu2;  ///< Im >= 0 member of the pair (or the larger extra real root)
    std::complex<double> mu3;
    double mu_R = 0.0;
    double mu_I = 0.0;
    double discriminant = 0.0;
    double eta_mag = 0.0;
    Regime regime = Regime::transition;
    /// True when two roots are closer than 1e-6 (the Vandermonde form is unusable).
    bool near_degenerate = false;
};

/// a = |η|^{2σ} for the given |ξ|.
double symbol_at(double xi_mag, const ModelParams& p);

/// Standard cubic discriminant 18ABCD - 4B³D + B²C² - 4AC³ - 27A²D².
double discriminant(double xi_mag, const ModelParams& p);

/// Residual |τμ³ + μ² + (δ+τ)aμ + a|.
double cubic_residual(std::complex<double> mu, double xi_mag, const ModelParams& p);

RootTriple characteristic_roots(double xi_mag, const ModelParams& p);

/// Thresholds in |η| units (multiply by λ for |ξ|). N0 is the smallest radius
/// beyond which Δ < 0 and the |η|^{6σ} term of Δ is at least twice the sum of
/// the others, sweep-verified up to |η| = 1e4; ε0 is the analogous bound from
/// below with the |η|^{2σ} term leading. Both carry the safety factor 1.1.
struct Thresholds {
    double n0 = 0.0;
    double eps0 = 0.0;
    double n0_raw = 0.0;
    double eps0_raw = 0.0;
};

/// Cached per (τ, δ, σ). Throws NonConvergence carrying the sweep trace when
/// the dominance condition still fails at the sweep cap.
Thresholds thresholds(const ModelParams& p);
double threshold_N0(const ModelParams& p);
double threshold_eps0(const ModelParams& p);

/// Leading-order roots for |ξ| >= N0 λ; DomainError below.
RootTriple asymptotic_roots_large(double xi_mag, const ModelParams& p);
/// Leading-order roots for |ξ| <= ε0, λ = 1; DomainError otherwise.
RootTriple asymptotic_roots_small(double xi_mag, const ModelParams& p);

/// max_j Re μ_j.
double spectral_abscissa(const RootTriple& r) noexcept;

}  // namespace jmgt
