#pragma once

#include <cstdint>
#include <map>
#include <numbers>
#include <string>

#include "jmgt/nonlinear.hpp"

namespace jmgt {

/// Empirical stand-ins for the constants in the smallness argument, plus the
/// E-norm equivalence band. Each constant is the ensemble maximum of the
/// corresponding ratio times `safety`.
struct Calibration {
    double C0 = 0.0;  ///< (‖∂ₜψ_lin‖_X + (β/τ)‖∂ₜK₂ ψ₁²‖_X) / ε
    double C1 = 0.0;  ///< (β/τ)‖∫∂ₜ²K₂ g²‖_X / (λ^σ ‖g‖²_X)
    double C2 = 0.0;  ///< ε_λ / (λ^{-n/2+s+σ} 2^{α(λ-1)N₀} ε), λ ∈ {2,3,4}
    double equiv_lo = 0.0, equiv_hi = 0.0;  ///< band for e_norm_decomposed / e_norm
    double equiv_period = 8.0 * std::numbers::pi;  ///< torus period the band was measured on
    double safety = 2.0;
    double alpha = -1.0, s = 0.0;
    int trials = 0;
    std::uint64_t seed = 0;
    std::map<std::string, double> inequality_constants;

    SmallnessConstants smallness() const { return {C0, C1, C2}; }
};

struct CalibrationOptions {
    int trials = 24;
    std::uint64_t seed = 314159;
    double safety = 2.0;
    double alpha = -1.0;
    double s = 0.0;
    int modes = 64;
    bool with_inequalities = true;
};

/// n = 1, τ = δ = σ = 1, B/A = 2 reference setting on an N-mode 2π torus.
Calibration calibrate(const CalibrationOptions& opt = {});

Calibration load_calibration(const std::string& path);
void save_calibration(const std::string& path, const Calibration& c);

/// JMGT_DATA_DIR/calibration.json if present and readable, else a fresh calibrate().
Calibration default_calibration();
std::string default_calibration_path();

}  // namespace jmgt
