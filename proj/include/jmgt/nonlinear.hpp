#pragma once

#include <span>
#include <string>
#include <vector>

#include "jmgt/grid.hpp"
#include "jmgt/linear.hpp"
#include "jmgt/params.hpp"
#include "jmgt/transform.hpp"

namespace jmgt {

// Mild form used throughout (per mode, after integrating the forcing by parts):
//   ∂ₜψ̂(t) = Σ_j ∂ₜK̂_j(t) ψ̂_j - (β/τ) ∂ₜK̂₂(t) P[ψ₁²] + (β/τ) ∫₀ᵗ ∂ₜ²K̂₂(t-θ) P[(∂ₜψ)²](θ) dθ
// with β = 1 + B/(2A) and P the dealiasing projection.

enum class Representation { complex_field, coupled_real };

const char* representation_name(Representation r) noexcept;

struct MildSolverConfig {
    double horizon = 10.0;
    std::size_t samples = 401;
    int picard_max_iters = 50;
    double picard_tol = 1e-12;
    DealiasRule dealias = DealiasRule::two_thirds;
    Representation representation = Representation::complex_field;

    /// ConfigError on horizon <= 0, samples < 16, picard_tol <= 0, max_iters < 1.
    void validate() const;
    double dt() const { return horizon / static_cast<double>(samples - 1); }
    std::vector<double> times() const;
};

struct NonlinearSolution {
    std::vector<double> t;
    /// ∂ₜψ̂ per sample. For coupled_real this is ∂ₜû + i∂ₜv̂ recombined.
    std::vector<SpectralArray> dpsi;
    /// Filled for coupled_real only.
    std::vector<SpectralArray> du, dv;
    int iterations_used = 0;
    bool converged = false;
    bool diverged = false;
    std::vector<double> residual_history;
    std::string message;
};

/// P[(∂ₜψ)²]: pseudospectral square with the configured dealiasing.
SpectralArray westervelt_nonlinearity(const FrequencyGrid& grid, std::span<const cplx> dpsi_hat,
                                      DealiasRule rule = DealiasRule::two_thirds);

struct CoupledForcing {
    SpectralArray f1;  ///< (∂ₜu)² - (∂ₜv)²
    SpectralArray f2;  ///< ∂ₜu ∂ₜv
};

/// ContractViolation when either input is not Hermitian to 1e-10.
CoupledForcing coupled_nonlinearities(const FrequencyGrid& grid, std::span<const cplx> du_hat,
                                      std::span<const cplx> dv_hat, DealiasRule rule = DealiasRule::two_thirds);

/// Picard iteration on the mild form. For coupled_real the data must be
/// u + i v with u, v real; the two real components are iterated separately
/// with the F₁, F₂ forcings and recombined in `dpsi`.
NonlinearSolution picard_solve(const FrequencyGrid& grid, const LinearData& data, const ModelParams& p,
                               const MildSolverConfig& config);

/// Coupled real system driven by separate real data for u and v.
NonlinearSolution picard_solve_coupled(const FrequencyGrid& grid, const LinearData& u_data,
                                       const LinearData& v_data, const ModelParams& p,
                                       const MildSolverConfig& config);

struct OracleOptions {
    double rtol = 1e-9;
    double atol = 1e-15;
    /// Multiplies β; 0 gives the linear equation.
    double nonlinearity_scale = 1.0;
};

/// Method of lines: (ψ̂, ∂ₜψ̂, ∂ₜ²ψ̂) per mode with τψ''' = -ψ'' - aψ - bψ' + β P[2ψ'ψ''],
/// integrated with adaptive Dormand-Prince. Limited to N <= 256 (1D) and 64² (2D).
NonlinearSolution method_of_lines_oracle(const FrequencyGrid& grid, const LinearData& data, const ModelParams& p,
                                         const MildSolverConfig& config, const OracleOptions& opt = {});

/// max over samples of ‖a(t) - b(t)‖ / max_t ‖b(t)‖ (L² in space).
double relative_l2_distance(const FrequencyGrid& grid, const std::vector<SpectralArray>& a,
                            const std::vector<SpectralArray>& b);

struct SmallnessConstants {
    double C0 = 1.0, C1 = 1.0, C2 = 1.0;
};

struct ScalingPipelineReport {
    double alpha = 0.0, s = 0.0;
    double data_norm = 0.0;         ///< ε at λ = 1
    double c_data = 0.0;
    bool closed_form = false;       ///< λ from the explicit formula, else searched
    double lambda_formula = 1.0;    ///< real-valued formula value (closed form only)
    int lambda = 1;
    int lambda_representable = 1;
    bool representable = true;
    double scaled_norm = 0.0;       ///< ε at the chosen λ
    double threshold = 0.0;         ///< (4 C₀ C₁ λ^σ)^{-1}
    bool smallness_met = false;
    double scaling_lhs = 0.0;       ///< ε_λ
    double scaling_rhs = 0.0;       ///< C₂ λ^{-n/2+s+σ} 2^{α(λ-1)N₀} ε
    bool scaling_ok = false;
    double alpha_after = 0.0;       ///< λα, the radius after undoing the scaling
    bool solved = false;
    NonlinearSolution solution;
    std::string message;
};

/// ε = ‖(ψ₀,ψ₁,ψ₂)‖_{E^α_{s+σ}×E^α_{s+σ}×E^α_s} + ‖ψ₁²‖_{E^α_s}.
double rough_data_norm(const FrequencyGrid& grid, const LinearData& data, double alpha, double s, double sigma,
                       DealiasRule rule);

/// Choose λ so λ^{-n/2+s+2σ} 2^{α(λ-1)N₀} <= C_data, rescale the data, check the
/// smallness and scaling inequalities, and solve the scaled problem when
/// `solve` is set. Data must lie in the octant of radius N₀.
ScalingPipelineReport scaled_large_data_pipeline(const FrequencyGrid& grid, const LinearData& data, double alpha,
                                                 double s, const ModelParams& p, const SmallnessConstants& c,
                                                 const MildSolverConfig& config, bool solve = true);

struct ComponentDecay {
    std::string name;  ///< "u" or "v"
    double m = 1.0;
    DecayReport l2;
    DecayReport hdot;
};

struct NonlinearDecayReport {
    bool admissible = false;
    double condition_lhs = 0.0;  ///< 2 / max(m₁, m₂)
    double condition_rhs = 0.0;  ///< 1 / min(m₁, m₂) + σ/n
    bool real_reduction = false;
    bool converged = false;
    std::vector<ComponentDecay> components;
    double short_horizon = 0.0;
    double norm_drift = 0.0;      ///< max relative change of ‖∂ₜu‖, ‖∂ₜv‖ on [0, T/2]
    double exponent_drift = 0.0;  ///< max relative change of the fitted L² exponents
    bool horizon_stable = false;
    std::string message;
};

struct NonlinearDecayOptions {
    double horizon = 100.0;
    double dt = 0.1;
    double s = 0.5;
    double m1 = 1.0, m2 = 1.0;
    int picard_max_iters = 40;
    double picard_tol = 1e-12;
    bool check_horizon_doubling = true;
};

/// Fit the L² and Ḣ^{s+σ} decay exponents of ∂ₜu, ∂ₜv from a coupled solve
/// and compare with -n(2-m_j)/(4m_jσ) and that minus (s+σ)/(2σ). A zero v
/// datum reports u only.
NonlinearDecayReport verify_theorem_2_2_decay(const FrequencyGrid& grid, const LinearData& u_data,
                                         const LinearData& v_data, const ModelParams& p,
                                         const NonlinearDecayOptions& opt);

}  // namespace jmgt
