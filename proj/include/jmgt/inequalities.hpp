#pragma once

#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jmgt/grid.hpp"
#include "jmgt/transform.hpp"

namespace jmgt {

/// One evaluation of an inequality lhs <= C rhs. `ratio` is the empirical C.
struct InequalityReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    bool degenerate = false;  ///< rhs == 0 (ratio set to 0 when lhs is 0 too)
    std::vector<std::pair<std::string, double>> extras;
    std::string message;

    double extra(const std::string& key) const;
};

/// ‖g₁g₂‖_{L̃¹E^{α,s+σ}} against ‖g₁‖_{L̃²E^{α,s+σ}} ‖g₂‖_{L̃²E^{α,s+σ}} for
/// uniformly sampled histories. ContractViolation unless every sample lies in
/// the first octant; ConfigError unless s >= n/2 - σ.
InequalityReport check_algebra_prop_3_6(const FrequencyGrid& grid, const std::vector<SpectralArray>& g1,
                                        const std::vector<SpectralArray>& g2, double dt, double alpha, double s,
                                        double sigma, DealiasRule rule = DealiasRule::two_thirds);

struct GnsParams {
    double kappa = 0.0, s = 1.0, p = 2.0, p0 = 2.0, p1 = 2.0;
};

/// (1/p₀ - 1/p + κ/n) / (1/p₀ - 1/p₁ + s/n).
double gns_beta(int n, const GnsParams& q);

/// ‖f‖_{Ḣ^κ_p} against ‖f‖_{L^{p₀}}^{1-β} ‖f‖_{Ḣ^s_{p₁}}^β. ConfigError names
/// the violated constraint (p, p₀, p₁ in (1,∞), κ in [0,s), β in [κ/s,1]).
InequalityReport check_gns(const FrequencyGrid& grid, std::span<const cplx> f_hat, const GnsParams& q);

/// ‖f‖_{L^∞} against ‖f‖_{Ḣ^{α₀}}^{(2β₀-n)/(2(β₀-α₀))} ‖f‖_{Ḣ^{β₀}}^{(n-2α₀)/(2(β₀-α₀))}.
/// Extras: lambda0, split_low = λ₀^{n/2-α₀}‖|ξ|^{α₀}f̂‖, split_high =
/// λ₀^{n/2-β₀}‖|ξ|^{β₀}f̂‖, balance_defect, l1_bound (the discrete ‖f̂‖_{ℓ¹}
/// that majorizes the grid maximum).
InequalityReport check_embedding(const FrequencyGrid& grid, std::span<const cplx> f_hat, double alpha0,
                                 double beta0);

struct LeibnizParams {
    double s = 1.0, r = 2.0, p1 = 4.0, p2 = 4.0, q1 = 4.0, q2 = 4.0;
};

/// ‖fg‖_{Ḣ^s_r} against ‖f‖_{Ḣ^s_{p₁}}‖g‖_{L^{p₂}} + ‖f‖_{L^{q₁}}‖g‖_{Ḣ^s_{q₂}}.
InequalityReport check_leibniz(const FrequencyGrid& grid, std::span<const cplx> f_hat, std::span<const cplx> g_hat,
                               const LeibnizParams& q);

/// Two reports: ‖u₁²-v₁²‖_{H^s∩L^{m₁}} and ‖u₁v₁‖_{H^s∩L^{m₂}}, each against
/// ‖u₁‖²_{H^{s+σ}} + ‖v₁‖²_{H^{s+σ}}. The H^s∩L^m norm is the sum of the two.
std::vector<InequalityReport> check_data_estimates_prop_4_8(const FrequencyGrid& grid, std::span<const cplx> u1,
                                                            std::span<const cplx> v1, double s, double sigma,
                                                            double m1, double m2);

/// Per-sample check of
///   ‖(∂ₜu)²±(∂ₜv)²‖_{L^p}       <= C (1+t)^{-(n/2σ)(2/max m - 1/p)} ‖V‖²_{Y(t)}
///   ‖(∂ₜu)²±(∂ₜv)²‖_{Ḣ^{s+σ}}  <= C (1+t)^{-(n/2σ)(2/max m - 1/2 + (s+σ)/n)} ‖V‖²_{Y(t)}
/// where ‖V‖_{Y(t)} is the running sup of the two time-weighted norms. Returns
/// the L^p and Ḣ reports with the worst ratio over samples and both signs.
std::vector<InequalityReport> check_nonlinearity_estimates_prop_4_9(const FrequencyGrid& grid,
                                                                    const std::vector<SpectralArray>& du,
                                                                    const std::vector<SpectralArray>& dv,
                                                                    std::span<const double> times, double p,
                                                                    double m1, double m2, double s, double sigma);

enum class InequalityKind { algebra, gns, embedding, leibniz, data_estimates, nonlinearity, e_norm_equivalence };

const char* inequality_name(InequalityKind k) noexcept;
InequalityKind inequality_from_name(const std::string& name);

struct EnsembleOptions {
    int dims = 1;
    int modes = 64;          ///< coarse N; the refinement uses 2N at the same period
    double period = 2.0 * std::numbers::pi;
    int trials = 50;
    std::uint64_t seed = 20240611;
    double sigma = 1.0;
    double s = 0.5;
    double alpha = -0.5;
};

struct EnsembleReport {
    std::string name;
    int trials = 0;
    double c_coarse = 0.0;   ///< max ratio over the ensemble at N
    double c_fine = 0.0;     ///< same ensemble at 2N
    double c_min = 0.0;      ///< min ratio at N (used for two-sided bands)
    double drift = 0.0;      ///< |c_fine - c_coarse| / c_coarse
    bool finite = false;
    bool stable = false;     ///< drift < 0.3
    double worst_balance_defect = 0.0;  ///< embedding only
};

/// Run ≥ 1 trials of the chosen checker on seeded band-limited random fields at
/// N and 2N. The fields are identical continuum functions at both sizes.
EnsembleReport run_inequality_ensemble(InequalityKind kind, const EnsembleOptions& opt);

}  // namespace jmgt
