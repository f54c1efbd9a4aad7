#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "jmgt/grid.hpp"

namespace jmgt {

// Discrete norms. Every norm uses the torus quadrature weight dV = (L/N)^n on
// the unitary coefficients, so physical and spectral L² norms agree exactly
// (Parseval) and both approximate the continuum norm on the period box.

enum class TimeExponent { one, two, infinity };
enum class WeightKind { e_alpha_s, sobolev_hom, sobolev_inhom, lebesgue_m, mixed_e, y_weighted };

struct NormSpec {
    double alpha = 0.0;
    double s = 0.0;
    TimeExponent gamma = TimeExponent::two;
    WeightKind kind = WeightKind::e_alpha_s;
    /// Rejects alpha > 0 (Gevrey weights are not supported).
    void validate() const;
};

double time_exponent_value(TimeExponent g) noexcept;
TimeExponent time_exponent_from(double g);

/// ‖⟨ξ⟩^s 2^{α|ξ|} f̂‖.
double e_norm(const FrequencyGrid& grid, std::span<const cplx> f_hat, double alpha, double s);
/// ‖⟨ξ⟩^s f̂‖.
double sobolev_norm(const FrequencyGrid& grid, std::span<const cplx> f_hat, double s);
/// ‖|ξ|^s f̂‖; the zero mode counts only for s == 0.
double sobolev_hom_norm(const FrequencyGrid& grid, std::span<const cplx> f_hat, double s);
/// Physical-space L^p norm; p = infinity gives the grid maximum.
double lebesgue_norm(const FrequencyGrid& grid, std::span<const cplx> physical, double p);
/// ‖F^{-1}(|ξ|^s f̂)‖_{L^p}; s = 0 keeps the zero mode.
double hom_sobolev_lp_norm(const FrequencyGrid& grid, std::span<const cplx> f_hat, double s, double p);

/// |ξ|^s f̂ (zero mode dropped unless s == 0).
SpectralArray apply_riesz_power(const FrequencyGrid& grid, std::span<const cplx> f_hat, double s);

/// Integer box k with ξ ∈ k + [0,1)^n.
ModeIndex box_of(const FrequencyGrid& grid, std::size_t flat);

struct BoxPartition {
    std::vector<ModeIndex> boxes;
    std::vector<std::uint32_t> box_of_mode;
};
BoxPartition box_partition(const FrequencyGrid& grid);

/// □_k f: f̂ restricted to the box k + [0,1)^n.
SpectralArray uniform_decompose(const FrequencyGrid& grid, std::span<const cplx> f_hat, const ModeIndex& k);

/// (Σ_k (⟨k⟩^s 2^{α|k|} ‖□_k f‖)²)^{1/2}.
double e_norm_decomposed(const FrequencyGrid& grid, std::span<const cplx> f_hat, double alpha, double s);

/// (Σ_k (⟨k⟩^s 2^{α|k|} ‖ ‖□_k g(t)‖_{L²} ‖_{L^γ(0,T)})²)^{1/2} for uniform
/// samples with spacing dt (trapezoid rule in time; max for γ = ∞).
double mixed_time_norm(const FrequencyGrid& grid, const std::vector<SpectralArray>& history, double dt,
                       const NormSpec& spec);

/// sup_t [(1+t)^{n(2-m)/(4mσ)} ‖w(t)‖_{L²} + (1+t)^{n(2-m)/(4mσ)+(s+σ)/(2σ)} ‖w(t)‖_{Ḣ^{s+σ}}].
double y_weighted_norm(const FrequencyGrid& grid, const std::vector<SpectralArray>& history,
                       std::span<const double> times, double m, double s, double sigma);

/// Lattice sqrt(N^n)/L^n: coefficient of a whole-space Fourier transform value.
double whole_space_factor(const FrequencyGrid& grid) noexcept;

struct RandomFieldOptions {
    double bandlimit = 3.0;        ///< keep modes with max_j |ξ_j| <= bandlimit
    double width = 1.5;            ///< Gaussian envelope e^{-|ξ|²/(2 w²)}
    double octant_radius = -1.0;   ///< >= 0 restricts to the octant with this radius
    bool hermitian = false;        ///< real physical field
    double amplitude = 1.0;
    double min_magnitude = 0.0;    ///< drop modes with |ξ| below this
};

/// Band-limited random field. Coefficients are drawn in a fixed lattice order
/// so the same seed yields the same continuum function for every N that
/// resolves the band.
SpectralArray random_field(const FrequencyGrid& grid, std::mt19937_64& rng, const RandomFieldOptions& opt);

}  // namespace jmgt
