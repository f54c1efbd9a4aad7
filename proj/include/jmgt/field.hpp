#pragma once

#include <span>

#include "jmgt/grid.hpp"

namespace jmgt {

/// Spectral coefficients of (ψ, ∂ₜψ, ∂ₜ²ψ) at one time.
struct FieldState {
    SpectralArray psi;
    SpectralArray dpsi;
    SpectralArray ddpsi;
    double time = 0.0;
    /// Set when the physical fields are real; spectra must then be Hermitian.
    bool real_representation = false;

    static FieldState zeros(const FrequencyGrid& grid, double t = 0.0);

    /// Throws ContractViolation on shape mismatch or, for real states, on a
    /// Hermitian defect above `tol` (relative to the largest coefficient).
    void validate(const FrequencyGrid& grid, double tol = 1e-12) const;
};

/// max_k |f(-k) - conj f(k)| / max_k |f(k)|; 0 for the zero array.
double hermitian_defect(const FrequencyGrid& grid, std::span<const cplx> f_hat);

/// Spectra of Re f and Im f given the spectrum of f.
SpectralArray real_part_spectrum(const FrequencyGrid& grid, std::span<const cplx> f_hat);
SpectralArray imag_part_spectrum(const FrequencyGrid& grid, std::span<const cplx> f_hat);
/// Spectrum of u + i v.
SpectralArray combine_spectra(std::span<const cplx> u_hat, std::span<const cplx> v_hat);

/// ψ(x) -> ψ(λx) on the lattice.
///
/// The coefficient at index k moves to λk and is multiplied by λ^{-n/2}, the
/// whole-space convention (F[ψ(λ·)](ξ) = λ^{-n} F[ψ](ξ/λ) combined with the
/// λ^{n/2} change of the lattice density), so ‖ψ_λ‖_{Ḣ^s} = λ^{s-n/2}‖ψ‖_{Ḣ^s}
/// holds exactly in the discrete norms. Only integer λ is representable; any
/// nonzero coefficient pushed outside the index range is rejected.
SpectralArray spatial_scale(const FrequencyGrid& grid, std::span<const cplx> f_hat, double lambda);
FieldState spatial_scale(const FrequencyGrid& grid, const FieldState& state, double lambda);

/// ceil(requested) as an integer scaling, or 0 when that λ pushes the support
/// of f_hat off the grid.
int representable_lambda(const FrequencyGrid& grid, std::span<const cplx> f_hat, double requested);

}  // namespace jmgt
