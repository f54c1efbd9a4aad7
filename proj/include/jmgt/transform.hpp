#pragma once

#include <span>

#include "jmgt/grid.hpp"

namespace jmgt {

// Unitary DFT pair, 1/sqrt(N^n) on both sides. Backed by FFTW plans cached on
// the grid; safe to call concurrently.

SpectralArray forward_transform(const FrequencyGrid& grid, std::span<const cplx> physical);
PhysicalArray inverse_transform(const FrequencyGrid& grid, std::span<const cplx> spectral);

enum class DealiasRule { two_thirds, none };

/// Spectral coefficients of the pointwise product f*g. With two_thirds both
/// inputs and the result are truncated to the dealiased block.
SpectralArray pseudospectral_product(const FrequencyGrid& grid, std::span<const cplx> f_hat,
                                     std::span<const cplx> g_hat, DealiasRule rule);

/// Apply a 0/1 mask in place.
void apply_mask(std::span<cplx> values, const Mask& mask);

}  // namespace jmgt
