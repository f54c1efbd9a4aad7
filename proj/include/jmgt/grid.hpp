#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace jmgt {

using cplx = std::complex<double>;
using SpectralArray = std::vector<cplx>;
using PhysicalArray = std::vector<cplx>;
using Mask = std::vector<std::uint8_t>;
using ModeIndex = std::array<int, 3>;

/// Periodic lattice 2πZ^n/L truncated to N modes per axis.
///
/// Storage is row-major with axis 0 slowest and FFT ordering along every axis:
/// slot j holds the signed index k = j for j < N/2 and k = j - N otherwise, so
/// k ranges over [-N/2, N/2 - 1]. Copies share the precomputed tables and the
/// transform plans.
class FrequencyGrid {
public:
    FrequencyGrid(int dims, int modes_per_axis, double period = 2.0 * std::numbers::pi);

    int dims() const noexcept;
    int modes_per_axis() const noexcept;
    double period() const noexcept;
    std::size_t size() const noexcept;

    /// 2π/L, the lattice spacing in frequency.
    double fundamental() const noexcept;
    /// (L/N)^n, the quadrature weight used by every discrete norm.
    double cell_volume() const noexcept;

    std::span<const double> magnitudes() const noexcept;
    /// |k|^2 for the integer index, exact; modes with equal key share |ξ|.
    std::span<const std::int64_t> squared_index_norms() const noexcept;

    ModeIndex mode_index(std::size_t flat) const noexcept;
    std::array<double, 3> frequency(std::size_t flat) const noexcept;
    /// nullopt when some component falls outside [-N/2, N/2 - 1].
    std::optional<std::size_t> flat_index(const ModeIndex& k) const noexcept;
    /// Slot of -k modulo N (the Nyquist index maps to itself).
    std::size_t negated(std::size_t flat) const noexcept;

    double max_magnitude() const noexcept;

    /// Every ξ_j >= 0 and max_j ξ_j >= R.
    Mask octant_mask(double radius) const;
    /// Two-thirds rule: |k_j| <= N/3 on every axis.
    Mask dealias_mask() const;

    struct Impl;
    const Impl& impl() const noexcept { return *impl_; }

private:
    std::shared_ptr<const Impl> impl_;
};

/// |ξ|^{2σ} per mode, exactly 0 at the zero mode.
std::vector<double> fractional_laplacian_symbol(const FrequencyGrid& grid, double sigma);

void require_shape(const FrequencyGrid& grid, std::size_t n, const char* what);

}  // namespace jmgt
