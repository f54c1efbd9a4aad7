#include "jmgt/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jmgt/errors.hpp"

namespace jmgt {

FieldState FieldState::zeros(const FrequencyGrid& grid, double t) {
    FieldState s;
    s.psi.assign(grid.size(), 0.0);
    s.dpsi.assign(grid.size(), 0.0);
    s.ddpsi.assign(grid.size(), 0.0);
    s.time = t;
    return s;
}

void FieldState::validate(const FrequencyGrid& grid, double tol) const {
    require_shape(grid, psi.size(), "FieldState.psi");
    require_shape(grid, dpsi.size(), "FieldState.dpsi");
    require_shape(grid, ddpsi.size(), "FieldState.ddpsi");
    if (!(time >= 0.0)) throw ContractViolation("FieldState.time must be nonnegative");
    if (real_representation) {
        for (const auto* a : {&psi, &dpsi, &ddpsi})
            if (hermitian_defect(grid, *a) > tol)
                throw ContractViolation("FieldState flagged real but spectrum is not Hermitian");
    }
}

double hermitian_defect(const FrequencyGrid& grid, std::span<const cplx> f_hat) {
    require_shape(grid, f_hat.size(), "hermitian_defect");
    double scale = 0.0, defect = 0.0;
    for (std::size_t i = 0; i < f_hat.size(); ++i) {
        scale = std::max(scale, std::abs(f_hat[i]));
        defect = std::max(defect, std::abs(f_hat[grid.negated(i)] - std::conj(f_hat[i])));
    }
    return scale == 0.0 ? 0.0 : defect / scale;
}

SpectralArray real_part_spectrum(const FrequencyGrid& grid, std::span<const cplx> f_hat) {
    require_shape(grid, f_hat.size(), "real_part_spectrum");
    SpectralArray out(f_hat.size());
    for (std::size_t i = 0; i < f_hat.size(); ++i)
        out[i] = 0.5 * (f_hat[i] + std::conj(f_hat[grid.negated(i)]));
    return out;
}

SpectralArray imag_part_spectrum(const FrequencyGrid& grid, std::span<const cplx> f_hat) {
    require_shape(grid, f_hat.size(), "imag_part_spectrum");
    SpectralArray out(f_hat.size());
    const cplx half_i(0.0, 0.5);
    for (std::size_t i = 0; i < f_hat.size(); ++i)
        out[i] = -half_i * (f_hat[i] - std::conj(f_hat[grid.negated(i)]));
    return out;
}

SpectralArray combine_spectra(std::span<const cplx> u_hat, std::span<const cplx> v_hat) {
    if (u_hat.size() != v_hat.size()) throw ContractViolation("combine_spectra: size mismatch");
    SpectralArray out(u_hat.size());
    const cplx i1(0.0, 1.0);
    for (std::size_t i = 0; i < u_hat.size(); ++i) out[i] = u_hat[i] + i1 * v_hat[i];
    return out;
}

namespace {

int integer_lambda(double lambda) {
    if (!std::isfinite(lambda) || lambda < 1.0)
        throw DomainError("spatial_scale: lambda must be >= 1, got " + std::to_string(lambda));
    const double r = std::round(lambda);
    if (std::abs(lambda - r) > 1e-12 * r)
        throw DomainError("spatial_scale: lambda=" + std::to_string(lambda) +
                          " is not an integer, so λk leaves the integer lattice");
    return static_cast<int>(r);
}

}  // namespace

SpectralArray spatial_scale(const FrequencyGrid& grid, std::span<const cplx> f_hat, double lambda) {
    require_shape(grid, f_hat.size(), "spatial_scale");
    const int lam = integer_lambda(lambda);
    SpectralArray out(f_hat.size(), 0.0);
    const double amp = std::pow(static_cast<double>(lam), -0.5 * grid.dims());
    for (std::size_t i = 0; i < f_hat.size(); ++i) {
        if (f_hat[i] == 0.0) continue;
        auto k = grid.mode_index(i);
        for (auto& c : k) c *= lam;
        auto j = grid.flat_index(k);
        if (!j)
            throw DomainError("spatial_scale: lambda=" + std::to_string(lam) + " maps mode (" +
                              std::to_string(k[0] / lam) + "," + std::to_string(k[1] / lam) + "," +
                              std::to_string(k[2] / lam) + ") outside the grid");
        out[*j] = amp * f_hat[i];
    }
    return out;
}

FieldState spatial_scale(const FrequencyGrid& grid, const FieldState& state, double lambda) {
    state.validate(grid, 1e-10);
    FieldState out = state;
    out.psi = spatial_scale(grid, state.psi, lambda);
    out.dpsi = spatial_scale(grid, state.dpsi, lambda);
    out.ddpsi = spatial_scale(grid, state.ddpsi, lambda);
    return out;
}

int representable_lambda(const FrequencyGrid& grid, std::span<const cplx> f_hat, double requested) {
    require_shape(grid, f_hat.size(), "representable_lambda");
    int lam = std::max(1, static_cast<int>(std::ceil(requested - 1e-12)));
    int kmax = 0;
    for (std::size_t i = 0; i < f_hat.size(); ++i) {
        if (f_hat[i] == 0.0) continue;
        auto k = grid.mode_index(i);
        for (int d = 0; d < grid.dims(); ++d) kmax = std::max(kmax, std::abs(k[d]));
    }
    if (kmax == 0) return lam;
    // λk must stay in [-N/2, N/2 - 1]; positive indices are the binding side.
    const long limit = grid.modes_per_axis() / 2 - 1;
    return static_cast<long>(lam) * kmax <= limit ? lam : 0;
}

}  // namespace jmgt
