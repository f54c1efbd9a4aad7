#include "jmgt/grid.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include "grid_impl.hpp"
#include "jmgt/errors.hpp"

namespace jmgt {

namespace {

int slot_to_index(int j, int n) { return j < n / 2 ? j : j - n; }

}  // namespace

FrequencyGrid::FrequencyGrid(int dims, int modes_per_axis, double period) {
    if (dims < 1 || dims > 3) throw ConfigError("dims", "must be 1, 2 or 3, got " + std::to_string(dims));
    if (modes_per_axis < 4 || modes_per_axis > 1024 || modes_per_axis % 2 != 0)
        throw ConfigError("modes_per_axis",
                          "must be even and in [4, 1024], got " + std::to_string(modes_per_axis));
    if (!std::isfinite(period) || !(period > 0.0))
        throw ConfigError("period", "must be a finite positive number");

    auto impl = std::make_shared<Impl>();
    impl->dims = dims;
    impl->n = modes_per_axis;
    impl->period = period;
    impl->fundamental = 2.0 * std::numbers::pi / period;
    impl->total = 1;
    for (int d = 0; d < dims; ++d) impl->total *= static_cast<std::size_t>(modes_per_axis);

    impl->magnitudes.resize(impl->total);
    impl->keys.resize(impl->total);
    double max_mag = 0.0;
    for (std::size_t f = 0; f < impl->total; ++f) {
        std::size_t rem = f;
        std::int64_t key = 0;
        for (int d = dims - 1; d >= 0; --d) {
            int k = slot_to_index(static_cast<int>(rem % modes_per_axis), modes_per_axis);
            rem /= modes_per_axis;
            key += static_cast<std::int64_t>(k) * k;
        }
        impl->keys[f] = key;
        impl->magnitudes[f] = impl->fundamental * std::sqrt(static_cast<double>(key));
        max_mag = std::max(max_mag, impl->magnitudes[f]);
    }
    impl->max_magnitude = max_mag;
    impl->make_plans();
    impl_ = std::move(impl);
}

int FrequencyGrid::dims() const noexcept { return impl_->dims; }
int FrequencyGrid::modes_per_axis() const noexcept { return impl_->n; }
double FrequencyGrid::period() const noexcept { return impl_->period; }
std::size_t FrequencyGrid::size() const noexcept { return impl_->total; }
double FrequencyGrid::fundamental() const noexcept { return impl_->fundamental; }

double FrequencyGrid::cell_volume() const noexcept {
    return std::pow(impl_->period / impl_->n, impl_->dims);
}

std::span<const double> FrequencyGrid::magnitudes() const noexcept { return impl_->magnitudes; }
std::span<const std::int64_t> FrequencyGrid::squared_index_norms() const noexcept { return impl_->keys; }
double FrequencyGrid::max_magnitude() const noexcept { return impl_->max_magnitude; }

ModeIndex FrequencyGrid::mode_index(std::size_t flat) const noexcept {
    ModeIndex k{0, 0, 0};
    const int n = impl_->n;
    for (int d = impl_->dims - 1; d >= 0; --d) {
        k[d] = slot_to_index(static_cast<int>(flat % n), n);
        flat /= n;
    }
    return k;
}

std::array<double, 3> FrequencyGrid::frequency(std::size_t flat) const noexcept {
    auto k = mode_index(flat);
    return {impl_->fundamental * k[0], impl_->fundamental * k[1], impl_->fundamental * k[2]};
}

std::optional<std::size_t> FrequencyGrid::flat_index(const ModeIndex& k) const noexcept {
    const int n = impl_->n;
    std::size_t flat = 0;
    for (int d = 0; d < impl_->dims; ++d) {
        if (k[d] < -n / 2 || k[d] >= n / 2) return std::nullopt;
        int slot = k[d] >= 0 ? k[d] : k[d] + n;
        flat = flat * n + static_cast<std::size_t>(slot);
    }
    for (int d = impl_->dims; d < 3; ++d)
        if (k[d] != 0) return std::nullopt;
    return flat;
}

std::size_t FrequencyGrid::negated(std::size_t flat) const noexcept {
    const int n = impl_->n;
    std::size_t out = 0, stride = 1;
    for (int d = impl_->dims - 1; d >= 0; --d) {
        int slot = static_cast<int>(flat % n);
        flat /= n;
        int neg = slot == 0 ? 0 : n - slot;
        out += static_cast<std::size_t>(neg) * stride;
        stride *= n;
    }
    return out;
}

Mask FrequencyGrid::octant_mask(double radius) const {
    Mask m(size(), 0);
    const double h = impl_->fundamental;
    for (std::size_t f = 0; f < size(); ++f) {
        auto k = mode_index(f);
        bool ok = true;
        int kmax = 0;
        for (int d = 0; d < impl_->dims; ++d) {
            if (k[d] < 0) ok = false;
            kmax = std::max(kmax, k[d]);
        }
        if (ok && h * kmax >= radius) m[f] = 1;
    }
    return m;
}

Mask FrequencyGrid::dealias_mask() const {
    Mask m(size(), 0);
    const int cut = impl_->n / 3;
    for (std::size_t f = 0; f < size(); ++f) {
        auto k = mode_index(f);
        bool ok = true;
        for (int d = 0; d < impl_->dims; ++d)
            if (std::abs(k[d]) > cut) ok = false;
        m[f] = ok ? 1 : 0;
    }
    return m;
}

std::vector<double> fractional_laplacian_symbol(const FrequencyGrid& grid, double sigma) {
    if (!(sigma > 0.0)) throw ConfigError("sigma", "must be positive");
    auto mags = grid.magnitudes();
    std::vector<double> out(mags.size());
    for (std::size_t i = 0; i < mags.size(); ++i)
        out[i] = mags[i] == 0.0 ? 0.0 : std::pow(mags[i], 2.0 * sigma);
    return out;
}

void require_shape(const FrequencyGrid& grid, std::size_t n, const char* what) {
    if (n != grid.size())
        throw ContractViolation(std::string(what) + ": expected " + std::to_string(grid.size()) +
                                " coefficients, got " + std::to_string(n));
}

}  // namespace jmgt
