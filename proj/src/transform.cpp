#include "jmgt/transform.hpp"

#include <cmath>
#include <mutex>

#include "grid_impl.hpp"
#include "jmgt/errors.hpp"

namespace jmgt {

namespace {

// FFTW planning and plan destruction are not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

void FrequencyGrid::Impl::make_plans() {
    std::lock_guard lock(planner_mutex());
    int shape[3] = {n, n, n};
    // Plans are created on scratch buffers and always executed through the
    // new-array interface, hence FFTW_UNALIGNED.
    std::vector<cplx> a(total), b(total);
    auto* in = reinterpret_cast<fftw_complex*>(a.data());
    auto* out = reinterpret_cast<fftw_complex*>(b.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_PRESERVE_INPUT;
    forward = fftw_plan_dft(dims, shape, in, out, FFTW_FORWARD, flags);
    backward = fftw_plan_dft(dims, shape, in, out, FFTW_BACKWARD, flags);
    if (!forward || !backward) throw InvariantViolation("FFTW failed to create a plan");
}

FrequencyGrid::Impl::~Impl() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
}

namespace {

std::vector<cplx> run(const FrequencyGrid& grid, std::span<const cplx> input, bool fwd) {
    const auto& impl = grid.impl();
    std::vector<cplx> out(impl.total);
    // FFTW_PRESERVE_INPUT guarantees the input is left untouched.
    auto* in = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(input.data()));
    fftw_execute_dft(fwd ? impl.forward : impl.backward, in, reinterpret_cast<fftw_complex*>(out.data()));
    const double scale = 1.0 / std::sqrt(static_cast<double>(impl.total));
    for (auto& v : out) v *= scale;
    return out;
}

}  // namespace

SpectralArray forward_transform(const FrequencyGrid& grid, std::span<const cplx> physical) {
    require_shape(grid, physical.size(), "forward_transform");
    return run(grid, physical, true);
}

PhysicalArray inverse_transform(const FrequencyGrid& grid, std::span<const cplx> spectral) {
    require_shape(grid, spectral.size(), "inverse_transform");
    return run(grid, spectral, false);
}

void apply_mask(std::span<cplx> values, const Mask& mask) {
    if (values.size() != mask.size()) throw ContractViolation("apply_mask: size mismatch");
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!mask[i]) values[i] = 0.0;
}

SpectralArray pseudospectral_product(const FrequencyGrid& grid, std::span<const cplx> f_hat,
                                     std::span<const cplx> g_hat, DealiasRule rule) {
    require_shape(grid, f_hat.size(), "pseudospectral_product (f)");
    require_shape(grid, g_hat.size(), "pseudospectral_product (g)");
    PhysicalArray f, g;
    Mask mask;
    if (rule == DealiasRule::two_thirds) {
        mask = grid.dealias_mask();
        SpectralArray a(f_hat.begin(), f_hat.end()), b(g_hat.begin(), g_hat.end());
        apply_mask(a, mask);
        apply_mask(b, mask);
        f = inverse_transform(grid, a);
        g = &f_hat[0] == &g_hat[0] ? f : inverse_transform(grid, b);
    } else {
        f = inverse_transform(grid, f_hat);
        g = &f_hat[0] == &g_hat[0] ? f : inverse_transform(grid, g_hat);
    }
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= g[i];
    auto out = forward_transform(grid, f);
    if (rule == DealiasRule::two_thirds) apply_mask(out, mask);
    return out;
}

}  // namespace jmgt
