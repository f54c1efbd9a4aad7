#include "jmgt/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "jmgt/errors.hpp"
#include "jmgt/transform.hpp"

namespace jmgt {

void NormSpec::validate() const {
    if (!std::isfinite(alpha) || alpha > 0.0)
        throw ConfigError("alpha", "must be <= 0 (Gevrey weights alpha > 0 are not supported)");
    if (!std::isfinite(s)) throw ConfigError("s", "must be finite");
}

double time_exponent_value(TimeExponent g) noexcept {
    switch (g) {
        case TimeExponent::one: return 1.0;
        case TimeExponent::two: return 2.0;
        case TimeExponent::infinity: return std::numeric_limits<double>::infinity();
    }
    return 2.0;
}

TimeExponent time_exponent_from(double g) {
    if (g == 1.0) return TimeExponent::one;
    if (g == 2.0) return TimeExponent::two;
    if (std::isinf(g) && g > 0) return TimeExponent::infinity;
    throw ConfigError("gamma", "must be 1, 2 or inf");
}

namespace {

template <class W>
double weighted_l2(const FrequencyGrid& grid, std::span<const cplx> f_hat, W weight) {
    require_shape(grid, f_hat.size(), "norm");
    auto mags = grid.magnitudes();
    double acc = 0.0;
    for (std::size_t i = 0; i < f_hat.size(); ++i) {
        const double w = weight(mags[i]);
        if (w != 0.0) acc += w * w * std::norm(f_hat[i]);
    }
    return std::sqrt(grid.cell_volume() * acc);
}

double hom_weight(double r, double s) {
    if (s == 0.0) return 1.0;
    return r == 0.0 ? 0.0 : std::pow(r, s);
}

}  // namespace

double e_norm(const FrequencyGrid& grid, std::span<const cplx> f_hat, double alpha, double s) {
    NormSpec{alpha, s}.validate();
    return weighted_l2(grid, f_hat,
                       [&](double r) { return std::pow(1.0 + r * r, 0.5 * s) * std::exp2(alpha * r); });
}

double sobolev_norm(const FrequencyGrid& grid, std::span<const cplx> f_hat, double s) {
    return weighted_l2(grid, f_hat, [&](double r) { return std::pow(1.0 + r * r, 0.5 * s); });
}

double sobolev_hom_norm(const FrequencyGrid& grid, std::span<const cplx> f_hat, double s) {
    return weighted_l2(grid, f_hat, [&](double r) { return hom_weight(r, s); });
}

double lebesgue_norm(const FrequencyGrid& grid, std::span<const cplx> physical, double p) {
    require_shape(grid, physical.size(), "lebesgue_norm");
    if (!(p >= 1.0)) throw ConfigError("p", "must be >= 1");
    if (std::isinf(p)) {
        double m = 0.0;
        for (auto v : physical) m = std::max(m, std::abs(v));
        return m;
    }
    double acc = 0.0;
    for (auto v : physical) acc += std::pow(std::abs(v), p);
    return std::pow(grid.cell_volume() * acc, 1.0 / p);
}

SpectralArray apply_riesz_power(const FrequencyGrid& grid, std::span<const cplx> f_hat, double s) {
    require_shape(grid, f_hat.size(), "apply_riesz_power");
    auto mags = grid.magnitudes();
    SpectralArray out(f_hat.size());
    for (std::size_t i = 0; i < f_hat.size(); ++i) out[i] = hom_weight(mags[i], s) * f_hat[i];
    return out;
}

double hom_sobolev_lp_norm(const FrequencyGrid& grid, std::span<const cplx> f_hat, double s, double p) {
    auto g = apply_riesz_power(grid, f_hat, s);
    return lebesgue_norm(grid, inverse_transform(grid, g), p);
}

ModeIndex box_of(const FrequencyGrid& grid, std::size_t flat) {
    auto xi = grid.frequency(flat);
    ModeIndex k{0, 0, 0};
    for (int d = 0; d < grid.dims(); ++d) {
        // Lattice frequencies that are integers up to rounding belong to that box.
        const double v = xi[d];
        const double r = std::round(v);
        k[d] = std::abs(v - r) < 1e-9 ? static_cast<int>(r) : static_cast<int>(std::floor(v));
    }
    return k;
}

BoxPartition box_partition(const FrequencyGrid& grid) {
    BoxPartition bp;
    bp.box_of_mode.resize(grid.size());
    std::map<ModeIndex, std::uint32_t> index;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto k = box_of(grid, i);
        auto [it, inserted] = index.emplace(k, static_cast<std::uint32_t>(bp.boxes.size()));
        if (inserted) bp.boxes.push_back(k);
        bp.box_of_mode[i] = it->second;
    }
    return bp;
}

SpectralArray uniform_decompose(const FrequencyGrid& grid, std::span<const cplx> f_hat, const ModeIndex& k) {
    require_shape(grid, f_hat.size(), "uniform_decompose");
    SpectralArray out(f_hat.size(), 0.0);
    for (std::size_t i = 0; i < f_hat.size(); ++i)
        if (box_of(grid, i) == k) out[i] = f_hat[i];
    return out;
}

namespace {

double box_weight(const ModeIndex& k, int dims, double alpha, double s) {
    double k2 = 0.0;
    for (int d = 0; d < dims; ++d) k2 += static_cast<double>(k[d]) * k[d];
    return std::pow(1.0 + k2, 0.5 * s) * std::exp2(alpha * std::sqrt(k2));
}

}  // namespace

double e_norm_decomposed(const FrequencyGrid& grid, std::span<const cplx> f_hat, double alpha, double s) {
    NormSpec{alpha, s}.validate();
    require_shape(grid, f_hat.size(), "e_norm_decomposed");
    const auto bp = box_partition(grid);
    std::vector<double> box_sq(bp.boxes.size(), 0.0);
    for (std::size_t i = 0; i < f_hat.size(); ++i) box_sq[bp.box_of_mode[i]] += std::norm(f_hat[i]);
    double acc = 0.0;
    for (std::size_t b = 0; b < bp.boxes.size(); ++b) {
        const double w = box_weight(bp.boxes[b], grid.dims(), alpha, s);
        acc += w * w * box_sq[b];
    }
    return std::sqrt(grid.cell_volume() * acc);
}

double mixed_time_norm(const FrequencyGrid& grid, const std::vector<SpectralArray>& history, double dt,
                       const NormSpec& spec) {
    spec.validate();
    if (history.empty()) throw ContractViolation("mixed_time_norm: empty time sampling");
    if (history.size() > 1 && !(dt > 0.0)) throw ContractViolation("mixed_time_norm: dt must be > 0");
    for (const auto& h : history) require_shape(grid, h.size(), "mixed_time_norm");
    const auto bp = box_partition(grid);
    const std::size_t nb = bp.boxes.size(), S = history.size();
    const double dv = grid.cell_volume();
    std::vector<double> acc(nb, 0.0), cur(nb);
    for (std::size_t t = 0; t < S; ++t) {
        std::fill(cur.begin(), cur.end(), 0.0);
        for (std::size_t i = 0; i < grid.size(); ++i) cur[bp.box_of_mode[i]] += std::norm(history[t][i]);
        const double w = (S == 1) ? 1.0 : ((t == 0 || t + 1 == S) ? 0.5 * dt : dt);
        for (std::size_t b = 0; b < nb; ++b) {
            const double l2 = std::sqrt(dv * cur[b]);
            switch (spec.gamma) {
                case TimeExponent::one: acc[b] += w * l2; break;
                case TimeExponent::two: acc[b] += w * l2 * l2; break;
                case TimeExponent::infinity: acc[b] = std::max(acc[b], l2); break;
            }
        }
    }
    double total = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
        const double tn = spec.gamma == TimeExponent::two ? std::sqrt(acc[b]) : acc[b];
        const double w = box_weight(bp.boxes[b], grid.dims(), spec.alpha, spec.s);
        total += (w * tn) * (w * tn);
    }
    return std::sqrt(total);
}

double y_weighted_norm(const FrequencyGrid& grid, const std::vector<SpectralArray>& history,
                       std::span<const double> times, double m, double s, double sigma) {
    if (!(m >= 1.0 && m < 2.0)) throw ConfigError("m", "must lie in [1, 2)");
    if (history.size() != times.size()) throw ContractViolation("y_weighted_norm: history/times mismatch");
    const double e1 = grid.dims() * (2.0 - m) / (4.0 * m * sigma);
    const double e2 = e1 + (s + sigma) / (2.0 * sigma);
    double sup = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double v = std::pow(1.0 + times[i], e1) * sobolev_hom_norm(grid, history[i], 0.0) +
                         std::pow(1.0 + times[i], e2) * sobolev_hom_norm(grid, history[i], s + sigma);
        sup = std::max(sup, v);
    }
    return sup;
}

double whole_space_factor(const FrequencyGrid& grid) noexcept {
    return std::sqrt(static_cast<double>(grid.size())) / std::pow(grid.period(), grid.dims());
}

SpectralArray random_field(const FrequencyGrid& grid, std::mt19937_64& rng, const RandomFieldOptions& opt) {
    if (opt.hermitian && opt.octant_radius >= 0.0)
        throw ConfigError("random_field", "hermitian and octant support are incompatible");
    const double h = grid.fundamental();
    const int B = static_cast<int>(std::floor(opt.bandlimit / h + 1e-9));
    if (B >= grid.modes_per_axis() / 2)
        throw ConfigError("bandlimit", "band exceeds the grid (needs bandlimit < N/2 * 2pi/L)");
    std::normal_distribution<double> nd(0.0, 1.0);
    SpectralArray out(grid.size(), 0.0);
    const double scale = std::sqrt(static_cast<double>(grid.size())) * opt.amplitude;
    const int n = grid.dims();
    ModeIndex k{0, 0, 0};
    const int lo = -B, hi = B;
    int kx[3] = {lo, n > 1 ? lo : 0, n > 2 ? lo : 0};
    auto in_order_before = [&](const ModeIndex& a, const ModeIndex& b) { return a < b; };
    while (true) {
        k = {kx[0], kx[1], kx[2]};
        // Draw for every lattice point in the band so the stream is independent of filters.
        const double re = nd(rng), im = nd(rng);
        double r2 = 0.0;
        bool octant = true;
        int kmax = 0;
        for (int d = 0; d < n; ++d) {
            r2 += h * h * k[d] * k[d];
            if (k[d] < 0) octant = false;
            kmax = std::max(kmax, k[d]);
        }
        const double r = std::sqrt(r2);
        bool keep = r >= opt.min_magnitude;
        if (opt.octant_radius >= 0.0) keep = keep && octant && h * kmax >= opt.octant_radius;
        if (keep) {
            const double env = std::exp(-r2 / (2.0 * opt.width * opt.width));
            auto idx = grid.flat_index(k);
            ModeIndex mk{-k[0], -k[1], -k[2]};
            if (opt.hermitian) {
                if (k == mk) {
                    out[*idx] = scale * env * re;
                } else if (in_order_before(mk, k)) {
                    // partner already drawn: mirror it
                    out[*idx] = std::conj(out[*grid.flat_index(mk)]);
                } else {
                    out[*idx] = scale * env * cplx(re, im) / std::sqrt(2.0);
                }
            } else {
                out[*idx] = scale * env * cplx(re, im) / std::sqrt(2.0);
            }
        }
        int d = n - 1;
        while (d >= 0 && ++kx[d] > hi) {
            kx[d] = lo;
            --d;
        }
        if (d < 0) break;
    }
    return out;
}

}  // namespace jmgt
