#include "jmgt/linear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "jmgt/dispersion.hpp"
#include "jmgt/errors.hpp"
#include "jmgt/stats.hpp"

namespace jmgt {

LinearData LinearData::zeros(const FrequencyGrid& grid) {
    return {SpectralArray(grid.size(), 0.0), SpectralArray(grid.size(), 0.0), SpectralArray(grid.size(), 0.0)};
}

void LinearData::validate(const FrequencyGrid& grid) const {
    require_shape(grid, w0.size(), "data.w0");
    require_shape(grid, w1.size(), "data.w1");
    require_shape(grid, w2.size(), "data.w2");
}

MagnitudeGroups group_by_magnitude(const FrequencyGrid& grid) {
    MagnitudeGroups g;
    auto keys = grid.squared_index_norms();
    std::map<std::int64_t, std::uint32_t> index;
    for (std::size_t i = 0; i < keys.size(); ++i) index.emplace(keys[i], 0);
    std::uint32_t next = 0;
    for (auto& [key, id] : index) {
        id = next++;
        g.magnitude.push_back(grid.fundamental() * std::sqrt(static_cast<double>(key)));
    }
    g.members.resize(next);
    g.group_of.resize(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
        const auto id = index[keys[i]];
        g.group_of[i] = id;
        g.members[id].push_back(i);
    }
    return g;
}

namespace {

void check_times(std::span<const double> t) {
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] >= 0.0)) throw ContractViolation("sample times must be nonnegative");
        if (i > 0 && !(t[i] > t[i - 1])) throw ContractViolation("sample times must be strictly increasing");
    }
}

bool group_active(const std::vector<std::size_t>& members, const LinearData& d) {
    for (auto i : members)
        if (d.w0[i] != 0.0 || d.w1[i] != 0.0 || d.w2[i] != 0.0) return true;
    return false;
}

}  // namespace

LinearSolution propagate_linear(const FrequencyGrid& grid, const LinearData& data, const ModelParams& p,
                                std::span<const double> t_samples) {
    data.validate(grid);
    check_times(t_samples);
    LinearSolution sol{{}, std::vector<double>(t_samples.begin(), t_samples.end()), p};
    sol.states.reserve(t_samples.size());
    for (double t : t_samples) sol.states.push_back(FieldState::zeros(grid, t));
    const auto groups = group_by_magnitude(grid);
    const long ng = static_cast<long>(groups.members.size());
#pragma omp parallel for schedule(dynamic)
    for (long g = 0; g < ng; ++g) {
        const auto& members = groups.members[g];
        if (!group_active(members, data)) continue;
        const auto ks = ModeKernel(groups.magnitude[g], p).at(t_samples);
        for (std::size_t n = 0; n < ks.size(); ++n) {
            auto& st = sol.states[n];
            for (auto i : members) {
                cplx v[3];
                for (int d = 0; d < 3; ++d)
                    v[d] = ks[n].value[d][0].real() * data.w0[i] + ks[n].value[d][1].real() * data.w1[i] +
                           ks[n].value[d][2].real() * data.w2[i];
                st.psi[i] = v[0];
                st.dpsi[i] = v[1];
                st.ddpsi[i] = v[2];
            }
        }
    }
    // Sample t = 0 reproduces the data exactly.
    if (!t_samples.empty() && t_samples[0] == 0.0) {
        sol.states[0].psi = data.w0;
        sol.states[0].dpsi = data.w1;
        sol.states[0].ddpsi = data.w2;
    }
    return sol;
}

std::vector<SpectralArray> propagate_dt(const FrequencyGrid& grid, const LinearData& data, const ModelParams& p,
                                        std::span<const double> t_samples) {
    data.validate(grid);
    check_times(t_samples);
    std::vector<SpectralArray> out(t_samples.size(), SpectralArray(grid.size(), 0.0));
    const auto groups = group_by_magnitude(grid);
    const long ng = static_cast<long>(groups.members.size());
#pragma omp parallel for schedule(dynamic)
    for (long g = 0; g < ng; ++g) {
        const auto& members = groups.members[g];
        if (!group_active(members, data)) continue;
        const auto ks = ModeKernel(groups.magnitude[g], p).at(t_samples);
        for (std::size_t n = 0; n < ks.size(); ++n)
            for (auto i : members)
                out[n][i] = ks[n].dk(0).real() * data.w0[i] + ks[n].dk(1).real() * data.w1[i] +
                            ks[n].dk(2).real() * data.w2[i];
    }
    return out;
}

std::vector<double> dt_norm_history(const FrequencyGrid& grid, const LinearData& data, const ModelParams& p,
                                    std::span<const double> times, double r) {
    data.validate(grid);
    check_times(times);
    const auto groups = group_by_magnitude(grid);
    const std::size_t ng = groups.members.size(), S = times.size();
    // Per-group partial sums, reduced in group order afterwards for determinism.
    std::vector<std::vector<double>> partial(ng);
#pragma omp parallel for schedule(dynamic)
    for (long g = 0; g < static_cast<long>(ng); ++g) {
        const auto& members = groups.members[g];
        const double mag = groups.magnitude[g];
        const double w = r == 0.0 ? 1.0 : (mag == 0.0 ? 0.0 : std::pow(mag, 2.0 * r));
        if (w == 0.0 || !group_active(members, data)) continue;
        const auto ks = ModeKernel(mag, p).at(times);
        auto& acc = partial[g];
        acc.assign(S, 0.0);
        for (std::size_t n = 0; n < S; ++n)
            for (auto i : members)
                acc[n] += w * std::norm(ks[n].dk(0).real() * data.w0[i] + ks[n].dk(1).real() * data.w1[i] +
                                        ks[n].dk(2).real() * data.w2[i]);
    }
    std::vector<double> out(S, 0.0);
    for (const auto& acc : partial)
        if (!acc.empty())
            for (std::size_t n = 0; n < S; ++n) out[n] += acc[n];
    for (auto& v : out) v = std::sqrt(grid.cell_volume() * v);
    return out;
}

std::vector<double> duhamel_weights(std::size_t m, double dt) {
    std::vector<double> w(m + 1, 0.0);
    if (m == 0) return w;
    if (m == 1) {
        w[0] = w[1] = 0.5 * dt;
        return w;
    }
    std::size_t simpson_end = m % 2 == 0 ? m : m - 3;
    for (std::size_t j = 0; j + 2 <= simpson_end; j += 2) {
        w[j] += dt / 3.0;
        w[j + 1] += 4.0 * dt / 3.0;
        w[j + 2] += dt / 3.0;
    }
    if (m % 2 == 1) {
        const double c = 3.0 * dt / 8.0;
        w[m - 3] += c;
        w[m - 2] += 3.0 * c;
        w[m - 1] += 3.0 * c;
        w[m] += c;
    }
    return w;
}

std::vector<std::vector<double>> ddk2_table(const MagnitudeGroups& groups, const ModelParams& p,
                                            std::size_t samples, double dt) {
    std::vector<double> times(samples);
    for (std::size_t m = 0; m < samples; ++m) times[m] = static_cast<double>(m) * dt;
    std::vector<std::vector<double>> table(groups.members.size());
#pragma omp parallel for schedule(dynamic)
    for (long g = 0; g < static_cast<long>(groups.members.size()); ++g) {
        const auto ks = ModeKernel(groups.magnitude[g], p).at(times);
        auto& row = table[g];
        row.resize(samples);
        for (std::size_t m = 0; m < samples; ++m) row[m] = ks[m].ddk(2).real();
    }
    return table;
}

std::vector<SpectralArray> duhamel_history(const MagnitudeGroups& groups,
                                           const std::vector<std::vector<double>>& table,
                                           const std::vector<SpectralArray>& forcing, double dt) {
    const std::size_t S = forcing.size();
    const std::size_t M = groups.group_of.size();
    std::vector<SpectralArray> out(S, SpectralArray(M, 0.0));
    std::vector<std::vector<double>> weights(S);
    for (std::size_t i = 0; i < S; ++i) weights[i] = duhamel_weights(i, dt);
#pragma omp parallel for schedule(dynamic)
    for (long mode = 0; mode < static_cast<long>(M); ++mode) {
        const auto& k = table[groups.group_of[mode]];
        bool any = false;
        for (std::size_t j = 0; j < S && !any; ++j) any = forcing[j][mode] != 0.0;
        if (!any) continue;
        for (std::size_t i = 1; i < S; ++i) {
            const auto& w = weights[i];
            cplx acc = 0.0;
            for (std::size_t j = 0; j <= i; ++j) acc += (w[j] * k[i - j]) * forcing[j][mode];
            out[i][mode] = acc;
        }
    }
    return out;
}

std::vector<SpectralArray> duhamel_history(const FrequencyGrid& grid, const ModelParams& p,
                                           const std::vector<SpectralArray>& forcing, double dt) {
    if (forcing.size() < 3) throw QuadratureError("duhamel: need at least 3 time samples");
    if (!(dt > 0.0)) throw ContractViolation("duhamel: dt must be > 0");
    for (const auto& f : forcing) require_shape(grid, f.size(), "duhamel forcing");
    const auto groups = group_by_magnitude(grid);
    const auto table = ddk2_table(groups, p, forcing.size(), dt);
    return duhamel_history(groups, table, forcing, dt);
}

SpectralArray duhamel_apply(const FrequencyGrid& grid, const ModelParams& p,
                            const std::vector<SpectralArray>& forcing, double dt) {
    if (forcing.size() < 3) throw QuadratureError("duhamel_apply: need at least 3 time samples");
    if (!(dt > 0.0)) throw ContractViolation("duhamel_apply: dt must be > 0");
    for (const auto& f : forcing) require_shape(grid, f.size(), "duhamel_apply forcing");
    const std::size_t S = forcing.size();
    const auto groups = group_by_magnitude(grid);
    const auto w = duhamel_weights(S - 1, dt);
    SpectralArray out(grid.size(), 0.0);
    std::vector<double> lags(S);
    for (std::size_t m = 0; m < S; ++m) lags[m] = static_cast<double>(m) * dt;
    for (std::size_t g = 0; g < groups.members.size(); ++g) {
        const auto ks = ModeKernel(groups.magnitude[g], p).at(lags);
        for (auto i : groups.members[g]) {
            cplx acc = 0.0;
            for (std::size_t j = 0; j < S; ++j) acc += (w[j] * ks[S - 1 - j].ddk(2).real()) * forcing[j][i];
            out[i] = acc;
        }
    }
    return out;
}

namespace {

struct Envelope {
    double rate;   // slowest decay rate over the support
    double omega;  // fastest oscillation over the support
};

Envelope support_envelope(const FrequencyGrid& grid, const ModelParams& p, std::span<const SpectralArray* const> fields) {
    double rate = std::numeric_limits<double>::infinity(), omega = 0.0;
    std::map<std::int64_t, bool> seen;
    auto keys = grid.squared_index_norms();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        bool active = false;
        for (auto* f : fields) active = active || (*f)[i] != 0.0;
        if (!active || seen.count(keys[i])) continue;
        seen[keys[i]] = true;
        const auto r = characteristic_roots(grid.magnitudes()[i], p);
        rate = std::min(rate, -spectral_abscissa(r));
        omega = std::max(omega, r.mu_I);
    }
    return {rate, omega};
}

void require_octant(const Mask& mask, std::span<const cplx> f, const char* name) {
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f[i] != 0.0 && !mask[i])
            throw ContractViolation(std::string(name) + ": support leaves the octant of radius N0*lambda");
}

}  // namespace

UniformEstimateReport verify_prop_3_2(const FrequencyGrid& grid, const ModelParams& p, const LinearData& data,
                                      double alpha, double s, TimeExponent gamma) {
    data.validate(grid);
    NormSpec{alpha, s}.validate();
    const Mask mask = grid.octant_mask(threshold_N0(p) * p.lambda());
    require_octant(mask, data.w0, "phi0");
    require_octant(mask, data.w1, "phi1");
    require_octant(mask, data.w2, "phi2");
    UniformEstimateReport rep;
    const double sig = p.sigma();
    rep.rhs = e_norm(grid, data.w0, alpha, s + sig) + e_norm(grid, data.w1, alpha, s + sig) +
              std::pow(p.lambda(), sig) * e_norm(grid, data.w2, alpha, s);
    if (rep.rhs == 0.0) {
        rep.degenerate = true;
        return rep;
    }
    const SpectralArray* fields[3] = {&data.w0, &data.w1, &data.w2};
    const Envelope env = support_envelope(grid, p, fields);
    if (!(env.rate > 0.0)) throw InvariantViolation("verify_prop_3_2: no decay on the data support");
    rep.horizon = std::log(100.0) / env.rate;
    rep.dt = std::min(0.05, 0.25 / std::max(env.omega, 1e-12));
    rep.samples = static_cast<std::size_t>(std::ceil(rep.horizon / rep.dt)) + 1;
    rep.dt = rep.horizon / static_cast<double>(rep.samples - 1);
    std::vector<double> times(rep.samples);
    for (std::size_t i = 0; i < rep.samples; ++i) times[i] = static_cast<double>(i) * rep.dt;
    const auto hist = propagate_dt(grid, data, p, times);
    rep.lhs = mixed_time_norm(grid, hist, rep.dt, NormSpec{alpha, s + sig, gamma});
    rep.ratio = rep.lhs / rep.rhs;
    return rep;
}

UniformEstimateReport verify_duhamel_estimate(const FrequencyGrid& grid, const ModelParams& p,
                                      const std::vector<SpectralArray>& forcing, double dt, double alpha, double s,
                                      TimeExponent gamma) {
    const Mask mask = grid.octant_mask(threshold_N0(p) * p.lambda());
    for (const auto& g : forcing) require_octant(mask, g, "g");
    UniformEstimateReport rep;
    rep.dt = dt;
    rep.samples = forcing.size();
    rep.horizon = dt * static_cast<double>(forcing.size() - 1);
    rep.rhs = mixed_time_norm(grid, forcing, dt, NormSpec{alpha, s + p.sigma(), TimeExponent::one});
    if (rep.rhs == 0.0) {
        rep.degenerate = true;
        return rep;
    }
    const auto d = duhamel_history(grid, p, forcing, dt);
    rep.lhs = mixed_time_norm(grid, d, dt, NormSpec{alpha, s + p.sigma(), gamma});
    rep.ratio = rep.lhs / rep.rhs;
    return rep;
}

double linear_decay_exponent(int n, double m, double s, double sigma) {
    return -n * (2.0 - m) / (4.0 * m * sigma) - (s + sigma) / (2.0 * sigma);
}

DecayReport fit_decay(std::span<const double> t, std::span<const double> norm, double expected) {
    DecayReport rep;
    rep.t.assign(t.begin(), t.end());
    rep.norm.assign(norm.begin(), norm.end());
    rep.expected = expected;
    if (std::all_of(norm.begin(), norm.end(), [](double v) { return v == 0.0; })) {
        rep.degenerate = true;
        rep.message = "identically zero solution; exponent undefined";
        return rep;
    }
    const double t_end = t.back();
    rep.fit_t_min = t_end / 10.0;
    rep.fit_t_max = t_end;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] >= rep.fit_t_min * (1.0 - 1e-12)) {
            x.push_back(1.0 + t[i]);
            y.push_back(norm[i]);
        }
    const auto f = loglog_fit(x, y);
    rep.fitted = f.slope;
    rep.r_squared = f.r_squared;
    rep.conclusive = f.points >= 3 && f.r_squared >= 0.99;
    rep.message = rep.conclusive ? "ok" : "tail not yet asymptotic (R^2 < 0.99); try a longer horizon";
    return rep;
}

DecayReport verify_decay_prop_4_3(const FrequencyGrid& grid, const ModelParams& p, const LinearData& data,
                                  double m, double s, std::span<const double> t_grid) {
    if (p.lambda() != 1.0) throw ConfigError("lambda", "decay checks use lambda = 1");
    if (!(m >= 1.0 && m < 2.0)) throw ConfigError("m", "must lie in [1, 2)");
    if (!(s == -p.sigma() || s >= 0.0)) throw ConfigError("s", "must be -sigma or >= 0");
    const auto norms = dt_norm_history(grid, data, p, t_grid, s + p.sigma());
    return fit_decay(t_grid, norms, linear_decay_exponent(grid.dims(), m, s, p.sigma()));
}

DecayReport verify_decay_prop_4_4(const FrequencyGrid& grid, const ModelParams& p, std::span<const cplx> g0,
                                  double m, double s, std::span<const double> t_grid, InhomDisplay display) {
    if (p.lambda() != 1.0) throw ConfigError("lambda", "decay checks use lambda = 1");
    if (!(m >= 1.0 && m < 2.0)) throw ConfigError("m", "must lie in [1, 2)");
    if (!(s == -p.sigma() || s >= 0.0)) throw ConfigError("s", "must be -sigma or >= 0");
    require_shape(grid, g0.size(), "g0");
    check_times(t_grid);
    const double r = s + p.sigma();
    const auto groups = group_by_magnitude(grid);
    const std::size_t S = t_grid.size();
    std::vector<std::vector<double>> partial(groups.members.size());
#pragma omp parallel for schedule(dynamic)
    for (long g = 0; g < static_cast<long>(groups.members.size()); ++g) {
        const auto& members = groups.members[g];
        const double mag = groups.magnitude[g];
        const double w = r == 0.0 ? 1.0 : (mag == 0.0 ? 0.0 : std::pow(mag, 2.0 * r));
        double e = 0.0;
        for (auto i : members) e += std::norm(g0[i]);
        if (w == 0.0 || e == 0.0) continue;
        const auto ks = ModeKernel(mag, p).at(t_grid);
        auto& acc = partial[g];
        acc.resize(S);
        for (std::size_t n = 0; n < S; ++n) {
            const double k = ks[n].ddk(2).real();
            acc[n] = w * k * k * e;
        }
    }
    std::vector<double> norms(S, 0.0);
    for (const auto& acc : partial)
        if (!acc.empty())
            for (std::size_t n = 0; n < S; ++n) norms[n] += acc[n];
    for (auto& v : norms) v = std::sqrt(grid.cell_volume() * v);
    const double sig = p.sigma();
    const double expected = display == InhomDisplay::hdot_only
                                ? -0.5
                                : -grid.dims() * (2.0 - m) / (4.0 * m * sig) - (s + 2.0 * sig) / (2.0 * sig);
    return fit_decay(t_grid, norms, expected);
}

namespace {

// Gauss-Legendre nodes and weights on [0, 1].
constexpr int kGauss = 6;
constexpr double kGx[kGauss] = {0.033765242898423975, 0.16939530676686776, 0.38069040695840156,
                                0.61930959304159844, 0.83060469323313224, 0.96623475710157603};
constexpr double kGw[kGauss] = {0.085662246189585178, 0.18038078652406930, 0.23395696728634552,
                                0.23395696728634552, 0.18038078652406930, 0.085662246189585178};

template <class F>
double box_integral(F f, const double* lo, double side, int dims) {
    double acc = 0.0;
    int idx[3] = {0, 0, 0};
    const int total = dims == 1 ? kGauss : (dims == 2 ? kGauss * kGauss : kGauss * kGauss * kGauss);
    for (int c = 0; c < total; ++c) {
        int rem = c;
        double w = 1.0, r2 = 0.0;
        for (int d = 0; d < dims; ++d) {
            idx[d] = rem % kGauss;
            rem /= kGauss;
            const double x = lo[d] + side * kGx[idx[d]];
            r2 += x * x;
            w *= kGw[idx[d]];
        }
        acc += w * f(r2);
    }
    return acc * std::pow(side, dims);
}

// ∫ over [0, side]^n of f, refining toward the corner at the origin.
template <class F>
double corner_integral(F f, double side, int dims) {
    double acc = 0.0;
    for (int depth = 0; depth < 60; ++depth) {
        const double half = 0.5 * side;
        for (int c = 1; c < (1 << dims); ++c) {
            double lo[3] = {0, 0, 0};
            for (int d = 0; d < dims; ++d) lo[d] = (c >> d) & 1 ? half : 0.0;
            acc += box_integral(f, lo, half, dims);
        }
        side = half;
    }
    return acc;
}

}  // namespace

SpectralArray decay_profile(const FrequencyGrid& grid, double gamma, bool keep_zero_cell) {
    const int n = grid.dims();
    if (keep_zero_cell && !(2.0 * gamma < n))
        throw ConfigError("gamma", "origin cell is not integrable unless 2*gamma < n");
    const double h = grid.fundamental();
    auto density = [gamma](double r2) { return (gamma == 0.0 ? 1.0 : std::pow(r2, -gamma)) * std::exp(-r2); };
    const double cell = std::pow(h, n);
    const double factor = whole_space_factor(grid);
    SpectralArray out(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto xi = grid.frequency(i);
        double avg;
        if (grid.magnitudes()[i] == 0.0) {
            if (!keep_zero_cell) continue;
            avg = std::pow(2.0, n) * corner_integral(density, 0.5 * h, n) / cell;
        } else {
            double lo[3] = {0, 0, 0};
            for (int d = 0; d < n; ++d) lo[d] = xi[d] - 0.5 * h;
            avg = box_integral(density, lo, h, n) / cell;
        }
        out[i] = factor * std::sqrt(avg);
    }
    return out;
}

}  // namespace jmgt
