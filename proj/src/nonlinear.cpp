#include "jmgt/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "jmgt/dispersion.hpp"
#include "jmgt/errors.hpp"
#include "jmgt/field.hpp"
#include "jmgt/ode.hpp"
#include "jmgt/spaces.hpp"

namespace jmgt {

const char* representation_name(Representation r) noexcept {
    return r == Representation::complex_field ? "complex_field" : "coupled_real";
}

void MildSolverConfig::validate() const {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("horizon", "must be > 0");
    if (samples < 16) throw ConfigError("samples", "must be >= 16");
    if (picard_max_iters < 1) throw ConfigError("picard_max_iters", "must be >= 1");
    if (!(picard_tol > 0.0)) throw ConfigError("picard_tol", "must be > 0");
}

std::vector<double> MildSolverConfig::times() const {
    std::vector<double> t(samples);
    const double h = dt();
    for (std::size_t i = 0; i < samples; ++i) t[i] = static_cast<double>(i) * h;
    t.back() = horizon;
    return t;
}

SpectralArray westervelt_nonlinearity(const FrequencyGrid& grid, std::span<const cplx> dpsi_hat, DealiasRule rule) {
    require_shape(grid, dpsi_hat.size(), "dpsi_hat");
    return pseudospectral_product(grid, dpsi_hat, dpsi_hat, rule);
}

CoupledForcing coupled_nonlinearities(const FrequencyGrid& grid, std::span<const cplx> du_hat,
                                      std::span<const cplx> dv_hat, DealiasRule rule) {
    require_shape(grid, du_hat.size(), "du_hat");
    require_shape(grid, dv_hat.size(), "dv_hat");
    if (hermitian_defect(grid, du_hat) > 1e-10) throw ContractViolation("coupled_nonlinearities: du is not real");
    if (hermitian_defect(grid, dv_hat) > 1e-10) throw ContractViolation("coupled_nonlinearities: dv is not real");
    CoupledForcing f;
    f.f1 = pseudospectral_product(grid, du_hat, du_hat, rule);
    const auto vv = pseudospectral_product(grid, dv_hat, dv_hat, rule);
    for (std::size_t i = 0; i < f.f1.size(); ++i) f.f1[i] -= vv[i];
    f.f2 = pseudospectral_product(grid, du_hat, dv_hat, rule);
    return f;
}

namespace {

using History = std::vector<SpectralArray>;

bool all_zero(std::span<const cplx> f) {
    return std::all_of(f.begin(), f.end(), [](const cplx& z) { return z == 0.0; });
}

bool is_zero(const LinearData& d) { return all_zero(d.w0) && all_zero(d.w1) && all_zero(d.w2); }

double history_sq(const History& h) {
    double acc = 0.0;
    for (const auto& a : h)
        for (const auto& z : a) acc += std::norm(z);
    return acc;
}

double diff_sq(const History& a, const History& b) {
    double acc = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n)
        for (std::size_t i = 0; i < a[n].size(); ++i) acc += std::norm(a[n][i] - b[n][i]);
    return acc;
}

// ∂ₜK̂₂(t) f at each sample time.
History dk2_apply(const FrequencyGrid& grid, const ModelParams& p, const SpectralArray& f,
                  std::span<const double> times) {
    LinearData d = LinearData::zeros(grid);
    d.w2 = f;
    return propagate_dt(grid, d, p, times);
}

// Shared Picard loop over a set of components. `forcing` maps the current
// iterate to one forcing history per component; X = base + κ ∫ ∂ₜ²K₂ F.
struct PicardProblem {
    std::vector<History> base;
    std::function<std::vector<History>(const std::vector<History>&)> forcing;
};

void run_picard(const MagnitudeGroups& groups, const std::vector<std::vector<double>>& table, double kappa,
                double dt, const PicardProblem& prob, const MildSolverConfig& cfg, std::vector<History>& x,
                NonlinearSolution& sol) {
    x = prob.base;
    int growth = 0;
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= cfg.picard_max_iters; ++it) {
        const auto f = prob.forcing(x);
        std::vector<History> next = prob.base;
        double num = 0.0, den = 0.0;
        bool finite = true;
        for (std::size_t c = 0; c < next.size(); ++c) {
            const auto d = duhamel_history(groups, table, f[c], dt);
            for (std::size_t n = 0; n < d.size(); ++n)
                for (std::size_t i = 0; i < d[n].size(); ++i) {
                    next[c][n][i] += kappa * d[n][i];
                    if (!std::isfinite(next[c][n][i].real()) || !std::isfinite(next[c][n][i].imag()))
                        finite = false;
                }
            num += diff_sq(next[c], x[c]);
            den += history_sq(next[c]);
        }
        sol.iterations_used = it;
        if (!finite) {
            sol.diverged = true;
            sol.residual_history.push_back(std::numeric_limits<double>::infinity());
            sol.message = "Picard iterate became non-finite at iteration " + std::to_string(it);
            return;
        }
        const double inc = num == 0.0 ? 0.0 : std::sqrt(num / den);
        sol.residual_history.push_back(inc);
        x = std::move(next);
        if (inc < cfg.picard_tol) {
            sol.converged = true;
            sol.message = "converged";
            return;
        }
        growth = inc > prev ? growth + 1 : 0;
        prev = inc;
        if (growth >= 3) {
            sol.diverged = true;
            sol.message = "Picard increments grew for 3 consecutive iterations (data too large for the horizon)";
            return;
        }
    }
    sol.message = "Picard iteration hit picard_max_iters without reaching picard_tol";
}

void check_data(const FrequencyGrid& grid, const LinearData& d, const char* what) {
    try {
        d.validate(grid);
    } catch (const ContractViolation& e) {
        throw ContractViolation(std::string(what) + ": " + e.what());
    }
}

}  // namespace

NonlinearSolution picard_solve(const FrequencyGrid& grid, const LinearData& data, const ModelParams& p,
                               const MildSolverConfig& config) {
    config.validate();
    check_data(grid, data, "picard_solve");
    if (config.representation == Representation::coupled_real) {
        LinearData u{real_part_spectrum(grid, data.w0), real_part_spectrum(grid, data.w1),
                     real_part_spectrum(grid, data.w2)};
        LinearData v{imag_part_spectrum(grid, data.w0), imag_part_spectrum(grid, data.w1),
                     imag_part_spectrum(grid, data.w2)};
        return picard_solve_coupled(grid, u, v, p, config);
    }
    const auto times = config.times();
    const double dt = config.dt(), kappa = p.beta() / p.tau();
    const auto rule = config.dealias;
    NonlinearSolution sol;
    sol.t = times;

    History base = propagate_dt(grid, data, p, times);
    const auto boundary = dk2_apply(grid, p, westervelt_nonlinearity(grid, data.w1, rule), times);
    for (std::size_t n = 0; n < base.size(); ++n)
        for (std::size_t i = 0; i < base[n].size(); ++i) base[n][i] -= kappa * boundary[n][i];

    const auto groups = group_by_magnitude(grid);
    const auto table = ddk2_table(groups, p, times.size(), dt);
    PicardProblem prob;
    prob.base = {std::move(base)};
    prob.forcing = [&](const std::vector<History>& x) {
        std::vector<History> f(1, History(x[0].size()));
        const long S = static_cast<long>(x[0].size());
#pragma omp parallel for schedule(static)
        for (long n = 0; n < S; ++n) f[0][n] = westervelt_nonlinearity(grid, x[0][n], rule);
        return f;
    };
    std::vector<History> x;
    run_picard(groups, table, kappa, dt, prob, config, x, sol);
    sol.dpsi = std::move(x[0]);
    return sol;
}

NonlinearSolution picard_solve_coupled(const FrequencyGrid& grid, const LinearData& u_data,
                                       const LinearData& v_data, const ModelParams& p,
                                       const MildSolverConfig& config) {
    config.validate();
    check_data(grid, u_data, "u data");
    check_data(grid, v_data, "v data");
    for (const auto* f : {&u_data.w0, &u_data.w1, &u_data.w2, &v_data.w0, &v_data.w1, &v_data.w2})
        if (hermitian_defect(grid, *f) > 1e-10)
            throw ContractViolation("picard_solve_coupled: data must be real (Hermitian spectra)");
    const auto times = config.times();
    const double dt = config.dt(), kappa = p.beta() / p.tau();
    const auto rule = config.dealias;
    NonlinearSolution sol;
    sol.t = times;

    History bu = propagate_dt(grid, u_data, p, times);
    History bv = propagate_dt(grid, v_data, p, times);
    const auto f0 = coupled_nonlinearities(grid, u_data.w1, v_data.w1, rule);
    const auto b1 = dk2_apply(grid, p, f0.f1, times);
    const auto b2 = dk2_apply(grid, p, f0.f2, times);
    for (std::size_t n = 0; n < bu.size(); ++n)
        for (std::size_t i = 0; i < bu[n].size(); ++i) {
            bu[n][i] -= kappa * b1[n][i];
            bv[n][i] -= 2.0 * kappa * b2[n][i];
        }

    const auto groups = group_by_magnitude(grid);
    const auto table = ddk2_table(groups, p, times.size(), dt);
    PicardProblem prob;
    prob.base = {std::move(bu), std::move(bv)};
    prob.forcing = [&](const std::vector<History>& x) {
        const long S = static_cast<long>(x[0].size());
        std::vector<History> f(2, History(S));
#pragma omp parallel for schedule(static)
        for (long n = 0; n < S; ++n) {
            auto c = coupled_nonlinearities(grid, x[0][n], x[1][n], rule);
            for (auto& z : c.f2) z *= 2.0;
            f[0][n] = std::move(c.f1);
            f[1][n] = std::move(c.f2);
        }
        return f;
    };
    std::vector<History> x;
    run_picard(groups, table, kappa, dt, prob, config, x, sol);
    sol.du = std::move(x[0]);
    sol.dv = std::move(x[1]);
    sol.dpsi.resize(sol.du.size());
    for (std::size_t n = 0; n < sol.du.size(); ++n) sol.dpsi[n] = combine_spectra(sol.du[n], sol.dv[n]);
    return sol;
}

NonlinearSolution method_of_lines_oracle(const FrequencyGrid& grid, const LinearData& data, const ModelParams& p,
                                         const MildSolverConfig& config, const OracleOptions& opt) {
    config.validate();
    check_data(grid, data, "method_of_lines_oracle");
    const int n = grid.dims(), N = grid.modes_per_axis();
    const int cap = n == 1 ? 256 : (n == 2 ? 64 : 16);
    if (N > cap) throw ConfigError("modes_per_axis", "method_of_lines_oracle is limited to N <= " + std::to_string(cap));
    const std::size_t M = grid.size();
    std::vector<double> a(M), b(M);
    for (std::size_t i = 0; i < M; ++i) {
        a[i] = symbol_at(grid.magnitudes()[i], p);
        b[i] = (p.delta() + p.tau()) * a[i];
    }
    const double beta = p.beta() * opt.nonlinearity_scale, tau = p.tau();
    const auto rule = config.dealias;
    auto rhs = [&](double, const std::vector<cplx>& y, std::vector<cplx>& dy) {
        std::span<const cplx> psi(y.data(), M), d1(y.data() + M, M), d2(y.data() + 2 * M, M);
        SpectralArray q;
        if (beta != 0.0) q = pseudospectral_product(grid, d1, d2, rule);
        for (std::size_t i = 0; i < M; ++i) {
            dy[i] = d1[i];
            dy[M + i] = d2[i];
            cplx f = -d2[i] - a[i] * psi[i] - b[i] * d1[i];
            if (beta != 0.0) f += 2.0 * beta * q[i];
            dy[2 * M + i] = f / tau;
        }
    };
    std::vector<cplx> y0(3 * M);
    std::copy(data.w0.begin(), data.w0.end(), y0.begin());
    std::copy(data.w1.begin(), data.w1.end(), y0.begin() + M);
    std::copy(data.w2.begin(), data.w2.end(), y0.begin() + 2 * M);
    NonlinearSolution sol;
    sol.t = config.times();
    OdeOptions o;
    o.rtol = opt.rtol;
    o.atol = opt.atol;
    std::span<const double> t_out(sol.t);
    const auto ys = integrate_dopri5(rhs, y0, 0.0, t_out.subspan(1), o);
    sol.dpsi.reserve(sol.t.size());
    sol.dpsi.push_back(data.w1);
    for (const auto& y : ys) sol.dpsi.emplace_back(y.begin() + M, y.begin() + 2 * M);
    sol.converged = true;
    sol.message = "method of lines";
    return sol;
}

double relative_l2_distance(const FrequencyGrid& grid, const std::vector<SpectralArray>& a,
                            const std::vector<SpectralArray>& b) {
    if (a.size() != b.size()) throw ContractViolation("relative_l2_distance: history lengths differ");
    double worst = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) {
        require_shape(grid, a[n].size(), "a");
        require_shape(grid, b[n].size(), "b");
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < a[n].size(); ++i) {
            num += std::norm(a[n][i] - b[n][i]);
            den += std::norm(b[n][i]);
        }
        if (num == 0.0) continue;
        worst = std::max(worst, den == 0.0 ? std::sqrt(num * grid.cell_volume()) : std::sqrt(num / den));
    }
    return worst;
}

double rough_data_norm(const FrequencyGrid& grid, const LinearData& data, double alpha, double s, double sigma,
                       DealiasRule rule) {
    data.validate(grid);
    return e_norm(grid, data.w0, alpha, s + sigma) + e_norm(grid, data.w1, alpha, s + sigma) +
           e_norm(grid, data.w2, alpha, s) + e_norm(grid, westervelt_nonlinearity(grid, data.w1, rule), alpha, s);
}

namespace {

LinearData scale_data(const FrequencyGrid& grid, const LinearData& d, int lambda) {
    return {spatial_scale(grid, d.w0, lambda), spatial_scale(grid, d.w1, lambda), spatial_scale(grid, d.w2, lambda)};
}

// Largest integer λ keeping every nonzero mode of the data inside the grid,
// and inside the dealiased block when that rule is active.
int max_representable_lambda(const FrequencyGrid& grid, const LinearData& d, DealiasRule rule) {
    const int N = grid.modes_per_axis();
    const int limit = rule == DealiasRule::two_thirds ? N / 3 : N / 2 - 1;
    int kmax = 0;
    for (const auto* f : {&d.w0, &d.w1, &d.w2})
        for (std::size_t i = 0; i < f->size(); ++i) {
            if ((*f)[i] == 0.0) continue;
            const auto k = grid.mode_index(i);
            for (int j = 0; j < grid.dims(); ++j) kmax = std::max(kmax, std::abs(k[j]));
        }
    if (kmax == 0) return std::numeric_limits<int>::max();
    return limit / kmax;
}

}  // namespace

ScalingPipelineReport scaled_large_data_pipeline(const FrequencyGrid& grid, const LinearData& data, double alpha,
                                                 double s, const ModelParams& p, const SmallnessConstants& c,
                                                 const MildSolverConfig& config, bool solve) {
    if (!(alpha < 0.0)) throw ConfigError("alpha", "the large-data pipeline needs alpha < 0");
    if (p.lambda() != 1.0) throw ConfigError("lambda", "pass the unscaled parameters (lambda = 1)");
    if (!(c.C0 > 0.0 && c.C1 > 0.0 && c.C2 > 0.0)) throw ConfigError("calibration", "constants must be > 0");
    config.validate();
    data.validate(grid);
    const int n = grid.dims();
    const double sig = p.sigma();
    const double n0 = threshold_N0(p);
    const Mask oct = grid.octant_mask(n0);
    for (const auto* f : {&data.w0, &data.w1, &data.w2})
        for (std::size_t i = 0; i < f->size(); ++i)
            if ((*f)[i] != 0.0 && !oct[i])
                throw ContractViolation("scaled_large_data_pipeline: data must lie in the octant of radius N0");

    ScalingPipelineReport rep;
    rep.alpha = alpha;
    rep.s = s;
    const auto rule = config.dealias;
    rep.data_norm = rough_data_norm(grid, data, alpha, s, sig, rule);
    rep.c_data = rep.data_norm > 0.0 ? 1.0 / (4.0 * c.C0 * c.C1 * c.C2 * rep.data_norm)
                                     : std::numeric_limits<double>::infinity();

    const double pe = -0.5 * n + s + 2.0 * sig;
    auto condition = [&](double lam) {
        return std::pow(lam, pe) * std::exp2(alpha * (lam - 1.0) * n0) <= rep.c_data;
    };
    int lambda = 1;
    if (rep.data_norm > 1.0 / (4.0 * c.C0 * c.C1)) {
        if (alpha <= -2.0 * (s + 2.0 * sig) / n0) {
            rep.closed_form = true;
            rep.lambda_formula =
                std::abs(2.0 / (alpha * n0) * std::log2(std::exp2(alpha * n0) * rep.c_data)) + 1.0;
            lambda = static_cast<int>(std::ceil(rep.lambda_formula - 1e-12));
        } else {
            lambda = 2;
        }
        while (!condition(lambda)) {
            if (lambda >= 1'000'000) {
                rep.message = "no lambda <= 1e6 satisfies the data condition";
                return rep;
            }
            ++lambda;
        }
    }
    rep.lambda = lambda;
    rep.alpha_after = lambda * alpha;
    rep.lambda_representable = std::min(lambda, max_representable_lambda(grid, data, rule));
    rep.representable = rep.lambda_representable == lambda;
    const int lam_eval = rep.lambda_representable;
    const auto scaled = scale_data(grid, data, lam_eval);
    rep.scaled_norm = rough_data_norm(grid, scaled, alpha, s, sig, rule);
    rep.threshold = 1.0 / (4.0 * c.C0 * c.C1 * std::pow(lam_eval, sig));
    rep.smallness_met = rep.scaled_norm <= rep.threshold;
    rep.scaling_lhs = rep.scaled_norm;
    rep.scaling_rhs = c.C2 * std::pow(lam_eval, -0.5 * n + s + sig) * std::exp2(alpha * (lam_eval - 1.0) * n0) *
                      rep.data_norm;
    rep.scaling_ok = rep.scaling_lhs <= rep.scaling_rhs * (1.0 + 1e-9);

    std::ostringstream msg;
    if (!rep.representable) {
        msg << "lambda=" << lambda << " pushes the data off the grid; nearest representable lambda="
            << lam_eval << " gives scaled norm " << rep.scaled_norm << " vs threshold " << rep.threshold
            << (rep.smallness_met ? " (still small enough)" : " (smallness fails)");
        rep.message = msg.str();
        return rep;
    }
    msg << "lambda=" << lambda << (lambda == 1 ? " (data already small)" : "")
        << ", radius loss alpha " << alpha << " -> " << rep.alpha_after;
    rep.message = msg.str();
    if (solve) {
        rep.solution = picard_solve(grid, scaled, p.with_lambda(lambda), config);
        rep.solved = true;
        if (!rep.solution.converged) rep.message += "; scaled solve: " + rep.solution.message;
    }
    return rep;
}

namespace {

std::vector<double> norm_history(const FrequencyGrid& grid, const std::vector<SpectralArray>& h, double r) {
    std::vector<double> out(h.size());
    for (std::size_t n = 0; n < h.size(); ++n) out[n] = sobolev_hom_norm(grid, h[n], r);
    return out;
}

double rel_change(double a, double b) { return b == 0.0 ? (a == 0.0 ? 0.0 : 1.0) : std::abs(a - b) / std::abs(b); }

}  // namespace

NonlinearDecayReport verify_theorem_2_2_decay(const FrequencyGrid& grid, const LinearData& u_data,
                                         const LinearData& v_data, const ModelParams& p,
                                         const NonlinearDecayOptions& opt) {
    if (p.lambda() != 1.0) throw ConfigError("lambda", "decay checks use lambda = 1");
    for (double m : {opt.m1, opt.m2})
        if (!(m >= 1.0 && m < 2.0)) throw ConfigError("m", "must lie in [1, 2)");
    if (!(opt.s > std::max(0.5 * grid.dims() - p.sigma(), 0.0)))
        throw ConfigError("s", "needs s > [n/2 - sigma]_+");
    if (!(opt.dt > 0.0) || !(opt.horizon > 0.0)) throw ConfigError("horizon", "horizon and dt must be > 0");
    const int n = grid.dims();
    const double sig = p.sigma();
    NonlinearDecayReport rep;
    rep.condition_lhs = 2.0 / std::max(opt.m1, opt.m2);
    rep.condition_rhs = 1.0 / std::min(opt.m1, opt.m2) + sig / n;
    rep.admissible = rep.condition_lhs >= rep.condition_rhs - 1e-14;
    rep.real_reduction = is_zero(v_data);
    if (!rep.admissible) {
        rep.message = "exponents violate 2/max(m1,m2) >= 1/min(m1,m2) + sigma/n";
        return rep;
    }

    auto solve = [&](double T) {
        MildSolverConfig cfg;
        cfg.horizon = T;
        cfg.samples = static_cast<std::size_t>(std::llround(T / opt.dt)) + 1;
        cfg.picard_max_iters = opt.picard_max_iters;
        cfg.picard_tol = opt.picard_tol;
        cfg.representation = Representation::coupled_real;
        return picard_solve_coupled(grid, u_data, v_data, p, cfg);
    };
    const auto sol = solve(opt.horizon);
    rep.converged = sol.converged;
    if (!sol.converged) {
        rep.message = "nonlinear solve did not converge: " + sol.message;
        return rep;
    }
    const double r = opt.s + sig;
    auto fit_component = [&](const std::string& name, double m, const std::vector<SpectralArray>& h,
                             std::span<const double> t) {
        ComponentDecay c;
        c.name = name;
        c.m = m;
        const double e = -n * (2.0 - m) / (4.0 * m * sig);
        c.l2 = fit_decay(t, norm_history(grid, h, 0.0), e);
        c.hdot = fit_decay(t, norm_history(grid, h, r), e - r / (2.0 * sig));
        return c;
    };
    rep.components.push_back(fit_component("u", opt.m1, sol.du, sol.t));
    if (!rep.real_reduction) rep.components.push_back(fit_component("v", opt.m2, sol.dv, sol.t));

    std::ostringstream msg;
    msg << "fitted L2 exponents:";
    for (const auto& c : rep.components) msg << ' ' << c.name << '=' << c.l2.fitted << " (expected " << c.l2.expected << ')';
    if (opt.check_horizon_doubling) {
        rep.short_horizon = 0.5 * opt.horizon;
        const auto half = solve(rep.short_horizon);
        if (!half.converged) {
            rep.message = "short-horizon solve did not converge: " + half.message;
            return rep;
        }
        std::vector<std::pair<std::string, const std::vector<SpectralArray>*>> comps = {{"u", &half.du}};
        if (!rep.real_reduction) comps.push_back({"v", &half.dv});
        for (std::size_t k = 0; k < comps.size(); ++k) {
            const auto& longh = k == 0 ? sol.du : sol.dv;
            const auto a = norm_history(grid, *comps[k].second, 0.0);
            const auto b = norm_history(grid, longh, 0.0);
            for (std::size_t i = 0; i < a.size(); ++i) rep.norm_drift = std::max(rep.norm_drift, rel_change(a[i], b[i]));
            const auto c = fit_component(comps[k].first, k == 0 ? opt.m1 : opt.m2, *comps[k].second, half.t);
            rep.exponent_drift = std::max(rep.exponent_drift, rel_change(c.l2.fitted, rep.components[k].l2.fitted));
        }
        rep.horizon_stable = rep.norm_drift < 0.05 && rep.exponent_drift < 0.05;
        msg << "; horizon doubling " << rep.short_horizon << " -> " << opt.horizon << ": norm drift "
            << rep.norm_drift << ", exponent drift " << rep.exponent_drift;
    }
    rep.message = msg.str();
    return rep;
}

}  // namespace jmgt
