#include "jmgt/calibration.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <json.hpp>

#include "jmgt/dispersion.hpp"
#include "jmgt/errors.hpp"
#include "jmgt/inequalities.hpp"
#include "jmgt/spaces.hpp"

namespace jmgt {

namespace {

using json = nlohmann::json;

LinearData random_octant_data(const FrequencyGrid& grid, std::mt19937_64& rng, double radius) {
    RandomFieldOptions ro;
    ro.bandlimit = 4.0;
    ro.width = 2.0;
    ro.octant_radius = radius;
    std::uniform_real_distribution<double> u(-2.0, 0.0);
    ro.amplitude = std::pow(10.0, u(rng));
    LinearData d;
    d.w0 = random_field(grid, rng, ro);
    d.w1 = random_field(grid, rng, ro);
    d.w2 = random_field(grid, rng, ro);
    return d;
}

}  // namespace

Calibration calibrate(const CalibrationOptions& opt) {
    if (opt.trials < 1) throw ConfigError("trials", "must be >= 1");
    if (!(opt.safety >= 1.0)) throw ConfigError("safety", "must be >= 1");
    const FrequencyGrid grid(1, opt.modes);
    const ModelParams p(1.0, 1.0, 2.0, 1.0);
    const double n0 = threshold_N0(p);
    const double sig = p.sigma(), kappa = p.beta() / p.tau();
    const double alpha = opt.alpha, s = opt.s;
    const NormSpec X{alpha, s + sig, TimeExponent::two};

    const double T = 20.0, dt = 0.04;
    const std::size_t S = static_cast<std::size_t>(std::llround(T / dt)) + 1;
    std::vector<double> times(S);
    for (std::size_t i = 0; i < S; ++i) times[i] = static_cast<double>(i) * dt;

    Calibration c;
    c.safety = opt.safety;
    c.alpha = alpha;
    c.s = s;
    c.trials = opt.trials;
    c.seed = opt.seed;
    std::vector<double> r0(opt.trials), r1(opt.trials), r2(opt.trials);
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < opt.trials; ++t) {
        std::mt19937_64 rng(opt.seed + 104729ULL * static_cast<std::uint64_t>(t));
        const auto d = random_octant_data(grid, rng, n0);
        const double eps = rough_data_norm(grid, d, alpha, s, sig, DealiasRule::two_thirds);

        const auto lin = propagate_dt(grid, d, p, times);
        LinearData b = LinearData::zeros(grid);
        b.w2 = westervelt_nonlinearity(grid, d.w1);
        const auto bnd = propagate_dt(grid, b, p, times);
        r0[t] = (mixed_time_norm(grid, lin, dt, X) + kappa * mixed_time_norm(grid, bnd, dt, X)) / eps;

        std::vector<SpectralArray> sq(S);
        for (std::size_t i = 0; i < S; ++i) sq[i] = westervelt_nonlinearity(grid, lin[i]);
        const auto duh = duhamel_history(grid, p, sq, dt);
        const double g = mixed_time_norm(grid, lin, dt, X);
        r1[t] = kappa * mixed_time_norm(grid, duh, dt, X) / (g * g);

        double worst = 0.0;
        for (int lam : {2, 3, 4}) {
            LinearData sc{spatial_scale(grid, d.w0, lam), spatial_scale(grid, d.w1, lam),
                          spatial_scale(grid, d.w2, lam)};
            const double el = rough_data_norm(grid, sc, alpha, s, sig, DealiasRule::two_thirds);
            const double bound = std::pow(lam, -0.5 + s + sig) * std::exp2(alpha * (lam - 1.0) * n0) * eps;
            worst = std::max(worst, el / bound);
        }
        r2[t] = worst;
    }
    for (int t = 0; t < opt.trials; ++t) {
        c.C0 = std::max(c.C0, r0[t]);
        c.C1 = std::max(c.C1, r1[t]);
        c.C2 = std::max(c.C2, r2[t]);
    }
    c.C0 *= opt.safety;
    c.C1 *= opt.safety;
    c.C2 *= opt.safety;

    EnsembleOptions eo;
    eo.seed = opt.seed;
    eo.alpha = alpha;
    eo.s = 0.5;
    eo.trials = 50;
    // Period 8π puts 4^n lattice modes in every unit box; at 2π each box holds
    // one mode and the two forms coincide.
    EnsembleOptions eq_opt = eo;
    eq_opt.period = c.equiv_period;
    const auto eq = run_inequality_ensemble(InequalityKind::e_norm_equivalence, eq_opt);
    c.equiv_lo = 0.8 * eq.c_min;
    c.equiv_hi = 1.25 * eq.c_coarse;
    if (opt.with_inequalities) {
        for (auto k : {InequalityKind::algebra, InequalityKind::gns, InequalityKind::embedding,
                       InequalityKind::leibniz, InequalityKind::data_estimates, InequalityKind::nonlinearity}) {
            const auto r = run_inequality_ensemble(k, eo);
            c.inequality_constants[inequality_name(k)] = opt.safety * std::max(r.c_coarse, r.c_fine);
        }
    }
    return c;
}

void save_calibration(const std::string& path, const Calibration& c) {
    json j;
    j["format"] = 1;
    j["setting"] = {{"n", 1}, {"tau", 1.0}, {"delta", 1.0}, {"b_over_a", 2.0}, {"sigma", 1.0},
                    {"alpha", c.alpha}, {"s", c.s}};
    j["C0"] = c.C0;
    j["C1"] = c.C1;
    j["C2"] = c.C2;
    j["safety"] = c.safety;
    j["equiv_band"] = {c.equiv_lo, c.equiv_hi};
    j["equiv_period"] = c.equiv_period;
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    j["inequality_constants"] = c.inequality_constants;
    std::ofstream out(path);
    if (!out) throw ConfigError("calibration", "cannot write " + path);
    out << j.dump(2) << '\n';
}

Calibration load_calibration(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("calibration", "cannot read " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("calibration", path + ": " + e.what());
    }
    Calibration c;
    try {
        c.C0 = j.at("C0").get<double>();
        c.C1 = j.at("C1").get<double>();
        c.C2 = j.at("C2").get<double>();
        c.safety = j.at("safety").get<double>();
        c.equiv_lo = j.at("equiv_band").at(0).get<double>();
        c.equiv_hi = j.at("equiv_band").at(1).get<double>();
        c.equiv_period = j.at("equiv_period").get<double>();
        c.trials = j.at("trials").get<int>();
        c.seed = j.at("seed").get<std::uint64_t>();
        c.alpha = j.at("setting").at("alpha").get<double>();
        c.s = j.at("setting").at("s").get<double>();
        if (j.contains("inequality_constants"))
            c.inequality_constants = j["inequality_constants"].get<std::map<std::string, double>>();
    } catch (const json::exception& e) {
        throw ConfigError("calibration", path + ": " + e.what());
    }
    if (!(c.C0 > 0.0 && c.C1 > 0.0 && c.C2 > 0.0)) throw ConfigError("calibration", "constants must be > 0");
    return c;
}

std::string default_calibration_path() { return std::string(JMGT_DATA_DIR) + "/calibration.json"; }

Calibration default_calibration() {
    try {
        return load_calibration(default_calibration_path());
    } catch (const ConfigError&) {
        return calibrate();
    }
}

}  // namespace jmgt
