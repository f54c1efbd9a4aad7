#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>

#include "jmgt/calibration.hpp"
#include "jmgt/errors.hpp"
#include "jmgt/field.hpp"
#include "jmgt/nonlinear.hpp"
#include "oracles.hpp"

using namespace jmgt;

namespace {

LinearData make_data(const FrequencyGrid& g, std::uint64_t seed, RandomFieldOptions ro) {
    std::mt19937_64 rng(seed);
    LinearData d;
    d.w0 = random_field(g, rng, ro);
    d.w1 = random_field(g, rng, ro);
    d.w2 = random_field(g, rng, ro);
    return d;
}

SpectralArray masked(const FrequencyGrid& g, SpectralArray f) {
    apply_mask(f, g.dealias_mask());
    return f;
}

// RK4 on the per-mode system τψ''' = -ψ'' - aψ - bψ' + β P[2ψ'ψ''], with the
// products done by direct convolution. Returns ψ' at every step.
std::vector<SpectralArray> rk4_mol(const FrequencyGrid& g, const LinearData& d, const ModelParams& p, double T,
                                   int steps) {
    const std::size_t M = g.size();
    const auto sym = fractional_laplacian_symbol(g, p.sigma());
    const double tau = p.tau(), S = p.delta() + p.tau(), beta = p.beta();
    using State = std::array<SpectralArray, 3>;
    auto rhs = [&](const State& y) {
        auto prod = oracle::direct_product(g, masked(g, y[1]), masked(g, y[2]));
        prod = masked(g, prod);
        State out{y[1], y[2], SpectralArray(M)};
        for (std::size_t k = 0; k < M; ++k)
            out[2][k] = (-y[2][k] - sym[k] * y[0][k] - S * sym[k] * y[1][k] + 2.0 * beta * prod[k]) / tau;
        return out;
    };
    auto axpy = [&](const State& y, double h, const State& k) {
        State o = y;
        for (int c = 0; c < 3; ++c)
            for (std::size_t i = 0; i < M; ++i) o[c][i] += h * k[c][i];
        return o;
    };
    State y{d.w0, d.w1, d.w2};
    const double h = T / steps;
    std::vector<SpectralArray> out{y[1]};
    for (int s = 0; s < steps; ++s) {
        const auto k1 = rhs(y), k2 = rhs(axpy(y, 0.5 * h, k1)), k3 = rhs(axpy(y, 0.5 * h, k2)),
                   k4 = rhs(axpy(y, h, k3));
        for (int c = 0; c < 3; ++c)
            for (std::size_t i = 0; i < M; ++i)
                y[c][i] += h / 6.0 * (k1[c][i] + 2.0 * k2[c][i] + 2.0 * k3[c][i] + k4[c][i]);
        out.push_back(y[1]);
    }
    return out;
}

}  // namespace

TEST_CASE("quadratic nonlinearity matches a direct convolution") {
    const FrequencyGrid g(1, 32);
    RandomFieldOptions ro;
    ro.bandlimit = 8.0;
    std::mt19937_64 rng(1);
    const auto f = random_field(g, rng, ro);
    auto ref = oracle::direct_product(g, masked(g, f), masked(g, f));
    ref = masked(g, ref);
    const auto got = westervelt_nonlinearity(g, f);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(got[i] - ref[i]) < 1e-12);
    const auto raw = westervelt_nonlinearity(g, f, DealiasRule::none);
    const auto raw_ref = oracle::direct_product(g, f, f);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(raw[i] - raw_ref[i]) < 1e-12);
}

TEST_CASE("coupled forcings recombine into the complex square") {
    const FrequencyGrid g(2, 16);
    RandomFieldOptions ro;
    ro.hermitian = true;
    std::mt19937_64 rng(2);
    const auto du = random_field(g, rng, ro), dv = random_field(g, rng, ro);
    const auto cf = coupled_nonlinearities(g, du, dv);
    const auto whole = westervelt_nonlinearity(g, combine_spectra(du, dv));
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(cf.f1[i] + 2.0 * cplx(0, 1) * cf.f2[i] - whole[i]) < 1e-12);
    CHECK(hermitian_defect(g, cf.f1) < 1e-12);
    CHECK(hermitian_defect(g, cf.f2) < 1e-12);
    ro.hermitian = false;
    const auto cx = random_field(g, rng, ro);
    CHECK_THROWS_AS(coupled_nonlinearities(g, cx, dv), ContractViolation);
}

TEST_CASE("solver config validation names the field") {
    const auto field = [](MildSolverConfig c) {
        try {
            c.validate();
        } catch (const ConfigError& e) {
            return e.field();
        }
        return std::string();
    };
    MildSolverConfig c;
    CHECK(field(c).empty());
    c.horizon = 0.0;
    CHECK(field(c) == "horizon");
    c = {};
    c.samples = 8;
    CHECK(field(c) == "samples");
    c = {};
    c.picard_tol = 0.0;
    CHECK(field(c) == "picard_tol");
    c = {};
    c.picard_max_iters = 0;
    CHECK(field(c) == "picard_max_iters");
    CHECK(MildSolverConfig{}.times().size() == 401);
    CHECK(std::string(representation_name(Representation::coupled_real)) == "coupled_real");
}

TEST_CASE("zero data stays zero and tiny data is linear") {
    const FrequencyGrid g(1, 32);
    const ModelParams p(1.0, 1.0, 2.0, 1.0);
    MildSolverConfig cfg;
    cfg.horizon = 4.0;
    cfg.samples = 201;
    const auto z = picard_solve(g, LinearData::zeros(g), p, cfg);
    CHECK(z.converged);
    for (const auto& a : z.dpsi)
        for (auto v : a) CHECK(v == 0.0);

    RandomFieldOptions ro;
    ro.amplitude = 1e-8;
    const auto d = make_data(g, 3, ro);
    const auto s = picard_solve(g, d, p, cfg);
    REQUIRE(s.converged);
    const auto lin = propagate_dt(g, d, p, cfg.times());
    CHECK(relative_l2_distance(g, s.dpsi, lin) < 1e-6);
}

TEST_CASE("Picard solution matches an independent RK4 method of lines") {
    const FrequencyGrid g(1, 16);
    const ModelParams p(1.0, 1.0, 2.0, 1.0);
    RandomFieldOptions ro;
    ro.amplitude = 0.3;
    ro.bandlimit = 4.0;
    const auto d = make_data(g, 4, ro);
    const double T = 2.0;
    const int steps = 8000;
    const auto ref = rk4_mol(g, d, p, T, steps);
    std::vector<double> errs;
    for (std::size_t S : {401u, 801u}) {
        MildSolverConfig cfg;
        cfg.horizon = T;
        cfg.samples = S;
        const auto sol = picard_solve(g, d, p, cfg);
        REQUIRE(sol.converged);
        std::vector<SpectralArray> ref_s;
        for (std::size_t i = 0; i < S; ++i) ref_s.push_back(ref[i * (steps / (S - 1))]);
        errs.push_back(relative_l2_distance(g, sol.dpsi, ref_s));
        if (S == 401) {
            // The nonlinear term is visible at this amplitude.
            const auto lin = propagate_dt(g, d, p, cfg.times());
            CHECK(relative_l2_distance(g, lin, ref_s) > 1e-3);
            const auto mol = method_of_lines_oracle(g, d, p, cfg, {1e-12, 1e-16});
            CHECK(relative_l2_distance(g, mol.dpsi, ref_s) < 1e-9);
        }
    }
    // Third order overall: the first step uses the trapezoid rule.
    CHECK(errs[0] < 5e-7);
    CHECK(errs[0] / errs[1] > 6.0);
}

TEST_CASE("complex and coupled real representations agree") {
    const FrequencyGrid g(1, 32);
    const ModelParams p(0.5, 1.0, 3.0, 0.75);
    RandomFieldOptions ro;
    ro.amplitude = 0.05;
    const auto d = make_data(g, 5, ro);
    MildSolverConfig cfg;
    cfg.horizon = 3.0;
    cfg.samples = 301;
    const auto a = picard_solve(g, d, p, cfg);
    cfg.representation = Representation::coupled_real;
    const auto b = picard_solve(g, d, p, cfg);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    CHECK(relative_l2_distance(g, a.dpsi, b.dpsi) < 1e-10);
    CHECK(b.du.size() == cfg.samples);
    CHECK(hermitian_defect(g, b.du.back()) < 1e-10);
    const auto bad = make_data(g, 6, ro);
    CHECK_THROWS_AS(picard_solve_coupled(g, bad, d, p, cfg), ContractViolation);
}

TEST_CASE("large data make the iteration diverge") {
    const FrequencyGrid g(1, 32);
    const ModelParams p(1.0, 1.0, 2.0, 1.0);
    RandomFieldOptions ro;
    ro.amplitude = 50.0;
    const auto d = make_data(g, 7, ro);
    MildSolverConfig cfg;
    cfg.horizon = 10.0;
    cfg.samples = 201;
    const auto s = picard_solve(g, d, p, cfg);
    CHECK_FALSE(s.converged);
    CHECK(s.diverged);
    CHECK_FALSE(s.message.empty());
}

TEST_CASE("scaling pipeline") {
    const FrequencyGrid g(1, 256);
    const ModelParams p(1.0, 1.0, 2.0, 1.0);
    const auto cal = default_calibration();
    MildSolverConfig cfg;
    cfg.horizon = 2.0;
    cfg.samples = 101;
    RandomFieldOptions ro;
    ro.octant_radius = threshold_N0(p);
    ro.bandlimit = 4.0;
    ro.width = 2.0;
    SUBCASE("small data keep lambda = 1") {
        ro.amplitude = 1e-7;
        const auto r = scaled_large_data_pipeline(g, make_data(g, 8, ro), -1.0, 0.5, p, cal.smallness(), cfg);
        CHECK(r.lambda == 1);
        CHECK(r.smallness_met);
        CHECK(r.solved);
        CHECK(r.solution.converged);
    }
    SUBCASE("large data are rescaled until small") {
        ro.amplitude = 0.1;
        const auto r = scaled_large_data_pipeline(g, make_data(g, 9, ro), -1.0, 0.5, p, cal.smallness(), cfg, false);
        CHECK(r.lambda > 1);
        CHECK(r.representable);
        CHECK(r.smallness_met);
        CHECK(r.scaling_ok);
        CHECK(r.alpha_after == doctest::Approx(-1.0 * r.lambda));
    }
    SUBCASE("lambda beyond the grid falls back to the largest representable one") {
        ro.amplitude = 1.0;
        const auto r = scaled_large_data_pipeline(g, make_data(g, 9, ro), -1.0, 0.5, p, cal.smallness(), cfg, false);
        CHECK_FALSE(r.representable);
        CHECK(r.lambda_representable < r.lambda);
        CHECK(r.message.find("off the grid") != std::string::npos);
    }
    SUBCASE("preconditions") {
        ro.octant_radius = -1.0;
        const auto off = make_data(g, 10, ro);
        CHECK_THROWS_AS(scaled_large_data_pipeline(g, off, -1.0, 0.5, p, cal.smallness(), cfg), ContractViolation);
        ro.octant_radius = threshold_N0(p);
        const auto d = make_data(g, 10, ro);
        CHECK_THROWS_AS(scaled_large_data_pipeline(g, d, 0.0, 0.5, p, cal.smallness(), cfg), ConfigError);
        CHECK_THROWS_AS(scaled_large_data_pipeline(g, d, -1.0, 0.5, p, {0.0, 1.0, 1.0}, cfg), ConfigError);
    }
}

TEST_CASE("nonlinear decay admissibility") {
    const FrequencyGrid g(1, 64, 2.0 * std::numbers::pi * 16.0);
    RandomFieldOptions ro;
    ro.hermitian = true;
    ro.amplitude = 1e-3;
    ro.bandlimit = 1.0;
    const auto u = make_data(g, 11, ro);
    NonlinearDecayOptions opt;
    opt.horizon = 20.0;
    opt.dt = 0.2;
    opt.m1 = 1.0;
    opt.m2 = 1.2;
    opt.check_horizon_doubling = false;
    const auto no = verify_theorem_2_2_decay(g, u, LinearData::zeros(g), ModelParams(1, 1, 2, 1.0), opt);
    CHECK_FALSE(no.admissible);
    CHECK(no.condition_lhs == doctest::Approx(2.0 / 1.2));
    CHECK(no.condition_rhs == doctest::Approx(2.0));
    opt.m2 = 1.0;
    const auto yes = verify_theorem_2_2_decay(g, u, LinearData::zeros(g), ModelParams(1, 1, 2, 0.5), opt);
    CHECK(yes.admissible);
    CHECK(yes.converged);
    CHECK(yes.real_reduction);
    REQUIRE(yes.components.size() == 1);
    CHECK(yes.components[0].name == "u");
    CHECK(std::isfinite(yes.components[0].l2.fitted));
    opt.m1 = 2.0;
    CHECK_THROWS_AS(verify_theorem_2_2_decay(g, u, LinearData::zeros(g), ModelParams(1, 1, 2, 0.5), opt),
                    ConfigError);
}

TEST_CASE("calibration file round trip") {
    Calibration c;
    c.C0 = 1.25;
    c.C1 = 0.5;
    c.C2 = 2.0;
    c.equiv_lo = 0.7;
    c.equiv_hi = 1.4;
    c.trials = 3;
    c.seed = 99;
    c.inequality_constants["gns"] = 1.9;
    const auto path = (std::filesystem::temp_directory_path() / "jmgt_cal_roundtrip.json").string();
    save_calibration(path, c);
    const auto r = load_calibration(path);
    std::remove(path.c_str());
    CHECK(r.C0 == c.C0);
    CHECK(r.C1 == c.C1);
    CHECK(r.C2 == c.C2);
    CHECK(r.equiv_lo == c.equiv_lo);
    CHECK(r.equiv_hi == c.equiv_hi);
    CHECK(r.equiv_period == c.equiv_period);
    CHECK(r.seed == 99);
    CHECK(r.inequality_constants.at("gns") == 1.9);
    CHECK_THROWS_AS(load_calibration("/nonexistent/cal.json"), ConfigError);

    const auto shipped = default_calibration();
    CHECK(shipped.C0 > 0.0);
    CHECK(shipped.equiv_lo < 1.0);
    CHECK(shipped.equiv_hi > 1.0);
}
