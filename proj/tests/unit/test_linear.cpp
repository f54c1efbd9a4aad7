#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "jmgt/errors.hpp"
#include "jmgt/linear.hpp"
#include "oracles.hpp"

using namespace jmgt;

namespace {

LinearData make_data(const FrequencyGrid& g, std::uint64_t seed, RandomFieldOptions ro = {}) {
    std::mt19937_64 rng(seed);
    LinearData d;
    d.w0 = random_field(g, rng, ro);
    d.w1 = random_field(g, rng, ro);
    d.w2 = random_field(g, rng, ro);
    return d;
}

}  // namespace

TEST_CASE("modewise propagation matches RK4 on every mode") {
    const FrequencyGrid g(2, 8, 2.0 * std::numbers::pi * 2.0);
    const ModelParams p(0.5, 1.0, 2.0, 0.75);
    RandomFieldOptions ro;
    ro.bandlimit = 1.5;
    const auto d = make_data(g, 1, ro);
    const std::vector<double> ts = {0.0, 0.5, 2.0};
    const auto sol = propagate_linear(g, d, p, ts);
    REQUIRE(sol.states.size() == ts.size());
    const auto sym = fractional_laplacian_symbol(g, p.sigma());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double a = sym[k], b = (p.delta() + p.tau()) * a;
        CHECK(sol.states[0].psi[k] == d.w0[k]);
        CHECK(sol.states[0].dpsi[k] == d.w1[k]);
        CHECK(sol.states[0].ddpsi[k] == d.w2[k]);
        for (std::size_t i = 1; i < ts.size(); ++i) {
            const auto y = oracle::rk4_mode({d.w0[k], d.w1[k], d.w2[k]}, ts[i], p.tau(), b, a, 4000);
            const double scale = 1.0 + std::abs(d.w0[k]) + std::abs(d.w1[k]) + std::abs(d.w2[k]);
            CHECK(std::abs(sol.states[i].psi[k] - y[0]) < 1e-9 * scale);
            CHECK(std::abs(sol.states[i].dpsi[k] - y[1]) < 1e-9 * scale);
            CHECK(std::abs(sol.states[i].ddpsi[k] - y[2]) < 1e-9 * scale);
        }
    }
}

TEST_CASE("dt propagation and norm history agree with the full solution") {
    const FrequencyGrid g(1, 32);
    const ModelParams p(1.0, 1.0, 2.0, 1.0);
    const auto d = make_data(g, 2);
    const std::vector<double> ts = {0.0, 0.3, 1.0, 4.0};
    const auto full = propagate_linear(g, d, p, ts);
    const auto dt = propagate_dt(g, d, p, ts);
    const auto nh = dt_norm_history(g, d, p, ts, 0.5);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        for (std::size_t k = 0; k < g.size(); ++k) CHECK(std::abs(dt[i][k] - full.states[i].dpsi[k]) < 1e-14);
        CHECK(nh[i] == doctest::Approx(sobolev_hom_norm(g, dt[i], 0.5)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(propagate_dt(g, d, p, std::vector<double>{1.0, 0.5}), ContractViolation);
    CHECK_THROWS_AS(propagate_dt(g, d, p, std::vector<double>{-1.0}), ContractViolation);
}

TEST_CASE("linear data validation") {
    const FrequencyGrid g(1, 16);
    auto d = LinearData::zeros(g);
    CHECK_NOTHROW(d.validate(g));
    d.w2.resize(4);
    CHECK_THROWS_AS(d.validate(g), ContractViolation);
}

TEST_CASE("magnitude groups share |k|^2") {
    const FrequencyGrid g(2, 8);
    const auto mg = group_by_magnitude(g);
    std::size_t total = 0;
    for (std::size_t gi = 0; gi < mg.members.size(); ++gi) {
        total += mg.members[gi].size();
        for (auto i : mg.members[gi]) {
            CHECK(mg.group_of[i] == gi);
            CHECK(g.magnitudes()[i] == doctest::Approx(mg.magnitude[gi]));
        }
    }
    CHECK(total == g.size());
    CHECK(mg.members.size() < g.size());
}

TEST_CASE("Duhamel weights integrate cubics exactly") {
    for (std::size_t m : {2u, 3u, 4u, 5u, 10u, 11u}) {
        const double dt = 0.3;
        const auto w = duhamel_weights(m, dt);
        REQUIRE(w.size() == m + 1);
        const double T = m * dt;
        for (int deg = 0; deg <= 3; ++deg) {
            double s = 0.0;
            for (std::size_t i = 0; i <= m; ++i) s += w[i] * std::pow(i * dt, deg);
            CHECK(s == doctest::Approx(std::pow(T, deg + 1) / (deg + 1)).epsilon(1e-12));
        }
    }
    const auto w1 = duhamel_weights(1, 0.5);
    CHECK(w1[0] == doctest::Approx(0.25));
    CHECK(w1[1] == doctest::Approx(0.25));
}

TEST_CASE("Duhamel integral matches a Richardson-extrapolated quadrature") {
    const FrequencyGrid g(1, 8);
    const ModelParams p(1.0, 1.0, 2.0, 1.0);
    const double T = 2.0;
    const std::size_t S = 801;
    const double dt = T / (S - 1);
    // Forcing ĝ_k(θ) = c_k cos(θ) with distinct amplitudes per mode.
    std::vector<SpectralArray> forcing(S, SpectralArray(g.size()));
    for (std::size_t i = 0; i < S; ++i)
        for (std::size_t k = 0; k < g.size(); ++k) forcing[i][k] = (1.0 + 0.1 * k) * std::cos(i * dt);
    const auto got = duhamel_apply(g, p, forcing, dt);
    const auto hist = duhamel_history(g, p, forcing, dt);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double xi = g.magnitudes()[k];
        const double a = symbol_at(xi, p), b = 2.0 * a;
        const double ref = oracle::richardson_integral(
            [&](double th) { return oracle::taylor_kernel(2, T - th, 1.0, b, a)[2] * std::cos(th); }, 0.0, T);
        CHECK(std::abs(got[k] - (1.0 + 0.1 * k) * ref) < 1e-9);
        CHECK(std::abs(hist.back()[k] - got[k]) < 1e-13);
    }
    for (auto v : hist.front()) CHECK(v == 0.0);
    CHECK_THROWS_AS(duhamel_apply(g, p, std::vector<SpectralArray>(2, SpectralArray(g.size())), dt),
                    QuadratureError);
}

TEST_CASE("decay exponent formula") {
    CHECK(linear_decay_exponent(1, 1.0, -1.0, 1.0) == doctest::Approx(-0.25));
    CHECK(linear_decay_exponent(1, 1.0, 0.0, 1.0) == doctest::Approx(-0.75));
    CHECK(linear_decay_exponent(2, 1.0, 0.0, 1.0) == doctest::Approx(-1.0));
    CHECK(linear_decay_exponent(1, 1.5, -1.0, 1.0) == doctest::Approx(-1.0 / 12.0));
}

TEST_CASE("decay fit on an exact power law") {
    std::vector<double> t, y;
    for (int i = 0; i <= 400; ++i) {
        t.push_back(0.5 * i);
        y.push_back(3.0 * std::pow(1.0 + t.back(), -0.37));
    }
    const auto r = fit_decay(t, y, -0.37);
    CHECK(r.fitted == doctest::Approx(-0.37).epsilon(1e-9));
    CHECK(r.conclusive);
    CHECK(r.r_squared > 0.999999);
    CHECK(r.fit_t_max == doctest::Approx(200.0));
    CHECK(r.fit_t_min == doctest::Approx(20.0).epsilon(0.05));
    std::vector<double> z(t.size(), 0.0);
    CHECK(fit_decay(t, z, -0.37).degenerate);
}

TEST_CASE("decay profile") {
    const FrequencyGrid g(1, 64, 2.0 * std::numbers::pi * 8.0);
    const auto p0 = decay_profile(g, 0.0, false);
    CHECK(p0[0] == 0.0);
    CHECK(std::abs(p0[1]) > 0.0);
    // Hermitian real profile, decreasing in |ξ|.
    CHECK(hermitian_defect(g, p0) < 1e-15);
    CHECK(std::abs(p0[2]) < std::abs(p0[1]));
    const auto kept = decay_profile(g, 0.25, true);
    CHECK(std::abs(kept[0]) > 0.0);
    CHECK_THROWS_AS(decay_profile(g, 0.5, true), ConfigError);
}

TEST_CASE("linear decay reproduces -3/4 for Hdot^1 at desk size") {
    const FrequencyGrid g(1, 128, 2.0 * std::numbers::pi * 128.0);
    const ModelParams p(0.2, 1.0, 2.0, 1.0);
    LinearData d = LinearData::zeros(g);
    d.w1 = decay_profile(g, 0.0, false);
    const auto r = verify_decay_prop_4_3(g, p, d, 1.0, 0.0, geometric_time_grid(200.0, 8));
    CHECK(r.expected == doctest::Approx(-0.75));
    CHECK(std::abs(r.fitted - r.expected) < 0.05);
    CHECK_THROWS_AS(verify_decay_prop_4_3(g, p, d, 2.0, 0.0, geometric_time_grid(10.0)), ConfigError);
    CHECK_THROWS_AS(verify_decay_prop_4_3(g, p, d, 1.0, -0.5, geometric_time_grid(10.0)), ConfigError);
}

TEST_CASE("uniform estimates on octant data") {
    const FrequencyGrid g(1, 64);
    const ModelParams p(1.0, 1.0, 2.0, 1.0);
    RandomFieldOptions ro;
    ro.octant_radius = threshold_N0(p);
    ro.bandlimit = 8.0;
    const auto d = make_data(g, 5, ro);
    for (auto gamma : {TimeExponent::one, TimeExponent::two, TimeExponent::infinity}) {
        const auto r = verify_prop_3_2(g, p, d, -0.5, 0.0, gamma);
        CHECK_FALSE(r.degenerate);
        CHECK(std::isfinite(r.ratio));
        CHECK(r.ratio > 0.0);
    }
    const auto off = make_data(g, 6);
    CHECK_THROWS_AS(verify_prop_3_2(g, p, off, -0.5, 0.0, TimeExponent::two), ContractViolation);

    std::vector<SpectralArray> forcing(101, d.w1);
    const auto r = verify_duhamel_estimate(g, p, forcing, 0.05, -0.5, 0.0, TimeExponent::two);
    CHECK(std::isfinite(r.ratio));
    CHECK(r.ratio > 0.0);
}
