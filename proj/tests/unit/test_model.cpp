#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "jmgt/errors.hpp"
#include "jmgt/field.hpp"
#include "jmgt/grid.hpp"
#include "jmgt/params.hpp"
#include "jmgt/spaces.hpp"
#include "jmgt/transform.hpp"
#include "oracles.hpp"

using namespace jmgt;

namespace {

SpectralArray noise(const FrequencyGrid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n;
    SpectralArray f(g.size());
    for (auto& v : f) v = {n(rng), n(rng)};
    return f;
}

std::string field_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "";
}

}  // namespace

TEST_CASE("params validation names the field") {
    CHECK(field_of([] { ModelParams(0.0, 1, 2, 1); }) == "tau");
    CHECK(field_of([] { ModelParams(1, -1, 2, 1); }) == "delta");
    CHECK(field_of([] { ModelParams(1, 1, 0, 1); }) == "b_over_a");
    CHECK(field_of([] { ModelParams(1, 1, 2, 0); }) == "sigma");
    CHECK(field_of([] { ModelParams(1, 1, 2, NAN); }) == "sigma");
    CHECK(field_of([] { ModelParams(1, 1, 2, 1, 0.5); }) == "lambda");
    const ModelParams p(1, 1, 2, 1);
    CHECK(p.beta() == 2.0);
    CHECK(p.with_lambda(3).lambda() == 3.0);
    CHECK(p.with_b_over_a(4).beta() == 3.0);
    CHECK(p.describe().find("tau=1") != std::string::npos);
}

TEST_CASE("grid validation") {
    CHECK(field_of([] { FrequencyGrid(0, 16); }) == "dims");
    CHECK(field_of([] { FrequencyGrid(4, 16); }) == "dims");
    CHECK(field_of([] { FrequencyGrid(1, 15); }) == "modes_per_axis");
    CHECK(field_of([] { FrequencyGrid(1, 16, -1.0); }) == "period");
}

TEST_CASE("grid indexing follows FFT order") {
    const FrequencyGrid g(2, 8, 4.0 * std::numbers::pi);
    CHECK(g.size() == 64);
    CHECK(g.fundamental() == doctest::Approx(0.5));
    CHECK(g.cell_volume() == doctest::Approx(std::pow(4.0 * std::numbers::pi / 8.0, 2)));
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto k = g.mode_index(i);
        CHECK(g.flat_index(k).value() == i);
        const auto xi = g.frequency(i);
        CHECK(xi[0] == doctest::Approx(0.5 * k[0]));
        CHECK(g.magnitudes()[i] == doctest::Approx(0.5 * std::hypot(k[0], k[1])));
        CHECK(g.squared_index_norms()[i] == k[0] * k[0] + k[1] * k[1]);
        const auto nk = g.mode_index(g.negated(i));
        for (int d = 0; d < 2; ++d) {
            if (k[d] == -4)
                CHECK(nk[d] == -4);
            else
                CHECK(nk[d] == -k[d]);
        }
    }
    CHECK_FALSE(g.flat_index({4, 0, 0}).has_value());
    CHECK(g.mode_index(3)[1] == 3);
    CHECK(g.mode_index(5)[1] == -3);
}

TEST_CASE("octant and dealias masks") {
    const FrequencyGrid g(2, 12);
    const auto oct = g.octant_mask(2.0);
    const auto dal = g.dealias_mask();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto k = g.mode_index(i);
        const bool in_oct = k[0] >= 0 && k[1] >= 0 && std::max(k[0], k[1]) >= 2;
        CHECK(static_cast<bool>(oct[i]) == in_oct);
        CHECK(static_cast<bool>(dal[i]) == (std::abs(k[0]) <= 4 && std::abs(k[1]) <= 4));
    }
}

TEST_CASE("fractional symbol is zero at the origin") {
    const FrequencyGrid g(1, 16);
    const auto s = fractional_laplacian_symbol(g, 0.75);
    CHECK(s[0] == 0.0);
    CHECK(s[3] == doctest::Approx(std::pow(3.0, 1.5)));
}

TEST_CASE("unitary transform round trip and Parseval") {
    for (int n : {1, 2, 3}) {
        const FrequencyGrid g(n, n == 3 ? 8 : 16);
        const auto f = noise(g, 11 + n);
        const auto x = inverse_transform(g, f);
        const auto back = forward_transform(g, x);
        double e2s = 0.0, e2x = 0.0, err = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            err = std::max(err, std::abs(back[i] - f[i]));
            e2s += std::norm(f[i]);
            e2x += std::norm(x[i]);
        }
        CHECK(err < 1e-13);
        CHECK(e2s == doctest::Approx(e2x).epsilon(1e-13));
    }
}

TEST_CASE("inverse transform of a single mode is a plane wave") {
    const FrequencyGrid g(1, 16, 2.0 * std::numbers::pi);
    SpectralArray f(g.size());
    f[3] = 1.0;
    const auto x = inverse_transform(g, f);
    for (std::size_t j = 0; j < 16; ++j) {
        const double xj = 2.0 * std::numbers::pi * j / 16.0;
        CHECK(std::abs(x[j] - std::polar(0.25, 3.0 * xj)) < 1e-14);
    }
}

TEST_CASE("pseudospectral product matches direct convolution") {
    for (int n : {1, 2}) {
        const FrequencyGrid g(n, n == 1 ? 32 : 12);
        auto f = noise(g, 3), h = noise(g, 4);
        SUBCASE("no dealiasing, full aliasing wrap") {
            const auto fast = pseudospectral_product(g, f, h, DealiasRule::none);
            const auto slow = oracle::direct_product(g, f, h);
            for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(fast[i] - slow[i]) < 1e-12);
        }
        SUBCASE("two-thirds rule truncates inputs and output") {
            const auto m = g.dealias_mask();
            const auto fast = pseudospectral_product(g, f, h, DealiasRule::two_thirds);
            apply_mask(f, m);
            apply_mask(h, m);
            auto slow = oracle::direct_product(g, f, h);
            apply_mask(slow, m);
            for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(fast[i] - slow[i]) < 1e-12);
        }
    }
}

TEST_CASE("hermitian spectra and real/imaginary split") {
    const FrequencyGrid g(2, 8);
    const auto f = noise(g, 5);
    CHECK(hermitian_defect(g, f) > 0.1);
    const auto re = real_part_spectrum(g, f), im = imag_part_spectrum(g, f);
    CHECK(hermitian_defect(g, re) < 1e-15);
    CHECK(hermitian_defect(g, im) < 1e-15);
    const auto back = combine_spectra(re, im);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(back[i] - f[i]) < 1e-15);
    const auto xr = inverse_transform(g, re);
    for (const auto& v : xr) CHECK(std::abs(v.imag()) < 1e-14);
    CHECK(hermitian_defect(g, SpectralArray(g.size())) == 0.0);
}

TEST_CASE("field state validation") {
    const FrequencyGrid g(1, 8);
    auto s = FieldState::zeros(g);
    CHECK_NOTHROW(s.validate(g));
    s.real_representation = true;
    s.dpsi[1] = 1.0;
    CHECK_THROWS_AS(s.validate(g), ContractViolation);
    s.dpsi[7] = 1.0;
    CHECK_NOTHROW(s.validate(g));
    s.psi.resize(3);
    CHECK_THROWS_AS(s.validate(g), ContractViolation);
}

TEST_CASE("spatial scaling moves coefficients and scales norms exactly") {
    const FrequencyGrid g(2, 32);
    std::mt19937_64 rng(9);
    RandomFieldOptions ro;
    ro.bandlimit = 3.0;
    const auto f = random_field(g, rng, ro);
    for (int lam : {2, 4}) {
        const auto fl = spatial_scale(g, f, lam);
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (f[i] == 0.0) continue;
            auto k = g.mode_index(i);
            for (int d = 0; d < 2; ++d) k[d] *= lam;
            CHECK(std::abs(fl[*g.flat_index(k)] - f[i] / static_cast<double>(lam)) < 1e-15);
        }
        for (double s : {0.0, 0.5, 1.0})
            CHECK(sobolev_hom_norm(g, fl, s) ==
                  doctest::Approx(std::pow(lam, s - 1.0) * sobolev_hom_norm(g, f, s)).epsilon(1e-12));
    }
    CHECK(spatial_scale(g, f, 1.0) == f);
    CHECK_THROWS_AS(spatial_scale(g, f, 8), DomainError);
    CHECK_THROWS_AS(spatial_scale(g, f, 2.5), DomainError);
    CHECK(representable_lambda(g, f, 2.2) == 3);
    CHECK(representable_lambda(g, f, 7.5) == 0);
}
