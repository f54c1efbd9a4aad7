#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "jmgt/errors.hpp"
#include "jmgt/field.hpp"
#include "jmgt/inequalities.hpp"
#include "jmgt/spaces.hpp"
#include "jmgt/transform.hpp"

using namespace jmgt;

namespace {

SpectralArray field(const FrequencyGrid& g, std::uint64_t seed, RandomFieldOptions ro = {}) {
    std::mt19937_64 rng(seed);
    return random_field(g, rng, ro);
}

}  // namespace

TEST_CASE("E norm with alpha = s = 0 is the physical L2 norm") {
    for (int n : {1, 2, 3}) {
        const FrequencyGrid g(n, n == 3 ? 8 : 16, 3.0);
        RandomFieldOptions ro;
        ro.bandlimit = 5.0;
        const auto f = field(g, 10 + n, ro);
        const auto x = inverse_transform(g, f);
        CHECK(e_norm(g, f, 0.0, 0.0) == doctest::Approx(lebesgue_norm(g, x, 2.0)).epsilon(1e-12));
        CHECK(sobolev_norm(g, f, 0.0) == doctest::Approx(e_norm(g, f, 0.0, 0.0)).epsilon(1e-14));
        CHECK(sobolev_hom_norm(g, f, 0.0) == doctest::Approx(e_norm(g, f, 0.0, 0.0)).epsilon(1e-14));
    }
}

TEST_CASE("single-mode norms") {
    const FrequencyGrid g(1, 32, 4.0 * std::numbers::pi);
    const double h = 0.5, dv = 4.0 * std::numbers::pi / 32.0;
    SpectralArray f(g.size());
    const cplx c(0.6, -0.8);
    f[3] = c;
    const double xi = 3 * h;
    CHECK(e_norm(g, f, -0.7, 1.5) ==
          doctest::Approx(std::sqrt(dv) * std::pow(1.0 + xi * xi, 0.75) * std::exp2(-0.7 * xi)).epsilon(1e-14));
    CHECK(sobolev_hom_norm(g, f, 2.0) == doctest::Approx(std::sqrt(dv) * xi * xi).epsilon(1e-14));
    const auto x = inverse_transform(g, f);
    CHECK(lebesgue_norm(g, x, INFINITY) == doctest::Approx(1.0 / std::sqrt(32.0)).epsilon(1e-14));
    CHECK(lebesgue_norm(g, x, 4.0) ==
          doctest::Approx(std::pow(4.0 * std::numbers::pi, 0.25) / std::sqrt(32.0)).epsilon(1e-12));
    CHECK(hom_sobolev_lp_norm(g, f, 1.0, 2.0) == doctest::Approx(sobolev_hom_norm(g, f, 1.0)).epsilon(1e-12));
    CHECK_THROWS_AS(lebesgue_norm(g, x, 0.5), ConfigError);
}

TEST_CASE("homogeneous norms ignore the zero mode unless s = 0") {
    const FrequencyGrid g(2, 8);
    SpectralArray f(g.size());
    f[0] = 2.0;
    CHECK(sobolev_hom_norm(g, f, 0.5) == 0.0);
    CHECK(sobolev_hom_norm(g, f, -0.5) == 0.0);
    CHECK(sobolev_hom_norm(g, f, 0.0) > 0.0);
    CHECK(apply_riesz_power(g, f, 1.0)[0] == 0.0);
    CHECK(apply_riesz_power(g, f, 0.0)[0] == 2.0);
}

TEST_CASE("norm spec validation") {
    CHECK_THROWS_AS((NormSpec{0.5, 0.0}.validate()), ConfigError);
    CHECK_NOTHROW((NormSpec{-0.5, 2.0}.validate()));
    const FrequencyGrid g(1, 8);
    CHECK_THROWS_AS(e_norm(g, SpectralArray(8), 0.1, 0.0), ConfigError);
    CHECK(time_exponent_from(1.0) == TimeExponent::one);
    CHECK(time_exponent_from(INFINITY) == TimeExponent::infinity);
    CHECK_THROWS_AS(time_exponent_from(3.0), ConfigError);
    CHECK(std::isinf(time_exponent_value(TimeExponent::infinity)));
}

TEST_CASE("unit boxes") {
    SUBCASE("integer lattice") {
        const FrequencyGrid g(2, 8);
        for (std::size_t i = 0; i < g.size(); ++i) CHECK(box_of(g, i) == g.mode_index(i));
        CHECK(box_partition(g).boxes.size() == g.size());
    }
    SUBCASE("finer lattice groups modes") {
        const FrequencyGrid g(1, 16, 4.0 * std::numbers::pi);  // spacing 1/2
        const auto kk = [&](int k) { return box_of(g, *g.flat_index({k, 0, 0}))[0]; };
        CHECK(kk(3) == 1);   // 1.5
        CHECK(kk(2) == 1);   // 1.0
        CHECK(kk(-1) == -1); // -0.5
        CHECK(kk(-2) == -1); // -1.0
        const auto bp = box_partition(g);
        CHECK(bp.boxes.size() == 8);
        std::size_t total = 0;
        for (std::size_t b = 0; b < bp.boxes.size(); ++b) {
            const auto part = uniform_decompose(g, SpectralArray(g.size(), 1.0), bp.boxes[b]);
            for (std::size_t i = 0; i < g.size(); ++i)
                if (part[i] != 0.0) {
                    ++total;
                    CHECK(bp.box_of_mode[i] == b);
                }
        }
        CHECK(total == g.size());
    }
}

TEST_CASE("decomposed E norm equals the pointwise one on the integer lattice") {
    const FrequencyGrid g(2, 16);
    RandomFieldOptions ro;
    ro.bandlimit = 6.0;
    const auto f = field(g, 4, ro);
    for (double alpha : {0.0, -0.3})
        for (double s : {0.0, 1.0})
            CHECK(e_norm_decomposed(g, f, alpha, s) == doctest::Approx(e_norm(g, f, alpha, s)).epsilon(1e-12));
}

TEST_CASE("mixed time norms of a constant history") {
    const FrequencyGrid g(1, 32, 4.0 * std::numbers::pi);
    const auto f = field(g, 8);
    const double dt = 0.1;
    const std::vector<SpectralArray> hist(21, f);
    const double T = 2.0, base = e_norm_decomposed(g, f, -0.5, 1.0);
    CHECK(mixed_time_norm(g, hist, dt, {-0.5, 1.0, TimeExponent::two}) == doctest::Approx(std::sqrt(T) * base));
    CHECK(mixed_time_norm(g, hist, dt, {-0.5, 1.0, TimeExponent::one}) == doctest::Approx(T * base));
    CHECK(mixed_time_norm(g, hist, dt, {-0.5, 1.0, TimeExponent::infinity}) == doctest::Approx(base));
    CHECK_THROWS_AS(mixed_time_norm(g, {}, dt, NormSpec{}), ContractViolation);

    std::vector<double> ts;
    for (int i = 0; i <= 20; ++i) ts.push_back(i * dt);
    const double e1 = (2.0 - 1.5) / (4.0 * 1.5), e2 = e1 + 1.5 / 2.0;
    const double y = std::pow(1.0 + T, e1) * sobolev_hom_norm(g, f, 0.0) +
                     std::pow(1.0 + T, e2) * sobolev_hom_norm(g, f, 1.5);
    CHECK(y_weighted_norm(g, hist, ts, 1.5, 0.5, 1.0) == doctest::Approx(y));
    CHECK_THROWS_AS(y_weighted_norm(g, hist, ts, 2.0, 0.5, 1.0), ConfigError);
}

TEST_CASE("random fields are the same function at every resolution") {
    for (int n : {1, 2}) {
        const double L = 2.0 * std::numbers::pi * 2.0;
        const FrequencyGrid c(n, 16, L), f(n, 32, L);
        RandomFieldOptions ro;
        ro.bandlimit = 3.0;
        const auto a = field(c, 77, ro), b = field(f, 77, ro);
        for (double s : {0.0, 1.0, 2.5})
            CHECK(sobolev_norm(c, a, s) == doctest::Approx(sobolev_norm(f, b, s)).epsilon(1e-12));
        const auto xa = inverse_transform(c, a), xb = inverse_transform(f, b);
        // Coarse grid points are every other fine point.
        if (n == 1)
            for (std::size_t j = 0; j < 16; ++j) CHECK(std::abs(xa[j] - xb[2 * j]) < 1e-12 * (1.0 + std::abs(xa[j])));
    }
}

TEST_CASE("random field options") {
    const FrequencyGrid g(2, 32);
    RandomFieldOptions ro;
    ro.bandlimit = 6.0;
    SUBCASE("hermitian") {
        ro.hermitian = true;
        const auto f = field(g, 1, ro);
        CHECK(hermitian_defect(g, f) < 1e-15);
        for (auto v : inverse_transform(g, f)) CHECK(std::abs(v.imag()) < 1e-12);
    }
    SUBCASE("octant with radius") {
        ro.octant_radius = 2.0;
        const auto f = field(g, 2, ro);
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (f[i] == 0.0) continue;
            const auto k = g.mode_index(i);
            CHECK(k[0] >= 0);
            CHECK(k[1] >= 0);
            CHECK(std::max(k[0], k[1]) >= 2);
        }
        ro.hermitian = true;
        CHECK_THROWS_AS(field(g, 2, ro), ConfigError);
    }
    SUBCASE("minimum magnitude and band") {
        ro.min_magnitude = 2.5;
        const auto f = field(g, 3, ro);
        for (std::size_t i = 0; i < g.size(); ++i)
            if (f[i] != 0.0) {
                CHECK(g.magnitudes()[i] >= 2.5);
                const auto k = g.mode_index(i);
                CHECK(std::max(std::abs(k[0]), std::abs(k[1])) <= 6);
            }
        ro.bandlimit = 16.0;
        CHECK_THROWS_AS(field(g, 3, ro), ConfigError);
    }
    SUBCASE("amplitude scales linearly") {
        const auto a = field(g, 4, ro);
        ro.amplitude = 3.0;
        const auto b = field(g, 4, ro);
        for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(b[i] - 3.0 * a[i]) < 1e-12 * (1.0 + std::abs(b[i])));
    }
}

TEST_CASE("GNS exponent and parameter checks") {
    CHECK(gns_beta(1, {0.0, 1.0, 4.0, 2.0, 2.0}) == doctest::Approx(0.25));
    CHECK(gns_beta(2, {0.5, 1.0, 2.0, 2.0, 2.0}) == doctest::Approx(0.5));
    const FrequencyGrid g(1, 64);
    RandomFieldOptions ro;
    ro.hermitian = true;
    const auto f = field(g, 9, ro);
    const auto bad = [&](GnsParams q) {
        try {
            check_gns(g, f, q);
        } catch (const ConfigError& e) {
            return e.field();
        }
        return std::string();
    };
    CHECK(bad({0.0, 1.0, 1.0, 2.0, 2.0}) == "p");
    CHECK(bad({0.0, 1.0, 4.0, INFINITY, 2.0}) == "p0");
    CHECK(bad({1.0, 1.0, 4.0, 2.0, 2.0}) == "kappa");
    CHECK(bad({0.0, 1.0, 1.5, 2.0, 2.0}) == "beta");  // β < 0
    const auto r = check_gns(g, f, {0.0, 1.0, 4.0, 2.0, 2.0});
    CHECK(r.ratio > 0.0);
    CHECK(std::isfinite(r.ratio));
    CHECK(r.extra("beta") == doctest::Approx(0.25));
    CHECK_THROWS_AS(r.extra("nope"), ContractViolation);
}

TEST_CASE("embedding: balance point and l1 majorant") {
    const FrequencyGrid g(1, 64);
    RandomFieldOptions ro;
    ro.min_magnitude = 0.5;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto f = field(g, seed, ro);
        const auto r = check_embedding(g, f, 0.0, 1.0);
        CHECK(r.extra("balance_defect") < 1e-12);
        CHECK(r.lhs <= r.extra("l1_bound") * (1.0 + 1e-12));
        CHECK(r.ratio > 0.0);
    }
    CHECK_THROWS_AS(check_embedding(g, field(g, 1, ro), 0.6, 1.0), ConfigError);
    SpectralArray z(g.size());
    z[0] = 1.0;
    CHECK_THROWS_AS(check_embedding(g, z, -0.5, 1.0), DomainError);
}

TEST_CASE("Leibniz rule checks Hoelder pairs") {
    const FrequencyGrid g(1, 64);
    RandomFieldOptions ro;
    const auto f = field(g, 1, ro), h = field(g, 2, ro);
    const auto r = check_leibniz(g, f, h, {});
    CHECK(std::isfinite(r.ratio));
    CHECK(r.ratio > 0.0);
    LeibnizParams q;
    q.p2 = 2.0;
    CHECK_THROWS_AS(check_leibniz(g, f, h, q), ConfigError);
}

TEST_CASE("algebra property demands octant support and large s") {
    const FrequencyGrid g(1, 32);
    RandomFieldOptions oct;
    oct.octant_radius = 1.0;
    const std::vector<SpectralArray> a(5, field(g, 1, oct)), b(5, field(g, 2, oct));
    const auto r = check_algebra_prop_3_6(g, a, b, 0.1, -0.5, 0.5, 1.0);
    CHECK(std::isfinite(r.ratio));
    CHECK(r.ratio > 0.0);
    CHECK_THROWS_AS(check_algebra_prop_3_6(g, a, b, 0.1, -0.5, -0.6, 1.0), ConfigError);
    const std::vector<SpectralArray> off(5, field(g, 3));
    CHECK_THROWS_AS(check_algebra_prop_3_6(g, off, b, 0.1, -0.5, 0.5, 1.0), ContractViolation);
}

TEST_CASE("data estimates return one report per combination") {
    const FrequencyGrid g(1, 64);
    RandomFieldOptions ro;
    ro.hermitian = true;
    const auto u = field(g, 5, ro), v = field(g, 6, ro);
    const auto rs = check_data_estimates_prop_4_8(g, u, v, 0.5, 1.0, 1.0, 1.5);
    REQUIRE(rs.size() == 2);
    for (const auto& r : rs) CHECK(std::isfinite(r.ratio));
    CHECK_THROWS_AS(check_data_estimates_prop_4_8(g, u, v, 0.0, 0.25, 1.0, 1.0), ConfigError);
}

TEST_CASE("inequality names round trip") {
    std::set<std::string> seen;
    for (auto k : {InequalityKind::algebra, InequalityKind::gns, InequalityKind::embedding, InequalityKind::leibniz,
                   InequalityKind::data_estimates, InequalityKind::nonlinearity,
                   InequalityKind::e_norm_equivalence}) {
        CHECK(inequality_from_name(inequality_name(k)) == k);
        seen.insert(inequality_name(k));
    }
    CHECK(seen.size() == 7);
    CHECK_THROWS_AS(inequality_from_name("holder"), ConfigError);
}

TEST_CASE("small ensembles give finite, resolution-stable constants") {
    EnsembleOptions opt;
    opt.modes = 32;
    opt.trials = 4;
    for (auto k : {InequalityKind::gns, InequalityKind::embedding, InequalityKind::leibniz}) {
        const auto r = run_inequality_ensemble(k, opt);
        INFO(r.name);
        CHECK(r.finite);
        CHECK(r.trials == 4);
        CHECK(r.c_coarse > 0.0);
        CHECK(r.c_min <= r.c_coarse);
        CHECK(r.stable);
    }
    opt.trials = 0;
    CHECK_THROWS_AS(run_inequality_ensemble(InequalityKind::gns, opt), ConfigError);
}
