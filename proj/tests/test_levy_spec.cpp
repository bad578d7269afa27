#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "idmc/levy_spec.hpp"

using namespace idmc;

namespace {

std::vector<LevySpec> spec_battery() {
    return {
        LevySpec::gaussian(),
        LevySpec::poisson(2.0),
        LevySpec::poisson(0.5),
        LevySpec(0.49, {{std::log(2.0), 1.0}, {std::log(0.5), 0.7}}, "mixed"),
        LevySpec(0.0, {{0.3, 2.0}, {-1.1, 0.25}, {2.0, 0.05}}, "three-atoms"),
    };
}

}  // namespace

TEST_CASE("construction rejects invalid data") {
    CHECK_THROWS(LevySpec(-1.0, {}, "x"));
    CHECK_THROWS(LevySpec(1.0, {{0.0, 1.0}}, "x"));
    CHECK_THROWS(LevySpec(1.0, {{1.0, 0.0}}, "x"));
    CHECK_THROWS(LevySpec(1.0, {{51.0, 1.0}}, "x"));
    CHECK_THROWS(LevySpec::poisson(1.0));
}

TEST_CASE("levy exponent normalization phi(-i) = 0") {
    const std::complex<double> minus_i(0.0, -1.0);
    for (const auto& spec : spec_battery())
        CHECK(std::abs(levy_exponent(spec, minus_i)) < 1e-12);
}

TEST_CASE("levy exponent closed values") {
    // Gaussian sigma = 1 at q = 1: -i/2 - 1/2
    const auto g = levy_exponent(LevySpec::gaussian(), 1.0);
    CHECK(g.real() == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(g.imag() == doctest::Approx(-0.5).epsilon(1e-15));
    // single atom at log 2, q = -2i: c^2 - 1 - 2(c-1) = 1
    const auto p = levy_exponent(LevySpec::poisson(2.0), std::complex<double>(0.0, -2.0));
    CHECK(p.real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(p.imag()) < 1e-14);
    // real path agrees with the complex path at -iq
    for (const auto& spec : spec_battery())
        for (double q : {-1.5, 0.3, 1.0, 2.0, 3.7}) {
            const auto via_complex = levy_exponent(spec, std::complex<double>(0.0, -q));
            CHECK(levy_exponent_real(spec, q) ==
                  doctest::Approx(via_complex.real()).epsilon(1e-12));
            CHECK(std::abs(via_complex.imag()) < 1e-12);
        }
}

TEST_CASE("multiscaling spectrum") {
    const auto gauss = LevySpec::gaussian();
    for (double q : {0.5, 1.0, 2.0, 3.0})
        CHECK(multiscaling_spectrum(gauss, 0.4, q) ==
              doctest::Approx(q - 0.4 * q * (q - 1.0) / 2.0).epsilon(1e-14));
    for (const auto& spec : spec_battery())
        for (double mu : {0.05, 0.3, 1.0})
            CHECK(multiscaling_spectrum(spec, mu, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    // atom (log 2, 1): phi(-2i) = 1, so zeta(2) = 2 - mu
    CHECK(multiscaling_spectrum(LevySpec::poisson(2.0), 0.2, 2.0) ==
          doctest::Approx(1.8).epsilon(1e-14));
}

TEST_CASE("non-degeneracy condition") {
    const auto gauss = LevySpec::gaussian();
    CHECK(is_nondegenerate(gauss, 1.9));
    CHECK_FALSE(is_nondegenerate(gauss, 2.1));
    // Poisson c = 2: boundary at 1/(2 log 2 - 1)
    const auto pois = LevySpec::poisson(2.0);
    const double bound = 1.0 / (2.0 * std::log(2.0) - 1.0);
    CHECK(bound == doctest::Approx(2.5887).epsilon(1e-4));
    CHECK(is_nondegenerate(pois, bound * (1.0 - 1e-9)));
    CHECK_FALSE(is_nondegenerate(pois, bound * (1.0 + 1e-9)));
    for (const auto& spec : spec_battery()) CHECK(is_nondegenerate(spec, 1e-12));
}

TEST_CASE("moment classification") {
    const auto gauss = LevySpec::gaussian();
    CHECK(classify_moment(gauss, 0.5, 3.0) == MomentClass::Finite);   // zeta = 1.5
    CHECK(classify_moment(gauss, 0.5, 5.0) == MomentClass::Infinite); // zeta = 0
    CHECK(classify_moment(gauss, 0.5, 4.0) == MomentClass::Boundary); // zeta = 1
    CHECK(classify_moment(gauss, 1e-9, 2.0) == MomentClass::Finite);
}

TEST_CASE("pair coefficient d(m)") {
    const auto gauss = LevySpec::gaussian();
    for (int m = 1; m <= 9; ++m) CHECK(pair_coefficient(gauss, m) == 1.0);
    // atom (log c, 1): d(m) = c^{m-1} (c-1)^2
    for (double c : {2.0, 0.5, 3.0}) {
        const auto spec = LevySpec::poisson(c);
        for (int m = 1; m <= 6; ++m)
            CHECK(pair_coefficient(spec, m) ==
                  doctest::Approx(std::pow(c, m - 1) * (c - 1) * (c - 1)).epsilon(1e-13));
    }
    CHECK(pair_coefficient(LevySpec::poisson(2.0), 3) == doctest::Approx(4.0));
    // overflow guard: exponent (m-1) u + 2 log(e^u - 1) past double range
    const LevySpec wide(0.0, {{50.0, 1.0}}, "wide");
    CHECK_THROWS_AS(pair_coefficient(wide, 16), std::overflow_error);
}

TEST_CASE("spectral moments") {
    CHECK(spectral_moment(LevySpec::gaussian(), 5, SpectralMomentKind::Expm1Power) == 0.0);
    const LevySpec three(0.0, {{std::log(2.0), 3.0}}, "atom3");
    CHECK(spectral_moment(three, 2, SpectralMomentKind::Expm1Power) ==
          doctest::Approx(3.0).epsilon(1e-14));
    const auto pois = LevySpec::poisson(2.0);
    CHECK(spectral_moment(pois, 2, SpectralMomentKind::USquare) ==
          doctest::Approx(std::log(2.0) * std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("d-sum identity: sum_{k<p<=n} d(p-k) = phi(-in)") {
    for (const auto& spec : spec_battery()) {
        for (int n = 1; n <= 8; ++n) {
            double sum = 0.0;
            for (int k = 1; k <= n; ++k)
                for (int p = k + 1; p <= n; ++p) sum += pair_coefficient(spec, p - k);
            CHECK(sum == doctest::Approx(levy_exponent_real(spec, n))
                             .epsilon(1e-12)
                             .scale(std::max(1.0, std::abs(sum))));
        }
    }
}

TEST_CASE("levy increment sampling") {
    RngStream rng(7, 0);
    const auto gauss = LevySpec::gaussian();
    CHECK(sample_levy_increment(gauss, 0.0, rng) == 0.0);
    CHECK_THROWS(sample_levy_increment(gauss, -0.1, rng));

    // empirical mean/variance of the Gaussian part
    const double delta = 0.7;
    const std::size_t n = 200000;
    double sum = 0.0, sumsq = 0.0, sum_exp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = sample_levy_increment(gauss, delta, rng);
        sum += x;
        sumsq += x * x;
        sum_exp += std::exp(x);
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(mean == doctest::Approx(-delta / 2).epsilon(0.02));
    CHECK(var == doctest::Approx(delta).epsilon(0.02));
    // E e^{X} = 1 by the normalization
    CHECK(sum_exp / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("levy increment empirical characteristic function") {
    const double delta = 0.35;
    const std::size_t n = 100000;
    const double tol = 4.0 / std::sqrt(double(n));
    for (const auto& spec : {LevySpec::gaussian(), LevySpec::poisson(2.0),
                             LevySpec(0.25, {{std::log(0.5), 0.8}}, "mix")}) {
        RngStream rng(11, 3);
        std::vector<double> draws(n);
        for (auto& x : draws) x = sample_levy_increment(spec, delta, rng);
        for (double q : {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}) {
            std::complex<double> acc = 0.0;
            for (double x : draws) acc += std::exp(std::complex<double>(0.0, q * x));
            acc /= double(n);
            const auto expected = std::exp(delta * levy_exponent(spec, q));
            CHECK(std::abs(acc - expected) < tol);
        }
    }
}

TEST_CASE("backward generator") {
    for (const auto& spec : spec_battery()) {
        // v(z) = z is harmonic for the generator
        const double at_z = apply_generator(
            spec, [](double z) { return z; }, [](double) { return 1.0; },
            [](double) { return 0.0; }, 1.7);
        CHECK(std::abs(at_z) < 1e-12);
        // v(z) = z^n at z = 1 gives phi(-in); cross-checks two code paths
        for (int n : {2, 3, 4}) {
            const double gen = apply_generator(
                spec, [n](double z) { return std::pow(z, n); },
                [n](double z) { return n * std::pow(z, n - 1); },
                [n](double z) { return n * (n - 1) * std::pow(z, n - 2); }, 1.0);
            CHECK(gen == doctest::Approx(levy_exponent_real(spec, n))
                             .epsilon(1e-10)
                             .scale(std::max(1.0, std::abs(gen))));
        }
    }
    // v(z) = z^2 at z = 1 equals d(1)
    for (const auto& spec : spec_battery()) {
        const double gen = apply_generator(
            spec, [](double z) { return z * z; }, [](double z) { return 2.0 * z; },
            [](double) { return 2.0; }, 1.0);
        CHECK(gen == doctest::Approx(pair_coefficient(spec, 1)).epsilon(1e-13));
    }
}

TEST_CASE("generator matches the delta-slope of E v(z e^{X(delta)})") {
    // Richardson in delta on Monte Carlo estimates with independent draws.
    const auto spec = LevySpec(0.5, {{std::log(2.0), 0.6}}, "gen-mix");
    const double z = 1.0;
    auto v = [](double x) { return x * x; };
    const double gen = apply_generator(
        spec, v, [](double x) { return 2.0 * x; }, [](double) { return 2.0; }, z);

    auto slope_at = [&](double delta, std::uint64_t seed, double& se) {
        RngStream rng(seed, 0);
        const std::size_t n = 400000;
        double sum = 0.0, sumsq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double y = (v(z * std::exp(sample_levy_increment(spec, delta, rng))) - v(z)) / delta;
            sum += y;
            sumsq += y * y;
        }
        const double mean = sum / n;
        se = std::sqrt((sumsq / n - mean * mean) / n);
        return mean;
    };
    double se1 = 0.0, se2 = 0.0;
    const double s1 = slope_at(0.02, 21, se1);
    const double s2 = slope_at(0.01, 22, se2);
    const double extrapolated = 2.0 * s2 - s1;
    const double se = std::sqrt(4.0 * se2 * se2 + se1 * se1);
    CHECK(std::abs(extrapolated - gen) < 3.5 * se + 1e-3);
}

TEST_CASE("test function factories") {
    const auto x2 = TestFunction::power(2);
    CHECK(x2(3.0) == doctest::Approx(9.0));
    CHECK(x2.derivative_at_one(0) == x2(1.0));
    CHECK(x2.derivative_at_one(2) == doctest::Approx(2.0));
    CHECK(x2.derivative_at_one(3) == 0.0);
    const auto lg = TestFunction::logarithm();
    CHECK(lg.derivative_at(1, 2.0) == doctest::Approx(0.5));
    CHECK(lg.derivative_at(2, 2.0) == doctest::Approx(-0.25));
    CHECK(lg.derivative_at(3, 1.0) == doctest::Approx(2.0));
    const auto poly = TestFunction::polynomial({1.0, -2.0, 0.5});
    CHECK(poly(2.0) == doctest::Approx(1.0 - 4.0 + 2.0));
    CHECK(poly.derivative_at(1, 2.0) == doctest::Approx(-2.0 + 2.0 * 0.5 * 2.0));
    CHECK(poly.derivative_at_one(0) == poly(1.0));
}
