#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "idmc/chaos.hpp"
#include "idmc/intermittency.hpp"

using namespace idmc;

namespace {

/// Exact mean of the grid-trapezoid squared mass for any spec:
/// sum_{ij} w_i w_j exp(mu d(1) rho_eps(s_i - s_j)). This is the oracle for
/// what the sampler + trapezoid pipeline estimates at finite (eps, grid).
double analytic_grid_second_moment(const LevySpec& spec, const IntensityKernel& kernel,
                                   const ChaosParams& params,
                                   const std::vector<double>& grid) {
    const std::size_t n = grid.size();
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double h = grid[i + 1] - grid[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    const double d1 = pair_coefficient(spec, 1);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            total += w[i] * w[j] *
                     std::exp(params.mu * d1 * kernel.rho(grid[i] - grid[j], params.epsilon));
    return total;
}

}  // namespace

TEST_CASE("total mass of a flat field is the interval length") {
    FieldGrid f;
    f.grid = uniform_grid(21);
    f.values.assign(21, 0.0);
    CHECK(total_mass(f, 0.0, 1.0).mass == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(total_mass(f, 0.25, 0.8).mass == doctest::Approx(0.55).epsilon(1e-13));
    // cut points between grid nodes interpolate
    CHECK(total_mass(f, 0.33, 0.71).mass == doctest::Approx(0.38).epsilon(1e-13));
    CHECK_THROWS(total_mass(f, -0.1, 0.5));
    CHECK_THROWS(total_mass(f, 0.5, 0.4));

    const auto cum = cumulative_mass(f);
    CHECK(cum.back() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cum[10] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("mc_moment at mu = 0 is exactly one; class guards fire") {
    const auto kernel = IntensityKernel::canonical();
    const auto gauss = LevySpec::gaussian();
    McConfig config;
    config.n_samples = 10;
    config.grid_points = 257;
    const auto zero = mc_moment(gauss, kernel, {0.0, 1.0 / 64}, 2, config);
    CHECK(zero.estimate.mean == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(zero.estimate.stderr == doctest::Approx(0.0).scale(1.0));

    CHECK_THROWS_AS(mc_moment(gauss, kernel, {0.5, 0.01}, 4, config), std::domain_error);
    CHECK_THROWS_AS(mc_moment(gauss, kernel, {0.5, 0.01}, 5, config), std::domain_error);
}

TEST_CASE("mc_moment matches the exact finite-grid second moment") {
    const auto kernel = IntensityKernel::canonical();
    McConfig config;
    config.n_samples = 6000;
    config.grid_points = 513;
    config.seed = 7;
    const ChaosParams params{0.5, 1.0 / 128};

    for (const auto& spec : {LevySpec::gaussian(), LevySpec::poisson(0.5)}) {
        const auto grid = grid_for(params, config.grid_points);
        const double oracle = analytic_grid_second_moment(spec, kernel, params, grid);
        const auto mc = mc_moment(spec, kernel, params, 2, config);
        CHECK(std::abs(mc.estimate.mean - oracle) < 3.5 * mc.estimate.stderr);
        CHECK(mc.trimmed_mean <= mc.estimate.mean);
        CHECK(mc.trimmed_mean > 0.5 * mc.estimate.mean);
    }
}

TEST_CASE("first moment is one for every spec") {
    const auto kernel = IntensityKernel::canonical();
    McConfig config;
    config.n_samples = 4000;
    config.grid_points = 513;
    config.seed = 3;
    const ChaosParams params{0.4, 1.0 / 128};
    for (const auto& spec :
         {LevySpec::gaussian(), LevySpec::poisson(2.0), LevySpec::poisson(0.5)}) {
        const auto mc = mc_moment(spec, kernel, params, 1, config);
        CHECK(std::abs(mc.estimate.mean - 1.0) < 3.5 * mc.estimate.stderr);
    }
}

TEST_CASE("stationarity of interval masses") {
    const auto kernel = IntensityKernel::canonical();
    const auto spec = LevySpec::poisson(2.0);
    const ChaosParams params{0.25, 1.0 / 64};
    McConfig config;
    config.n_samples = 4000;
    config.grid_points = 513;
    const double tau = 0.125;
    FieldSampler sampler(spec, kernel, params, grid_for(params, config.grid_points));
    const auto rows = mc_table(sampler, config, [&](const FieldGrid& f, std::vector<double>& row) {
        for (double t0 : {0.0, 0.3, 0.6}) {
            const double m = total_mass(f, t0, t0 + tau).mass;
            row.push_back(m);
            row.push_back(m * m);
        }
    });
    for (std::size_t col : {0u, 2u, 4u}) {
        const auto a = column_stats(rows, col);
        const auto b = column_stats(rows, (col + 2) % 6);
        CHECK(std::abs(a.mean - b.mean) <
              3.5 * std::sqrt(a.stderr * a.stderr + b.stderr * b.stderr));
    }
}

TEST_CASE("v_functional degenerate cases and the exact exp-sum oracle") {
    const auto kernel = IntensityKernel::canonical();
    const auto spec = LevySpec::poisson(2.0);
    McConfig config;
    config.n_samples = 4000;
    config.grid_points = 257;
    config.seed = 11;

    // mu = 0: deterministic F(1)
    const auto at_zero = v_functional(spec, kernel, {0.0, 1.0 / 64},
                                      TestFunction::power(3), {0.2, 0.5}, config);
    CHECK(at_zero.mean == doctest::Approx(1.0).epsilon(1e-12));

    // F constant: the exact value is exp(mu sum_{i<j} d(j-i) rho(t_j - t_i)).
    // Small mu keeps the estimator's tail light enough for the stderr to be
    // trustworthy at this sample count.
    const ChaosParams params{0.05, 1.0 / 64};
    const std::vector<double> ts{0.3, 0.55};
    const auto mc = v_functional(spec, kernel, params, TestFunction::constant(1.0), ts, config);
    const double oracle = exp_sum_moment_analytic(spec, kernel, params, ts);
    CHECK(std::abs(mc.mean - oracle) < 3.5 * mc.stderr);

    // n = 0 reduces to E[F(M)]
    const auto plain =
        v_functional(spec, kernel, params, TestFunction::power(2), {}, config);
    const auto direct = mc_moment(spec, kernel, params, 2, config);
    CHECK(plain.mean == doctest::Approx(direct.estimate.mean).epsilon(1e-12));
}

TEST_CASE("log-mass covariance") {
    const auto kernel = IntensityKernel::canonical();
    const auto gauss = LevySpec::gaussian();
    McConfig config;
    config.seed = 23;

    // mu = 0: both logs are deterministic, covariance vanishes
    CovarianceProbe probe0{0.25, 0.02, {0.0, 1.0 / 128}, 200};
    CHECK(log_mass_covariance(gauss, kernel, probe0, config).mean ==
          doctest::Approx(0.0).scale(1.0));

    // Gaussian: approaches mu g(0,t) sigma^2 for small tau
    CovarianceProbe probe{0.25, 0.02, {0.3, 1.0 / 256}, 6000};
    const auto est = log_mass_covariance(gauss, kernel, probe, config);
    const double slope = covariance_slope(gauss, 0.3, 0.25, kernel);
    CHECK(slope == doctest::Approx(0.3 * std::log(4.0)).epsilon(1e-12));
    CHECK(std::abs(est.mean - slope) < 4.0 * est.stderr + 0.1 * probe.tau / 0.02);

    CHECK_THROWS(log_mass_covariance(gauss, kernel, {0.01, 0.02, {0.3, 0.1}, 100}, config));
}

TEST_CASE("scaling exponent regression") {
    const auto kernel = IntensityKernel::canonical();
    McConfig config;
    config.n_samples = 3000;
    config.grid_points = 1025;
    config.seed = 31;
    const ChaosParams params{0.2, 1.0 / 256};
    const std::vector<double> scales{1.0 / 32, 1.0 / 16, 1.0 / 8, 1.0 / 4};

    // n = 1: E mass(0,t) = t exactly, slope 1
    const auto fit1 = scaling_exponent(LevySpec::gaussian(), kernel, params, 1, scales, config);
    CHECK(fit1.slope == doctest::Approx(1.0).epsilon(0.01));

    // lognormal n = 2: slope zeta(2) = 2 - mu
    const auto fit2 = scaling_exponent(LevySpec::gaussian(), kernel, params, 2, scales, config);
    CHECK(std::abs(fit2.slope - 1.8) < 0.08);

    // Poisson c = 2, mu = 0.2: same zeta(2) = 2 - 0.2 phi(-2i) = 1.8
    const auto fitp = scaling_exponent(LevySpec::poisson(2.0), kernel, params, 2, scales, config);
    CHECK(std::abs(fitp.slope - 1.8) < 0.1);

    CHECK_THROWS(scaling_exponent(LevySpec::gaussian(), kernel, params, 2, {0.1, 0.2}, config));
}

TEST_CASE("stochastic self-similarity of interval masses") {
    // E[M(0,t)^n] = t^n E[e^{n X(-mu log t)}] E[M^n] = t^{zeta(n)} E[M^n]
    const auto kernel = IntensityKernel::canonical();
    const auto spec = LevySpec::gaussian();
    const ChaosParams params{0.2, 1.0 / 256};
    McConfig config;
    config.n_samples = 6000;
    config.grid_points = 1025;
    config.seed = 37;
    const double t = 0.25;
    FieldSampler sampler(spec, kernel, params, grid_for(params, config.grid_points, {t}));
    const auto rows = mc_table(sampler, config, [&](const FieldGrid& f, std::vector<double>& row) {
        const double m_t = total_mass(f, 0.0, t).mass;
        const double m_1 = total_mass(f, 0.0, 1.0).mass;
        row.push_back(m_t * m_t);
        row.push_back(m_1 * m_1);
    });
    const auto small = column_stats(rows, 0);
    const auto full = column_stats(rows, 1);
    const double zeta2 = multiscaling_spectrum(spec, params.mu, 2.0);
    const double ratio = small.mean / full.mean;
    const double expected = std::pow(t, zeta2);
    const double se_ratio =
        ratio * std::sqrt(std::pow(small.stderr / small.mean, 2) +
                          std::pow(full.stderr / full.mean, 2));
    CHECK(std::abs(ratio - expected) < 4.0 * se_ratio + 0.02 * expected);
}

TEST_CASE("multiplier characteristic function") {
    const auto gauss = LevySpec::gaussian();
    CHECK(std::abs(multiplier_cf(gauss, 0.5, 0.3, 0.0) - 1.0) < 1e-15);
    // log W_gamma is normal with mean (1 + mu/2) log gamma, variance -mu log gamma
    const double mu = 0.4, gamma = 0.2;
    const double m = (1.0 + 0.5 * mu) * std::log(gamma);
    const double v = -mu * std::log(gamma);
    for (double q : {-1.5, -0.5, 0.7, 2.0}) {
        const auto lhs = multiplier_cf(gauss, mu, gamma, q);
        const auto rhs = std::exp(std::complex<double>(-0.5 * q * q * v, q * m));
        CHECK(std::abs(lhs - rhs) < 1e-13);
    }
    CHECK_THROWS(multiplier_cf(gauss, 0.5, 1.5, 1.0));
}

TEST_CASE("gaussian change of measure: both sides agree") {
    const auto kernel = IntensityKernel::canonical();
    const auto spec = LevySpec::gaussian();
    const ChaosParams params{0.3, 1.0 / 128};
    McConfig config;
    config.n_samples = 5000;
    config.grid_points = 513;
    config.seed = 41;
    const std::vector<double> ts{0.4};
    const auto sides =
        girsanov_gaussian_check(spec, kernel, params, TestFunction::identity(), ts, config);
    const double combined =
        std::sqrt(sides.first.stderr * sides.first.stderr +
                  sides.second.stderr * sides.second.stderr);
    CHECK(std::abs(sides.first.mean - sides.second.mean) < 3.5 * combined);

    // the left side also has an exact finite-eps value:
    // E[M e^{omega(t)}] = int exp(mu d(1) rho_eps(s - t)) ds
    const auto grid = grid_for(params, config.grid_points, ts);
    double exact = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        auto f = [&](double s) {
            return std::exp(params.mu * pair_coefficient(spec, 1) *
                            kernel.rho(s - ts[0], params.epsilon));
        };
        exact += 0.5 * (f(grid[i]) + f(grid[i + 1])) * (grid[i + 1] - grid[i]);
    }
    CHECK(std::abs(sides.first.mean - exact) < 3.5 * sides.first.stderr);

    CHECK_THROWS(girsanov_gaussian_check(LevySpec::poisson(2.0), kernel, params,
                                         TestFunction::identity(), ts, config));
}

TEST_CASE("monte carlo determinism across worker counts") {
    const auto kernel = IntensityKernel::canonical();
    const auto spec = LevySpec(0.5, {{std::log(2.0), 0.5}}, "mix");
    const ChaosParams params{0.3, 1.0 / 32};
    McConfig one;
    one.n_samples = 600;
    one.grid_points = 129;
    one.seed = 99;
    one.workers = 1;
    McConfig two = one;
    two.workers = 2;
    const auto a = mc_moment(spec, kernel, params, 2, one);
    const auto b = mc_moment(spec, kernel, params, 2, two);
    CHECK(a.estimate.mean == b.estimate.mean);
    CHECK(a.estimate.stderr == b.estimate.stderr);
}
