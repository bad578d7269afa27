#include "idmc/chaos.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace idmc {

namespace {

double elapsed_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

MCEstimate estimate_from_column(const std::vector<std::vector<double>>& rows,
                                std::size_t column, const McConfig& config,
                                double elapsed) {
    const ColumnStats s = column_stats(rows, column);
    return {s.mean, s.stderr, rows.size(), config.seed, elapsed};
}

}  // namespace

std::vector<double> grid_for(const ChaosParams& params, std::size_t base_points,
                             const std::vector<double>& must_include) {
    std::vector<double> g = uniform_grid(std::max<std::size_t>(base_points, 2));
    for (double s : must_include) {
        if (s < 0.0 || s > 1.0)
            throw std::invalid_argument("grid_for: point outside [0,1]");
        g.push_back(s);
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end(),
                        [](double a, double b) { return std::abs(a - b) < 1e-12; }),
            g.end());
    double max_spacing = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i)
        max_spacing = std::max(max_spacing, g[i] - g[i - 1]);
    if (max_spacing > 0.25 * params.epsilon) {
        std::cerr << "[idmc] warning: grid spacing " << max_spacing
                  << " is coarser than eps/4 = " << 0.25 * params.epsilon
                  << "; interval masses will be biased\n";
    }
    return g;
}

MassSample total_mass(const FieldGrid& field, double a, double b) {
    if (!(a < b)) throw std::invalid_argument("total_mass: need a < b");
    if (a < field.grid.front() - 1e-12 || b > field.grid.back() + 1e-12)
        throw std::invalid_argument("total_mass: interval not covered by grid");
    // cut-point values by linear interpolation of omega
    std::vector<double> s{a};
    std::vector<double> w{field.omega_at(a)};
    const auto lo = std::upper_bound(field.grid.begin(), field.grid.end(), a);
    const auto hi = std::lower_bound(field.grid.begin(), field.grid.end(), b);
    for (auto it = lo; it != hi; ++it) {
        s.push_back(*it);
        w.push_back(field.values[it - field.grid.begin()]);
    }
    s.push_back(b);
    w.push_back(field.omega_at(b));

    double mass = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i)
        mass += 0.5 * (std::exp(w[i - 1]) + std::exp(w[i])) * (s[i] - s[i - 1]);
    return {a, b, mass, field.seed, field.stream};
}

std::vector<double> cumulative_mass(const FieldGrid& field) {
    std::vector<double> c(field.grid.size(), 0.0);
    for (std::size_t i = 1; i < c.size(); ++i) {
        c[i] = c[i - 1] + 0.5 * (std::exp(field.values[i - 1]) + std::exp(field.values[i])) *
                              (field.grid[i] - field.grid[i - 1]);
    }
    return c;
}

MomentEstimate mc_moment(const LevySpec& spec, const IntensityKernel& kernel,
                         const ChaosParams& params, int n, const McConfig& config) {
    if (n < 1) throw std::invalid_argument("mc_moment: n must be >= 1");
    if (n > 1 && classify_moment(spec, params.mu, n) != MomentClass::Finite)
        throw std::domain_error("mc_moment: moment of order n is not finite");
    const auto t0 = std::chrono::steady_clock::now();
    FieldSampler sampler(spec, kernel, params, grid_for(params, config.grid_points));
    const auto rows = mc_table(sampler, config, [n](const FieldGrid& f, std::vector<double>& row) {
        row.push_back(std::pow(total_mass(f, 0.0, 1.0).mass, n));
    });
    MomentEstimate out;
    out.estimate = estimate_from_column(rows, 0, config, elapsed_since(t0));

    std::vector<double> values(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) values[i] = rows[i][0];
    std::sort(values.begin(), values.end());
    const std::size_t drop = std::max<std::size_t>(1, values.size() / 1000);
    CompensatedSum sum;
    for (std::size_t i = 0; i + drop < values.size(); ++i) sum.add(values[i]);
    out.trimmed_mean = sum.value() / double(values.size() - drop);
    return out;
}

MCEstimate v_functional(const LevySpec& spec, const IntensityKernel& kernel,
                        const ChaosParams& params, const TestFunction& F,
                        const std::vector<double>& ts, const McConfig& config) {
    if (!std::is_sorted(ts.begin(), ts.end()))
        throw std::invalid_argument("v_functional: ts must be sorted");
    const auto t0 = std::chrono::steady_clock::now();
    const auto grid = grid_for(params, config.grid_points, ts);
    std::vector<std::size_t> idx(ts.size());
    for (std::size_t j = 0; j < ts.size(); ++j)
        idx[j] = std::lower_bound(grid.begin(), grid.end(), ts[j] - 1e-12) - grid.begin();
    FieldSampler sampler(spec, kernel, params, grid);
    const auto rows =
        mc_table(sampler, config, [&](const FieldGrid& f, std::vector<double>& row) {
            double w = 0.0;
            for (std::size_t j : idx) w += f.values[j];
            row.push_back(F(total_mass(f, 0.0, 1.0).mass) * std::exp(w));
        });
    return estimate_from_column(rows, 0, config, elapsed_since(t0));
}

double exp_sum_moment_analytic(const LevySpec& spec, const IntensityKernel& kernel,
                               const ChaosParams& params, const std::vector<double>& ts) {
    double expo = 0.0;
    const int n = static_cast<int>(ts.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            expo += pair_coefficient(spec, j - i) * kernel.rho(ts[j] - ts[i], params.epsilon);
    return std::exp(params.mu * expo);
}

MCEstimate log_mass_covariance(const LevySpec& spec, const IntensityKernel& kernel,
                               const CovarianceProbe& probe, const McConfig& base_config) {
    if (!(probe.tau > 0.0 && probe.tau < probe.t && probe.t + probe.tau <= 1.0))
        throw std::invalid_argument("log_mass_covariance: need 0 < tau < t, t + tau <= 1");
    McConfig config = base_config;
    config.n_samples = probe.n_samples ? probe.n_samples : base_config.n_samples;
    const auto t0 = std::chrono::steady_clock::now();

    // Fine grids over just the two intervals; the jump sampler only needs
    // the cones meeting their hull and the Gaussian factorization stays tiny.
    const double spacing = 0.25 * probe.params.epsilon;
    const std::size_t m = std::max<std::size_t>(2, std::llround(probe.tau / spacing) + 1);
    std::vector<double> grid;
    for (std::size_t i = 0; i < m; ++i) grid.push_back(probe.tau * double(i) / double(m - 1));
    for (std::size_t i = 0; i < m; ++i)
        grid.push_back(probe.t + probe.tau * double(i) / double(m - 1));
    FieldSampler sampler(spec, kernel, probe.params, grid);

    const double t_hi = probe.t, tau = probe.tau;
    const auto rows =
        mc_table(sampler, config, [&, t_hi, tau](const FieldGrid& f, std::vector<double>& row) {
            const double m1 = total_mass(f, t_hi, t_hi + tau).mass;
            const double m2 = total_mass(f, 0.0, tau).mass;
            if (!(m1 > 0.0) || !(m2 > 0.0))
                throw std::runtime_error("log_mass_covariance: nonpositive interval mass");
            row.push_back(std::log(m1));
            row.push_back(std::log(m2));
        });

    const ColumnStats x = column_stats(rows, 0);
    const ColumnStats y = column_stats(rows, 1);
    CompensatedSum prod;
    for (const auto& r : rows) prod.add((r[0] - x.mean) * (r[1] - y.mean));
    const std::size_t n = rows.size();
    const double cov = prod.value() / double(n - 1);
    CompensatedSum sq;
    for (const auto& r : rows) {
        const double d = (r[0] - x.mean) * (r[1] - y.mean) - cov;
        sq.add(d * d);
    }
    const double se = std::sqrt(sq.value() / double(n - 1) / double(n));
    return {cov, se, n, config.seed, elapsed_since(t0)};
}

ScalingFit scaling_exponent(const LevySpec& spec, const IntensityKernel& kernel,
                            const ChaosParams& params, int n,
                            const std::vector<double>& scales, const McConfig& config) {
    if (scales.size() < 3)
        throw std::invalid_argument("scaling_exponent: need at least 3 scales");
    for (double t : scales)
        if (!(t > 0.0 && t < 1.0))
            throw std::invalid_argument("scaling_exponent: scales must lie in (0,1)");
    if (n > 1 && classify_moment(spec, params.mu, n) != MomentClass::Finite)
        throw std::domain_error("scaling_exponent: moment not finite");

    const auto grid = grid_for(params, config.grid_points, scales);
    std::vector<std::size_t> idx(scales.size());
    for (std::size_t j = 0; j < scales.size(); ++j)
        idx[j] = std::lower_bound(grid.begin(), grid.end(), scales[j] - 1e-12) - grid.begin();
    FieldSampler sampler(spec, kernel, params, grid);
    const auto rows =
        mc_table(sampler, config, [&](const FieldGrid& f, std::vector<double>& row) {
            const auto cum = cumulative_mass(f);
            for (std::size_t j : idx) row.push_back(std::pow(cum[j], n));
        });

    ScalingFit fit;
    std::vector<double> se_log;
    for (std::size_t j = 0; j < scales.size(); ++j) {
        const ColumnStats s = column_stats(rows, j);
        fit.log_scale.push_back(std::log(scales[j]));
        fit.log_moment.push_back(std::log(s.mean));
        se_log.push_back(s.stderr / s.mean);
    }
    const std::size_t k = scales.size();
    double xbar = 0.0, ybar = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        xbar += fit.log_scale[j];
        ybar += fit.log_moment[j];
    }
    xbar /= double(k);
    ybar /= double(k);
    double sxx = 0.0, sxy = 0.0, var_slope = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        const double dx = fit.log_scale[j] - xbar;
        sxx += dx * dx;
        sxy += dx * (fit.log_moment[j] - ybar);
    }
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    for (std::size_t j = 0; j < k; ++j) {
        const double w = (fit.log_scale[j] - xbar) / sxx;
        var_slope += w * w * se_log[j] * se_log[j];
    }
    fit.stderr = std::sqrt(var_slope);
    return fit;
}

std::complex<double> multiplier_cf(const LevySpec& spec, double mu, double gamma,
                                   double q) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("multiplier_cf: gamma must be in (0,1)");
    const std::complex<double> i(0.0, 1.0);
    return std::exp((i * q - mu * levy_exponent(spec, q)) * std::log(gamma));
}

std::pair<MCEstimate, MCEstimate> girsanov_gaussian_check(
    const LevySpec& spec, const IntensityKernel& kernel, const ChaosParams& params,
    const TestFunction& F, const std::vector<double>& ts, const McConfig& config) {
    if (spec.has_jump_part())
        throw std::invalid_argument("girsanov_gaussian_check: Gaussian specs only");
    const auto t0 = std::chrono::steady_clock::now();
    const auto grid = grid_for(params, config.grid_points, ts);
    std::vector<std::size_t> idx(ts.size());
    for (std::size_t j = 0; j < ts.size(); ++j)
        idx[j] = std::lower_bound(grid.begin(), grid.end(), ts[j] - 1e-12) - grid.begin();
    FieldSampler sampler(spec, kernel, params, grid);

    const auto lhs_rows =
        mc_table(sampler, config, [&](const FieldGrid& f, std::vector<double>& row) {
            double w = 0.0;
            for (std::size_t j : idx) w += f.values[j];
            row.push_back(F(total_mass(f, 0.0, 1.0).mass) * std::exp(w));
        });
    const MCEstimate lhs = estimate_from_column(lhs_rows, 0, config, elapsed_since(t0));

    // independent stream family for the right-hand side
    McConfig rhs_config = config;
    rhs_config.seed = config.seed ^ 0xd1342543de82ef95ULL;

    std::vector<double> tilt(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (double t : ts) tilt[i] += params.mu * kernel.rho(grid[i] - t, params.epsilon);
    double prefactor_expo = 0.0;
    for (std::size_t a = 0; a < ts.size(); ++a)
        for (std::size_t b = a + 1; b < ts.size(); ++b)
            prefactor_expo += kernel.rho(ts[b] - ts[a], params.epsilon);
    const double prefactor = std::exp(params.mu * prefactor_expo);

    const auto t1 = std::chrono::steady_clock::now();
    const auto rhs_rows =
        mc_table(sampler, rhs_config, [&](const FieldGrid& f, std::vector<double>& row) {
            double mass = 0.0;
            for (std::size_t i = 1; i < grid.size(); ++i) {
                const double e0 = std::exp(f.values[i - 1] + tilt[i - 1]);
                const double e1 = std::exp(f.values[i] + tilt[i]);
                mass += 0.5 * (e0 + e1) * (grid[i] - grid[i - 1]);
            }
            row.push_back(prefactor * F(mass));
        });
    const MCEstimate rhs = estimate_from_column(rhs_rows, 0, rhs_config, elapsed_since(t1));
    return {lhs, rhs};
}

}  // namespace idmc
