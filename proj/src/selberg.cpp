#include "idmc/selberg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "idmc/quadrature.hpp"
#include "idmc/rng.hpp"

namespace idmc {

namespace {

double factorial(int n) {
    double out = 1.0;
    for (int j = 2; j <= n; ++j) out *= j;
    return out;
}

double log_factorial(int n) { return std::lgamma(n + 1.0); }

/// Integrand over the gap simplex {x_1..x_d >= 0, sum <= 1}, d = n-1:
/// prod over pairs r(x_k+...+x_{p-1})^{-mu d(p-k)}, optionally times the
/// pair-coefficient log sum. log r~ comes from the kernel as -g.
struct GapIntegrand {
    const IntensityKernel* kernel;
    int n;
    std::vector<double> exponent;  // index m = p-k: -mu d(m)
    std::vector<double> dcoef;     // d(m) for the log factor
    bool with_log_factor = false;

    double operator()(const std::vector<double>& gaps, double slack) const {
        double log_phi = 0.0;
        double log_sum = 0.0;
        const int d = n - 1;
        for (int k = 0; k < d; ++k) {
            double span = 0.0;
            for (int p = k; p < d; ++p) {
                span += gaps[p];
                const int m = p - k + 1;  // pair order
                const double gval = kernel->g(0.0, span);
                log_phi += exponent[m] * (-gval);
                if (with_log_factor) log_sum += dcoef[m] * gval;
            }
        }
        const double phi = std::exp(log_phi);
        return slack * (with_log_factor ? phi * log_sum : phi);
    }
};

struct GapQuadResult {
    double value = 0.0;
    double error = 0.0;
    long evaluations = 0;
};

/// Nested adaptive integration of the graded gap integrand (used for
/// d <= 2, i.e. n <= 3). x_j = y_j^q per gap.
GapQuadResult integrate_gaps_adaptive(const GapIntegrand& f, int d, double q,
                                      double tol) {
    GapQuadResult out;
    std::vector<double> gaps(d, 0.0);
    long evals = 0;
    std::function<double(int, double, double)> level = [&](int j, double remaining,
                                                           double level_tol) -> double {
        if (j == d) {
            ++evals;
            return f(gaps, remaining);
        }
        const double y_max = std::pow(remaining, 1.0 / q);
        auto integrand = [&](double y) {
            const double x = std::pow(y, q);
            gaps[j] = x;
            const double inner = level(j + 1, remaining - x, level_tol * 0.01);
            return q * std::pow(y, q - 1.0) * inner;
        };
        const AdaptiveResult r = integrate_adaptive(integrand, 0.0, y_max, level_tol);
        if (j == 0) out.error = r.error;
        return r.value;
    };
    out.value = level(0, 1.0, tol);
    out.evaluations = evals;
    return out;
}

/// Fixed tensor pass with grading toward each x_j = 0 face: panels
/// {0,1/8,1/4,1/2,1} scaled to the remaining budget, Gauss-Legendre of the
/// given order on each.
double tensor_pass(const GapIntegrand& f, int d, double q, int order, long& evals) {
    static const double edges[] = {0.0, 0.125, 0.25, 0.5, 1.0};
    const GaussRule& rule = gauss_legendre(order);
    std::vector<double> gaps(d, 0.0);
    std::function<double(int, double)> level = [&](int j, double remaining) -> double {
        if (j == d) {
            ++evals;
            return f(gaps, remaining);
        }
        const double y_max = std::pow(remaining, 1.0 / q);
        double sum = 0.0;
        for (int panel = 0; panel < 4; ++panel) {
            const double lo = edges[panel] * y_max, hi = edges[panel + 1] * y_max;
            const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
            for (int i = 0; i < order; ++i) {
                const double y = mid + half * rule.nodes[i];
                const double x = std::pow(y, q);
                gaps[j] = x;
                sum += half * rule.weights[i] * q * std::pow(y, q - 1.0) *
                       level(j + 1, remaining - x);
            }
        }
        return sum;
    };
    return level(0, 1.0);
}

GapQuadResult integrate_gaps_tensor(const GapIntegrand& f, int d, double q) {
    static const int fine_order[] = {0, 16, 16, 10, 6, 4};
    const int order = fine_order[std::min(d, 5)];
    GapQuadResult out;
    out.value = tensor_pass(f, d, q, order, out.evaluations);
    long coarse_evals = 0;
    const double coarse = tensor_pass(f, d, q, std::max(2, order / 2), coarse_evals);
    out.evaluations += coarse_evals;
    out.error = std::abs(out.value - coarse);
    return out;
}

/// Monte Carlo over the ordered simplex through Dirichlet(1,..,1) spacings
/// (normalized exponentials): the sample mean of the integrand then
/// estimates n! times the simplex integral, which is the moment itself.
/// Antithetic pairs share uniforms u and 1-u of the exponential quantile,
/// giving anticorrelated gap vectors; the first uniform is stratified.
GapQuadResult integrate_gaps_mc(const GapIntegrand& f, int d, std::size_t n_samples,
                                std::uint64_t seed) {
    const std::size_t n_strata = 32;
    const std::size_t pairs = std::max<std::size_t>(2, n_samples / 2);
    RngStream rng(seed, 0);
    const int n_spacings = d + 2;  // t_1, the d interior gaps, and 1 - t_n
    std::vector<double> u(n_spacings), e(n_spacings), gaps(d);
    std::vector<double> values;
    values.reserve(pairs);
    CompensatedSum mean_acc;
    for (std::size_t s = 0; s < pairs; ++s) {
        for (int j = 0; j < n_spacings; ++j) u[j] = rng.uniform();
        u[0] = (double(s % n_strata) + u[0]) / double(n_strata);
        double pair_value = 0.0;
        for (int rep = 0; rep < 2; ++rep) {
            double total = 0.0;
            for (int j = 0; j < n_spacings; ++j) {
                e[j] = -std::log(rep == 0 ? u[j] : 1.0 - u[j]);
                total += e[j];
            }
            for (int j = 0; j < d; ++j) gaps[j] = e[j + 1] / total;
            pair_value += 0.5 * f(gaps, 1.0);
        }
        values.push_back(pair_value);
        mean_acc.add(pair_value);
    }
    GapQuadResult out;
    const double mean = mean_acc.value() / double(pairs);
    CompensatedSum var_acc;
    for (double v : values) var_acc.add((v - mean) * (v - mean));
    out.value = mean;
    out.error = std::sqrt(var_acc.value() / double(pairs - 1) / double(pairs));
    out.evaluations = static_cast<long>(pairs) * 2;
    return out;
}

double grading_exponent(double worst_power) {
    // x = y^q with q = 3/(1 - a) keeps the transverse behavior ~ y^2 at the
    // graded faces for a power singularity x^{-a}.
    const double a = std::max(0.0, worst_power);
    if (a >= 1.0)
        throw std::domain_error("moment integrand has a non-integrable pair exponent");
    return std::max(2.0, 3.0 / (1.0 - a));
}

}  // namespace

const char* method_name(QuadMethod m) {
    switch (m) {
        case QuadMethod::Auto: return "auto";
        case QuadMethod::TensorGauss: return "tensor-gauss";
        case QuadMethod::AdaptiveSubdivision: return "adaptive";
        case QuadMethod::StratifiedMC: return "stratified-mc";
    }
    return "?";
}

MomentReport moment_integral(const LevySpec& spec, const IntensityKernel& kernel, int n,
                             double mu, QuadMethod method, std::size_t mc_samples,
                             std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("moment_integral: n must be >= 1");
    if (mu < 0.0) throw std::invalid_argument("moment_integral: mu must be >= 0");
    if (mu > 0.0 && classify_moment(spec, mu, n) != MomentClass::Finite && n > 1)
        throw std::domain_error("moment_integral: moment not finite");

    MomentReport report;
    report.n = n;
    report.mu = mu;
    if (n == 1) {
        report.value = 1.0;
        report.method = method;
        return report;
    }

    GapIntegrand f;
    f.kernel = &kernel;
    f.n = n;
    f.exponent.assign(n, 0.0);
    f.dcoef.assign(n, 0.0);
    double worst = 0.0;
    for (int m = 1; m <= n - 1; ++m) {
        const double dm = pair_coefficient(spec, m);
        f.dcoef[m] = dm;
        f.exponent[m] = -mu * dm;
        if (mu * dm >= 1.0)
            throw std::domain_error("moment_integral: pair exponent <= -1 (non-integrable)");
        worst = std::max(worst, mu * dm);
    }
    const double q = grading_exponent(worst);
    const int d = n - 1;

    if (method == QuadMethod::Auto)
        method = (n <= 3)   ? QuadMethod::AdaptiveSubdivision
                 : (n <= 6) ? QuadMethod::TensorGauss
                            : QuadMethod::StratifiedMC;
    report.method = method;

    GapQuadResult r;
    switch (method) {
        case QuadMethod::AdaptiveSubdivision:
            if (n > 4)
                throw std::invalid_argument("moment_integral: adaptive path is capped at n = 4");
            r = integrate_gaps_adaptive(f, d, q, n <= 2 ? 1e-11 : 1e-9);
            report.value = factorial(n) * r.value;
            report.error_estimate = factorial(n) * r.error;
            break;
        case QuadMethod::TensorGauss:
            if (n > 6)
                throw std::invalid_argument("moment_integral: deterministic methods cap at n = 6");
            r = integrate_gaps_tensor(f, d, q);
            report.value = factorial(n) * r.value;
            report.error_estimate = factorial(n) * r.error;
            break;
        case QuadMethod::StratifiedMC:
            r = integrate_gaps_mc(f, d, mc_samples, seed);
            report.value = r.value;
            report.error_estimate = r.error;
            break;
        case QuadMethod::Auto:
            break;
    }
    report.evaluations = r.evaluations;
    return report;
}

MomentReport lognormal_closed_form(int n, double mu) {
    if (n < 1) throw std::invalid_argument("lognormal_closed_form: n must be >= 1");
    if (!(mu >= 0.0)) throw std::invalid_argument("lognormal_closed_form: mu must be >= 0");
    if (mu > 0.0 && !(n < 2.0 / mu))
        throw std::domain_error("lognormal_closed_form: moment infinite (n >= 2/mu)");
    const double gamma = -0.5 * mu;
    auto checked_lgamma = [](double z) {
        if (z < 1e-8)
            throw std::domain_error("lognormal_closed_form: gamma argument at/near a pole");
        return std::lgamma(z);
    };
    double log_value = 0.0;
    for (int j = 0; j < n; ++j) {
        log_value += 2.0 * checked_lgamma(1.0 + j * gamma);
        log_value += checked_lgamma(1.0 + (j + 1) * gamma);
        log_value -= checked_lgamma(2.0 + (n + j - 1) * gamma);
        log_value -= checked_lgamma(1.0 + gamma);
    }
    MomentReport report;
    report.n = n;
    report.mu = mu;
    report.value = std::exp(log_value);
    report.method = QuadMethod::Auto;
    return report;
}

namespace {

/// Smooth double-graded map [0,1] -> [0,1] with derivative (y(1-y))^{s-1}/B(s,s).
struct GradedMap {
    explicit GradedMap(int s) : s_(s) {
        // antiderivative of (t(1-t))^{s-1} expanded in monomials
        coef_.assign(s, 0.0);
        double binom = 1.0;
        for (int k = 0; k < s; ++k) {
            coef_[k] = ((k % 2 == 0) ? 1.0 : -1.0) * binom / (s + k);
            binom *= double(s - 1 - k) / (k + 1);
        }
        norm_ = eval_poly(1.0);
    }
    double value(double y) const { return eval_poly(y) / norm_; }
    double derivative(double y) const {
        return std::pow(y * (1.0 - y), s_ - 1) / norm_;
    }

private:
    double eval_poly(double y) const {
        // sum_k coef_k y^{s+k}
        double acc = 0.0;
        const double ys = std::pow(y, s_);
        double yk = ys;
        for (int k = 0; k < s_; ++k) {
            acc += coef_[k] * yk;
            yk *= y;
        }
        return acc;
    }
    int s_;
    std::vector<double> coef_;
    double norm_;
};

}  // namespace

MomentReport generalized_selberg(const LevySpec& spec, const IntensityKernel& kernel,
                                 const SelbergQuery& query) {
    const int n = query.n;
    if (n < 1 || n > 5)
        throw std::invalid_argument("generalized_selberg: n must be in 1..5");
    // integrability guard over every appearing exponent
    double worst = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double di = pair_coefficient(spec, i);
        for (double expo : {query.lambda1 * di, query.lambda2 * di, 2.0 * query.lambda * di}) {
            if (expo <= -1.0)
                throw std::domain_error("generalized_selberg: exponent <= -1");
            worst = std::max(worst, -expo);
        }
    }
    const int s = std::min(8, std::max(3, static_cast<int>(std::ceil(3.0 / (1.0 - worst)))));
    const GradedMap map(s);

    std::vector<double> d_of(n + 1);
    for (int m = 1; m <= n; ++m) d_of[m] = pair_coefficient(spec, m);

    // integrand over the stick-breaking cube
    long evals = 0;
    auto integrand = [&](const std::vector<double>& xi) {
        // gaps x_0..x_{n-1}; slack x_n = prod (1-xi)
        double carried = 1.0;
        double jac = 1.0;
        std::vector<double> t(n);
        double pos = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = xi[i] * carried;
            jac *= (i < n - 1) ? std::pow(1.0 - xi[i], n - 1 - i) : 1.0;
            carried *= (1.0 - xi[i]);
            pos += x;
            t[i] = pos;
        }
        ++evals;
        double log_val = 0.0;
        for (int i = 1; i <= n; ++i) {
            const double ti = t[i - 1];
            if (query.lambda1 != 0.0)
                log_val += query.lambda1 * d_of[i] * -kernel.g(0.0, ti);
            if (query.lambda2 != 0.0)
                log_val += query.lambda2 * d_of[n - i + 1] * -kernel.g(0.0, 1.0 - ti);
        }
        if (query.lambda != 0.0) {
            for (int k = 1; k <= n; ++k)
                for (int p = k + 1; p <= n; ++p)
                    log_val += 2.0 * query.lambda * d_of[p - k] * -kernel.g(0.0, t[p - 1] - t[k - 1]);
        }
        return jac * std::exp(log_val);
    };

    static const int orders[] = {0, 64, 48, 32, 24, 16};
    auto tensor = [&](int points_per_dim) {
        const int panels = std::max(1, points_per_dim / 16);
        const int order = points_per_dim / panels;
        const GaussRule& rule = gauss_legendre(order);
        std::vector<double> xi(n, 0.0);
        std::function<double(int)> level = [&](int j) -> double {
            double sum = 0.0;
            for (int panel = 0; panel < panels; ++panel) {
                const double lo = double(panel) / panels, hi = double(panel + 1) / panels;
                const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
                for (int i = 0; i < order; ++i) {
                    const double y = mid + half * rule.nodes[i];
                    xi[j] = map.value(y);
                    const double w = half * rule.weights[i] * map.derivative(y);
                    sum += w * (j + 1 == n ? integrand(xi) : level(j + 1));
                }
            }
            return sum;
        };
        return level(0);
    };

    MomentReport report;
    report.n = n;
    report.mu = -2.0 * query.lambda;  // conventional slot: 2 lambda = -mu
    const int fine = orders[n];
    report.value = tensor(fine);
    const double coarse = tensor(std::max(8, fine / 2));
    report.error_estimate = std::abs(report.value - coarse);
    report.evaluations = evals;
    report.method = QuadMethod::TensorGauss;
    return report;
}

double pair_position_g_integral(const IntensityKernel& kernel, int n, int i, int j) {
    if (!(1 <= i && i < j && j <= n))
        throw std::invalid_argument("pair_position_g_integral: need 1 <= i < j <= n");
    // Condition on t_i = a, t_j = a + x. The i-1 points below fill a simplex
    // of volume a^{i-1}/(i-1)!, the j-i-1 interior ones x^{j-i-1}/(j-i-1)!,
    // the n-j above (1-a-x)^{n-j}/(n-j)!. The a-integral is a Beta integral:
    //   int_0^{1-x} a^{i-1} (1-x-a)^{n-j} da = (1-x)^{i+n-j} B(i, n-j+1).
    const double log_beta =
        std::lgamma(double(i)) + std::lgamma(double(n - j + 1)) - std::lgamma(double(i + n - j + 1));
    const double prefactor =
        std::exp(log_beta - log_factorial(i - 1) - log_factorial(j - i - 1) - log_factorial(n - j));
    const int gap_power = j - i - 1;
    const int slack_power = i + n - j;
    const double integral = integrate_decaying(
        [&](double y) {
            const double x = std::exp(-y);
            return std::pow(1.0 - x, slack_power) * std::pow(x, gap_power) *
                   kernel.g(0.0, x) * x;
        },
        64.0, 64);
    return prefactor * integral;
}

MomentReport moment_mu_derivative(const LevySpec& spec, const IntensityKernel& kernel,
                                  int n, double mu, QuadMethod method) {
    if (n < 2) throw std::invalid_argument("moment_mu_derivative: n must be >= 2");
    MomentReport report;
    report.n = n;
    report.mu = mu;
    if (mu == 0.0) {
        // Exact route: the weight factorizes, so the answer is
        // n! sum_{i<j} d(j-i) * (pair-position g-integral).
        CompensatedSum sum;
        long evals = 0;
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j) {
                sum.add(pair_coefficient(spec, j - i) * pair_position_g_integral(kernel, n, i, j));
                ++evals;
            }
        report.value = factorial(n) * sum.value();
        report.error_estimate = 1e-12 * std::abs(report.value);
        report.method = QuadMethod::AdaptiveSubdivision;
        report.evaluations = evals;
        return report;
    }

    if (classify_moment(spec, mu, n) != MomentClass::Finite)
        throw std::domain_error("moment_mu_derivative: moment not finite");
    GapIntegrand f;
    f.kernel = &kernel;
    f.n = n;
    f.exponent.assign(n, 0.0);
    f.dcoef.assign(n, 0.0);
    f.with_log_factor = true;
    double worst = 0.0;
    for (int m = 1; m <= n - 1; ++m) {
        const double dm = pair_coefficient(spec, m);
        f.dcoef[m] = dm;
        f.exponent[m] = -mu * dm;
        if (mu * dm >= 1.0)
            throw std::domain_error("moment_mu_derivative: exponent <= -1 after log weight");
        worst = std::max(worst, mu * dm);
    }
    // the log factor worsens the singularity grade; grade a little harder
    const double q = grading_exponent(worst) + 1.0;
    const int d = n - 1;
    if (method == QuadMethod::Auto)
        method = (n <= 3) ? QuadMethod::AdaptiveSubdivision : QuadMethod::TensorGauss;
    report.method = method;

    GapQuadResult r;
    if (method == QuadMethod::AdaptiveSubdivision) {
        if (n > 4)
            throw std::invalid_argument("moment_mu_derivative: adaptive path capped at n = 4");
        r = integrate_gaps_adaptive(f, d, q, n <= 2 ? 1e-11 : 1e-9);
    } else if (method == QuadMethod::TensorGauss) {
        if (n > 6)
            throw std::invalid_argument("moment_mu_derivative: deterministic cap is n = 6");
        r = integrate_gaps_tensor(f, d, q);
    } else {
        throw std::invalid_argument("moment_mu_derivative: unsupported method");
    }
    report.value = factorial(n) * r.value;
    report.error_estimate = factorial(n) * r.error;
    report.evaluations = r.evaluations;
    return report;
}

}  // namespace idmc
