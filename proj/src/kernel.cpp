#include "idmc/kernel.hpp"

#include <cmath>
#include <stdexcept>

#include "idmc/quadrature.hpp"

namespace idmc {

namespace {
constexpr double kFdStep = 1e-5;

double factorial(int n) {
    double out = 1.0;
    for (int j = 2; j <= n; ++j) out *= j;
    return out;
}
}  // namespace

IntensityKernel IntensityKernel::canonical() {
    IntensityKernel k;
    k.canonical_ = true;
    k.name_ = "bacry-muzy";
    k.f_tail_ = 1.0;
    return k;
}

IntensityKernel IntensityKernel::general(RFunction rf, std::string name) {
    IntensityKernel k;
    k.canonical_ = false;
    k.name_ = std::move(name);
    k.rf_ = std::move(rf);
    if (!k.rf_.r) throw std::invalid_argument("IntensityKernel: r callable required");
    k.log_r1_ = std::log(k.rf_.r(1.0));
    k.f_tail_ = k.dlog_r(1.0);
    k.validate();
    return k;
}

IntensityKernel IntensityKernel::from_catalog(const std::string& name) {
    if (name == "bacry-muzy" || name == "canonical") return canonical();
    if (name == "bacry-muzy-r") {
        // r(t) = |t|; reproduces the canonical kernel through the general path.
        RFunction rf;
        rf.r = [](double t) { return std::abs(t); };
        rf.dlog_r = [](double t) { return 1.0 / t; };
        rf.d2log_r = [](double t) { return -1.0 / (t * t); };
        return general(std::move(rf), name);
    }
    if (name == "quadratic-exp") {
        // r(t) = |t| e^{(t^2-1)/4}: f(l) = 1 - l^2/2 on (0,1), tail 3/2.
        RFunction rf;
        rf.r = [](double t) { return std::abs(t) * std::exp(0.25 * (t * t - 1.0)); };
        rf.dlog_r = [](double t) { return 1.0 / t + 0.5 * t; };
        rf.d2log_r = [](double t) { return -1.0 / (t * t) + 0.5; };
        return general(std::move(rf), name);
    }
    throw std::invalid_argument("IntensityKernel: unknown catalog name '" + name + "'");
}

// Fallback differentiation runs in log-abscissa (t e^{+-h}) so that the
// leading log|t| behavior of log r near 0 is differentiated exactly; a
// plain central stencil with h ~ t would be off by a constant factor there.
double IntensityKernel::dlog_r(double t) const {
    if (rf_.dlog_r) return rf_.dlog_r(t);
    const double h = kFdStep;
    const double d_dtau =
        (std::log(rf_.r(t * std::exp(h))) - std::log(rf_.r(t * std::exp(-h)))) / (2.0 * h);
    return d_dtau / t;
}

double IntensityKernel::d2log_r(double t) const {
    if (rf_.d2log_r) return rf_.d2log_r(t);
    const double h = kFdStep;
    const double lm = std::log(rf_.r(t * std::exp(-h)));
    const double l0 = std::log(rf_.r(t));
    const double lp = std::log(rf_.r(t * std::exp(h)));
    const double d_dtau = (lp - lm) / (2.0 * h);
    const double d2_dtau2 = (lp - 2.0 * l0 + lm) / (h * h);
    return (d2_dtau2 - d_dtau) / (t * t);
}

void IntensityKernel::validate() const {
    if (f_tail_ <= 0.0)
        throw std::domain_error("IntensityKernel: tail density (log r)'(1) must be positive");
    // f > 0 on a log-spaced grid in (0,1).
    const int n = 256;
    for (int i = 0; i < n; ++i) {
        const double l = std::exp(std::log(1e-6) * (1.0 - double(i) / (n - 1)));
        if (f(l) <= 0.0)
            throw std::domain_error("IntensityKernel: f(l) <= 0 at l = " + std::to_string(l));
    }
    // t (log r)'(t) -> 1 as t -> 0.
    for (double t : {1e-4, 1e-5, 1e-6}) {
        if (std::abs(t * dlog_r(t) - 1.0) > 1e-3)
            throw std::domain_error("IntensityKernel: t (log r)'(t) does not approach 1");
    }
}

double IntensityKernel::rho(double u, double epsilon) const {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("rho: epsilon must be in (0,1)");
    u = std::abs(u);
    if (u > 1.0) return 0.0;
    if (canonical_) {
        if (u >= epsilon) return -std::log(u);
        return -std::log(epsilon) + (1.0 - u / epsilon);
    }
    if (u >= epsilon) return -(std::log(rf_.r(u)) - log_r1_);
    return -(std::log(rf_.r(epsilon)) - log_r1_) +
           (1.0 - u / epsilon) * epsilon * dlog_r(epsilon);
}

double IntensityKernel::g(double s1, double s2) const {
    const double u = std::abs(s1 - s2);
    if (u == 0.0) throw std::domain_error("g: singular at s1 == s2");
    if (u > 1.0) return 0.0;
    if (canonical_) return -std::log(u);
    return -(std::log(rf_.r(u)) - log_r1_);
}

double IntensityKernel::f(double l) const {
    if (!(l > 0.0)) throw std::invalid_argument("f: l must be positive");
    if (canonical_) return 1.0;
    if (l >= 1.0) return f_tail_;
    return -l * l * d2log_r(l);
}

double IntensityKernel::cone_mass(double epsilon) const {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("cone_mass: epsilon must be in (0,1)");
    if (canonical_) return 1.0 - std::log(epsilon);
    // int_eps^1 f(l)/l dl, with substitution l = eps e^y to keep the lower
    // end well resolved, plus the exact tail f_tail * int_1^inf dl/l^2.
    const double y_max = -std::log(epsilon);
    const double body = integrate_gauss(
        [&](double y) {
            const double l = epsilon * std::exp(y);
            return f(l);
        },
        0.0, y_max, 128);
    return body + f_tail_;
}

bool IntensityKernel::cone_contains(double t, double l, double apex, double epsilon) {
    if (l < epsilon) return false;
    if (l <= 1.0) return std::abs(t - apex) <= 0.5 * l;
    return std::abs(t - apex) <= 0.5;
}

double IntensityKernel::simplex_g_integral(int k) const {
    if (k < 2) throw std::invalid_argument("simplex_g_integral: k must be >= 2");
    if (canonical_) {
        const double km1 = k - 1.0;
        return (1.0 / (km1 * km1) - 1.0 / (double(k) * k)) / factorial(k - 2);
    }
    return simplex_g_integral_on_width(k, 1.0);
}

double IntensityKernel::simplex_g_integral_on_width(int k, double width) const {
    if (k < 2) throw std::invalid_argument("simplex_g_integral: k must be >= 2");
    if (!(width > 0.0)) return 0.0;
    // Pair-gap reduction: the k-2 interior points contribute x^{k-2}/(k-2)!
    // and the big gap x integrates against (width - x) g(0,x). The
    // substitution x = width e^{-y} absorbs the logarithmic endpoint.
    const double total = integrate_decaying(
        [&](double y) {
            const double x = width * std::exp(-y);
            if (x >= 1.0) return 0.0;  // g vanishes beyond unit separation
            return (width - x) * std::pow(x, k - 2) * g(0.0, x) * x;
        },
        64.0, 64);
    return total / factorial(k - 2);
}

}  // namespace idmc
