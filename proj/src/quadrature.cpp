#include "idmc/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace idmc {

namespace {

GaussRule compute_rule(int order) {
    GaussRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const double pi = 3.141592653589793238462643383279;
    for (int i = 0; i < (order + 1) / 2; ++i) {
        // Chebyshev-angle initial guess, then Newton on P_n(x) = 0.
        double x = std::cos(pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[order - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
    if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    static std::map<int, GaussRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_rule(order)).first;
    return it->second;
}

double integrate_gauss(const std::function<double(double)>& f, double a, double b,
                       int order) {
    const GaussRule& rule = gauss_legendre(order);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < order; ++i)
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * sum;
}

AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a,
                                  double b, double tol, int max_depth) {
    AdaptiveResult out;
    if (!(b > a)) return out;
    const GaussRule& g15 = gauss_legendre(15);
    const GaussRule& g7 = gauss_legendre(7);
    auto fine_coarse = [&](double lo, double hi, double& fine, double& coarse) {
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        double s15 = 0.0, s7 = 0.0;
        for (int i = 0; i < 15; ++i) s15 += g15.weights[i] * f(mid + half * g15.nodes[i]);
        for (int i = 0; i < 7; ++i) s7 += g7.weights[i] * f(mid + half * g7.nodes[i]);
        out.evaluations += 22;
        fine = half * s15;
        coarse = half * s7;
    };

    struct Panel { double a, b; int depth; };
    std::vector<Panel> work{{a, b, 0}};
    const double tol_per_length = tol / (b - a);
    while (!work.empty()) {
        const Panel p = work.back();
        work.pop_back();
        double fine, coarse;
        fine_coarse(p.a, p.b, fine, coarse);
        const double err = std::abs(fine - coarse);
        if (err <= tol_per_length * (p.b - p.a) || p.depth >= max_depth ||
            (p.b - p.a) < 1e-300) {
            out.value += fine;
            out.error += err;
        } else {
            const double mid = 0.5 * (p.a + p.b);
            work.push_back({p.a, mid, p.depth + 1});
            work.push_back({mid, p.b, p.depth + 1});
        }
    }
    return out;
}

double integrate_decaying(const std::function<double(double)>& f, double y_max,
                          int order) {
    double total = 0.0;
    double lo = 0.0, hi = 1.0;
    while (lo < y_max) {
        total += integrate_gauss(f, lo, std::min(hi, y_max), order);
        lo = hi;
        hi *= 2.0;
    }
    return total;
}

ChebyshevAntiderivative::ChebyshevAntiderivative(const std::function<double(double)>& f,
                                                 double a, double b, int degree)
    : a_(a), b_(b) {
    const int n = degree;
    const double pi = 3.141592653589793238462643383279;
    std::vector<double> vals(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double x = std::cos(pi * k / n);  // Chebyshev-Lobatto points
        vals[k] = f(0.5 * (a + b) + 0.5 * (b - a) * x);
    }
    // Coefficients via the discrete cosine transform; direct O(n^2) is fine
    // at this size. coef[0] is folded to the plain-sum convention.
    std::vector<double> coef(n + 1, 0.0);
    for (int j = 0; j <= n; ++j) {
        double s = 0.0;
        for (int k = 0; k <= n; ++k) {
            const double w = (k == 0 || k == n) ? 0.5 : 1.0;
            s += w * vals[k] * std::cos(pi * j * k / n);
        }
        coef[j] = 2.0 * s / n;
    }
    coef[0] *= 0.5;
    coef[n] *= 0.5;

    // Antiderivative in the Chebyshev basis:
    //   A_1 = c_0 - c_2/2,  A_m = (c_{m-1} - c_{m+1}) / (2m)  for m >= 2,
    // scaled by the affine map derivative (b-a)/2.
    auto c = [&](int j) { return (j >= 0 && j <= n) ? coef[j] : 0.0; };
    const double scale = 0.5 * (b - a);
    anti_.assign(n + 2, 0.0);
    anti_[1] = scale * (c(0) - 0.5 * c(2));
    for (int m = 2; m <= n + 1; ++m)
        anti_[m] = scale * (c(m - 1) - c(m + 1)) / (2.0 * m);
    at_a_ = 0.0;
    at_a_ = eval_series(anti_, a);
}

double ChebyshevAntiderivative::eval_series(const std::vector<double>& c, double x) const {
    const double t = (2.0 * x - (a_ + b_)) / (b_ - a_);
    double b1 = 0.0, b2 = 0.0;
    for (int j = static_cast<int>(c.size()) - 1; j >= 1; --j) {
        const double b0 = 2.0 * t * b1 - b2 + c[j];
        b2 = b1;
        b1 = b0;
    }
    return t * b1 - b2 + c[0];
}

double ChebyshevAntiderivative::primitive(double x) const {
    return eval_series(anti_, x) - at_a_;
}

}  // namespace idmc
