#pragma once

#include <functional>
#include <vector>

namespace idmc {

/// Gauss-Legendre rule on [-1,1]; nodes/weights computed once per order
/// by Newton iteration on the Legendre recurrence and cached.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussRule& gauss_legendre(int order);

/// Integrate f over [a,b] with a fixed-order rule.
double integrate_gauss(const std::function<double(double)>& f, double a, double b,
                       int order = 32);

struct AdaptiveResult {
    double value = 0.0;
    double error = 0.0;   // accumulated per-panel error estimates
    long evaluations = 0;
};

/// Adaptive bisection with a GL15/GL7 error estimate per panel. Geometric
/// refinement makes integrable endpoint singularities (powers above -1,
/// logs) converge; depth is capped and the remaining estimate is folded
/// into the reported error.
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a,
                                  double b, double tol, int max_depth = 48);

/// Integrate f over [0, inf) after x = e^{-y} style decay: composite GL on
/// geometrically growing panels [0,1],[1,2],...,[Y/2,Y].
double integrate_decaying(const std::function<double(double)>& f, double y_max = 64.0,
                          int order = 64);

/// Chebyshev proxy of a smooth function on [a,b] plus its antiderivative.
/// Used where an integral F(x) = int_a^x f must be evaluated at arbitrary
/// points at machine precision (f analytic).
class ChebyshevAntiderivative {
public:
    ChebyshevAntiderivative(const std::function<double(double)>& f, double a, double b,
                            int degree = 96);

    /// int_a^x f(s) ds
    double primitive(double x) const;
    /// int_x^y f(s) ds
    double between(double x, double y) const { return primitive(y) - primitive(x); }

private:
    double eval_series(const std::vector<double>& c, double x) const;
    double a_, b_;
    std::vector<double> anti_;  // Chebyshev coefficients of the antiderivative
    double at_a_;
};

}  // namespace idmc
