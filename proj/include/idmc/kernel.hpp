#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace idmc {

/// Time-scale intensity kernel of the conical construction.
///
/// The canonical kernel has
///   rho_eps(u) = -log|u|                 on eps <= |u| <= 1,
///              = -log eps + (1 - |u|/eps) on |u| < eps,
///              = 0                        on |u| > 1,
/// and limit g(s1,s2) = -log|s1-s2|. The general variant replaces |u| by a
/// positive smooth even r(u) with t (log r)'(t) -> 1 at 0; the cap branch
/// becomes -log r(eps) + (1-|u|/eps) eps (log r)'(eps) and the density
/// factor is f(l) = -l^2 (log r)''(l) on (0,1), f(l) = (log r)'(1) for
/// l >= 1.
///
/// r is normalized to r(1) = 1 at construction (a constant rescaling, which
/// leaves f unchanged); without it rho would jump at |u| = 1 where the
/// cones stop intersecting.
class IntensityKernel {
public:
    /// Pointwise description of r(t) on (0,1]. Derivatives of log r are
    /// optional; absent ones are filled by central differences (h = 1e-5).
    struct RFunction {
        std::function<double(double)> r;
        std::function<double(double)> dlog_r;   // (log r)'(t), may be null
        std::function<double(double)> d2log_r;  // (log r)''(t), may be null
    };

    static IntensityKernel canonical();
    /// Validates f > 0 and the small-t slope condition on a 256-point
    /// log-spaced grid; throws std::domain_error on failure.
    static IntensityKernel general(RFunction rf, std::string name);
    /// Built-in general-r catalog, keyed by name ("bacry-muzy-r",
    /// "quadratic-exp"). Used by serialized configs.
    static IntensityKernel from_catalog(const std::string& name);

    bool is_canonical() const { return canonical_; }
    const std::string& name() const { return name_; }

    double rho(double u, double epsilon) const;
    /// Limit kernel g(s1,s2) = lim_{eps->0} rho_eps(s1-s2); throws on s1 == s2.
    double g(double s1, double s2) const;
    /// Density factor f(l), l > 0.
    double f(double l) const;
    /// Intensity mass of one cone, rho(A_eps) = int_eps^1 f/l dl + int_1^inf f/l^2 dl.
    /// Canonical: 1 - log eps. Always equals rho(0, eps).
    double cone_mass(double epsilon) const;
    /// Membership in the cone with apex s: |t-s| <= l/2 for eps <= l <= 1,
    /// |t-s| <= 1/2 for l >= 1.
    static bool cone_contains(double t, double l, double apex, double epsilon);

    /// I_k = int_{0<s_1<...<s_k<1} g(s_1,s_k) ds. Canonical closed form
    /// [1/(k-1)^2 - 1/k^2]/(k-2)!; otherwise the 1D reduction
    /// int_0^1 (1-x) x^{k-2} g(0,x) dx / (k-2)! by quadrature.
    double simplex_g_integral(int k) const;
    /// Same integral over an interval of the given width instead of [0,1].
    double simplex_g_integral_on_width(int k, double width) const;

private:
    IntensityKernel() = default;
    void validate() const;
    double dlog_r(double t) const;
    double d2log_r(double t) const;

    bool canonical_ = true;
    std::string name_ = "bacry-muzy";
    RFunction rf_;
    double log_r1_ = 0.0;   // log r(1) before normalization
    double f_tail_ = 1.0;   // f(l) for l >= 1
};

}  // namespace idmc
