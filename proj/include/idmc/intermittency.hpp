#pragma once

#include <functional>
#include <string>
#include <vector>

#include "idmc/chaos.hpp"
#include "idmc/kernel.hpp"
#include "idmc/levy_spec.hpp"

namespace idmc {

/// One summand of a first-order expansion: value = coefficient *
/// spectral_factor * geometric_factor.
struct ExpansionTerm {
    std::string kind;  // "gaussian", "spectral", "gaussian-cross", ...
    int k = 0;
    int l = 0;
    double coefficient = 0.0;      // derivative value(s) of the test function
    double spectral_factor = 0.0;  // sigma^2 or int (e^u-1)^{k+l} dM
    double geometric_factor = 0.0; // simplex g-integral
    double value = 0.0;
};

struct FirstOrderResult {
    double total = 0.0;
    std::vector<ExpansionTerm> terms;
    double truncation_bound = 0.0;  // tail estimate beyond k_max
};

/// d/dmu at mu = 0 of E[F(M_mu)]:
///   sigma^2 F''(1) I_2 + sum_{k=2}^{k_max} F^{(k)}(1) (int (e^u-1)^k dM) I_k.
FirstOrderResult first_order_term(const LevySpec& spec, const IntensityKernel& kernel,
                                  const TestFunction& F, int k_max = 12);

struct Interval {
    double a, b;
    double width() const { return b - a; }
};

/// d/dmu at mu = 0 of E[F1(M(I1)) F2(M(I2))] for disjoint intervals with
/// sup I1 < inf I2: the three sigma^2 blocks plus the double sum over
/// k + l >= 2 with the ordered product-region g-integrals.
FirstOrderResult first_order_two_intervals(const LevySpec& spec,
                                           const IntensityKernel& kernel,
                                           const TestFunction& F1, const TestFunction& F2,
                                           Interval I1, Interval I2, int k_max = 12);

/// Small-tau slope of the log-mass covariance:
///   mu g(0,t) (sigma^2 + int u^2 dM).
double covariance_slope(const LevySpec& spec, double mu, double t,
                        const IntensityKernel& kernel);

struct BLemmaProbe {
    std::vector<double> s_list;      // sorted, distinct, inside (0,1)
    std::vector<double> delta_list;  // decreasing intermittencies
    double level = 1.0;              // L >= 1
    double epsilon = 0.25;
    /// Optional perturbation f(delta, s) vanishing with delta; null = 0.
    std::function<double(double, double)> frak_f;
};

struct BLemmaResult {
    double empirical_slope;
    double predicted;
    double residual;
};

/// Exact-expectation check of the combinatorial lemma: the delta-slope of
///   E[prod_j (e^{f(delta,s_j) + omega_{delta,L,eps}(s_j)} - 1)]
///     - prod_j (e^{f(delta,s_j)} - 1)
/// against the predicted coefficient rho_{L,eps}(s_n - s_1) times
/// (sigma^2 + m_2) for n = 2 or m_n for n > 2. Expectations come from the
/// inclusion-exclusion over subsets with the pairwise d-coefficients; the
/// slope is Richardson-extrapolated from the two smallest deltas.
BLemmaResult blemma_slope_check(const LevySpec& spec, const IntensityKernel& kernel,
                                const BLemmaProbe& probe);

struct IdentityCheckResult {
    double lhs;
    double rhs;
    double residual;
};

/// Integral identity behind the moment differentiation rule: for continuous
/// omega and g and 2 <= k <= n,
///   (1/(n-k)!) (int_0^1 e^omega)^{n-k} int_{s_1<...<s_k} e^{sum omega} g(s_1,s_k)
///     = int_{s_1<...<s_n} e^{sum omega} [sum_{i<j, j-i>=k-1} C(j-i-1,k-2) g(s_i,s_j)].
/// Both sides are evaluated by deterministic quadrature after the exact
/// pair-conditioned reduction to 2D (the interior blocks integrate to
/// powers of the 1D primitive of e^omega).
IdentityCheckResult integral_identity_check(int n, int k,
                                            const std::function<double(double)>& omega,
                                            const std::function<double(double, double)>& g);

/// Coefficient of one term of the general differentiation rule: the sum
/// over increasing k-tuples (p_1<...<p_k) from {1..n} of
/// g(min{t_{p_1}, t_{n+1}}, max{t_{p_k}, t_{n+l}}); k = 0 contributes
/// g(t_{n+1}, t_{n+l}). ts holds the n fixed points followed by the l new
/// ones, each block sorted.
double rule_term_coefficient(int n, int k, int l, const std::vector<double>& ts,
                             const IntensityKernel& kernel);

/// Monte Carlo assembly of the right side of the differentiation rule at
/// intermittency mu:
///   sigma^2 int v(mu,F'',s1,s2) g ds + sum_k m_k int v(mu,F^{(k)},s) g(s_1,s_k) ds,
/// with every order reduced to common 2D quadrature nodes through the
/// pair-conditioned form of the v-functionals (interior points integrate to
/// interval masses sample by sample).
MCEstimate rhs_first_derivative_mc(const LevySpec& spec, const IntensityKernel& kernel,
                                   const ChaosParams& params, const TestFunction& F,
                                   int k_max, const McConfig& config);

}  // namespace idmc
