#pragma once

#include <cstdint>
#include <string>

#include "idmc/kernel.hpp"
#include "idmc/levy_spec.hpp"

namespace idmc {

enum class QuadMethod { Auto, TensorGauss, AdaptiveSubdivision, StratifiedMC };

struct MomentReport {
    int n = 0;
    double mu = 0.0;
    double value = 0.0;
    double error_estimate = 0.0;  // 0 for closed forms
    QuadMethod method = QuadMethod::Auto;
    long evaluations = 0;
};

const char* method_name(QuadMethod m);

/// n-th moment of the total mass,
///   n! int_{0<t_1<...<t_n<1} prod_{k<p} r(t_p-t_k)^{-mu d(p-k)} dt.
/// The translation-invariant integrand is reduced to the (n-1)-dimensional
/// gap simplex; per-gap power grading flattens the diagonal singularities.
/// Deterministic methods carry n <= 6; StratifiedMC (sorted-uniform sampling
/// with antithetic pairs) covers larger n.
MomentReport moment_integral(const LevySpec& spec, const IntensityKernel& kernel, int n,
                             double mu, QuadMethod method = QuadMethod::Auto,
                             std::size_t mc_samples = 200000, std::uint64_t seed = 99);

/// Classical Selberg product for the lognormal (sigma = 1) case, evaluated
/// through log-gamma: the alpha = beta = 1, 2 gamma = -mu member of the
/// Selberg family. Requires n < 2/mu; gamma-function poles are detected by
/// argument proximity.
MomentReport lognormal_closed_form(int n, double mu);

/// Generalized Selberg integral
///   S_n(lambda, l1, l2) = int_{simplex} prod_i r(t_i)^{l1 d(i)}
///       r(1-t_i)^{l2 d(n-i+1)} prod_{k<p} r(t_p-t_k)^{2 lambda d(p-k)} dt,
/// by tensor quadrature over a stick-breaking cube parametrization with
/// double-graded coordinate maps.
struct SelbergQuery {
    int n = 2;
    double lambda = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    QuadMethod method = QuadMethod::Auto;
    double target_tol = 1e-8;
};
MomentReport generalized_selberg(const LevySpec& spec, const IntensityKernel& kernel,
                                 const SelbergQuery& query);

/// Intermittency derivative of the n-th moment,
///   n! int_{simplex} [sum_{k<p} d(p-k) g(t_p,t_k)]
///       prod_{k<p} r(t_p-t_k)^{-mu d(p-k)} dt.
/// mu = 0 goes through an exact pair-position reduction to 1D integrals;
/// mu > 0 uses the gap-simplex quadrature with the log factor.
MomentReport moment_mu_derivative(const LevySpec& spec, const IntensityKernel& kernel,
                                  int n, double mu,
                                  QuadMethod method = QuadMethod::Auto);

/// int_{0<t_1<...<t_n<1} g(t_i, t_j) dt for one index pair (1-based),
/// reduced exactly to a 1D integral. Shared by the mu = 0 derivative and
/// the expansion cross-checks.
double pair_position_g_integral(const IntensityKernel& kernel, int n, int i, int j);

}  // namespace idmc
