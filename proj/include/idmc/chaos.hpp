#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "idmc/field_sim.hpp"
#include "idmc/parallel.hpp"

namespace idmc {

/// Total mass of an interval computed from one field sample.
struct MassSample {
    double a, b;
    double mass;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

/// A Monte Carlo estimate with provenance.
struct MCEstimate {
    double mean = 0.0;
    double stderr = 0.0;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
    double elapsed_seconds = 0.0;
};

/// Trapezoid mass of e^omega over [a,b]: half weights at the cut points,
/// omega interpolated there if they fall between grid points. Requires the
/// grid to cover the interval.
MassSample total_mass(const FieldGrid& field, double a, double b);

/// Running trapezoid primitive of e^omega along the grid; entry i holds the
/// mass of [grid_0, grid_i].
std::vector<double> cumulative_mass(const FieldGrid& field);

struct MomentEstimate {
    MCEstimate estimate;
    /// Mean with the top 0.1% of samples removed: a tail-sensitivity
    /// diagnostic for moments near the finiteness boundary.
    double trimmed_mean = 0.0;
};

/// E[mass(0,1)^n] by Monte Carlo. Rejects Boundary and Infinite moment
/// classes.
MomentEstimate mc_moment(const LevySpec& spec, const IntensityKernel& kernel,
                         const ChaosParams& params, int n, const McConfig& config);

/// Monte Carlo mean of F(M_eps) e^{omega(t_1)+...+omega(t_n)}.
MCEstimate v_functional(const LevySpec& spec, const IntensityKernel& kernel,
                        const ChaosParams& params, const TestFunction& F,
                        const std::vector<double>& ts, const McConfig& config);

/// Exact finite-epsilon value of E[e^{omega(t_1)+...+omega(t_n)}],
///   exp(mu sum_{i<j} d(j-i) rho_eps(t_j-t_i)).
double exp_sum_moment_analytic(const LevySpec& spec, const IntensityKernel& kernel,
                               const ChaosParams& params, const std::vector<double>& ts);

struct CovarianceProbe {
    double t;    // in (0,1), with tau < t
    double tau;  // interval length, t + tau <= 1
    ChaosParams params;
    std::size_t n_samples;
};

/// Sample covariance of (log mass(t,t+tau), log mass(0,tau)) over common
/// field samples.
MCEstimate log_mass_covariance(const LevySpec& spec, const IntensityKernel& kernel,
                               const CovarianceProbe& probe, const McConfig& config);

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr = 0.0;  // propagated MC error of the slope
    std::vector<double> log_scale;
    std::vector<double> log_moment;
};

/// Least-squares slope of log E[mass(0,t)^n] against log t. All scales are
/// evaluated on common field samples.
ScalingFit scaling_exponent(const LevySpec& spec, const IntensityKernel& kernel,
                            const ChaosParams& params, int n,
                            const std::vector<double>& scales, const McConfig& config);

/// Characteristic function of log W_gamma: gamma^{iq - mu phi(q)}.
std::complex<double> multiplier_cf(const LevySpec& spec, double mu, double gamma,
                                   double q);

/// Both sides of the Gaussian change-of-measure identity
///   E[F(M_eps) e^{sum omega(t_j)}] =
///     exp(mu sum_{i<j} rho_eps(t_j-t_i)) E[F(int e^{omega(s)+mu sum_j rho_eps(s-t_j)} ds)],
/// estimated with independent streams. Gaussian specs only.
std::pair<MCEstimate, MCEstimate> girsanov_gaussian_check(
    const LevySpec& spec, const IntensityKernel& kernel, const ChaosParams& params,
    const TestFunction& F, const std::vector<double>& ts, const McConfig& config);

/// Grid on [0,1] whose spacing refines eps/4, including the given interior
/// points exactly.
std::vector<double> grid_for(const ChaosParams& params, std::size_t base_points,
                             const std::vector<double>& must_include = {});

}  // namespace idmc
