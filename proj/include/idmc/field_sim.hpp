#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "idmc/kernel.hpp"
#include "idmc/levy_spec.hpp"
#include "idmc/rng.hpp"

namespace idmc {

/// One sampled path of the regularized field omega_{mu,eps} on a grid.
struct FieldGrid {
    std::vector<double> grid;    // strictly increasing, within [0,1]
    std::vector<double> values;  // omega at the grid points
    ChaosParams params{};
    std::string spec_label;
    std::string kernel_label;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    /// Linear interpolation of omega between grid points.
    double omega_at(double s) const;
};

/// Joint characteristic function E exp(i sum q_j omega(t_j)) with its
/// coefficient table alpha_{p,k}.
struct JointCF {
    std::vector<double> qs;
    std::vector<double> ts;
    std::vector<std::vector<std::complex<double>>> alphas;  // alphas[p][k], k <= p
    std::complex<double> value;

    std::complex<double> alpha_sum() const;
};

/// One marked point of the jump cloud in the time-scale plane.
struct ConePoint {
    double t;
    double l;
    double mark;  // atom location u carried by the point
};

/// Shared per-batch state for field sampling: the Cholesky factor of the
/// Gaussian covariance and the tabulated jump-scale inverse CDF. Build
/// once, then draw any number of independent samples from it.
class FieldSampler {
public:
    FieldSampler(const LevySpec& spec, const IntensityKernel& kernel,
                 const ChaosParams& params, std::vector<double> grid,
                 std::size_t grid_cap = 4096);
    ~FieldSampler();
    FieldSampler(FieldSampler&&) noexcept;
    FieldSampler& operator=(FieldSampler&&) noexcept;

    /// Gaussian part only (requires sigma^2 > 0): multivariate normal with
    /// mean -mu sigma^2 rho_eps(0)/2 and covariance mu sigma^2 rho_eps(s_i-s_j).
    FieldGrid sample_gaussian(RngStream& rng) const;
    /// Jump part only (requires at least one atom): marked Poisson cloud on
    /// the cone domain with intensity mu (sum m_j) f(l)/l^2 dt dl, plus the
    /// deterministic compensator. When cloud is non-null the sampled points
    /// are appended to it.
    FieldGrid sample_jump(RngStream& rng, std::vector<ConePoint>* cloud = nullptr) const;
    /// Sum of the independent parts; either may be absent.
    FieldGrid sample(RngStream& rng) const;

    const std::vector<double>& grid() const;
    const ChaosParams& params() const;
    /// Expected number of cloud points falling inside one cone A_eps(s).
    double expected_points_per_cone() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Convenience single-shot samplers (build a sampler and draw once).
FieldGrid simulate_gaussian_field(const LevySpec& spec, const IntensityKernel& kernel,
                                  const ChaosParams& params, std::vector<double> grid,
                                  RngStream& rng);
FieldGrid simulate_jump_field(const LevySpec& spec, const IntensityKernel& kernel,
                              const ChaosParams& params, std::vector<double> grid,
                              RngStream& rng);
FieldGrid simulate_field(const LevySpec& spec, const IntensityKernel& kernel,
                         const ChaosParams& params, std::vector<double> grid,
                         RngStream& rng);

/// Joint CF from the coefficient table
///   alpha_{p,k} = phi(r_{k,p}) + phi(r_{k+1,p-1}) - phi(r_{k,p-1}) - phi(r_{k+1,p}),
///   r_{k,p} = q_k + ... + q_p (zero when k > p),
/// with value exp(mu sum_{p,k<=p} alpha_{p,k} rho_eps(t_p - t_k)). An
/// optional level L multiplies rho by the shift log L.
JointCF joint_cf_analytic(const LevySpec& spec, const IntensityKernel& kernel,
                          const ChaosParams& params, const std::vector<double>& qs,
                          const std::vector<double>& ts, double level = 1.0);

/// Equidistant grid helper (n points, first at 0, last at 1).
std::vector<double> uniform_grid(std::size_t n);

/// Probe for the distributional identity
///   X(delta) + omega_{mu,L,eps} = omega_{mu-delta,L,eps} + omega'_{delta,eL,eps}.
struct InvarianceProbe {
    double mu;
    double delta;    // < mu
    double level;    // L >= 1
    double epsilon;
    std::vector<double> qs;
    std::vector<double> ts;
};

/// Max absolute difference of the analytic joint CFs of the two sides.
double check_intermittency_invariance(const InvarianceProbe& probe, const LevySpec& spec,
                                      const IntensityKernel& kernel);

/// Max absolute difference of the analytic CFs of
///   X(delta) + omega_{mu,eps}(t)  and  omega_{mu, eps e^{-delta/mu}}(t e^{-delta/mu}).
double check_scale_invariance(const LevySpec& spec, const IntensityKernel& kernel,
                              double mu, double delta, double epsilon,
                              const std::vector<double>& qs, const std::vector<double>& ts);

/// Empirical characteristic function over n_samples independent fields at
/// the probe points; used to validate the samplers against the analytic CF.
std::complex<double> empirical_cf(const LevySpec& spec, const IntensityKernel& kernel,
                                  const ChaosParams& params, const std::vector<double>& qs,
                                  const std::vector<double>& ts, std::size_t n_samples,
                                  std::uint64_t seed);

}  // namespace idmc
