#include "idmc/field_sim.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "idmc/quadrature.hpp"

namespace idmc {

double FieldGrid::omega_at(double s) const {
    auto it = std::lower_bound(grid.begin(), grid.end(), s);
    if (it == grid.end()) return values.back();
    const std::size_t j = it - grid.begin();
    if (grid[j] == s || j == 0) return values[j];
    const double t = (s - grid[j - 1]) / (grid[j] - grid[j - 1]);
    return (1.0 - t) * values[j - 1] + t * values[j];
}

std::complex<double> JointCF::alpha_sum() const {
    std::complex<double> sum = 0.0;
    for (const auto& row : alphas)
        for (const auto& a : row) sum += a;
    return sum;
}

std::vector<double> uniform_grid(std::size_t n) {
    if (n < 2) throw std::invalid_argument("uniform_grid: need at least 2 points");
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = double(i) / double(n - 1);
    return g;
}

// ---------------------------------------------------------------------------
// Sampler internals

struct FieldSampler::Impl {
    LevySpec spec;
    IntensityKernel kernel;
    ChaosParams params;
    std::vector<double> grid;

    bool has_gauss = false;
    double gauss_mean = 0.0;
    Eigen::MatrixXd chol;  // lower-triangular factor of the covariance

    bool has_jump = false;
    double hull_lo = 0.0, hull_hi = 1.0;
    double strip_intensity = 0.0;
    double tail_intensity = 0.0;
    std::vector<double> l_knots;  // 257 log-spaced scales in [eps, 1]
    std::vector<double> l_cdf;    // strip scale CDF at the knots
    std::vector<double> mark_values;
    std::unique_ptr<DiscreteSampler> mark_sampler;
    double compensator = 0.0;

    Impl(const LevySpec& s, const IntensityKernel& k, const ChaosParams& p)
        : spec(s), kernel(k), params(p) {}
};

FieldSampler::~FieldSampler() = default;
FieldSampler::FieldSampler(FieldSampler&&) noexcept = default;
FieldSampler& FieldSampler::operator=(FieldSampler&&) noexcept = default;

FieldSampler::FieldSampler(const LevySpec& spec, const IntensityKernel& kernel,
                           const ChaosParams& params, std::vector<double> grid,
                           std::size_t grid_cap)
    : impl_(std::make_unique<Impl>(spec, kernel, params)) {
    if (!(params.epsilon > 0.0 && params.epsilon < 1.0))
        throw std::invalid_argument("FieldSampler: epsilon must be in (0,1)");
    if (params.mu < 0.0) throw std::invalid_argument("FieldSampler: mu must be >= 0");
    if (grid.size() < 1 || grid.size() > grid_cap)
        throw std::invalid_argument("FieldSampler: grid size out of range");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < 0.0 || grid[i] > 1.0)
            throw std::invalid_argument("FieldSampler: grid point outside [0,1]");
        if (i > 0 && grid[i] <= grid[i - 1])
            throw std::invalid_argument("FieldSampler: grid must be strictly increasing");
    }
    impl_->grid = std::move(grid);
    auto& im = *impl_;
    const auto& g = im.grid;
    const double mu = params.mu;
    const double eps = params.epsilon;

    im.has_gauss = spec.has_gaussian_part() && mu > 0.0;
    if (im.has_gauss) {
        const std::size_t n = g.size();
        const double var_scale = mu * spec.sigma2();
        im.gauss_mean = -0.5 * var_scale * kernel.rho(0.0, eps);
        Eigen::MatrixXd cov(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                const double c = var_scale * kernel.rho(g[i] - g[j], eps);
                cov(i, j) = c;
                cov(j, i) = c;
            }
        // rho is the intersection mass of two cones, hence positive
        // semidefinite up to roundoff; escalate a diagonal jitter if the
        // factorization stumbles.
        const double scale = cov.diagonal().maxCoeff();
        bool done = false;
        for (double jitter : {0.0, 1e-12, 1e-10, 1e-8}) {
            Eigen::MatrixXd work = cov;
            if (jitter > 0.0)
                work.diagonal().array() += jitter * scale;
            Eigen::LLT<Eigen::MatrixXd> llt(work);
            if (llt.info() == Eigen::Success) {
                im.chol = llt.matrixL();
                done = true;
                break;
            }
        }
        if (!done)
            throw std::runtime_error(
                "FieldSampler: covariance not positive definite (invalid kernel?)");
    }

    im.has_jump = spec.has_jump_part() && mu > 0.0;
    if (im.has_jump) {
        im.hull_lo = g.front();
        im.hull_hi = g.back();
        const double span = im.hull_hi - im.hull_lo;
        const double rate = mu * spec.total_atom_mass();

        // Scale marginal on [eps,1]: weight (span + l) f(l) / l^2, tabulated
        // as an inverse CDF on log-spaced knots. The l >= 1 band has
        // constant f and exact inverse 1/(1-U).
        const int knots = 257;
        im.l_knots.resize(knots);
        im.l_cdf.assign(knots, 0.0);
        const double log_ratio = -std::log(eps);
        for (int i = 0; i < knots; ++i)
            im.l_knots[i] = eps * std::exp(log_ratio * double(i) / (knots - 1));
        im.l_knots.back() = 1.0;
        auto weight = [&](double l) { return (span + l) * kernel.f(l) / (l * l); };
        for (int i = 1; i < knots; ++i)
            im.l_cdf[i] = im.l_cdf[i - 1] +
                          integrate_gauss(weight, im.l_knots[i - 1], im.l_knots[i], 8);
        im.strip_intensity = rate * im.l_cdf.back();
        for (auto& c : im.l_cdf) c /= im.l_cdf.back();
        im.l_cdf.back() = 1.0;

        im.tail_intensity = rate * (span + 1.0) * kernel.f(1.0);

        std::vector<double> weights;
        for (const auto& a : spec.atoms()) {
            im.mark_values.push_back(a.location);
            weights.push_back(a.mass);
        }
        im.mark_sampler = std::make_unique<DiscreteSampler>(weights);

        im.compensator =
            mu * kernel.cone_mass(eps) *
            spectral_moment(spec, 1, SpectralMomentKind::Expm1Power);
    }
}

const std::vector<double>& FieldSampler::grid() const { return impl_->grid; }
const ChaosParams& FieldSampler::params() const { return impl_->params; }

FieldGrid FieldSampler::sample_gaussian(RngStream& rng) const {
    const auto& im = *impl_;
    if (!im.spec.has_gaussian_part())
        throw std::invalid_argument("sample_gaussian: spec has no Gaussian part");
    FieldGrid out;
    out.grid = im.grid;
    out.params = im.params;
    out.spec_label = im.spec.label();
    out.kernel_label = im.kernel.name();
    out.values.assign(im.grid.size(), 0.0);
    if (!im.has_gauss) return out;  // mu == 0: field vanishes identically
    Eigen::VectorXd z(im.grid.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
    Eigen::VectorXd v = im.chol.triangularView<Eigen::Lower>() * z;
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = im.gauss_mean + v[static_cast<Eigen::Index>(i)];
    return out;
}

FieldGrid FieldSampler::sample_jump(RngStream& rng, std::vector<ConePoint>* cloud) const {
    const auto& im = *impl_;
    if (!im.spec.has_jump_part())
        throw std::invalid_argument("sample_jump: spec has no atoms");
    FieldGrid out;
    out.grid = im.grid;
    out.params = im.params;
    out.spec_label = im.spec.label();
    out.kernel_label = im.kernel.name();
    out.values.assign(im.grid.size(), 0.0);
    if (!im.has_jump) return out;

    const auto& g = im.grid;
    const std::size_t n = g.size();
    std::vector<double> diff(n + 1, 0.0);
    auto deposit = [&](double t, double half_width, double jump) {
        // all grid points s with |t - s| <= half_width receive the jump
        const auto lo = std::lower_bound(g.begin(), g.end(), t - half_width);
        const auto hi = std::upper_bound(g.begin(), g.end(), t + half_width);
        if (lo == hi) return;
        diff[lo - g.begin()] += jump;
        diff[hi - g.begin()] -= jump;
    };
    auto draw_mark = [&]() {
        return im.mark_values.size() == 1 ? im.mark_values[0]
                                          : im.mark_values[im.mark_sampler->draw(rng)];
    };

    const std::uint64_t n_strip = rng.poisson(im.strip_intensity);
    for (std::uint64_t p = 0; p < n_strip; ++p) {
        const double u = rng.uniform();
        const auto it = std::lower_bound(im.l_cdf.begin(), im.l_cdf.end(), u);
        const std::size_t j = std::max<std::size_t>(1, it - im.l_cdf.begin());
        const double c0 = im.l_cdf[j - 1], c1 = im.l_cdf[j];
        const double frac = (c1 > c0) ? (u - c0) / (c1 - c0) : 0.5;
        const double l = im.l_knots[j - 1] + frac * (im.l_knots[j] - im.l_knots[j - 1]);
        const double t = rng.uniform(im.hull_lo - 0.5 * l, im.hull_hi + 0.5 * l);
        const double mark = draw_mark();
        deposit(t, 0.5 * l, mark);
        if (cloud) cloud->push_back({t, l, mark});
    }
    const std::uint64_t n_tail = rng.poisson(im.tail_intensity);
    for (std::uint64_t p = 0; p < n_tail; ++p) {
        const double l = 1.0 / (1.0 - rng.uniform());
        const double t = rng.uniform(im.hull_lo - 0.5, im.hull_hi + 0.5);
        const double mark = draw_mark();
        deposit(t, 0.5, mark);  // cones have width 1 above l = 1
        if (cloud) cloud->push_back({t, l, mark});
    }

    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += diff[i];
        out.values[i] = acc - im.compensator;
    }
    return out;
}

double FieldSampler::expected_points_per_cone() const {
    const auto& im = *impl_;
    if (!im.has_jump) return 0.0;
    return im.params.mu * im.spec.total_atom_mass() * im.kernel.cone_mass(im.params.epsilon);
}

FieldGrid FieldSampler::sample(RngStream& rng) const {
    const auto& im = *impl_;
    FieldGrid out;
    if (im.spec.has_gaussian_part()) {
        out = sample_gaussian(rng);
        if (im.spec.has_jump_part()) {
            FieldGrid jump = sample_jump(rng);
            for (std::size_t i = 0; i < out.values.size(); ++i)
                out.values[i] += jump.values[i];
        }
        return out;
    }
    if (im.spec.has_jump_part()) return sample_jump(rng);
    out.grid = im.grid;
    out.params = im.params;
    out.spec_label = im.spec.label();
    out.kernel_label = im.kernel.name();
    out.values.assign(im.grid.size(), 0.0);
    return out;
}

FieldGrid simulate_gaussian_field(const LevySpec& spec, const IntensityKernel& kernel,
                                  const ChaosParams& params, std::vector<double> grid,
                                  RngStream& rng) {
    return FieldSampler(spec, kernel, params, std::move(grid)).sample_gaussian(rng);
}

FieldGrid simulate_jump_field(const LevySpec& spec, const IntensityKernel& kernel,
                              const ChaosParams& params, std::vector<double> grid,
                              RngStream& rng) {
    return FieldSampler(spec, kernel, params, std::move(grid)).sample_jump(rng);
}

FieldGrid simulate_field(const LevySpec& spec, const IntensityKernel& kernel,
                         const ChaosParams& params, std::vector<double> grid,
                         RngStream& rng) {
    return FieldSampler(spec, kernel, params, std::move(grid)).sample(rng);
}

// ---------------------------------------------------------------------------
// Analytic joint characteristic function

JointCF joint_cf_analytic(const LevySpec& spec, const IntensityKernel& kernel,
                          const ChaosParams& params, const std::vector<double>& qs,
                          const std::vector<double>& ts, double level) {
    if (qs.size() != ts.size())
        throw std::invalid_argument("joint_cf_analytic: qs/ts size mismatch");
    if (!std::is_sorted(ts.begin(), ts.end()))
        throw std::invalid_argument("joint_cf_analytic: ts must be sorted");
    if (level < 1.0) throw std::invalid_argument("joint_cf_analytic: level must be >= 1");
    const int n = static_cast<int>(qs.size());
    JointCF out;
    out.qs = qs;
    out.ts = ts;
    out.alphas.resize(n);

    // partial sums r_{k,p} = q_k + ... + q_p with 1-based indices
    auto partial = [&](int k, int p) -> double {
        if (k > p) return 0.0;
        double s = 0.0;
        for (int m = k; m <= p; ++m) s += qs[m - 1];
        return s;
    };
    auto phi = [&](double q) { return levy_exponent(spec, q); };

    const double shift = std::log(level);
    std::complex<double> exponent = 0.0;
    for (int p = 1; p <= n; ++p) {
        out.alphas[p - 1].resize(p);
        for (int k = 1; k <= p; ++k) {
            const std::complex<double> alpha = phi(partial(k, p)) + phi(partial(k + 1, p - 1)) -
                                               phi(partial(k, p - 1)) - phi(partial(k + 1, p));
            out.alphas[p - 1][k - 1] = alpha;
            exponent += alpha * (shift + kernel.rho(ts[p - 1] - ts[k - 1], params.epsilon));
        }
    }
    out.value = std::exp(params.mu * exponent);
    return out;
}

double check_intermittency_invariance(const InvarianceProbe& probe, const LevySpec& spec,
                                      const IntensityKernel& kernel) {
    if (!(probe.delta < probe.mu))
        throw std::invalid_argument("check_intermittency_invariance: need delta < mu");
    if (probe.level < 1.0)
        throw std::invalid_argument("check_intermittency_invariance: need L >= 1");
    if (probe.delta < 0.0)
        throw std::invalid_argument("check_intermittency_invariance: need delta >= 0");
    const double e = 2.718281828459045235360287471353;
    double residual = 0.0;
    for (std::size_t m = 1; m <= probe.qs.size(); ++m) {
        const std::vector<double> qs(probe.qs.begin(), probe.qs.begin() + m);
        const std::vector<double> ts(probe.ts.begin(), probe.ts.begin() + m);
        double qsum = 0.0;
        for (double q : qs) qsum += q;

        const ChaosParams at_mu{probe.mu, probe.epsilon};
        const ChaosParams at_mu_minus{probe.mu - probe.delta, probe.epsilon};
        const ChaosParams at_delta{probe.delta, probe.epsilon};

        const auto lhs = std::exp(probe.delta * levy_exponent(spec, qsum)) *
                         joint_cf_analytic(spec, kernel, at_mu, qs, ts, probe.level).value;
        const auto rhs = joint_cf_analytic(spec, kernel, at_mu_minus, qs, ts, probe.level).value *
                         joint_cf_analytic(spec, kernel, at_delta, qs, ts, e * probe.level).value;
        residual = std::max(residual, std::abs(lhs - rhs));
    }
    return residual;
}

double check_scale_invariance(const LevySpec& spec, const IntensityKernel& kernel,
                              double mu, double delta, double epsilon,
                              const std::vector<double>& qs, const std::vector<double>& ts) {
    if (!(mu > 0.0)) throw std::invalid_argument("check_scale_invariance: mu must be > 0");
    if (delta < 0.0) throw std::invalid_argument("check_scale_invariance: delta >= 0 required");
    const double shrink = std::exp(-delta / mu);
    if (!(epsilon * shrink > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("check_scale_invariance: epsilon out of range");
    for (double t : ts)
        if (t * shrink > 1.0 || t < 0.0)
            throw std::invalid_argument("check_scale_invariance: rescaled time out of [0,1]");

    double residual = 0.0;
    for (std::size_t m = 1; m <= qs.size(); ++m) {
        const std::vector<double> sub_q(qs.begin(), qs.begin() + m);
        const std::vector<double> sub_t(ts.begin(), ts.begin() + m);
        std::vector<double> scaled_t(sub_t);
        for (auto& t : scaled_t) t *= shrink;
        double qsum = 0.0;
        for (double q : sub_q) qsum += q;

        const auto lhs =
            std::exp(delta * levy_exponent(spec, qsum)) *
            joint_cf_analytic(spec, kernel, {mu, epsilon}, sub_q, sub_t).value;
        const auto rhs =
            joint_cf_analytic(spec, kernel, {mu, epsilon * shrink}, sub_q, scaled_t).value;
        residual = std::max(residual, std::abs(lhs - rhs));
    }
    return residual;
}

std::complex<double> empirical_cf(const LevySpec& spec, const IntensityKernel& kernel,
                                  const ChaosParams& params, const std::vector<double>& qs,
                                  const std::vector<double>& ts, std::size_t n_samples,
                                  std::uint64_t seed) {
    if (qs.size() != ts.size())
        throw std::invalid_argument("empirical_cf: qs/ts size mismatch");
    // deduplicate probe times into a strictly increasing grid
    std::vector<double> grid(ts);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    std::vector<std::size_t> index(ts.size());
    for (std::size_t j = 0; j < ts.size(); ++j)
        index[j] = std::lower_bound(grid.begin(), grid.end(), ts[j]) - grid.begin();

    FieldSampler sampler(spec, kernel, params, grid);
    RngStream rng(seed, 0);
    CompensatedSum re, im;
    for (std::size_t i = 0; i < n_samples; ++i) {
        const FieldGrid field = sampler.sample(rng);
        double phase = 0.0;
        for (std::size_t j = 0; j < qs.size(); ++j) phase += qs[j] * field.values[index[j]];
        re.add(std::cos(phase));
        im.add(std::sin(phase));
    }
    return {re.value() / double(n_samples), im.value() / double(n_samples)};
}

}  // namespace idmc
