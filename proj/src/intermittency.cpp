#include "idmc/intermittency.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "idmc/quadrature.hpp"
#include "idmc/selberg.hpp"

namespace idmc {

namespace {

double factorial(int n) {
    double out = 1.0;
    for (int j = 2; j <= n; ++j) out *= j;
    return out;
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

FirstOrderResult first_order_term(const LevySpec& spec, const IntensityKernel& kernel,
                                  const TestFunction& F, int k_max) {
    if (k_max < 2) throw std::invalid_argument("first_order_term: k_max must be >= 2");
    FirstOrderResult out;
    const double i2 = kernel.simplex_g_integral(2);
    if (spec.sigma2() > 0.0) {
        ExpansionTerm t;
        t.kind = "gaussian";
        t.k = 2;
        t.coefficient = F.derivative_at_one(2);
        t.spectral_factor = spec.sigma2();
        t.geometric_factor = i2;
        t.value = t.coefficient * t.spectral_factor * t.geometric_factor;
        out.terms.push_back(t);
        out.total += t.value;
    }
    for (int k = 2; k <= k_max && spec.has_jump_part(); ++k) {
        ExpansionTerm t;
        t.kind = "spectral";
        t.k = k;
        t.coefficient = F.derivative_at_one(k);
        t.spectral_factor = spectral_moment(spec, k, SpectralMomentKind::Expm1Power);
        t.geometric_factor = kernel.simplex_g_integral(k);
        t.value = t.coefficient * t.spectral_factor * t.geometric_factor;
        out.terms.push_back(t);
        out.total += t.value;
    }
    // Tail estimate from I_k <= I_2/(k-2)! and the remainder of the
    // exponential series of each atom:
    //   sum_{k>K} |b|^k/(k-2)! <= b^2 |b|^{K-1} e^{|b|} / (K-1)!.
    if (spec.has_jump_part()) {
        const double c_f = std::max(std::abs(F.derivative_at_one(k_max)),
                                    std::abs(F.derivative_at_one(std::max(2, k_max - 1))));
        double tail = 0.0;
        for (const auto& a : spec.atoms()) {
            const double b = std::abs(std::expm1(a.location));
            tail += a.mass * b * b * std::pow(b, k_max - 1) / factorial(k_max - 1) *
                    std::exp(b);
        }
        out.truncation_bound = c_f * i2 * tail;
    }
    return out;
}

namespace {

/// int_{I1} dx int_{I2} dy g(x,y) (b1-x)^{k-1}/(k-1)! (y-a2)^{l-1}/(l-1)!
/// for k, l >= 1 (the cross g-integral of the two-interval expansion).
double cross_g_integral(const IntensityKernel& kernel, Interval i1, Interval i2, int k,
                        int l) {
    auto inner = [&](double x) {
        const AdaptiveResult r = integrate_adaptive(
            [&](double y) { return kernel.g(x, y) * std::pow(y - i2.a, l - 1); }, i2.a,
            i2.b, 1e-11);
        return r.value * std::pow(i1.b - x, k - 1);
    };
    const AdaptiveResult outer = integrate_adaptive(inner, i1.a, i1.b, 1e-10);
    return outer.value / (factorial(k - 1) * factorial(l - 1));
}

}  // namespace

FirstOrderResult first_order_two_intervals(const LevySpec& spec,
                                           const IntensityKernel& kernel,
                                           const TestFunction& F1, const TestFunction& F2,
                                           Interval i1, Interval i2, int k_max) {
    if (!(i1.a < i1.b && i2.a < i2.b))
        throw std::invalid_argument("first_order_two_intervals: empty interval");
    if (!(i1.b <= i2.a))
        throw std::invalid_argument("first_order_two_intervals: intervals must be ordered/disjoint");
    if (k_max < 2) throw std::invalid_argument("first_order_two_intervals: k_max >= 2");
    FirstOrderResult out;
    const double w1 = i1.width(), w2 = i2.width();

    if (spec.sigma2() > 0.0) {
        ExpansionTerm g11;
        g11.kind = "gaussian-I1";
        g11.k = 2;
        g11.coefficient = F1.derivative_at(2, w1) * F2(w2);
        g11.spectral_factor = spec.sigma2();
        g11.geometric_factor = kernel.simplex_g_integral_on_width(2, w1);
        g11.value = g11.coefficient * g11.spectral_factor * g11.geometric_factor;
        out.terms.push_back(g11);

        ExpansionTerm g22 = g11;
        g22.kind = "gaussian-I2";
        g22.coefficient = F1(w1) * F2.derivative_at(2, w2);
        g22.geometric_factor = kernel.simplex_g_integral_on_width(2, w2);
        g22.value = g22.coefficient * g22.spectral_factor * g22.geometric_factor;
        out.terms.push_back(g22);

        ExpansionTerm cross;
        cross.kind = "gaussian-cross";
        cross.k = 1;
        cross.l = 1;
        cross.coefficient = F1.derivative_at(1, w1) * F2.derivative_at(1, w2);
        cross.spectral_factor = spec.sigma2();
        cross.geometric_factor = cross_g_integral(kernel, i1, i2, 1, 1);
        cross.value = cross.coefficient * cross.spectral_factor * cross.geometric_factor;
        out.terms.push_back(cross);
    }

    if (spec.has_jump_part()) {
        for (int total = 2; total <= k_max; ++total) {
            const double mk = spectral_moment(spec, total, SpectralMomentKind::Expm1Power);
            for (int k = 0; k <= total; ++k) {
                const int l = total - k;
                ExpansionTerm t;
                t.kind = "spectral";
                t.k = k;
                t.l = l;
                t.coefficient = F1.derivative_at(k, w1) * F2.derivative_at(l, w2);
                t.spectral_factor = mk;
                if (k == 0)
                    t.geometric_factor = kernel.simplex_g_integral_on_width(l, w2);
                else if (l == 0)
                    t.geometric_factor = kernel.simplex_g_integral_on_width(k, w1);
                else
                    t.geometric_factor = cross_g_integral(kernel, i1, i2, k, l);
                t.value = t.coefficient * t.spectral_factor * t.geometric_factor;
                out.terms.push_back(t);
            }
        }
    }
    for (const auto& t : out.terms) out.total += t.value;
    return out;
}

double covariance_slope(const LevySpec& spec, double mu, double t,
                        const IntensityKernel& kernel) {
    if (!(t > 0.0 && t < 1.0))
        throw std::invalid_argument("covariance_slope: t must be in (0,1)");
    return mu * kernel.g(0.0, t) *
           (spec.sigma2() + spectral_moment(spec, 2, SpectralMomentKind::USquare));
}

BLemmaResult blemma_slope_check(const LevySpec& spec, const IntensityKernel& kernel,
                                const BLemmaProbe& probe) {
    const int n = static_cast<int>(probe.s_list.size());
    if (n < 2) throw std::invalid_argument("blemma_slope_check: need n >= 2 points");
    if (n > 20) throw std::invalid_argument("blemma_slope_check: subset sweep capped at n = 20");
    for (int i = 1; i < n; ++i)
        if (!(probe.s_list[i] > probe.s_list[i - 1]))
            throw std::invalid_argument("blemma_slope_check: points must be distinct and sorted");
    if (probe.delta_list.size() < 2)
        throw std::invalid_argument("blemma_slope_check: need at least two deltas");
    if (probe.level < 1.0) throw std::invalid_argument("blemma_slope_check: L >= 1");

    const double shift = std::log(probe.level);
    auto rho_l = [&](double u) { return shift + kernel.rho(u, probe.epsilon); };

    // c_S = sum over pairs inside the subset of d(ordinal distance) rho_L;
    // E prod_j e^{f+omega(s_j)} = prod e^{f} exp(delta c_S).
    auto expectation = [&](double delta) {
        double total = 0.0;
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            std::vector<int> idx;
            for (int j = 0; j < n; ++j)
                if (mask & (1u << j)) idx.push_back(j);
            double c = 0.0;
            for (std::size_t a = 0; a < idx.size(); ++a)
                for (std::size_t b = a + 1; b < idx.size(); ++b)
                    c += pair_coefficient(spec, static_cast<int>(b - a)) *
                         rho_l(probe.s_list[idx[b]] - probe.s_list[idx[a]]);
            double f_product = 1.0;
            if (probe.frak_f)
                for (int j : idx) f_product *= std::exp(probe.frak_f(delta, probe.s_list[j]));
            const double sign = ((n - idx.size()) % 2 == 0) ? 1.0 : -1.0;
            total += sign * f_product * std::exp(delta * c);
        }
        return total;
    };
    auto remainder = [&](double delta) {
        double f_term = 0.0;
        if (probe.frak_f) {
            f_term = 1.0;
            for (double s : probe.s_list) f_term *= std::expm1(probe.frak_f(delta, s));
        }
        return expectation(delta) - f_term;
    };

    // Richardson on the two smallest deltas of the secant slope R(delta)/delta.
    std::vector<double> deltas(probe.delta_list);
    std::sort(deltas.begin(), deltas.end());
    const double db = deltas[0], da = deltas[1];
    const double fb = remainder(db) / db, fa = remainder(da) / da;
    const double ratio = da / db;
    const double slope = (ratio * fb - fa) / (ratio - 1.0);

    const double span = probe.s_list.back() - probe.s_list.front();
    const double factor =
        (n == 2) ? spec.sigma2() + spectral_moment(spec, 2, SpectralMomentKind::Expm1Power)
                 : spectral_moment(spec, n, SpectralMomentKind::Expm1Power);
    const double predicted = rho_l(span) * factor;
    return {slope, predicted, std::abs(slope - predicted)};
}

// ---------------------------------------------------------------------------
// Integral identity of the moment differentiation rule

namespace {

/// J = int int_{0<a<b<1} e^{omega(a)+omega(b)} g(a,b)
///       E(0,a)^{pre} E(a,b)^{mid} E(b,1)^{post} da db / (pre! mid! post!),
/// where E is the primitive of e^omega. In gap form (x = b-a) the g factor
/// may be log-singular at x = 0; the outer x-integral is adaptive, the
/// inner a-integral is smooth Gauss.
double pair_conditioned_integral(const ChebyshevAntiderivative& E,
                                 const std::function<double(double)>& omega,
                                 const std::function<double(double, double)>& g, int pre,
                                 int mid, int post) {
    const double norm = factorial(pre) * factorial(mid) * factorial(post);
    auto inner = [&](double x) {
        return integrate_gauss(
            [&](double a) {
                const double b = a + x;
                double v = std::exp(omega(a) + omega(b)) * g(a, b);
                if (pre > 0) v *= std::pow(E.primitive(a), pre);
                if (mid > 0) v *= std::pow(E.between(a, b), mid);
                if (post > 0) v *= std::pow(E.between(b, 1.0), post);
                return v;
            },
            0.0, 1.0 - x, 32);
    };
    const AdaptiveResult r = integrate_adaptive(inner, 0.0, 1.0, 1e-10, 44);
    return r.value / norm;
}

}  // namespace

IdentityCheckResult integral_identity_check(int n, int k,
                                            const std::function<double(double)>& omega,
                                            const std::function<double(double, double)>& g) {
    if (!(2 <= k && k <= n))
        throw std::invalid_argument("integral_identity_check: need 2 <= k <= n");
    const ChebyshevAntiderivative E([&](double s) { return std::exp(omega(s)); }, 0.0, 1.0,
                                    128);
    const double mass_total = E.between(0.0, 1.0);

    // LHS: (1/(n-k)!) (int e^omega)^{n-k} * int_{simplex_k} e^{sum} g(s_1,s_k)
    const double p_k = pair_conditioned_integral(E, omega, g, 0, k - 2, 0);
    const double lhs = std::pow(mass_total, n - k) / factorial(n - k) * p_k;

    // RHS: sum over pairs (i,j) with j-i >= k-1 of binom(j-i-1,k-2) J_{ij}
    double rhs = 0.0;
    for (int i = 1; i <= n; ++i) {
        for (int j = i + k - 1; j <= n; ++j) {
            double binom = 1.0;
            for (int m = 0; m < k - 2; ++m)
                binom *= double(j - i - 1 - m) / double(m + 1);
            rhs += binom * pair_conditioned_integral(E, omega, g, i - 1, j - i - 1, n - j);
        }
    }
    return {lhs, rhs, std::abs(lhs - rhs)};
}

double rule_term_coefficient(int n, int k, int l, const std::vector<double>& ts,
                             const IntensityKernel& kernel) {
    if (n < 0 || k < 0 || l < 0 || k > n || k + l < 2)
        throw std::invalid_argument("rule_term_coefficient: need 0 <= k <= n, k + l >= 2");
    if (static_cast<int>(ts.size()) != n + l)
        throw std::invalid_argument("rule_term_coefficient: ts must hold n + l points");
    for (int block_start : {0, n})
        for (int i = block_start + 1; i < (block_start == 0 ? n : n + l); ++i)
            if (ts[i] < ts[i - 1])
                throw std::invalid_argument("rule_term_coefficient: blocks must be sorted");

    if (k == 0) return kernel.g(ts[n], ts[n + l - 1]);

    // enumerate increasing k-subsets of {0..n-1}
    std::vector<int> tuple(k);
    for (int i = 0; i < k; ++i) tuple[i] = i;
    double sum = 0.0;
    while (true) {
        double lo = ts[tuple[0]];
        double hi = ts[tuple[k - 1]];
        if (l > 0) {
            lo = std::min(lo, ts[n]);
            hi = std::max(hi, ts[n + l - 1]);
        }
        sum += kernel.g(lo, hi);
        int i = k - 1;
        while (i >= 0 && tuple[i] == n - k + i) --i;
        if (i < 0) break;
        ++tuple[i];
        for (int j = i + 1; j < k; ++j) tuple[j] = tuple[j - 1] + 1;
    }
    return sum;
}

MCEstimate rhs_first_derivative_mc(const LevySpec& spec, const IntensityKernel& kernel,
                                   const ChaosParams& params, const TestFunction& F,
                                   int k_max, const McConfig& config) {
    if (k_max < 2) throw std::invalid_argument("rhs_first_derivative_mc: k_max >= 2");
    const auto t0 = std::chrono::steady_clock::now();

    // 2D nodes over {0 < a < b < 1} in (a, x = b-a) form; the x-marginal is
    // graded geometrically toward 0 where g is singular.
    struct Node { double a, b; double weight_g; };
    std::vector<Node> nodes;
    {
        const GaussRule& gx = gauss_legendre(8);
        const GaussRule& ga = gauss_legendre(12);
        double hi = 1.0;
        while (hi > 1e-6) {
            const double lo = hi * 0.25;
            for (int ix = 0; ix < 8; ++ix) {
                const double x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gx.nodes[ix];
                const double wx = 0.5 * (hi - lo) * gx.weights[ix];
                for (int ia = 0; ia < 12; ++ia) {
                    const double a = 0.5 * (1.0 - x) * (1.0 + ga.nodes[ia]);
                    const double wa = 0.5 * (1.0 - x) * ga.weights[ia];
                    nodes.push_back({a, a + x, wx * wa * kernel.g(0.0, x)});
                }
            }
            hi = lo;
        }
    }

    std::vector<double> coords;
    for (const auto& nd : nodes) {
        coords.push_back(nd.a);
        coords.push_back(nd.b);
    }
    const auto grid = grid_for(params, config.grid_points, coords);
    std::vector<std::size_t> ia(nodes.size()), ib(nodes.size());
    for (std::size_t m = 0; m < nodes.size(); ++m) {
        ia[m] = std::lower_bound(grid.begin(), grid.end(), nodes[m].a - 1e-12) - grid.begin();
        ib[m] = std::lower_bound(grid.begin(), grid.end(), nodes[m].b - 1e-12) - grid.begin();
    }

    std::vector<double> mk(k_max + 1, 0.0);
    for (int k = 2; k <= k_max; ++k)
        mk[k] = spectral_moment(spec, k, SpectralMomentKind::Expm1Power);

    FieldSampler sampler(spec, kernel, params, grid, std::max<std::size_t>(4096, grid.size()));
    const auto rows = mc_table(sampler, config, [&](const FieldGrid& f, std::vector<double>& row) {
        const auto cum = cumulative_mass(f);
        const double mass = cum.back();
        std::vector<double> fk(k_max + 1);
        for (int k = 2; k <= k_max; ++k) fk[k] = F.derivative_at(k, mass);
        double total = 0.0;
        for (std::size_t m = 0; m < nodes.size(); ++m) {
            const double pair_weight =
                nodes[m].weight_g * std::exp(f.values[ia[m]] + f.values[ib[m]]);
            double bracket = spec.sigma2() * fk[2];
            double interior = 1.0;  // mass(a,b)^{k-2}/(k-2)!
            const double mab = cum[ib[m]] - cum[ia[m]];
            for (int k = 2; k <= k_max; ++k) {
                bracket += mk[k] * fk[k] * interior;
                interior *= mab / double(k - 1);
            }
            total += pair_weight * bracket;
        }
        row.push_back(total);
    });
    const ColumnStats s = column_stats(rows, 0);
    return {s.mean, s.stderr, rows.size(), config.seed, elapsed_since(t0)};
}

}  // namespace idmc
