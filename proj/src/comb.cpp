#include "idmc/comb.hpp"

#include <cmath>
#include <stdexcept>

#include "idmc/field_sim.hpp"

namespace idmc {

namespace {
// Pascal triangle in int64; row 66 is the last without overflow.
constexpr int kMaxN = 66;

const std::vector<std::vector<std::int64_t>>& pascal() {
    static const auto table = [] {
        std::vector<std::vector<std::int64_t>> t(kMaxN + 1);
        for (int n = 0; n <= kMaxN; ++n) {
            t[n].resize(n + 1);
            t[n][0] = t[n][n] = 1;
            for (int k = 1; k < n; ++k) t[n][k] = t[n - 1][k - 1] + t[n - 1][k];
        }
        return t;
    }();
    return table;
}
}  // namespace

std::int64_t binomial(int n, int k) {
    if (n < 0 || k < 0 || k > n) return 0;
    if (n > kMaxN) throw std::overflow_error("binomial: n exceeds exact int64 range");
    return pascal()[n][k];
}

std::int64_t tuple_count(const TupleQuery& q) {
    return binomial(q.n - 1 - (q.b - q.a), q.k - 1 - q.l) * binomial(q.b - q.a - 1, q.l - 1);
}

std::int64_t tuple_count_enumerated(const TupleQuery& q) {
    // Walk all increasing k-subsets of {1..n} and count those containing
    // both a and b with exactly l-1 elements strictly between them.
    std::int64_t count = 0;
    std::vector<int> tuple(q.k);
    // first k-subset
    for (int i = 0; i < q.k; ++i) tuple[i] = i + 1;
    while (true) {
        int pos_a = -1, pos_b = -1;
        for (int i = 0; i < q.k; ++i) {
            if (tuple[i] == q.a) pos_a = i;
            if (tuple[i] == q.b) pos_b = i;
        }
        if (pos_a >= 0 && pos_b >= 0 && pos_b - pos_a == q.l) ++count;
        // next subset in lexicographic order
        int i = q.k - 1;
        while (i >= 0 && tuple[i] == q.n - q.k + i + 1) --i;
        if (i < 0) break;
        ++tuple[i];
        for (int j = i + 1; j < q.k; ++j) tuple[j] = tuple[j - 1] + 1;
    }
    return count;
}

std::int64_t alternating_sum_zero(int x) {
    if (x < 0) throw std::invalid_argument("alternating_sum_zero: x must be >= 0");
    std::int64_t sum = 0;
    for (int k = 0; k <= x; ++k) {
        const std::int64_t term = binomial(x, k);
        sum += (k % 2 == 0) ? term : -term;
    }
    return sum;
}

std::int64_t vandermonde_convolution(int n, int k, int a, int b, int l) {
    std::int64_t sum = 0;
    for (int i = 1; i <= k; ++i)
        sum += binomial(a - 1, i - 1) * binomial(n - b, k - i - l);
    return sum;
}

CollapseResult blemma_coefficient_collapse(const LevySpec& spec, int n) {
    if (n < 2) throw std::invalid_argument("blemma_coefficient_collapse: n must be >= 2");
    double lhs = 0.0;
    for (int k = 0; k <= n - 2; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        lhs += sign * static_cast<double>(binomial(n - 2, k)) * pair_coefficient(spec, n - k - 1);
    }
    const double rhs =
        (n == 2) ? spec.sigma2() + spectral_moment(spec, 2, SpectralMomentKind::Expm1Power)
                 : spectral_moment(spec, n, SpectralMomentKind::Expm1Power);
    return {lhs, rhs, std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs))};
}

double dsum_decomposition_check(const LevySpec& spec, const std::vector<double>& ts,
                                const IntensityKernel& kernel) {
    const int n = static_cast<int>(ts.size());
    if (n < 2) throw std::invalid_argument("dsum_decomposition_check: need >= 2 points");
    double lhs = 0.0;
    for (int k = 0; k < n; ++k)
        for (int p = k + 1; p < n; ++p)
            lhs += pair_coefficient(spec, p - k) * kernel.g(ts[p], ts[k]);

    double rhs = 0.0;
    {
        double gsum = 0.0;
        for (int k = 0; k < n; ++k)
            for (int p = k + 1; p < n; ++p) gsum += kernel.g(ts[p], ts[k]);
        rhs += spec.sigma2() * gsum;
    }
    for (int k = 2; k <= n; ++k) {
        const double mk = spectral_moment(spec, k, SpectralMomentKind::Expm1Power);
        double gsum = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (j - i >= k - 1)
                    gsum += static_cast<double>(binomial(j - i - 1, k - 2)) *
                            kernel.g(ts[i], ts[j]);
        rhs += mk * gsum;
    }
    return std::abs(lhs - rhs);
}

double alpha_sum_check(const LevySpec& spec, const std::vector<double>& qs) {
    if (qs.empty()) return 0.0;
    std::vector<double> ts(qs.size());
    for (std::size_t i = 0; i < ts.size(); ++i)
        ts[i] = (i + 1.0) / (ts.size() + 1.0);
    const ChaosParams params{0.5, 0.25};
    const auto cf = joint_cf_analytic(spec, IntensityKernel::canonical(), params, qs, ts);
    double total_q = 0.0;
    for (double q : qs) total_q += q;
    return std::abs(cf.alpha_sum() - levy_exponent(spec, total_q));
}

}  // namespace idmc
