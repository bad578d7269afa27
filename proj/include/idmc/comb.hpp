#pragma once

#include <cstdint>
#include <vector>

#include "idmc/kernel.hpp"
#include "idmc/levy_spec.hpp"

namespace idmc {

/// Exact binomial coefficient. Values are exact in int64 up to n = 66;
/// larger n throws.
std::int64_t binomial(int n, int k);

/// Query for counting increasing k-tuples from {1..n} that contain a and b
/// at ordinal distance l.
struct TupleQuery {
    int n, k, a, b, l;
};

/// Closed form binom(n-1-(b-a), k-1-l) * binom(b-a-1, l-1); out-of-range
/// binomials count as zero.
std::int64_t tuple_count(const TupleQuery& query);

/// Brute-force enumeration of the same count, for cross-checking.
std::int64_t tuple_count_enumerated(const TupleQuery& query);

/// sum_{k=0}^{x} (-1)^k binom(x,k); identically zero for x >= 1.
std::int64_t alternating_sum_zero(int x);

/// Vandermonde convolution sum_i binom(a-1,i-1) binom(n-b,k-i-l), which
/// collapses to binom(n-1-(b-a), k-1-l).
std::int64_t vandermonde_convolution(int n, int k, int a, int b, int l);

struct CollapseResult {
    double lhs;
    double rhs;
    bool equal;
};

/// Alternating-binomial collapse of the pair coefficients:
///   sum_{k=0}^{n-2} (-1)^k binom(n-2,k) d(n-k-1)
/// equals sigma^2 + int (e^u-1)^2 dM for n = 2 and int (e^u-1)^n dM for
/// n > 2. Compared to 1e-12.
CollapseResult blemma_coefficient_collapse(const LevySpec& spec, int n);

/// Residual of the pair-coefficient decomposition
///   sum_{k<p} d(p-k) g(t_p,t_k) =
///     sigma^2 sum_{k<p} g + sum_{k=2}^n m_k sum_{i<j, j-i>=k-1}
///         binom(j-i-1, k-2) g(t_i,t_j).
double dsum_decomposition_check(const LevySpec& spec, const std::vector<double>& ts,
                                const IntensityKernel& kernel);

/// |sum_{p,k} alpha_{p,k} - phi(sum q_j)| from the joint CF coefficient
/// table.
double alpha_sum_check(const LevySpec& spec, const std::vector<double>& qs);

}  // namespace idmc
