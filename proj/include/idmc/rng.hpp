#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace idmc {

/// Counter-based derivation of independent RNG streams.
///
/// Stream i of master seed s is obtained by hashing (s, i) through
/// splitmix64, so any worker can construct its stream without touching
/// shared state. The draws themselves come from xoshiro256++, seeded
/// from the hash. Results are reproducible bit for bit for a fixed
/// (seed, stream) pair on any platform.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t x = splitmix64(seed + 0x9e3779b97f4a7c15ULL * (stream + 1));
        for (auto& s : state_) {
            x = splitmix64(x);
            s = x;
        }
        // xoshiro must not start from the all-zero state
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform in (0,1); never returns 0 or 1 exactly.
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Standard normal via Box-Muller. Consumes exactly two uniforms per
    /// draw (no caching), which keeps the stream position predictable.
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    /// Poisson count by Knuth's multiplicative method, split into chunks
    /// of mean <= 500 so the running product never underflows.
    std::uint64_t poisson(double mean) {
        if (mean < 0.0) throw std::invalid_argument("poisson: negative mean");
        std::uint64_t total = 0;
        while (mean > 500.0) {
            total += poisson_small(500.0);
            mean -= 500.0;
        }
        return total + poisson_small(mean);
    }

private:
    std::uint64_t poisson_small(double mean) {
        if (mean == 0.0) return 0;
        const double limit = std::exp(-mean);
        double prod = 1.0;
        std::uint64_t k = 0;
        do {
            prod *= uniform();
            ++k;
        } while (prod > limit);
        return k - 1;
    }

    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
};

/// Discrete sampler over weights w_j (not necessarily normalized).
class DiscreteSampler {
public:
    explicit DiscreteSampler(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) {
            if (w < 0.0) throw std::invalid_argument("DiscreteSampler: negative weight");
            total += w;
            cumulative_.push_back(total);
        }
        if (total <= 0.0) throw std::invalid_argument("DiscreteSampler: zero total weight");
        for (auto& c : cumulative_) c /= total;
        cumulative_.back() = 1.0;
    }

    std::size_t draw(RngStream& rng) const {
        const double u = rng.uniform();
        std::size_t lo = 0, hi = cumulative_.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (cumulative_[mid] < u) lo = mid + 1; else hi = mid;
        }
        return lo;
    }

private:
    std::vector<double> cumulative_;
};

/// Neumaier compensated accumulator. Summation order is fixed by the
/// caller, so reductions are reproducible.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace idmc
