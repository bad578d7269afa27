#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "idmc/field_sim.hpp"

namespace idmc {

/// Knobs shared by all Monte Carlo drivers. Results depend only on
/// (seed, n_samples, chunk_size), never on the worker count: chunk c always
/// consumes stream (seed, c) and partial results merge in chunk order.
struct McConfig {
    std::size_t n_samples = 10000;
    std::uint64_t seed = 1;
    int workers = 0;              // 0 = hardware concurrency
    std::size_t chunk_size = 256;
    std::size_t grid_points = 4096;
};

/// Evaluate per-sample statistics over independent field draws. The
/// statistic fills one row (any fixed width) per sample; rows come back in
/// sample order.
std::vector<std::vector<double>> mc_table(
    const FieldSampler& sampler, const McConfig& config,
    const std::function<void(const FieldGrid&, std::vector<double>&)>& statistic);

/// Mean and standard error of one column of an mc_table result, reduced
/// with fixed-order compensated summation.
struct ColumnStats {
    double mean;
    double stderr;
};
ColumnStats column_stats(const std::vector<std::vector<double>>& rows, std::size_t column);

}  // namespace idmc
