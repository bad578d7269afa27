#include "idmc/parallel.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace idmc {

std::vector<std::vector<double>> mc_table(
    const FieldSampler& sampler, const McConfig& config,
    const std::function<void(const FieldGrid&, std::vector<double>&)>& statistic) {
    const std::size_t n = config.n_samples;
    if (n == 0) return {};
    const std::size_t chunk = std::max<std::size_t>(1, config.chunk_size);
    const std::size_t n_chunks = (n + chunk - 1) / chunk;
    std::vector<std::vector<double>> rows(n);

    std::atomic<std::size_t> next_chunk{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t c = next_chunk.fetch_add(1);
            if (c >= n_chunks) return;
            RngStream rng(config.seed, c);
            const std::size_t begin = c * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            for (std::size_t i = begin; i < end; ++i) {
                const FieldGrid field = sampler.sample(rng);
                statistic(field, rows[i]);
            }
        }
    };

    int n_workers = config.workers > 0 ? config.workers
                                       : static_cast<int>(std::thread::hardware_concurrency());
    if (n_workers < 1) n_workers = 1;
    if (static_cast<std::size_t>(n_workers) > n_chunks)
        n_workers = static_cast<int>(n_chunks);
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return rows;
}

ColumnStats column_stats(const std::vector<std::vector<double>>& rows, std::size_t column) {
    const std::size_t n = rows.size();
    if (n < 2) throw std::invalid_argument("column_stats: need at least 2 samples");
    CompensatedSum sum;
    for (const auto& r : rows) sum.add(r.at(column));
    const double mean = sum.value() / double(n);
    CompensatedSum sq;
    for (const auto& r : rows) {
        const double d = r.at(column) - mean;
        sq.add(d * d);
    }
    const double variance = sq.value() / double(n - 1);
    return {mean, std::sqrt(variance / double(n))};
}

}  // namespace idmc
