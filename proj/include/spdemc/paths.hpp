#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace spdemc {

/// Identifies one Monte Carlo sample: the triple fixes its finest path.
struct SeedSpec {
    std::uint64_t experiment_seed = 0;
    int level = 0;
    std::uint64_t sample_index = 0;
};

/// Standard normal increments of the market driver: dM_n = sqrt(k) * z[n].
struct BrownianPath {
    int level = 0;
    double k = 0.0;
    std::vector<double> z;

    std::size_t n_steps() const noexcept { return z.size(); }
    /// M_T, the Brownian value at the end of the path.
    double endpoint() const noexcept;
};

/// Key of the market stream for a sample; other modules derive their own
/// streams from the same triple with a different domain tag.
std::uint64_t market_stream_key(const SeedSpec& seed) noexcept;

BrownianPath generate_fine_path(const SeedSpec& seed, std::size_t n_steps, double k);

/// Coarse path whose increments are the block sums of the fine increments.
BrownianPath coarsen_path(const BrownianPath& fine, int time_ratio);

}  // namespace spdemc
