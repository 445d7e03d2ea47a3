#include "spdemc/paths.hpp"

#include <cmath>
#include <numeric>

#include "spdemc/error.hpp"
#include "spdemc/rng.hpp"

namespace spdemc {

double BrownianPath::endpoint() const noexcept {
    return std::sqrt(k) * std::accumulate(z.begin(), z.end(), 0.0);
}

std::uint64_t market_stream_key(const SeedSpec& seed) noexcept {
    return mix_key({static_cast<std::uint64_t>(StreamDomain::market), seed.experiment_seed,
                    static_cast<std::uint64_t>(seed.level), seed.sample_index});
}

BrownianPath generate_fine_path(const SeedSpec& seed, std::size_t n_steps, double k) {
    require(n_steps >= 1, ErrorKind::invalid_argument, "path needs at least one step");
    require(k > 0.0 && std::isfinite(k), ErrorKind::invalid_argument, "timestep must be positive");
    BrownianPath path{seed.level, k, std::vector<double>(n_steps)};
    NormalStream stream(market_stream_key(seed));
    stream.fill(path.z);
    return path;
}

BrownianPath coarsen_path(const BrownianPath& fine, int time_ratio) {
    require(time_ratio >= 1, ErrorKind::invalid_argument, "time ratio must be positive");
    const auto ratio = static_cast<std::size_t>(time_ratio);
    require(fine.n_steps() % ratio == 0, ErrorKind::invalid_argument,
            "time ratio does not divide the number of fine steps");
    BrownianPath coarse{fine.level - 1, fine.k * time_ratio,
                        std::vector<double>(fine.n_steps() / ratio)};
    const double scale = 1.0 / std::sqrt(static_cast<double>(time_ratio));
    for (std::size_t n = 0; n < coarse.z.size(); ++n) {
        double block = 0.0;
        for (std::size_t m = 0; m < ratio; ++m) block += fine.z[n * ratio + m];
        coarse.z[n] = block * scale;
    }
    return coarse;
}

}  // namespace spdemc
