#pragma once

#include <cstddef>
#include <vector>

#include "spdemc/credit.hpp"
#include "spdemc/fd_solver.hpp"
#include "spdemc/mlmc.hpp"
#include "spdemc/paths.hpp"

namespace spdemc {

/// Exchangeable basket: every firm starts at distance-to-default x0 and
/// follows dX = mu dt + sqrt(1-rho) dW^i + sqrt(rho) dM until it hits 0.
struct BasketSpec {
    std::size_t firms = 125;
    double x0 = 5.0;
    ModelParams params;

    void validate() const;
};

/// Fraction of absorbed firms at each observation date.
struct LossPath {
    std::vector<double> times;
    std::vector<double> loss;
};

/// Monitoring::continuous checks absorption after every step; discrete
/// monitoring checks only at the listed dates (no Brownian-bridge correction).
LossPath simulate_basket(const BasketSpec& spec, double k, const BrownianPath& common_path,
                         const SeedSpec& seed, const Monitoring& monitoring,
                         std::span<const double> observation_dates);

struct BasketPricingSetup {
    BasketSpec basket;
    double base_timestep = 0.25;  // level l uses base_timestep / 2^l
    Monitoring::Kind monitoring = Monitoring::Kind::discrete;
    PaymentSchedule schedule;
    TrancheSpec tranche;
    bool normalise = true;
};

/// Timestep-refinement levels for the particle system. Fine and coarse
/// firms share both the market and idiosyncratic Brownian paths (coarse
/// increments are pairwise sums). Cost unit: one firm-timestep.
class BasketTrancheSampler final : public LevelSampler {
public:
    explicit BasketTrancheSampler(BasketPricingSetup setup);

    std::size_t aux_count() const override { return setup_.schedule.dates.size() + 1; }
    LevelSample sample(int level, const SeedSpec& seed) const override;

    const BasketPricingSetup& setup() const noexcept { return setup_; }

private:
    BasketPricingSetup setup_;
};

MlmcResult sde_timestep_mlmc(const BasketPricingSetup& setup, double epsilon,
                             const MlmcConfig& config);

}  // namespace spdemc
