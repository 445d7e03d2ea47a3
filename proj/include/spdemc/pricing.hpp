#pragma once

#include <vector>

#include "spdemc/credit.hpp"
#include "spdemc/fd_solver.hpp"
#include "spdemc/mlmc.hpp"

namespace spdemc {

/// Level hierarchy and contract for SPDE tranche pricing.
struct SpdePricingSetup {
    ModelParams params;
    double x0 = 5.0;
    GridSpec base_grid{0.0, 1.6, 10, 0.25};  // level 0
    Monitoring::Kind monitoring = Monitoring::Kind::continuous;
    Scheme scheme = Scheme::tridiagonal;
    PaymentSchedule schedule;
    TrancheSpec tranche;
    /// Express payoffs as fractions of the initial tranche notional.
    bool normalise = true;
    int max_level = 8;
};

/// Payoff: discounted protection leg of one tranche from the SPDE loss at the
/// payment dates. Auxiliary outputs: the tranche notional P(L_{T_i}) for
/// i = 0..n, so one run also yields the expected notionals behind the spread.
/// Cost unit: one timestep on the level-0 grid.
class SpdeTranchePayoff final : public PathFunctional {
public:
    explicit SpdeTranchePayoff(SpdePricingSetup setup);

    std::size_t steps(int level) const override;
    double timestep(int level) const override;
    std::size_t aux_count() const override { return setup_.schedule.dates.size() + 1; }
    double evaluate(int level, const BrownianPath& path, std::span<double> out) const override;

    /// Loss (1 - R)(1 - mass) at T_0..T_n for one path.
    std::vector<double> losses(int level, const BrownianPath& path, double* cost = nullptr) const;

    const SpdePricingSetup& setup() const noexcept { return setup_; }

private:
    struct LevelData {
        GridSpec grid;
        SolverState initial;
        StepSchedule schedule;
    };
    const LevelData& level_data(int level) const;

    SpdePricingSetup setup_;
    std::vector<LevelData> levels_;
    double unit_updates_;
};

}  // namespace spdemc
