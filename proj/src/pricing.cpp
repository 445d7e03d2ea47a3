#include "spdemc/pricing.hpp"

#include <cmath>

#include "spdemc/error.hpp"

namespace spdemc {

SpdeTranchePayoff::SpdeTranchePayoff(SpdePricingSetup setup) : setup_(std::move(setup)) {
    setup_.params.validate();
    setup_.tranche.validate();
    setup_.schedule.validate();
    if (setup_.monitoring == Monitoring::Kind::discrete && !setup_.base_grid.zero_node())
        fail(ErrorKind::configuration, "discrete monitoring needs a grid node at x = 0");
    const double maturity = setup_.schedule.dates.back();
    std::vector<double> observation{0.0};
    observation.insert(observation.end(), setup_.schedule.dates.begin(), setup_.schedule.dates.end());
    const Monitoring monitoring = setup_.monitoring == Monitoring::Kind::discrete
                                      ? Monitoring::discrete(setup_.schedule.dates)
                                      : Monitoring::continuous();
    for (int l = 0; l <= setup_.max_level; ++l) {
        GridSpec grid = setup_.base_grid.refined(l);
        const std::size_t n = step_index(maturity, grid.k());
        StepSchedule schedule = StepSchedule::build(grid.k(), n, monitoring, observation);
        SolverState initial = project_initial(InitialCondition::point_mass(setup_.x0), grid);
        levels_.push_back({grid, std::move(initial), std::move(schedule)});
    }
    unit_updates_ = static_cast<double>(setup_.base_grid.interior_count());
}

const SpdeTranchePayoff::LevelData& SpdeTranchePayoff::level_data(int level) const {
    if (level < 0 || level > setup_.max_level)
        fail(ErrorKind::invalid_argument, "level outside the configured hierarchy");
    return levels_[static_cast<std::size_t>(level)];
}

std::size_t SpdeTranchePayoff::steps(int level) const { return level_data(level).schedule.n_steps; }

double SpdeTranchePayoff::timestep(int level) const { return level_data(level).grid.k(); }

std::vector<double> SpdeTranchePayoff::losses(int level, const BrownianPath& path, double* cost) const {
    const LevelData& data = level_data(level);
    PathSolver solver(data.grid, setup_.params, setup_.scheme);
    solver.reset(data.initial);
    std::vector<double> out(data.schedule.observation_steps.size());
    const double recovery = setup_.tranche.recovery;
    run_schedule(solver, path.z, data.schedule, [&](std::size_t i, const PathSolver& s) {
        out[i] = loss_from_state(s.values(), data.grid, recovery);
    });
    if (cost) *cost = static_cast<double>(solver.node_updates()) / unit_updates_;
    return out;
}

double SpdeTranchePayoff::evaluate(int level, const BrownianPath& path, std::span<double> out) const {
    double cost = 0.0;
    const std::vector<double> loss = losses(level, path, &cost);
    const TrancheSpec& tranche = setup_.tranche;
    const double scale = setup_.normalise ? 1.0 / tranche.width() : 1.0;
    out[0] = scale * protection_leg(loss, setup_.schedule, tranche);
    for (std::size_t i = 0; i < loss.size(); ++i) out[i + 1] = scale * tranche_notional(loss[i], tranche);
    return cost;
}

}  // namespace spdemc
