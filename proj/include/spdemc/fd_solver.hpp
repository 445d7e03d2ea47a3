#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "spdemc/grid.hpp"
#include "spdemc/paths.hpp"

namespace spdemc {

/// Tridiagonal: central differences in x, Milstein in t (the default).
/// Pentadiagonal: method-of-lines variant whose Ito correction uses the
/// squared first difference D1^2.
enum class Scheme { tridiagonal, pentadiagonal };

/// Hat-function projection of the initial measure, normalised so that the
/// discrete mass h * sum v_j equals the measure's mass on the interior.
SolverState project_initial(const InitialCondition& ic, const GridSpec& grid);

SolverState milstein_step_tridiagonal(const SolverState& state, double z,
                                      const ModelParams& params, const GridSpec& grid);
SolverState milstein_step_pentadiagonal(const SolverState& state, double z,
                                        const ModelParams& params, const GridSpec& grid);

/// Default-monitoring interface condition: zero below x = 0, halve at x = 0.
SolverState apply_monitoring(const SolverState& state, const GridSpec& grid);

/// Closed-form solution on the real line for v(0, x) = delta(x - x0), given
/// the market driver's terminal value M_T.
double exact_density(double x, double T, double market_endpoint, double x0,
                     const ModelParams& params);

/// Evolves one density in place through a Brownian path. Holds two padded
/// buffers so a step is three multiply-adds per node and no allocation.
class PathSolver {
public:
    PathSolver(const GridSpec& grid, const ModelParams& params,
               Scheme scheme = Scheme::tridiagonal);

    void reset(const SolverState& state);
    void advance(double z);
    /// Throws a configuration error if the grid has no node at x = 0.
    void monitor();

    std::span<const double> values() const noexcept;
    SolverState state() const;
    double mass() const noexcept;
    long time_index() const noexcept { return time_index_; }
    const GridSpec& grid() const noexcept { return grid_; }

    /// Interior node updates performed since construction.
    std::uint64_t node_updates() const noexcept { return node_updates_; }

private:
    void advance_tridiagonal(double z) noexcept;
    void advance_pentadiagonal(double z) noexcept;

    GridSpec grid_;
    ModelParams params_;
    Scheme scheme_;
    // Two zero pads on each side: indices 0,1 are nodes -1,0 and the last two
    // are nodes J, J+1.
    std::vector<double> current_;
    std::vector<double> next_;
    long time_index_ = 0;
    std::uint64_t node_updates_ = 0;
};

struct Monitoring {
    enum class Kind {
        continuous,  // absorbing Dirichlet boundaries only
        discrete,    // interface condition at the listed dates
    };

    Kind kind = Kind::continuous;
    std::vector<double> dates;

    static Monitoring continuous() { return {}; }
    static Monitoring discrete(std::vector<double> dates) {
        return {Kind::discrete, std::move(dates)};
    }
};

/// Converts a date to a step index; off-grid dates are a configuration error.
std::size_t step_index(double t, double k);

/// Step indices at which monitoring fires and observations are recorded.
struct StepSchedule {
    std::size_t n_steps = 0;
    std::vector<std::size_t> monitoring_steps;
    std::vector<std::size_t> observation_steps;

    static StepSchedule build(double k, std::size_t n_steps, const Monitoring& monitoring,
                              std::span<const double> observation_dates);
};

using Observer = std::function<void(std::size_t observation, const PathSolver& solver)>;

/// Runs the schedule over the increments z (one per step). At a date that is
/// both a monitoring and an observation date, monitoring is applied first.
void run_schedule(PathSolver& solver, std::span<const double> z, const StepSchedule& schedule,
                  const Observer& observe);

struct SolveOptions {
    Scheme scheme = Scheme::tridiagonal;
    Monitoring monitoring;
    std::vector<double> observation_dates;
    bool keep_full_trajectory = false;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<SolverState> states;
    SolverState terminal;
};

Trajectory solve_path(const GridSpec& grid, const ModelParams& params, const InitialCondition& ic,
                      const BrownianPath& path, const SolveOptions& options = {});

}  // namespace spdemc
