#include "spdemc/fd_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "spdemc/error.hpp"

namespace spdemc {

namespace {

constexpr std::size_t kPad = 2;

void require_finite(std::span<const double> values) {
    for (double v : values)
        if (!std::isfinite(v)) fail(ErrorKind::numeric, "solver state contains non-finite values");
}

void require_shape(const SolverState& state, const GridSpec& grid) {
    require(state.values.size() == grid.interior_count(), ErrorKind::invalid_argument,
            "state length does not match the grid's interior node count");
}

// Integral of (linear f on [a,b]) * (linear g on [a,b]); Simpson is exact.
double product_integral(double a, double b, double fa, double fb, double ga, double gb) {
    const double fm = 0.5 * (fa + fb);
    const double gm = 0.5 * (ga + gb);
    return (b - a) / 6.0 * (fa * ga + 4.0 * fm * gm + fb * gb);
}

double interpolate(const InitialCondition& ic, double x) {
    const auto& xs = ic.xs;
    if (x <= xs.front() || x >= xs.back()) {
        if (x == xs.front()) return ic.densities.front();
        if (x == xs.back()) return ic.densities.back();
        return 0.0;
    }
    const auto hi = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
    const std::size_t lo = hi - 1;
    const double w = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return (1.0 - w) * ic.densities[lo] + w * ic.densities[hi];
}

// <Psi_j, v0> for a piecewise-linear v0, integrating exactly over the merged
// breakpoints of the hat and the table.
double hat_moment(const InitialCondition& ic, double centre, double h) {
    const double left = std::max(centre - h, ic.xs.front());
    const double right = std::min(centre + h, ic.xs.back());
    if (right <= left) return 0.0;

    std::vector<double> breaks{left, right};
    if (centre > left && centre < right) breaks.push_back(centre);
    for (double x : ic.xs)
        if (x > left && x < right) breaks.push_back(x);
    std::sort(breaks.begin(), breaks.end());

    auto hat = [&](double x) { return std::max(h - std::abs(x - centre), 0.0) / h; };
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i];
        const double b = breaks[i + 1];
        if (b <= a) continue;
        sum += product_integral(a, b, interpolate(ic, a), interpolate(ic, b), hat(a), hat(b));
    }
    return sum;
}

}  // namespace

SolverState project_initial(const InitialCondition& ic, const GridSpec& grid) {
    SolverState state{std::vector<double>(grid.interior_count(), 0.0), 0};
    const double h = grid.h();
    if (ic.kind == InitialCondition::Kind::point_mass) {
        if (!(ic.x0 > grid.x_min() && ic.x0 < grid.x_max()))
            fail(ErrorKind::domain, "point mass lies outside the open domain");
        const double offset = (ic.x0 - grid.x_min()) / h;
        const int left = static_cast<int>(std::floor(offset));
        for (int j = std::max(left - 1, 1); j <= std::min(left + 2, grid.intervals() - 1); ++j) {
            const double weight = std::max(h - std::abs(ic.x0 - grid.node(j)), 0.0) / h;
            state.values[static_cast<std::size_t>(j - 1)] = weight / h;
        }
        return state;
    }
    for (int j = 1; j < grid.intervals(); ++j)
        state.values[static_cast<std::size_t>(j - 1)] = hat_moment(ic, grid.node(j), h) / h;
    return state;
}

PathSolver::PathSolver(const GridSpec& grid, const ModelParams& params, Scheme scheme)
    : grid_(grid),
      params_(params),
      scheme_(scheme),
      current_(grid.interior_count() + 2 * kPad + 1, 0.0),
      next_(current_.size(), 0.0) {
    params_.validate();
}

void PathSolver::reset(const SolverState& state) {
    require_shape(state, grid_);
    std::fill(current_.begin(), current_.end(), 0.0);
    std::fill(next_.begin(), next_.end(), 0.0);
    std::copy(state.values.begin(), state.values.end(), current_.begin() + kPad);
    time_index_ = state.time_index;
}

std::span<const double> PathSolver::values() const noexcept {
    return std::span<const double>(current_).subspan(kPad, grid_.interior_count());
}

SolverState PathSolver::state() const {
    const auto v = values();
    return SolverState{std::vector<double>(v.begin(), v.end()), time_index_};
}

double PathSolver::mass() const noexcept {
    const auto v = values();
    return grid_.h() * std::accumulate(v.begin(), v.end(), 0.0);
}

void PathSolver::advance(double z) {
    if (!std::isfinite(z)) fail(ErrorKind::numeric, "non-finite Brownian increment");
    if (scheme_ == Scheme::tridiagonal)
        advance_tridiagonal(z);
    else
        advance_pentadiagonal(z);
    current_.swap(next_);
    ++time_index_;
    node_updates_ += grid_.interior_count();
}

void PathSolver::advance_tridiagonal(double z) noexcept {
    const double h = grid_.h();
    const double k = grid_.k();
    const double rho = params_.rho;
    const double advect = (params_.mu * k + std::sqrt(rho * k) * z) / (2.0 * h);
    const double diffuse = ((1.0 - rho) * k + rho * k * z * z) / (2.0 * h * h);
    const double lower = diffuse + advect;
    const double centre = 1.0 - 2.0 * diffuse;
    const double upper = diffuse - advect;

    const std::size_t first = kPad;
    const std::size_t last = kPad + grid_.interior_count();
    const double* in = current_.data();
    double* out = next_.data();
    for (std::size_t i = first; i < last; ++i)
        out[i] = lower * in[i - 1] + centre * in[i] + upper * in[i + 1];
}

void PathSolver::advance_pentadiagonal(double z) noexcept {
    const double h = grid_.h();
    const double k = grid_.k();
    const double rho = params_.rho;
    const double advect = (params_.mu * k + std::sqrt(rho * k) * z) / (2.0 * h);
    const double diffuse = k / (2.0 * h * h);
    // (1/2) rho k (Z^2 - 1) (D1 / 2h)^2
    const double ito = rho * k * (z * z - 1.0) / (8.0 * h * h);

    const std::size_t first = kPad;
    const std::size_t last = kPad + grid_.interior_count();
    const double* in = current_.data();
    double* out = next_.data();
    for (std::size_t i = first; i < last; ++i) {
        out[i] = in[i] - advect * (in[i + 1] - in[i - 1]) +
                 diffuse * (in[i + 1] - 2.0 * in[i] + in[i - 1]) +
                 ito * (in[i + 2] - 2.0 * in[i] + in[i - 2]);
    }
}

void PathSolver::monitor() {
    const auto zero = grid_.zero_node();
    if (!zero) fail(ErrorKind::configuration, "default monitoring needs a grid node at x = 0");
    // Interior node j lives at padded index j + 1.
    const int j0 = *zero;
    for (int j = 1; j < std::min(j0, grid_.intervals()); ++j)
        current_[static_cast<std::size_t>(j) + 1] = 0.0;
    if (j0 >= 1 && j0 <= grid_.intervals() - 1)
        current_[static_cast<std::size_t>(j0) + 1] *= 0.5;
}

SolverState milstein_step_tridiagonal(const SolverState& state, double z,
                                      const ModelParams& params, const GridSpec& grid) {
    require_shape(state, grid);
    require_finite(state.values);
    PathSolver solver(grid, params, Scheme::tridiagonal);
    solver.reset(state);
    solver.advance(z);
    return solver.state();
}

SolverState milstein_step_pentadiagonal(const SolverState& state, double z,
                                        const ModelParams& params, const GridSpec& grid) {
    require_shape(state, grid);
    require_finite(state.values);
    PathSolver solver(grid, params, Scheme::pentadiagonal);
    solver.reset(state);
    solver.advance(z);
    return solver.state();
}

SolverState apply_monitoring(const SolverState& state, const GridSpec& grid) {
    require_shape(state, grid);
    const auto zero = grid.zero_node();
    if (!zero) fail(ErrorKind::configuration, "default monitoring needs a grid node at x = 0");
    SolverState out = state;
    for (int j = 1; j < grid.intervals(); ++j) {
        double& v = out.values[static_cast<std::size_t>(j - 1)];
        if (j < *zero)
            v = 0.0;
        else if (j == *zero)
            v *= 0.5;
    }
    return out;
}

double exact_density(double x, double T, double market_endpoint, double x0,
                     const ModelParams& params) {
    require(T > 0.0, ErrorKind::domain, "exact density needs T > 0");
    require(params.rho >= 0.0, ErrorKind::domain, "rho must be non-negative");
    if (params.rho >= 1.0)
        fail(ErrorKind::domain, "rho = 1 gives a point mass, not a density");
    const double variance = (1.0 - params.rho) * T;
    const double shift = x - x0 - params.mu * T - std::sqrt(params.rho) * market_endpoint;
    return std::exp(-shift * shift / (2.0 * variance)) / std::sqrt(2.0 * std::numbers::pi * variance);
}

std::size_t step_index(double t, double k) {
    require(t >= 0.0 && std::isfinite(t), ErrorKind::configuration, "dates must be non-negative");
    const double steps = t / k;
    const double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps))
        fail(ErrorKind::configuration, "date is not an integer multiple of the timestep");
    return static_cast<std::size_t>(rounded);
}

StepSchedule StepSchedule::build(double k, std::size_t n_steps, const Monitoring& monitoring,
                                 std::span<const double> observation_dates) {
    StepSchedule schedule;
    schedule.n_steps = n_steps;
    auto convert = [&](std::span<const double> dates, std::vector<std::size_t>& steps) {
        for (double t : dates) {
            const std::size_t n = step_index(t, k);
            if (n > n_steps) fail(ErrorKind::configuration, "date lies beyond the path horizon");
            steps.push_back(n);
        }
        require(std::is_sorted(steps.begin(), steps.end()), ErrorKind::configuration,
                "dates must be non-decreasing");
    };
    if (monitoring.kind == Monitoring::Kind::discrete)
        convert(monitoring.dates, schedule.monitoring_steps);
    convert(observation_dates, schedule.observation_steps);
    return schedule;
}

void run_schedule(PathSolver& solver, std::span<const double> z, const StepSchedule& schedule,
                  const Observer& observe) {
    require(z.size() == schedule.n_steps, ErrorKind::invalid_argument,
            "path length does not match the schedule");
    auto monitor_it = schedule.monitoring_steps.begin();
    std::size_t obs = 0;
    const auto& observations = schedule.observation_steps;
    auto settle = [&](std::size_t n) {
        while (monitor_it != schedule.monitoring_steps.end() && *monitor_it == n) {
            solver.monitor();
            ++monitor_it;
        }
        while (obs < observations.size() && observations[obs] == n) {
            if (observe) observe(obs, solver);
            ++obs;
        }
    };
    settle(0);
    for (std::size_t n = 0; n < z.size(); ++n) {
        solver.advance(z[n]);
        settle(n + 1);
    }
}

Trajectory solve_path(const GridSpec& grid, const ModelParams& params, const InitialCondition& ic,
                      const BrownianPath& path, const SolveOptions& options) {
    if (std::abs(path.k - grid.k()) > 1e-12 * grid.k())
        fail(ErrorKind::configuration, "path timestep differs from the grid timestep");
    if (options.monitoring.kind == Monitoring::Kind::discrete && !grid.zero_node())
        fail(ErrorKind::configuration, "default monitoring needs a grid node at x = 0");

    const StepSchedule schedule = StepSchedule::build(grid.k(), path.n_steps(), options.monitoring,
                                                      options.observation_dates);
    PathSolver solver(grid, params, options.scheme);
    solver.reset(project_initial(ic, grid));

    Trajectory out;
    if (options.keep_full_trajectory) {
        // Every step is an observation.
        StepSchedule full = schedule;
        full.observation_steps.resize(path.n_steps() + 1);
        std::iota(full.observation_steps.begin(), full.observation_steps.end(), std::size_t{0});
        run_schedule(solver, path.z, full, [&](std::size_t n, const PathSolver& s) {
            out.times.push_back(static_cast<double>(n) * grid.k());
            out.states.push_back(s.state());
        });
    } else {
        run_schedule(solver, path.z, schedule, [&](std::size_t i, const PathSolver& s) {
            out.times.push_back(options.observation_dates[i]);
            out.states.push_back(s.state());
        });
    }
    out.terminal = solver.state();
    require_finite(out.terminal.values);
    return out;
}

}  // namespace spdemc
