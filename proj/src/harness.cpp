#include "spdemc/harness.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include "spdemc/error.hpp"
#include "spdemc/parallel.hpp"
#include "spdemc/paths.hpp"
#include "spdemc/stability.hpp"

namespace spdemc {

GridSpec StudySetup::grid(int level) const {
    return GridSpec::from_bounds(x_min, x_max, h0, k0).refined(level);
}

void StudySetup::require_stable() const {
    require(levels >= 0, ErrorKind::invalid_argument, "levels must be non-negative");
    require(paths >= 1, ErrorKind::invalid_argument, "need at least one path");
    params.validate();
    for (int l = 0; l <= levels; ++l) {
        const GridSpec g = grid(l);
        const StabilityCheck check = check_stability(params, g.h(), g.k());
        if (!check.stable) {
            std::ostringstream msg;
            msg << "level " << l << " violates the mean-square stability limit (drift margin "
                << check.margin_drift << ", mesh margin " << check.margin_mesh << ")";
            fail(ErrorKind::stability, msg.str());
        }
        step_index(maturity, g.k());
    }
}

namespace {

// Market paths for one sample on every level, finest first generated.
std::vector<BrownianPath> level_paths(const StudySetup& setup, std::uint64_t sample) {
    const GridSpec finest = setup.grid(setup.levels);
    const std::size_t n = step_index(setup.maturity, finest.k());
    std::vector<BrownianPath> paths(static_cast<std::size_t>(setup.levels) + 1);
    paths.back() = generate_fine_path(SeedSpec{setup.seed, setup.levels, sample}, n, finest.k());
    for (int l = setup.levels; l > 0; --l)
        paths[static_cast<std::size_t>(l) - 1] = coarsen_path(paths[static_cast<std::size_t>(l)], 4);
    return paths;
}

// Evaluates per-path, per-level quantities in parallel; rows are path-indexed
// so the caller's reduction order is fixed.
template <class PerPath>
std::vector<std::vector<double>> collect(const StudySetup& setup, std::size_t width, PerPath&& body) {
    std::vector<std::vector<double>> rows(setup.paths, std::vector<double>(width, 0.0));
    parallel_for(static_cast<std::size_t>(setup.paths), setup.threads,
                 [&](std::size_t m) { body(static_cast<std::uint64_t>(m), rows[m]); });
    return rows;
}

SolverState terminal_state(const StudySetup& setup, const GridSpec& grid, const BrownianPath& path) {
    Trajectory t = solve_path(grid, setup.params, InitialCondition::point_mass(setup.x0), path,
                              SolveOptions{setup.scheme, Monitoring::continuous(), {}, false});
    return std::move(t.terminal);
}

ConvergenceLevel summarise(int level, const GridSpec& grid,
                           const std::vector<std::vector<double>>& rows, std::size_t column) {
    RunningMoments m;
    for (const auto& row : rows) m.add(row[column]);
    return ConvergenceLevel{level, grid.h(), grid.k(), m.mean,
                            std::sqrt(m.variance() / static_cast<double>(m.count)), m.count};
}

}  // namespace

LinearFit fit_convergence(const std::vector<ConvergenceLevel>& levels, int first_level) {
    std::vector<double> x, y;
    for (const ConvergenceLevel& c : levels) {
        if (c.level < first_level) continue;
        if (!(c.value > 0.0)) continue;
        x.push_back(c.level);
        y.push_back(std::log2(c.value));
    }
    if (x.size() < 2) return {};
    return fit_line(x, y);
}

ConvergenceReport converge_unbounded(const StudySetup& setup) {
    setup.require_stable();
    require(setup.params.rho < 1.0, ErrorKind::domain, "closed-form oracle needs rho < 1");
    const auto width = static_cast<std::size_t>(setup.levels) + 1;
    const auto rows = collect(setup, width, [&](std::uint64_t m, std::vector<double>& out) {
        const auto paths = level_paths(setup, m);
        const double market_endpoint = paths.back().endpoint();
        for (int l = 0; l <= setup.levels; ++l) {
            const GridSpec grid = setup.grid(l);
            const SolverState v = terminal_state(setup, grid, paths[static_cast<std::size_t>(l)]);
            double sum = 0.0;
            for (int j = 0; j <= grid.intervals(); ++j) {
                const double numeric =
                    (j == 0 || j == grid.intervals()) ? 0.0 : v.values[static_cast<std::size_t>(j - 1)];
                const double exact =
                    exact_density(grid.node(j), setup.maturity, market_endpoint, setup.x0, setup.params);
                sum += (numeric - exact) * (numeric - exact);
            }
            out[static_cast<std::size_t>(l)] = sum * grid.h();
        }
    });
    ConvergenceReport report;
    for (int l = 0; l <= setup.levels; ++l)
        report.levels.push_back(summarise(l, setup.grid(l), rows, static_cast<std::size_t>(l)));
    report.fit = fit_convergence(report.levels, report.first_fitted_level);
    return report;
}

ConvergenceReport converge_bounded(const StudySetup& setup) {
    setup.require_stable();
    require(setup.levels >= 1, ErrorKind::invalid_argument, "fine/coarse study needs levels >= 1");
    const auto width = static_cast<std::size_t>(setup.levels) + 1;
    const auto rows = collect(setup, width, [&](std::uint64_t m, std::vector<double>& out) {
        const auto paths = level_paths(setup, m);
        std::vector<SolverState> terminal;
        for (int l = 0; l <= setup.levels; ++l)
            terminal.push_back(terminal_state(setup, setup.grid(l), paths[static_cast<std::size_t>(l)]));
        for (int l = 1; l <= setup.levels; ++l) {
            const GridSpec fine_grid = setup.grid(l);
            const auto& fine = terminal[static_cast<std::size_t>(l)].values;
            const auto& coarse = terminal[static_cast<std::size_t>(l) - 1].values;
            double sum = 0.0;
            // Boundary nodes j = 0 and j = J/2 are zero on both grids.
            for (int j = 1; j < fine_grid.intervals() / 2; ++j) {
                const double d = fine[static_cast<std::size_t>(2 * j - 1)] - coarse[static_cast<std::size_t>(j - 1)];
                sum += d * d;
            }
            out[static_cast<std::size_t>(l)] = sum * fine_grid.h();
        }
    });
    ConvergenceReport report;
    for (int l = 1; l <= setup.levels; ++l)
        report.levels.push_back(summarise(l, setup.grid(l), rows, static_cast<std::size_t>(l)));
    report.fit = fit_convergence(report.levels, report.first_fitted_level);
    return report;
}

ConvergenceReport fourier_mode_accuracy(const StudySetup& setup, double kappa) {
    setup.require_stable();
    require(setup.params.rho < 1.0, ErrorKind::domain, "mode study needs rho < 1");
    const auto width = static_cast<std::size_t>(setup.levels) + 1;
    const ModelParams& p = setup.params;
    const auto rows = collect(setup, width, [&](std::uint64_t m, std::vector<double>& out) {
        const auto paths = level_paths(setup, m);
        const double market_endpoint = paths.back().endpoint();
        const std::complex<double> exact = std::exp(std::complex<double>(
            -0.5 * (1.0 - p.rho) * kappa * kappa * setup.maturity,
            -kappa * (p.mu * setup.maturity + std::sqrt(p.rho) * market_endpoint)));
        for (int l = 0; l <= setup.levels; ++l) {
            const GridSpec grid = setup.grid(l);
            const FourierSymbol symbol = fourier_symbols(kappa * grid.h(), p, grid.h(), grid.k());
            std::complex<double> g{1.0, 0.0};
            for (double z : paths[static_cast<std::size_t>(l)].z) g *= symbol.factor(z);
            out[static_cast<std::size_t>(l)] = std::norm(g - exact);
        }
    });
    ConvergenceReport report;
    for (int l = 0; l <= setup.levels; ++l) {
        ConvergenceLevel c = summarise(l, setup.grid(l), rows, static_cast<std::size_t>(l));
        // Report the RMS error; delta-method standard error.
        const double rms = std::sqrt(c.value);
        c.std_error = rms > 0.0 ? c.std_error / (2.0 * rms) : 0.0;
        c.value = rms;
        report.levels.push_back(c);
    }
    report.fit = fit_convergence(report.levels, report.first_fitted_level);
    return report;
}

std::vector<RegularityLevel> regularity_diagnostic(const StudySetup& setup) {
    setup.require_stable();
    const auto width = static_cast<std::size_t>(setup.levels) + 1;
    const auto rows = collect(setup, width, [&](std::uint64_t m, std::vector<double>& out) {
        const auto paths = level_paths(setup, m);
        for (int l = 0; l <= setup.levels; ++l) {
            const GridSpec grid = setup.grid(l);
            const SolverState v = terminal_state(setup, grid, paths[static_cast<std::size_t>(l)]);
            require(v.values.size() >= 2, ErrorKind::configuration, "grid too coarse for the diagnostic");
            out[static_cast<std::size_t>(l)] = (v.values[1] - 2.0 * v.values[0]) / (grid.h() * grid.h());
        }
    });
    std::vector<RegularityLevel> out;
    for (int l = 0; l <= setup.levels; ++l) {
        RunningMoments m;
        for (const auto& row : rows) m.add(row[static_cast<std::size_t>(l)]);
        const GridSpec grid = setup.grid(l);
        out.push_back({l, grid.h(), grid.k(), m.mean, m.variance(), m.count});
    }
    return out;
}

}  // namespace spdemc
