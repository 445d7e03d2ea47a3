#pragma once

#include <cstdint>
#include <vector>

#include "spdemc/fd_solver.hpp"
#include "spdemc/grid.hpp"
#include "spdemc/stats.hpp"

namespace spdemc {

/// Common setup of the grid-refinement studies: level l uses h0 / 2^l and
/// k0 / 4^l on [x_min, x_max]; every sample path is generated on the finest
/// level and coarsened, so all levels see the same market path.
struct StudySetup {
    ModelParams params;
    double x0 = 5.0;
    double x_min = 0.0;
    double x_max = 16.0;
    double h0 = 4.0 / 3.0;
    double k0 = 0.25;
    double maturity = 5.0;
    int levels = 4;  // finest level index
    std::uint64_t paths = 100;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    Scheme scheme = Scheme::tridiagonal;

    GridSpec grid(int level) const;
    /// Throws a stability error if any level violates the mean-square limit.
    void require_stable() const;
};

struct ConvergenceLevel {
    int level = 0;
    double h = 0.0;
    double k = 0.0;
    double value = 0.0;      // mean over paths (E_l^2, e_l^2, or RMS mode error)
    double std_error = 0.0;  // standard error of `value`
    std::uint64_t samples = 0;
};

struct ConvergenceReport {
    std::vector<ConvergenceLevel> levels;
    LinearFit fit;  // log2(value) against level over the fitted levels
    int first_fitted_level = 1;
};

/// Fits log2(value) against level over levels >= first_level.
LinearFit fit_convergence(const std::vector<ConvergenceLevel>& levels, int first_level);

/// Mean-square L2 error E_l^2 against the closed-form solution on a domain
/// large enough to stand in for the real line.
ConvergenceReport converge_unbounded(const StudySetup& setup);

/// Fine/coarse L2 difference e_l^2 between levels l and l-1, l >= 1.
ConvergenceReport converge_bounded(const StudySetup& setup);

/// RMS error of the discrete Fourier-mode recursion against the exact factor
/// for wavenumber kappa (no spatial grid beyond h0/2^l).
ConvergenceReport fourier_mode_accuracy(const StudySetup& setup, double kappa);

struct RegularityLevel {
    int level = 0;
    double h = 0.0;
    double k = 0.0;
    double mean = 0.0;
    double variance = 0.0;
    std::uint64_t samples = 0;
};

/// Mean and variance over paths of (v_2 - 2 v_1 + v_0) / h^2 at maturity,
/// the boundary second difference of the absorbed density.
std::vector<RegularityLevel> regularity_diagnostic(const StudySetup& setup);

}  // namespace spdemc
