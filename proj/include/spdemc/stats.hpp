#pragma once

#include <cstdint>
#include <span>

namespace spdemc {

/// Streaming mean/variance (Welford) with an order-fixed merge (Chan et al.).
struct RunningMoments {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) noexcept;
    void merge(const RunningMoments& other) noexcept;
    /// Unbiased sample variance; 0 for fewer than two samples.
    double variance() const noexcept;
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    /// 95% normal-approximation half-width of the slope.
    double slope_halfwidth() const noexcept { return 1.96 * slope_stderr; }
};

/// Ordinary least squares y = intercept + slope * x. Needs >= 2 points.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace spdemc
