#include "spdemc/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spdemc/error.hpp"

namespace spdemc {

namespace {
constexpr double kAlignTol = 1e-9;
}

ModelParams ModelParams::from_credit(double sigma, double rho, double r) {
    require(sigma > 0.0 && std::isfinite(sigma), ErrorKind::invalid_argument,
            "sigma must be positive");
    ModelParams p{(r - 0.5 * sigma * sigma) / sigma, rho, sigma, r};
    p.validate();
    return p;
}

void ModelParams::validate() const {
    require(std::isfinite(mu), ErrorKind::invalid_argument, "mu must be finite");
    require(rho >= 0.0 && rho <= 1.0, ErrorKind::invalid_argument, "rho must lie in [0, 1]");
    require(sigma > 0.0 && std::isfinite(sigma), ErrorKind::invalid_argument,
            "sigma must be positive");
    require(std::isfinite(r), ErrorKind::invalid_argument, "r must be finite");
}

GridSpec::GridSpec(double x_min, double h, int intervals, double k)
    : x_min_(x_min), h_(h), intervals_(intervals), k_(k) {
    require(std::isfinite(x_min), ErrorKind::invalid_argument, "x_min must be finite");
    require(h > 0.0 && std::isfinite(h), ErrorKind::invalid_argument, "h must be positive");
    require(k > 0.0 && std::isfinite(k), ErrorKind::invalid_argument, "k must be positive");
    require(intervals >= 2, ErrorKind::invalid_argument, "grid needs at least two intervals");
}

GridSpec GridSpec::from_bounds(double x_min, double x_max, double h, double k) {
    require(x_max > x_min, ErrorKind::invalid_argument, "x_max must exceed x_min");
    require(h > 0.0, ErrorKind::invalid_argument, "h must be positive");
    const double steps = (x_max - x_min) / h;
    const double rounded = std::round(steps);
    if (std::abs(steps - rounded) > kAlignTol * std::max(1.0, steps))
        fail(ErrorKind::configuration, "domain length is not an integer multiple of h");
    return GridSpec(x_min, h, static_cast<int>(rounded), k);
}

std::optional<int> GridSpec::zero_node() const noexcept {
    const double j = -x_min_ / h_;
    const double rounded = std::round(j);
    if (std::abs(j - rounded) > kAlignTol * std::max(1.0, std::abs(j))) return std::nullopt;
    if (rounded < 0.0 || rounded > intervals_) return std::nullopt;
    return static_cast<int>(rounded);
}

GridSpec GridSpec::refined(int levels) const {
    require(levels >= 0 && levels < 20, ErrorKind::invalid_argument, "refinement level out of range");
    const double space = std::ldexp(1.0, -levels);
    const double time = std::ldexp(1.0, -2 * levels);
    return GridSpec(x_min_, h_ * space, intervals_ << levels, k_ * time);
}

double SolverState::mass(const GridSpec& grid) const noexcept {
    return grid.h() * std::accumulate(values.begin(), values.end(), 0.0);
}

InitialCondition InitialCondition::point_mass(double x0) {
    require(std::isfinite(x0), ErrorKind::invalid_argument, "x0 must be finite");
    InitialCondition ic;
    ic.kind = Kind::point_mass;
    ic.x0 = x0;
    return ic;
}

InitialCondition InitialCondition::tabulated(std::vector<double> xs, std::vector<double> densities) {
    require(xs.size() >= 2 && xs.size() == densities.size(), ErrorKind::invalid_argument,
            "tabulated density needs matching abscissae and values");
    require(std::adjacent_find(xs.begin(), xs.end(), std::greater_equal<>()) == xs.end(),
            ErrorKind::invalid_argument, "tabulated abscissae must be strictly increasing");
    for (double f : densities)
        require(std::isfinite(f), ErrorKind::invalid_argument, "tabulated density must be finite");
    InitialCondition ic;
    ic.kind = Kind::tabulated;
    ic.xs = std::move(xs);
    ic.densities = std::move(densities);
    return ic;
}

}  // namespace spdemc
