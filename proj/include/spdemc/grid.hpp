#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace spdemc {

/// Coefficients of the drift-diffusion SPDE
///   dv = -mu v_x dt + 1/2 v_xx dt - sqrt(rho) v_x dM_t.
struct ModelParams {
    double mu = 0.0;     // drift, per sqrt(year)
    double rho = 0.0;    // market correlation in [0, 1]
    double sigma = 1.0;  // firm-value volatility
    double r = 0.0;      // risk-free rate

    /// Distance-to-default drift mu = (r - sigma^2/2) / sigma.
    static ModelParams from_credit(double sigma, double rho, double r);

    void validate() const;
};

/// Uniform grid x_j = x_min + j*h, j = 0..J, with timestep k.
/// Boundary values v_0 = v_J = 0 are implicit.
class GridSpec {
public:
    GridSpec(double x_min, double h, int intervals, double k);

    /// Rejects bounds that are not an integer number of steps apart.
    static GridSpec from_bounds(double x_min, double x_max, double h, double k);

    double h() const noexcept { return h_; }
    double k() const noexcept { return k_; }
    double x_min() const noexcept { return x_min_; }
    double x_max() const noexcept { return x_min_ + intervals_ * h_; }
    int intervals() const noexcept { return intervals_; }
    std::size_t interior_count() const noexcept { return static_cast<std::size_t>(intervals_ - 1); }
    double node(int j) const noexcept { return x_min_ + j * h_; }
    double mesh_ratio() const noexcept { return k_ / (h_ * h_); }

    /// Index j of the node at x = 0, if the grid has one.
    std::optional<int> zero_node() const noexcept;

    /// h / 2^levels, k / 4^levels on the same domain.
    GridSpec refined(int levels) const;

private:
    double x_min_;
    double h_;
    int intervals_;
    double k_;
};

/// Density values v_1..v_{J-1} on the interior nodes at time step n.
struct SolverState {
    std::vector<double> values;
    long time_index = 0;

    /// Discrete mass h * sum_j v_j.
    double mass(const GridSpec& grid) const noexcept;
};

struct InitialCondition {
    enum class Kind { point_mass, tabulated };

    Kind kind = Kind::point_mass;
    double x0 = 0.0;
    /// Piecewise-linear density through (xs[i], densities[i]), zero outside.
    std::vector<double> xs;
    std::vector<double> densities;

    static InitialCondition point_mass(double x0);
    static InitialCondition tabulated(std::vector<double> xs, std::vector<double> densities);
};

}  // namespace spdemc
