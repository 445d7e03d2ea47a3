#pragma once

#include <span>
#include <vector>

#include "spdemc/grid.hpp"

namespace spdemc {

/// Loss layer [attachment, detachment] with recovery rate.
struct TrancheSpec {
    double attachment = 0.0;
    double detachment = 1.0;
    double recovery = 0.0;

    double width() const noexcept { return detachment - attachment; }
    void validate() const;
};

/// Payment dates T_1..T_n; T_0 = 0 is implicit.
struct PaymentSchedule {
    std::vector<double> dates;
    double delta = 0.25;
    double rate = 0.0;

    static PaymentSchedule regular(double maturity, double delta, double rate);
    void validate() const;
    double discount(std::size_t i) const noexcept;  // e^{-r T_i}, i >= 1
};

/// The standard index tranches [0,3%], [3,6%], [6,9%], [9,12%], [12,22%], [22,100%].
std::vector<TrancheSpec> standard_tranches(double recovery);

/// (1 - R)(1 - h sum v_j), clamped to [0, 1 - R].
double loss_from_state(std::span<const double> interior_values, const GridSpec& grid, double recovery);

/// Outstanding notional max(d - L, 0) - max(a - L, 0).
double tranche_notional(double loss, const TrancheSpec& tranche);

/// sum_{i=1}^n e^{-r T_i} (P(L_{T_{i-1}}) - P(L_{T_i})), losses[0] at T_0 = 0.
double protection_leg(std::span<const double> losses, const PaymentSchedule& schedule,
                      const TrancheSpec& tranche);

/// Ratio of discounted expected notional decrements to the discounted
/// expected-notional annuity; notionals[0] is E[P(L_{T_0})].
double tranche_spread(std::span<const double> expected_notionals, const PaymentSchedule& schedule);

}  // namespace spdemc
