#include "spdemc/credit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spdemc/error.hpp"

namespace spdemc {

void TrancheSpec::validate() const {
    require(attachment >= 0.0 && attachment < detachment && detachment <= 1.0,
            ErrorKind::invalid_argument, "tranche needs 0 <= a < d <= 1");
    require(recovery >= 0.0 && recovery <= 1.0, ErrorKind::invalid_argument,
            "recovery must lie in [0, 1]");
}

PaymentSchedule PaymentSchedule::regular(double maturity, double delta, double rate) {
    require(delta > 0.0 && maturity >= delta, ErrorKind::invalid_argument,
            "schedule needs 0 < delta <= maturity");
    const double periods = maturity / delta;
    const double n = std::round(periods);
    if (std::abs(periods - n) > 1e-9 * periods)
        fail(ErrorKind::configuration, "maturity is not a whole number of payment periods");
    PaymentSchedule s;
    s.delta = delta;
    s.rate = rate;
    for (int i = 1; i <= static_cast<int>(n); ++i) s.dates.push_back(i * delta);
    return s;
}

void PaymentSchedule::validate() const {
    require(!dates.empty(), ErrorKind::invalid_argument, "schedule needs at least one date");
    require(dates.front() > 0.0, ErrorKind::invalid_argument, "payment dates must be positive");
    require(std::adjacent_find(dates.begin(), dates.end(), std::greater_equal<>()) == dates.end(),
            ErrorKind::invalid_argument, "payment dates must be strictly increasing");
    require(delta > 0.0, ErrorKind::invalid_argument, "accrual interval must be positive");
}

double PaymentSchedule::discount(std::size_t i) const noexcept {
    return std::exp(-rate * dates[i - 1]);
}

std::vector<TrancheSpec> standard_tranches(double recovery) {
    const double points[] = {0.0, 0.03, 0.06, 0.09, 0.12, 0.22, 1.0};
    std::vector<TrancheSpec> out;
    for (std::size_t i = 0; i + 1 < std::size(points); ++i)
        out.push_back({points[i], points[i + 1], recovery});
    return out;
}

double loss_from_state(std::span<const double> interior_values, const GridSpec& grid,
                       double recovery) {
    const double mass = grid.h() * std::accumulate(interior_values.begin(), interior_values.end(), 0.0);
    const double loss = (1.0 - recovery) * (1.0 - mass);
    return std::clamp(loss, 0.0, 1.0 - recovery);
}

double tranche_notional(double loss, const TrancheSpec& tranche) {
    if (!(loss >= 0.0 && loss <= 1.0)) fail(ErrorKind::domain, "loss must lie in [0, 1]");
    return std::max(tranche.detachment - loss, 0.0) - std::max(tranche.attachment - loss, 0.0);
}

double protection_leg(std::span<const double> losses, const PaymentSchedule& schedule,
                      const TrancheSpec& tranche) {
    require(losses.size() == schedule.dates.size() + 1, ErrorKind::invalid_argument,
            "need one loss per payment date plus the initial loss");
    double value = 0.0;
    double previous = tranche_notional(losses[0], tranche);
    for (std::size_t i = 1; i < losses.size(); ++i) {
        const double current = tranche_notional(losses[i], tranche);
        value += schedule.discount(i) * (previous - current);
        previous = current;
    }
    return value;
}

double tranche_spread(std::span<const double> expected_notionals, const PaymentSchedule& schedule) {
    require(expected_notionals.size() == schedule.dates.size() + 1, ErrorKind::invalid_argument,
            "need one expected notional per payment date plus the initial notional");
    double protection = 0.0;
    double annuity = 0.0;
    for (std::size_t i = 1; i < expected_notionals.size(); ++i) {
        const double df = schedule.discount(i);
        protection += df * (expected_notionals[i - 1] - expected_notionals[i]);
        annuity += df * expected_notionals[i];
    }
    if (!(annuity > 0.0))
        fail(ErrorKind::degenerate, "tranche is wiped out at every payment date; spread undefined");
    return protection / (schedule.delta * annuity);
}

}  // namespace spdemc
