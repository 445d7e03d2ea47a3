#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spdemc/paths.hpp"
#include "spdemc/stats.hpp"

namespace spdemc {

/// Result of one coupled sample on level l.
struct LevelSample {
    double fine = 0.0;        // P_l
    double correction = 0.0;  // P_l - P_{l-1}, or P_0 on level 0
    double cost = 0.0;        // units spent on the whole sample
    double fine_cost = 0.0;   // units spent on P_l alone
    std::vector<double> aux;  // auxiliary corrections, same telescoping as `correction`
};

/// Produces coupled samples; must be safe to call concurrently.
class LevelSampler {
public:
    virtual ~LevelSampler() = default;
    virtual std::size_t aux_count() const { return 0; }
    virtual LevelSample sample(int level, const SeedSpec& seed) const = 0;
};

/// A payoff computed on one discretisation level from a market path at that
/// level's resolution. out[0] is the payoff, out[1..] auxiliary outputs.
class PathFunctional {
public:
    virtual ~PathFunctional() = default;
    virtual std::size_t steps(int level) const = 0;
    virtual double timestep(int level) const = 0;
    virtual int time_ratio() const { return 4; }
    virtual std::size_t aux_count() const { return 0; }
    /// Returns the cost in units.
    virtual double evaluate(int level, const BrownianPath& path, std::span<double> out) const = 0;
};

/// Fine path on level l, coarse path by block summation, both evaluated.
LevelSample coupled_sample(const PathFunctional& payoff, int level, const SeedSpec& seed);

/// The scalar correction P_l - P_{l-1} (P_0 on level 0) for one sample.
double level_sample(const PathFunctional& payoff, int level, const SeedSpec& seed);

class CoupledPathSampler final : public LevelSampler {
public:
    explicit CoupledPathSampler(const PathFunctional& payoff) : payoff_(payoff) {}
    std::size_t aux_count() const override { return payoff_.aux_count(); }
    LevelSample sample(int level, const SeedSpec& seed) const override {
        return coupled_sample(payoff_, level, seed);
    }

private:
    const PathFunctional& payoff_;
};

struct LevelStats {
    int level = 0;
    RunningMoments correction;
    RunningMoments fine;
    std::vector<double> aux_sum;
    double cost = 0.0;       // total units on this level
    double fine_cost = 0.0;  // units attributable to P_l alone
    double wall_seconds = 0.0;

    std::uint64_t samples() const noexcept { return correction.count; }
    double mean() const noexcept { return correction.mean; }
    double variance() const noexcept { return correction.variance(); }
    double cost_per_sample() const noexcept;
    double fine_cost_per_sample() const noexcept;
    double aux_mean(std::size_t i) const noexcept;
    void merge(const LevelStats& other);
};

struct MlmcConfig {
    int min_level = 2;  // finest level of the initial hierarchy
    int max_level = 10;
    std::uint64_t warmup = 100;
    double alpha = 2.0;  // weak-error rate assumed by the bias test
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::size_t chunk = 256;
};

struct MlmcResult {
    double estimate = 0.0;
    std::vector<double> aux_estimates;
    std::vector<LevelStats> levels;
    double epsilon = 0.0;
    double total_cost = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    /// Variance part of the MSE, sum V_l / N_l.
    double estimator_variance = 0.0;
    double bias_estimate = 0.0;
    /// Predicted cost of plain Monte Carlo on the finest level for the same eps.
    double standard_cost = 0.0;
    double wall_seconds = 0.0;
};

/// N_l = ceil(2 eps^-2 sqrt(V_l / C_l) sum_j sqrt(V_j C_j)), never below
/// `floor`. Guarantees sum V_l / N_l <= eps^2 / 2.
std::vector<std::uint64_t> optimal_allocation(std::span<const double> variances,
                                              std::span<const double> costs, double epsilon,
                                              std::uint64_t floor = 0);

/// Adds `count` samples with indices [first, first + count) to `stats`.
void extend_level(const LevelSampler& sampler, LevelStats& stats, std::uint64_t first,
                  std::uint64_t count, std::uint64_t seed, unsigned threads, std::size_t chunk);

MlmcResult run_mlmc(const LevelSampler& sampler, double epsilon, const MlmcConfig& config);

struct RateFit {
    double alpha = 0.0;  // |E[P_l - P_{l-1}]| ~ 2^{-alpha l}
    double beta = 0.0;   // V[P_l - P_{l-1}] ~ 2^{-beta l}
    double gamma = 0.0;  // C_l ~ 2^{gamma l}
};

/// Regression over levels >= first_level; rates are 0 when fewer than two levels qualify.
RateFit fit_rates(std::span<const LevelStats> levels, int first_level = 1);

/// Fixed sample count on each level 0..max_level.
std::vector<LevelStats> survey_levels(const LevelSampler& sampler, int max_level,
                                      std::uint64_t samples, std::uint64_t seed, unsigned threads,
                                      std::size_t chunk = 256);

enum class ComplexityRegime { variance_dominated, balanced, cost_dominated };

struct Complexity {
    ComplexityRegime regime;
    double eps_exponent;  // cost ~ eps^{eps_exponent} * |log eps|^{log_power}
    int log_power;
    std::string describe() const;
};

Complexity complexity_regime(double alpha, double beta, double gamma);

}  // namespace spdemc
