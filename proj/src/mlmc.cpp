#include "spdemc/mlmc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "spdemc/error.hpp"
#include "spdemc/parallel.hpp"

namespace spdemc {

LevelSample coupled_sample(const PathFunctional& payoff, int level, const SeedSpec& seed) {
    require(level >= 0, ErrorKind::invalid_argument, "level must be non-negative");
    const std::size_t width = 1 + payoff.aux_count();
    std::vector<double> fine_out(width, 0.0);
    const BrownianPath fine = generate_fine_path(seed, payoff.steps(level), payoff.timestep(level));
    LevelSample out;
    out.fine_cost = payoff.evaluate(level, fine, fine_out);
    out.cost = out.fine_cost;
    out.fine = fine_out[0];
    out.aux.assign(fine_out.begin() + 1, fine_out.end());
    if (level == 0) {
        out.correction = out.fine;
        return out;
    }
    std::vector<double> coarse_out(width, 0.0);
    const BrownianPath coarse = coarsen_path(fine, payoff.time_ratio());
    out.cost += payoff.evaluate(level - 1, coarse, coarse_out);
    out.correction = out.fine - coarse_out[0];
    for (std::size_t i = 0; i < out.aux.size(); ++i) out.aux[i] -= coarse_out[i + 1];
    return out;
}

double level_sample(const PathFunctional& payoff, int level, const SeedSpec& seed) {
    return coupled_sample(payoff, level, seed).correction;
}

double LevelStats::cost_per_sample() const noexcept {
    return samples() ? cost / static_cast<double>(samples()) : 0.0;
}

double LevelStats::fine_cost_per_sample() const noexcept {
    return samples() ? fine_cost / static_cast<double>(samples()) : 0.0;
}

double LevelStats::aux_mean(std::size_t i) const noexcept {
    return samples() ? aux_sum[i] / static_cast<double>(samples()) : 0.0;
}

void LevelStats::merge(const LevelStats& other) {
    correction.merge(other.correction);
    fine.merge(other.fine);
    if (aux_sum.size() < other.aux_sum.size()) aux_sum.resize(other.aux_sum.size(), 0.0);
    for (std::size_t i = 0; i < other.aux_sum.size(); ++i) aux_sum[i] += other.aux_sum[i];
    cost += other.cost;
    fine_cost += other.fine_cost;
}

std::vector<std::uint64_t> optimal_allocation(std::span<const double> variances,
                                              std::span<const double> costs, double epsilon,
                                              std::uint64_t floor) {
    require(!variances.empty() && variances.size() == costs.size(), ErrorKind::invalid_argument,
            "allocation needs one variance and one cost per level");
    require(epsilon > 0.0, ErrorKind::invalid_argument, "epsilon must be positive");
    double total = 0.0;
    for (std::size_t l = 0; l < variances.size(); ++l) {
        require(variances[l] >= 0.0, ErrorKind::invalid_argument, "variances must be non-negative");
        require(costs[l] > 0.0, ErrorKind::invalid_argument, "costs must be positive");
        total += std::sqrt(variances[l] * costs[l]);
    }
    std::vector<std::uint64_t> n(variances.size());
    for (std::size_t l = 0; l < variances.size(); ++l) {
        const double ideal =
            2.0 / (epsilon * epsilon) * std::sqrt(variances[l] / costs[l]) * total;
        n[l] = std::max(floor, static_cast<std::uint64_t>(std::ceil(ideal)));
    }
    return n;
}

void extend_level(const LevelSampler& sampler, LevelStats& stats, std::uint64_t first,
                  std::uint64_t count, std::uint64_t seed, unsigned threads, std::size_t chunk) {
    if (count == 0) return;
    chunk = std::max<std::size_t>(chunk, 1);
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n_chunks = static_cast<std::size_t>((count + chunk - 1) / chunk);
    const std::size_t aux = sampler.aux_count();
    std::vector<LevelStats> partial(n_chunks);
    parallel_for(n_chunks, threads, [&](std::size_t c) {
        LevelStats& p = partial[c];
        p.level = stats.level;
        p.aux_sum.assign(aux, 0.0);
        const std::uint64_t lo = first + c * chunk;
        const std::uint64_t hi = std::min(first + count, lo + chunk);
        for (std::uint64_t i = lo; i < hi; ++i) {
            const LevelSample s = sampler.sample(stats.level, SeedSpec{seed, stats.level, i});
            if (!std::isfinite(s.correction) || !std::isfinite(s.fine))
                fail(ErrorKind::numeric, "sampler returned a non-finite value");
            p.correction.add(s.correction);
            p.fine.add(s.fine);
            for (std::size_t a = 0; a < aux; ++a) p.aux_sum[a] += s.aux[a];
            p.cost += s.cost;
            p.fine_cost += s.fine_cost;
        }
    });
    if (stats.aux_sum.size() < aux) stats.aux_sum.resize(aux, 0.0);
    for (const LevelStats& p : partial) stats.merge(p);
    stats.wall_seconds +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

RateFit fit_rates(std::span<const LevelStats> levels, int first_level) {
    std::vector<double> l_mean, y_mean, l_var, y_var, l_cost, y_cost;
    for (const LevelStats& s : levels) {
        if (s.level < first_level || s.samples() == 0) continue;
        if (s.mean() != 0.0) {
            l_mean.push_back(s.level);
            y_mean.push_back(std::log2(std::abs(s.mean())));
        }
        if (s.variance() > 0.0) {
            l_var.push_back(s.level);
            y_var.push_back(std::log2(s.variance()));
        }
        if (s.cost_per_sample() > 0.0) {
            l_cost.push_back(s.level);
            y_cost.push_back(std::log2(s.cost_per_sample()));
        }
    }
    RateFit fit;
    if (l_mean.size() >= 2) fit.alpha = -fit_line(l_mean, y_mean).slope;
    if (l_var.size() >= 2) fit.beta = -fit_line(l_var, y_var).slope;
    if (l_cost.size() >= 2) fit.gamma = fit_line(l_cost, y_cost).slope;
    return fit;
}

std::vector<LevelStats> survey_levels(const LevelSampler& sampler, int max_level,
                                      std::uint64_t samples, std::uint64_t seed, unsigned threads,
                                      std::size_t chunk) {
    require(max_level >= 0, ErrorKind::invalid_argument, "max level must be non-negative");
    require(samples >= 2, ErrorKind::invalid_argument, "survey needs at least two samples per level");
    std::vector<LevelStats> out(static_cast<std::size_t>(max_level) + 1);
    for (int l = 0; l <= max_level; ++l) {
        out[static_cast<std::size_t>(l)].level = l;
        extend_level(sampler, out[static_cast<std::size_t>(l)], 0, samples, seed, threads, chunk);
    }
    return out;
}

namespace {

double bias_proxy(const std::vector<LevelStats>& levels, double alpha) {
    const std::size_t L = levels.size() - 1;
    const double scale = std::pow(2.0, alpha);
    return std::max(std::abs(levels[L].mean()), std::abs(levels[L - 1].mean()) / scale) /
           (scale - 1.0);
}

// Rate used by the bias test: the configured alpha, unless the last two
// corrections fail to decay, in which case the regressed rate (floored at 1/2).
double bias_rate(const std::vector<LevelStats>& levels, double alpha) {
    const std::size_t L = levels.size() - 1;
    if (L >= 3 && std::abs(levels[L].mean()) >= std::abs(levels[L - 1].mean())) {
        const double fitted = fit_rates(levels, 1).alpha;
        if (fitted > 0.0) return std::max(0.5, std::min(alpha, fitted));
        return 0.5;
    }
    return alpha;
}

}  // namespace

MlmcResult run_mlmc(const LevelSampler& sampler, double epsilon, const MlmcConfig& config) {
    require(epsilon > 0.0 && std::isfinite(epsilon), ErrorKind::invalid_argument,
            "epsilon must be positive");
    require(config.min_level >= 1 && config.min_level <= config.max_level,
            ErrorKind::invalid_argument, "need 1 <= min_level <= max_level");
    require(config.warmup >= 2, ErrorKind::invalid_argument, "warm-up needs at least two samples");
    require(config.alpha > 0.0, ErrorKind::invalid_argument, "alpha must be positive");

    const auto start = std::chrono::steady_clock::now();
    std::vector<LevelStats> levels;
    std::vector<std::uint64_t> pending;
    auto add_level = [&] {
        LevelStats s;
        s.level = static_cast<int>(levels.size());
        s.aux_sum.assign(sampler.aux_count(), 0.0);
        levels.push_back(std::move(s));
        pending.push_back(config.warmup);
    };
    for (int l = 0; l <= config.min_level; ++l) add_level();

    double bias = 0.0;
    for (;;) {
        for (std::size_t l = 0; l < levels.size(); ++l) {
            extend_level(sampler, levels[l], levels[l].samples(), pending[l], config.seed,
                         config.threads, config.chunk);
            pending[l] = 0;
        }
        std::vector<double> v(levels.size()), c(levels.size());
        for (std::size_t l = 0; l < levels.size(); ++l) {
            v[l] = levels[l].variance();
            c[l] = levels[l].cost_per_sample();
        }
        const auto target = optimal_allocation(v, c, epsilon, config.warmup);
        bool more = false;
        for (std::size_t l = 0; l < levels.size(); ++l) {
            if (target[l] > levels[l].samples()) {
                pending[l] = target[l] - levels[l].samples();
                more = true;
            }
        }
        if (more) continue;

        bias = bias_proxy(levels, bias_rate(levels, config.alpha));
        if (bias <= epsilon / std::sqrt(2.0)) break;
        if (static_cast<int>(levels.size()) - 1 >= config.max_level) {
            std::ostringstream msg;
            msg << "multilevel estimator did not reach the bias target " << epsilon / std::sqrt(2.0)
                << " by level " << config.max_level << " (bias estimate " << bias
                << ", last correction mean " << levels.back().mean() << ")";
            fail(ErrorKind::convergence, msg.str());
        }
        add_level();
    }

    MlmcResult result;
    result.epsilon = epsilon;
    result.aux_estimates.assign(sampler.aux_count(), 0.0);
    for (const LevelStats& s : levels) {
        result.estimate += s.mean();
        for (std::size_t a = 0; a < result.aux_estimates.size(); ++a)
            result.aux_estimates[a] += s.aux_mean(a);
        result.total_cost += s.cost;
        result.estimator_variance += s.variance() / static_cast<double>(s.samples());
    }
    const RateFit rates = fit_rates(levels, 1);
    result.alpha = rates.alpha;
    result.beta = rates.beta;
    result.gamma = rates.gamma;
    result.bias_estimate = bias;
    const LevelStats& finest = levels.back();
    result.standard_cost = std::ceil(2.0 * finest.fine.variance() / (epsilon * epsilon)) *
                           finest.fine_cost_per_sample();
    result.levels = std::move(levels);
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::string Complexity::describe() const {
    std::ostringstream out;
    out << "O(eps^" << eps_exponent;
    if (log_power) out << " log(eps)^" << log_power;
    out << ")";
    return out.str();
}

Complexity complexity_regime(double alpha, double beta, double gamma) {
    require(alpha > 0.0 && beta > 0.0 && gamma > 0.0, ErrorKind::invalid_argument,
            "rates must be positive");
    if (alpha < 0.5 * gamma)
        fail(ErrorKind::domain, "complexity estimate needs alpha >= gamma / 2");
    constexpr double kTie = 1e-12;
    if (beta > gamma + kTie) return {ComplexityRegime::variance_dominated, -2.0, 0};
    if (std::abs(beta - gamma) <= kTie) return {ComplexityRegime::balanced, -2.0, 2};
    return {ComplexityRegime::cost_dominated, -2.0 - (gamma - beta) / alpha, 0};
}

}  // namespace spdemc
