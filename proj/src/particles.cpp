#include "spdemc/particles.hpp"

#include <cmath>

#include "spdemc/error.hpp"
#include "spdemc/rng.hpp"

namespace spdemc {

namespace {

std::uint64_t firm_stream_key(const SeedSpec& seed, std::size_t firm) {
    return mix_key({static_cast<std::uint64_t>(StreamDomain::firm), seed.experiment_seed,
                    static_cast<std::uint64_t>(seed.level), seed.sample_index,
                    static_cast<std::uint64_t>(firm)});
}

struct Absorption {
    std::vector<std::size_t> check_steps;  // steps where X <= 0 is tested
    std::vector<std::size_t> observation_steps;
};

Absorption make_absorption(double k, std::size_t n_steps, const Monitoring& monitoring,
                           std::span<const double> observation_dates) {
    Absorption a;
    if (monitoring.kind == Monitoring::Kind::continuous) {
        a.check_steps.resize(n_steps);
        for (std::size_t n = 0; n < n_steps; ++n) a.check_steps[n] = n + 1;
    } else {
        for (double t : monitoring.dates) {
            const std::size_t n = step_index(t, k);
            if (n > n_steps) fail(ErrorKind::configuration, "monitoring date beyond the horizon");
            a.check_steps.push_back(n);
        }
    }
    for (double t : observation_dates) {
        const std::size_t n = step_index(t, k);
        if (n > n_steps) fail(ErrorKind::configuration, "observation date beyond the horizon");
        a.observation_steps.push_back(n);
    }
    return a;
}

// absorbed_at holds the (1-based) step of each absorption.
std::vector<double> losses_from_steps(const std::vector<std::size_t>& absorbed_at,
                                      const std::vector<std::size_t>& observation_steps,
                                      std::size_t firms) {
    std::vector<double> out(observation_steps.size(), 0.0);
    for (std::size_t i = 0; i < observation_steps.size(); ++i) {
        std::size_t count = 0;
        for (std::size_t s : absorbed_at) count += s <= observation_steps[i];
        out[i] = static_cast<double>(count) / static_cast<double>(firms);
    }
    return out;
}

constexpr std::size_t kSurvived = static_cast<std::size_t>(-1);

}  // namespace

void BasketSpec::validate() const {
    require(firms >= 1, ErrorKind::invalid_argument, "basket needs at least one firm");
    require(x0 > 0.0 && std::isfinite(x0), ErrorKind::invalid_argument,
            "initial distance-to-default must be positive");
    params.validate();
}

LossPath simulate_basket(const BasketSpec& spec, double k, const BrownianPath& common_path,
                         const SeedSpec& seed, const Monitoring& monitoring,
                         std::span<const double> observation_dates) {
    spec.validate();
    require(std::abs(common_path.k - k) <= 1e-12 * k, ErrorKind::configuration,
            "market path timestep differs from the simulation timestep");
    const std::size_t n_steps = common_path.n_steps();
    const Absorption plan = make_absorption(k, n_steps, monitoring, observation_dates);
    std::vector<char> is_check(n_steps + 1, 0);
    for (std::size_t s : plan.check_steps) is_check[s] = 1;

    const double rho = spec.params.rho;
    const double drift = spec.params.mu * k;
    const double idio = std::sqrt((1.0 - rho) * k);
    const double market = std::sqrt(rho * k);
    std::vector<double> market_increment(n_steps);
    for (std::size_t n = 0; n < n_steps; ++n) market_increment[n] = drift + market * common_path.z[n];

    std::vector<std::size_t> absorbed_at;
    for (std::size_t firm = 0; firm < spec.firms; ++firm) {
        NormalStream stream(firm_stream_key(seed, firm));
        double x = spec.x0;
        for (std::size_t n = 0; n < n_steps; ++n) {
            x += market_increment[n] + idio * stream.next();
            if (is_check[n + 1] && x <= 0.0) {
                absorbed_at.push_back(n + 1);
                break;
            }
        }
    }
    LossPath out;
    out.times.assign(observation_dates.begin(), observation_dates.end());
    out.loss = losses_from_steps(absorbed_at, plan.observation_steps, spec.firms);
    return out;
}

BasketTrancheSampler::BasketTrancheSampler(BasketPricingSetup setup) : setup_(std::move(setup)) {
    setup_.basket.validate();
    setup_.tranche.validate();
    setup_.schedule.validate();
    require(setup_.base_timestep > 0.0, ErrorKind::invalid_argument, "timestep must be positive");
    for (double t : setup_.schedule.dates) step_index(t, setup_.base_timestep);
}

LevelSample BasketTrancheSampler::sample(int level, const SeedSpec& seed) const {
    require(level >= 0 && level < 30, ErrorKind::invalid_argument, "level out of range");
    const auto& basket = setup_.basket;
    const double k_fine = std::ldexp(setup_.base_timestep, -level);
    const double maturity = setup_.schedule.dates.back();
    const std::size_t n_fine = step_index(maturity, k_fine);
    const BrownianPath fine_path = generate_fine_path(seed, n_fine, k_fine);

    std::vector<double> observation{0.0};
    observation.insert(observation.end(), setup_.schedule.dates.begin(), setup_.schedule.dates.end());
    const Monitoring monitoring = setup_.monitoring == Monitoring::Kind::discrete
                                      ? Monitoring::discrete(setup_.schedule.dates)
                                      : Monitoring::continuous();
    const Absorption fine_plan = make_absorption(k_fine, n_fine, monitoring, observation);
    std::vector<char> fine_check(n_fine + 1, 0);
    for (std::size_t s : fine_plan.check_steps) fine_check[s] = 1;

    const bool coupled = level > 0;
    const double k_coarse = 2.0 * k_fine;
    const std::size_t n_coarse = n_fine / 2;
    Absorption coarse_plan;
    std::vector<char> coarse_check;
    if (coupled) {
        coarse_plan = make_absorption(k_coarse, n_coarse, monitoring, observation);
        coarse_check.assign(n_coarse + 1, 0);
        for (std::size_t s : coarse_plan.check_steps) coarse_check[s] = 1;
    }

    const double rho = basket.params.rho;
    const double mu = basket.params.mu;
    const double idio_f = std::sqrt((1.0 - rho) * k_fine);
    std::vector<double> market_f(n_fine);
    for (std::size_t n = 0; n < n_fine; ++n)
        market_f[n] = mu * k_fine + std::sqrt(rho * k_fine) * fine_path.z[n];
    std::vector<double> market_c;
    if (coupled) {
        const BrownianPath coarse_path = coarsen_path(fine_path, 2);
        market_c.resize(n_coarse);
        for (std::size_t n = 0; n < n_coarse; ++n)
            market_c[n] = mu * k_coarse + std::sqrt(rho * k_coarse) * coarse_path.z[n];
    }
    const double idio_c = std::sqrt((1.0 - rho) * k_coarse);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    std::vector<std::size_t> absorbed_f, absorbed_c;
    for (std::size_t firm = 0; firm < basket.firms; ++firm) {
        NormalStream stream(firm_stream_key(seed, firm));
        double xf = basket.x0;
        double xc = basket.x0;
        std::size_t hit_f = kSurvived;
        std::size_t hit_c = coupled ? kSurvived : 0;
        double pair_sum = 0.0;
        for (std::size_t n = 0; n < n_fine; ++n) {
            const double zeta = stream.next();
            if (hit_f == kSurvived) {
                xf += market_f[n] + idio_f * zeta;
                if (fine_check[n + 1] && xf <= 0.0) hit_f = n + 1;
            }
            if (coupled) {
                pair_sum += zeta;
                if (n % 2 == 1) {
                    const std::size_t m = n / 2;
                    if (hit_c == kSurvived) {
                        xc += market_c[m] + idio_c * pair_sum * inv_sqrt2;
                        if (coarse_check[m + 1] && xc <= 0.0) hit_c = m + 1;
                    }
                    pair_sum = 0.0;
                }
            }
            if (hit_f != kSurvived && hit_c != kSurvived) break;
        }
        if (hit_f != kSurvived) absorbed_f.push_back(hit_f);
        if (coupled && hit_c != kSurvived) absorbed_c.push_back(hit_c);
    }

    const double recovery = setup_.tranche.recovery;
    const double scale = setup_.normalise ? 1.0 / setup_.tranche.width() : 1.0;
    auto evaluate = [&](const std::vector<std::size_t>& absorbed, const Absorption& plan,
                        std::vector<double>& notionals) {
        std::vector<double> loss = losses_from_steps(absorbed, plan.observation_steps, basket.firms);
        for (double& x : loss) x *= 1.0 - recovery;
        notionals.resize(loss.size());
        for (std::size_t i = 0; i < loss.size(); ++i)
            notionals[i] = scale * tranche_notional(loss[i], setup_.tranche);
        return scale * protection_leg(loss, setup_.schedule, setup_.tranche);
    };

    LevelSample out;
    std::vector<double> fine_notional;
    out.fine = evaluate(absorbed_f, fine_plan, fine_notional);
    out.fine_cost = static_cast<double>(basket.firms * n_fine);
    out.cost = out.fine_cost;
    out.aux = fine_notional;
    out.correction = out.fine;
    if (coupled) {
        std::vector<double> coarse_notional;
        out.correction -= evaluate(absorbed_c, coarse_plan, coarse_notional);
        for (std::size_t i = 0; i < out.aux.size(); ++i) out.aux[i] -= coarse_notional[i];
        out.cost += static_cast<double>(basket.firms * n_coarse);
    }
    return out;
}

MlmcResult sde_timestep_mlmc(const BasketPricingSetup& setup, double epsilon,
                             const MlmcConfig& config) {
    const BasketTrancheSampler sampler(setup);
    return run_mlmc(sampler, epsilon, config);
}

}  // namespace spdemc
