#include "spdemc/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "spdemc/credit.hpp"
#include "spdemc/error.hpp"
#include "spdemc/harness.hpp"
#include "spdemc/mlmc.hpp"
#include "spdemc/parallel.hpp"
#include "spdemc/particles.hpp"
#include "spdemc/pricing.hpp"
#include "spdemc/rng.hpp"
#include "spdemc/stability.hpp"

namespace spdemc {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

double parse_real(const std::string& key, std::string_view text) {
    // "a/b" is accepted so that grid spacings like 4/3 can be written exactly.
    const auto slash = text.find('/');
    if (slash != std::string_view::npos)
        return parse_real(key, text.substr(0, slash)) / parse_real(key, text.substr(slash + 1));
    const std::string t = trim(text);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc() || end != t.data() + t.size() || !std::isfinite(value))
        fail(ErrorKind::configuration, "'" + key + "' expects a number, got '" + std::string(text) + "'");
    return value;
}

std::uint64_t parse_count(const std::string& key, std::string_view text) {
    const std::string t = trim(text);
    std::uint64_t value = 0;
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc() || end != t.data() + t.size()) {
        // Allow 1e5-style counts when they are exact integers.
        const double d = parse_real(key, t);
        if (d < 0.0 || d > 9.0e15 || d != std::floor(d))
            fail(ErrorKind::configuration, "'" + key + "' expects a non-negative integer");
        return static_cast<std::uint64_t>(d);
    }
    return value;
}

std::vector<std::string_view> split_list(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto end = comma == std::string_view::npos ? text.size() : comma;
        out.push_back(text.substr(start, end - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

/// Typed view over a RunConfig that remembers which keys were read.
class Settings {
public:
    explicit Settings(const RunConfig& config) : values_(config.values()) {}

    bool has(const std::string& key) {
        used_.insert(key);
        return values_.count(key) != 0;
    }

    double real(const std::string& key, double fallback) {
        const std::string* v = find(key);
        return v ? parse_real(key, *v) : fallback;
    }

    std::uint64_t count(const std::string& key, std::uint64_t fallback) {
        const std::string* v = find(key);
        return v ? parse_count(key, *v) : fallback;
    }

    int integer(const std::string& key, int fallback) {
        const std::uint64_t n = count(key, static_cast<std::uint64_t>(fallback));
        if (n > 1000000) fail(ErrorKind::configuration, "'" + key + "' is out of range");
        return static_cast<int>(n);
    }

    std::vector<double> reals(const std::string& key, std::vector<double> fallback) {
        const std::string* v = find(key);
        if (!v) return fallback;
        std::vector<double> out;
        for (std::string_view item : split_list(*v)) out.push_back(parse_real(key, item));
        return out;
    }

    std::vector<std::uint64_t> counts(const std::string& key, std::vector<std::uint64_t> fallback) {
        const std::string* v = find(key);
        if (!v) return fallback;
        std::vector<std::uint64_t> out;
        for (std::string_view item : split_list(*v)) out.push_back(parse_count(key, item));
        return out;
    }

    std::string text(const std::string& key, std::string fallback) {
        const std::string* v = find(key);
        return v ? trim(*v) : fallback;
    }

    /// Rejects any key the experiment did not ask for.
    void finish() const {
        std::vector<std::string> unknown;
        for (const auto& [key, value] : values_)
            if (!used_.count(key)) unknown.push_back(key);
        if (unknown.empty()) return;
        std::string msg = "unknown configuration key";
        msg += unknown.size() > 1 ? "s:" : ":";
        for (const auto& k : unknown) msg += " " + k;
        fail(ErrorKind::configuration, msg);
    }

private:
    const std::string* find(const std::string& key) {
        used_.insert(key);
        const auto it = values_.find(key);
        return it == values_.end() ? nullptr : &it->second;
    }

    const std::map<std::string, std::string>& values_;
    std::set<std::string> used_;
};

struct Common {
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

Common common(Settings& s) {
    Common c;
    c.seed = s.count("seed", 0);
    c.threads = static_cast<unsigned>(s.count("threads", 0));
    s.text("out", "");  // consumed by the caller
    return c;
}

ModelParams model(Settings& s) {
    const double sigma = s.real("sigma", 0.22);
    const double rho = s.real("rho", 0.2);
    const double r = s.real("r", 0.042);
    ModelParams p = ModelParams::from_credit(sigma, rho, r);
    if (s.has("mu")) p.mu = s.real("mu", p.mu);
    p.validate();
    return p;
}

Scheme scheme(Settings& s) {
    const std::string name = s.text("scheme", "tridiagonal");
    if (name == "tridiagonal") return Scheme::tridiagonal;
    if (name == "pentadiagonal") return Scheme::pentadiagonal;
    fail(ErrorKind::configuration, "scheme must be tridiagonal or pentadiagonal");
}

void check_slope(Report& report, const LinearFit& fit, double expected, double tolerance) {
    report.note("slope", fit.slope);
    report.note("slope_halfwidth", fit.slope_halfwidth());
    report.note("expected_slope", expected);
    report.note("slope_tolerance", tolerance);
    report.flag("pass_slope", std::abs(fit.slope - expected) <= tolerance);
}

double log_slope(const std::vector<double>& eps, const std::vector<double>& cost) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        x.push_back(std::log(eps[i]));
        y.push_back(std::log(cost[i]));
    }
    return x.size() >= 2 ? fit_line(x, y).slope : 0.0;
}

// ---------------------------------------------------------------- stability

Report stability_scan(Settings& s) {
    common(s);
    const ModelParams p = model(s);
    const double h = s.real("h", 1.6);
    double k = s.real("k", 0.25);
    if (s.has("ratio")) k = s.real("ratio", 0.0) * h * h;
    const std::size_t points = s.count("points", 10000);
    s.finish();

    const AmplificationScan scan = scan_amplification(p, h, k, points);
    const StabilityCheck check = check_stability(p, h, k);
    Report report;
    Table t{"amplification", {"theta", "S"}, {}};
    for (std::size_t i = 0; i < scan.theta.size(); ++i) t.add({scan.theta[i], scan.amplification[i]});
    report.tables.push_back(std::move(t));
    report.note("h", h);
    report.note("k", k);
    report.note("mesh_ratio", k / (h * h));
    report.note("mesh_limit", 1.0 / (1.0 + 2.0 * p.rho * p.rho));
    report.note("margin_drift", check.margin_drift);
    report.note("margin_mesh", check.margin_mesh);
    report.note("max_amplification", scan.max_amplification);
    report.note("argmax_theta", scan.argmax);
    report.note("predicted_stable", check.stable ? 1.0 : 0.0);
    report.note("scan_stable", scan.max_amplification <= 1.0 ? 1.0 : 0.0);
    report.flag("pass_consistent", check.stable == (scan.max_amplification <= 1.0));
    return report;
}

Report eigencheck(Settings& s) {
    common(s);
    const ModelParams p = model(s);
    const std::vector<std::uint64_t> sizes = s.counts("J", {6, 16, 64});
    const double h = s.real("h", 1.6);
    const double k = s.real("k", 0.25);
    const double tolerance = s.real("tolerance", 1e-12);
    s.finish();

    Report report;
    Table t{"eigen", {"J", "max_deviation", "corner_identity_residual"}, {}};
    double worst = 0.0;
    double worst_identity = 0.0;
    for (std::uint64_t j64 : sizes) {
        const int J = static_cast<int>(j64);
        const double dev = verify_matrix_eigenstructure(J, p, h, k);
        const StabilityMatrices m = build_stability_matrices(J, p, h, k);
        Matrix q = m.M;
        q(0, 0) -= m.e1 - m.e2;
        q(q.rows() - 1, q.cols() - 1) -= m.e1 + m.e2;
        const double identity = (q - mean_square_operator(J, p, h, k)).max_abs();
        t.add({static_cast<double>(J), dev, identity});
        worst = std::max(worst, dev);
        worst_identity = std::max(worst_identity, identity);
    }
    report.tables.push_back(std::move(t));
    report.note("max_deviation", worst);
    report.note("corner_identity_residual", worst_identity);
    report.note("tolerance", tolerance);
    report.flag("pass_eigen", worst <= tolerance);
    report.flag("pass_corner_identity", worst_identity <= tolerance);
    return report;
}

// ------------------------------------------------------------ grid studies

struct StudyDefaults {
    double x0 = 5.0;
    double x_min = 0.0;
    double x_max = 16.0;
    double h0 = 4.0 / 3.0;
    double maturity = 5.0;
    double k0 = 0.25;
    int levels = 4;
    std::uint64_t paths = 100;
};

StudySetup study(Settings& s, const StudyDefaults& d, const Common& c) {
    StudySetup st;
    st.params = model(s);
    st.x0 = s.real("x0", d.x0);
    st.x_min = s.real("x_min", d.x_min);
    st.x_max = s.real("x_max", d.x_max);
    st.h0 = s.real("h0", d.h0);
    st.maturity = s.real("maturity", d.maturity);
    st.k0 = s.real("k0", d.k0);
    st.levels = s.integer("levels", d.levels);
    st.paths = s.count("paths", d.paths);
    st.scheme = scheme(s);
    st.seed = c.seed;
    st.threads = c.threads;
    return st;
}

Table convergence_table(const ConvergenceReport& r, bool squared) {
    Table t{"convergence", {"level", "h", "k", "value", "std_error", "samples", "rms", "rms_ratio"}, {}};
    double previous = 0.0;
    for (const ConvergenceLevel& c : r.levels) {
        const double rms = squared ? std::sqrt(c.value) : c.value;
        const double ratio = previous > 0.0 && rms > 0.0 ? previous / rms : 0.0;
        t.add({static_cast<double>(c.level), c.h, c.k, c.value, c.std_error,
               static_cast<double>(c.samples), rms, ratio});
        previous = rms;
    }
    return t;
}

Report converge_study(Settings& s, bool bounded) {
    const Common c = common(s);
    StudyDefaults d;
    if (!bounded) d.x_min = -16.0 / 3.0;
    StudySetup st = study(s, d, c);
    const int first = s.integer("first_fitted_level", 1);
    s.finish();

    ConvergenceReport r = bounded ? converge_bounded(st) : converge_unbounded(st);
    r.first_fitted_level = first;
    r.fit = fit_convergence(r.levels, first);
    Report report;
    report.tables.push_back(convergence_table(r, true));
    check_slope(report, r.fit, -4.0, 0.6);
    return report;
}

Report fourier_accuracy(Settings& s) {
    const Common c = common(s);
    StudyDefaults d;
    d.paths = 1000;
    StudySetup st = study(s, d, c);
    const double kappa = s.real("kappa", 1.0);
    const int first = s.integer("first_fitted_level", 1);
    s.finish();

    ConvergenceReport r = fourier_mode_accuracy(st, kappa);
    r.first_fitted_level = first;
    r.fit = fit_convergence(r.levels, first);
    Report report;
    report.tables.push_back(convergence_table(r, false));
    report.note("kappa", kappa);
    check_slope(report, r.fit, -2.0, 0.3);
    return report;
}

Report regularity(Settings& s) {
    const Common c = common(s);
    StudyDefaults d;
    d.x0 = 1.0;
    d.h0 = 0.25;
    d.maturity = s.real("maturity", 0.2);
    d.k0 = d.maturity / 4.0;
    d.paths = 1000;
    StudySetup st = study(s, d, c);
    const double band = s.real("mean_band", 2.0);
    s.finish();

    const auto levels = regularity_diagnostic(st);
    Report report;
    Table t{"regularity", {"level", "h", "k", "mean", "variance", "samples"}, {}};
    bool increasing = true;
    double lo = HUGE_VAL;
    double hi = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const RegularityLevel& r = levels[i];
        t.add({static_cast<double>(r.level), r.h, r.k, r.mean, r.variance, static_cast<double>(r.samples)});
        if (r.level < 1) continue;
        if (i > 0 && levels[i - 1].level >= 1 && !(r.variance > levels[i - 1].variance)) increasing = false;
        lo = std::min(lo, std::abs(r.mean));
        hi = std::max(hi, std::abs(r.mean));
    }
    report.tables.push_back(std::move(t));
    const double ratio = lo > 0.0 ? hi / lo : HUGE_VAL;
    report.note("mean_ratio", ratio);
    report.note("mean_band", band);
    report.flag("pass_variance_increasing", increasing);
    report.flag("pass_mean_band", ratio <= band);
    return report;
}

// ----------------------------------------------------------------- pricing

struct PricingDefaults {
    Monitoring::Kind monitoring = Monitoring::Kind::continuous;
    double h0 = 1.6;
    double x_min = 0.0;
};

SpdePricingSetup spde_setup(Settings& s, const PricingDefaults& d) {
    SpdePricingSetup p;
    p.params = model(s);
    p.x0 = s.real("x0", 5.0);
    const double maturity = s.real("maturity", 5.0);
    const double delta = s.real("delta", 0.25);
    const double recovery = s.real("recovery", 0.4);
    const double h0 = s.real("h0", d.h0);
    const double k0 = s.real("k0", 0.25);
    const double x_min = s.real("x_min", d.x_min);
    const double x_max = s.real("x_max", 16.0);
    p.base_grid = GridSpec::from_bounds(x_min, x_max, h0, k0);
    p.monitoring = d.monitoring;
    p.scheme = scheme(s);
    p.schedule = PaymentSchedule::regular(maturity, delta, p.params.r);
    p.tranche = standard_tranches(recovery).front();
    p.max_level = s.integer("max_level", 8);
    return p;
}

MlmcConfig mlmc_config(Settings& s, const Common& c, int min_level) {
    MlmcConfig m;
    m.min_level = s.integer("min_level", min_level);
    m.warmup = s.count("warmup", 100);
    m.seed = c.seed;
    m.threads = c.threads;
    return m;
}

std::vector<std::size_t> tranche_indices(Settings& s, std::size_t fallback) {
    const std::string text = s.text("tranches", std::to_string(fallback));
    std::vector<std::size_t> out;
    if (text == "all") {
        for (std::size_t i = 0; i < 6; ++i) out.push_back(i);
        return out;
    }
    for (std::string_view item : split_list(text)) {
        const std::uint64_t i = parse_count("tranches", item);
        if (i >= 6) fail(ErrorKind::configuration, "tranche index must be in 0..5");
        out.push_back(static_cast<std::size_t>(i));
    }
    return out;
}

void level_rows(Table& t, std::vector<double> prefix, const std::vector<LevelStats>& levels) {
    for (const LevelStats& l : levels) {
        std::vector<double> row = prefix;
        row.insert(row.end(), {static_cast<double>(l.level), static_cast<double>(l.samples()), l.mean(),
                               l.variance(), l.fine.mean, l.fine.variance(), l.cost_per_sample()});
        t.add(std::move(row));
    }
}

Report price(Settings& s, Monitoring::Kind monitoring) {
    const Common c = common(s);
    PricingDefaults d;
    d.monitoring = monitoring;
    if (monitoring == Monitoring::Kind::discrete) {
        d.h0 = 2.0;
        d.x_min = -4.0;
    }
    const SpdePricingSetup base = spde_setup(s, d);
    const double recovery = s.real("recovery", 0.4);
    const auto tranches = tranche_indices(s, 0);
    std::vector<double> eps = s.reals("epsilons", {0.005, 0.002, 0.001, 0.0005});
    const int survey_top = s.integer("survey_levels", 4);
    const std::uint64_t survey_n = s.count("survey_samples", 1000);
    const MlmcConfig cfg = mlmc_config(s, c, 2);
    s.finish();
    require(!eps.empty(), ErrorKind::configuration, "need at least one epsilon");
    std::sort(eps.begin(), eps.end(), std::greater<>());

    Report report;
    Table levels{"levels", {"tranche", "level", "samples", "mean", "variance", "fine_mean", "fine_variance",
                            "cost_per_sample"}, {}};
    Table complexity{"complexity", {"tranche", "epsilon", "estimate", "finest_level", "total_cost",
                                    "standard_cost", "eps2_cost", "eps2_standard_cost",
                                    "estimator_variance", "bias_estimate"}, {}};
    Table allocation{"allocation", {"tranche", "epsilon", "level", "samples", "mean", "variance",
                                    "fine_mean", "fine_variance", "cost_per_sample"}, {}};
    Table pricing{"pricing", {"tranche", "attachment", "detachment", "protection_leg", "std_error",
                              "spread", "spread_bp"}, {}};
    const auto partition = standard_tranches(recovery);
    for (std::size_t n = 0; n < tranches.size(); ++n) {
        const std::size_t ti = tranches[n];
        SpdePricingSetup setup = base;
        setup.tranche = partition[ti];
        const SpdeTranchePayoff payoff(setup);
        const CoupledPathSampler sampler(payoff);
        const double tag = static_cast<double>(ti);

        if (survey_n > 0) {
            const auto stats = survey_levels(sampler, survey_top, survey_n, c.seed, c.threads);
            level_rows(levels, {tag}, stats);
            if (n == 0) {
                const RateFit rates = fit_rates(stats, 1);
                report.note("alpha", rates.alpha);
                report.note("beta", rates.beta);
                report.note("gamma", rates.gamma);
                report.flag("pass_alpha", std::abs(rates.alpha - 2.0) <= 0.5);
                report.flag("pass_beta", std::abs(rates.beta - 4.0) <= 1.0);
                report.flag("pass_gamma", std::abs(rates.gamma - 3.0) <= 0.3);
            }
        }

        std::vector<double> eps2_cost, eps2_standard;
        MlmcResult last;
        for (double e : eps) {
            MlmcResult r = run_mlmc(sampler, e, cfg);
            const double finest = static_cast<double>(r.levels.size() - 1);
            eps2_cost.push_back(e * e * r.total_cost);
            eps2_standard.push_back(e * e * r.standard_cost);
            complexity.add({tag, e, r.estimate, finest, r.total_cost, r.standard_cost, eps2_cost.back(),
                            eps2_standard.back(), r.estimator_variance, r.bias_estimate});
            level_rows(allocation, {tag, e}, r.levels);
            last = std::move(r);
        }
        const double spread = tranche_spread(last.aux_estimates, setup.schedule);
        pricing.add({tag, setup.tranche.attachment, setup.tranche.detachment, last.estimate,
                     std::sqrt(last.estimator_variance), spread, 1e4 * spread});

        if (n == 0) {
            report.note("protection_leg", last.estimate);
            report.note("spread_bp", 1e4 * spread);
            if (eps.size() >= 2) {
                const auto [lo, hi] = std::minmax_element(eps2_cost.begin(), eps2_cost.end());
                const double flat = *hi / *lo;
                const double growth = eps2_standard.back() / eps2_standard.front();
                report.note("mlmc_eps2_cost_ratio", flat);
                report.note("standard_eps2_cost_growth", growth);
                report.flag("pass_mlmc_flat", flat <= 3.0);
                report.flag("pass_standard_growth", growth >= 8.0);
            }
        }
    }
    if (!levels.rows.empty()) report.tables.push_back(std::move(levels));
    report.tables.push_back(std::move(complexity));
    report.tables.push_back(std::move(allocation));
    report.tables.push_back(std::move(pricing));
    return report;
}

// --------------------------------------------------------------- particles

struct BasketEstimate {
    RunningMoments payoff;
    std::vector<RunningMoments> loss;  // per observation date
};

BasketEstimate basket_monte_carlo(const BasketSpec& basket, double k, const PaymentSchedule& schedule,
                                  const TrancheSpec& tranche, std::uint64_t baskets, std::uint64_t seed,
                                  unsigned threads) {
    std::vector<double> observation{0.0};
    observation.insert(observation.end(), schedule.dates.begin(), schedule.dates.end());
    const Monitoring monitoring = Monitoring::discrete(schedule.dates);
    const std::size_t n = step_index(schedule.dates.back(), k);
    std::vector<double> payoff(baskets);
    std::vector<std::vector<double>> losses(baskets);
    parallel_for(baskets, threads, [&](std::size_t b) {
        const SeedSpec spec{seed, 0, b};
        const BrownianPath market = generate_fine_path(spec, n, k);
        const LossPath path = simulate_basket(basket, k, market, spec, monitoring, observation);
        std::vector<double> loss(path.loss.size());
        for (std::size_t i = 0; i < loss.size(); ++i) loss[i] = (1.0 - tranche.recovery) * path.loss[i];
        payoff[b] = protection_leg(loss, schedule, tranche) / tranche.width();
        losses[b] = std::move(loss);
    });
    BasketEstimate out;
    out.loss.resize(observation.size());
    for (std::size_t b = 0; b < baskets; ++b) {
        out.payoff.add(payoff[b]);
        for (std::size_t i = 0; i < observation.size(); ++i) out.loss[i].add(losses[b][i]);
    }
    return out;
}

double std_error(const RunningMoments& m) {
    return m.count > 1 ? std::sqrt(m.variance() / static_cast<double>(m.count)) : 0.0;
}

Report particle_compare(Settings& s) {
    const Common c = common(s);
    PricingDefaults d;
    d.monitoring = Monitoring::Kind::discrete;
    d.h0 = 2.0;
    d.x_min = -4.0;
    SpdePricingSetup setup = spde_setup(s, d);
    const double recovery = s.real("recovery", 0.4);
    const auto tranche_list = tranche_indices(s, 0);
    require(tranche_list.size() == 1, ErrorKind::configuration, "particle-compare takes one tranche");
    setup.tranche = standard_tranches(recovery)[tranche_list.front()];
    const double epsilon = s.real("epsilon", 1e-3);
    const MlmcConfig cfg = mlmc_config(s, c, 2);
    BasketSpec basket;
    basket.firms = s.count("firms", 100000);
    basket.x0 = setup.x0;
    basket.params = setup.params;
    const std::uint64_t baskets = s.count("baskets", 1000);
    const double k = s.real("particle_timestep", 0.25);
    const auto finite_n = s.counts("finite_firms", {100, 1000, 10000});
    const std::uint64_t finite_baskets = s.count("finite_baskets", 1000);
    s.finish();
    basket.validate();

    const SpdeTranchePayoff payoff(setup);
    const MlmcResult spde = run_mlmc(CoupledPathSampler(payoff), epsilon, cfg);
    const double spde_se = std::sqrt(spde.estimator_variance);

    // A separate seed keeps the particle market paths independent of the
    // SPDE estimator's.
    const std::uint64_t particle_seed = mix_key({c.seed, 0x7061727469636c65ULL});
    const BasketEstimate big = basket_monte_carlo(basket, k, setup.schedule, setup.tranche, baskets,
                                                  particle_seed, c.threads);

    Report report;
    Table cmp{"comparison", {"method", "firms", "samples", "estimate", "std_error"}, {}};
    cmp.add({0.0, 0.0, static_cast<double>(spde.levels.front().samples()), spde.estimate, spde_se});
    cmp.add({1.0, static_cast<double>(basket.firms), static_cast<double>(baskets), big.payoff.mean,
             std_error(big.payoff)});

    Table loss{"loss", {"date", "mean", "variance"}, {}};
    for (std::size_t i = 0; i < big.loss.size(); ++i)
        loss.add({i == 0 ? 0.0 : setup.schedule.dates[i - 1], big.loss[i].mean, big.loss[i].variance()});

    Table finite{"finite_n", {"firms", "samples", "estimate", "std_error", "abs_difference"}, {}};
    std::vector<double> log_n, log_diff;
    for (std::uint64_t firms : finite_n) {
        BasketSpec b = basket;
        b.firms = firms;
        const BasketEstimate e = basket_monte_carlo(b, k, setup.schedule, setup.tranche, finite_baskets,
                                                    particle_seed, c.threads);
        const double diff = std::abs(e.payoff.mean - spde.estimate);
        finite.add({static_cast<double>(firms), static_cast<double>(finite_baskets), e.payoff.mean,
                    std_error(e.payoff), diff});
        if (diff > 0.0) {
            log_n.push_back(std::log(static_cast<double>(firms)));
            log_diff.push_back(std::log(diff));
        }
    }

    const double diff = big.payoff.mean - spde.estimate;
    const double sigma = std::hypot(spde_se, std_error(big.payoff));
    report.note("spde_estimate", spde.estimate);
    report.note("spde_std_error", spde_se);
    report.note("particle_estimate", big.payoff.mean);
    report.note("particle_std_error", std_error(big.payoff));
    report.note("difference", diff);
    report.note("combined_sigma", sigma);
    if (log_n.size() >= 2) report.note("finite_n_slope", fit_line(log_n, log_diff).slope);
    report.flag("pass_agreement", std::abs(diff) <= 3.0 * sigma);
    report.tables.push_back(std::move(cmp));
    report.tables.push_back(std::move(loss));
    report.tables.push_back(std::move(finite));
    return report;
}

// -------------------------------------------------------------- complexity

Report mlmc_complexity(Settings& s) {
    const Common c = common(s);
    const SpdePricingSetup setup = spde_setup(s, PricingDefaults{});
    std::vector<double> spde_eps = s.reals("spde_epsilons", {0.005, 0.002, 0.001, 0.0005});
    std::vector<double> sde_eps = s.reals("sde_epsilons", {0.01, 0.005, 0.002, 0.001});
    const std::uint64_t sde_firms = s.count("sde_firms", 100);
    const double firm_scale = s.real("sde_firm_scale", 0.1);
    const MlmcConfig spde_cfg = mlmc_config(s, c, 2);
    MlmcConfig sde_cfg = spde_cfg;
    sde_cfg.min_level = s.integer("sde_min_level", 1);
    const double k0 = s.real("sde_timestep", 0.25);
    s.finish();

    const SpdeTranchePayoff payoff(setup);
    const CoupledPathSampler spde_sampler(payoff);
    Report report;
    Table spde{"spde", {"epsilon", "total_cost", "finest_level", "estimate"}, {}};
    std::vector<double> spde_cost;
    RateFit rates;
    for (double e : spde_eps) {
        const MlmcResult r = run_mlmc(spde_sampler, e, spde_cfg);
        spde.add({e, r.total_cost, static_cast<double>(r.levels.size() - 1), r.estimate});
        spde_cost.push_back(r.total_cost);
        rates = {r.alpha, r.beta, r.gamma};
    }

    BasketPricingSetup basket;
    basket.basket.x0 = setup.x0;
    basket.basket.params = setup.params;
    basket.base_timestep = k0;
    basket.monitoring = Monitoring::Kind::discrete;
    basket.schedule = setup.schedule;
    basket.tranche = setup.tranche;

    Table fixed{"sde_fixed", {"epsilon", "firms", "total_cost", "finest_level", "estimate"}, {}};
    Table scaled{"sde_scaled", {"epsilon", "firms", "total_cost", "finest_level", "estimate"}, {}};
    std::vector<double> fixed_cost, scaled_cost;
    for (double e : sde_eps) {
        basket.basket.firms = sde_firms;
        const MlmcResult f = sde_timestep_mlmc(basket, e, sde_cfg);
        fixed.add({e, static_cast<double>(sde_firms), f.total_cost, static_cast<double>(f.levels.size() - 1),
                   f.estimate});
        fixed_cost.push_back(f.total_cost);

        basket.basket.firms = static_cast<std::size_t>(std::max(1.0, std::ceil(firm_scale / e)));
        const MlmcResult g = sde_timestep_mlmc(basket, e, sde_cfg);
        scaled.add({e, static_cast<double>(basket.basket.firms), g.total_cost,
                    static_cast<double>(g.levels.size() - 1), g.estimate});
        scaled_cost.push_back(g.total_cost);
    }

    const double spde_slope = log_slope(spde_eps, spde_cost);
    const double fixed_slope = log_slope(sde_eps, fixed_cost);
    const double scaled_slope = log_slope(sde_eps, scaled_cost);
    report.note("spde_alpha", rates.alpha);
    report.note("spde_beta", rates.beta);
    report.note("spde_gamma", rates.gamma);
    if (rates.alpha > 0.0 && rates.beta > 0.0 && rates.gamma > 0.0 && rates.alpha >= rates.gamma / 2.0)
        report.note("spde_regime", complexity_regime(rates.alpha, rates.beta, rates.gamma).describe());
    report.note("spde_cost_slope", spde_slope);
    report.note("sde_fixed_cost_slope", fixed_slope);
    report.note("sde_scaled_cost_slope", scaled_slope);
    report.flag("pass_spde_slope", std::abs(spde_slope + 2.0) <= 0.4);
    report.flag("pass_sde_fixed_slope", std::abs(fixed_slope + 2.0) <= 0.4);
    report.flag("pass_sde_scaled_slope", std::abs(scaled_slope + 3.0) <= 0.4);
    report.tables.push_back(std::move(spde));
    report.tables.push_back(std::move(fixed));
    report.tables.push_back(std::move(scaled));
    return report;
}

using Runner = std::function<Report(Settings&)>;

const std::vector<std::pair<std::string, Runner>>& registry() {
    static const std::vector<std::pair<std::string, Runner>> r = {
        {"stability-scan", stability_scan},
        {"eigencheck", eigencheck},
        {"converge-unbounded", [](Settings& s) { return converge_study(s, false); }},
        {"converge-bounded", [](Settings& s) { return converge_study(s, true); }},
        {"fourier-accuracy", fourier_accuracy},
        {"regularity", regularity},
        {"price-tranches", [](Settings& s) { return price(s, Monitoring::Kind::continuous); }},
        {"price-discrete", [](Settings& s) { return price(s, Monitoring::Kind::discrete); }},
        {"particle-compare", particle_compare},
        {"mlmc-complexity", mlmc_complexity},
    };
    return r;
}

}  // namespace

RunConfig::RunConfig(std::string experiment) : experiment_(std::move(experiment)) {}

void RunConfig::set(const std::string& key, const std::string& value) {
    const std::string k = trim(key);
    if (k.empty()) fail(ErrorKind::configuration, "empty configuration key");
    values_[k] = trim(value);
}

void RunConfig::parse(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorKind::configuration, origin + ":" + std::to_string(number) + ": expected key=value");
        set(line.substr(0, eq), line.substr(eq + 1));
    }
}

void RunConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot read config file " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    parse(buffer.str(), path);
}

void Table::add(std::vector<double> row) {
    require(row.size() == columns.size(), ErrorKind::invalid_argument, "row width does not match columns");
    rows.push_back(std::move(row));
}

std::string format_number(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string Table::csv() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_number(row[i]);
        }
        out += '\n';
    }
    return out;
}

void Report::note(const std::string& key, double value) { summary.emplace_back(key, format_number(value)); }

void Report::note(const std::string& key, const std::string& value) { summary.emplace_back(key, value); }

void Report::flag(const std::string& key, bool ok) { summary.emplace_back(key, ok ? "1" : "0"); }

bool Report::passed() const {
    return std::all_of(summary.begin(), summary.end(), [](const auto& kv) {
        return kv.first.rfind("pass", 0) != 0 || kv.second == "1";
    });
}

std::string Report::summary_text() const {
    std::string out = "experiment=" + experiment + "\n";
    for (const auto& [k, v] : summary) out += k + "=" + v + "\n";
    return out;
}

const Table* Report::table(const std::string& name) const {
    for (const Table& t : tables)
        if (t.name == name) return &t;
    return nullptr;
}

void Report::write(const std::string& directory) const {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(directory, ec);
    if (ec) fail(ErrorKind::io, "cannot create output directory " + directory + ": " + ec.message());
    auto put = [&](const std::string& name, const std::string& content) {
        const fs::path path = fs::path(directory) / name;
        std::ofstream out(path, std::ios::binary);
        out << content;
        if (!out) fail(ErrorKind::io, "cannot write " + path.string());
    };
    for (const Table& t : tables) put(experiment + "_" + t.name + ".csv", t.csv());
    put(experiment + "_summary.txt", summary_text());
}

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, runner] : registry()) out.push_back(name);
        return out;
    }();
    return names;
}

Report run_experiment(const RunConfig& config) {
    for (const auto& [name, runner] : registry()) {
        if (name != config.experiment()) continue;
        Settings settings(config);
        Report report = runner(settings);
        report.experiment = name;
        return report;
    }
    fail(ErrorKind::configuration, "unknown experiment '" + config.experiment() + "'");
}

}  // namespace spdemc
