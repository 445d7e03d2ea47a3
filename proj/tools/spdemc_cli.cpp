#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spdemc/spdemc.h"

namespace {

struct Config {
    spdemc_config* handle = nullptr;
    ~Config() { spdemc_config_destroy(handle); }
};

struct Report {
    spdemc_report* handle = nullptr;
    ~Report() { spdemc_report_destroy(handle); }
};

int failure(spdemc_status status) {
    std::fprintf(stderr, "spdemc: %s: %s\n", spdemc_status_string(status), spdemc_last_error());
    return 1;
}

// Turns the leftover "--key value" / "--key=value" arguments into overrides.
bool overrides(const std::vector<std::string>& extra, std::vector<std::pair<std::string, std::string>>& out) {
    for (std::size_t i = 0; i < extra.size(); ++i) {
        const std::string& arg = extra[i];
        if (arg.rfind("--", 0) != 0 || arg.size() < 3) {
            std::fprintf(stderr, "spdemc: unexpected argument '%s'\n", arg.c_str());
            return false;
        }
        const auto eq = arg.find('=');
        if (eq != std::string::npos) {
            out.emplace_back(arg.substr(2, eq - 2), arg.substr(eq + 1));
        } else if (i + 1 < extra.size()) {
            out.emplace_back(arg.substr(2), extra[++i]);
        } else {
            std::fprintf(stderr, "spdemc: missing value for '%s'\n", arg.c_str());
            return false;
        }
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multilevel Monte Carlo for a stochastic drift-diffusion PDE in credit modelling"};
    app.allow_extras();

    std::string experiment;
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    bool list = false;

    std::string names;
    for (std::size_t i = 0; i < spdemc_experiment_count(); ++i)
        names += std::string(i ? ", " : "") + spdemc_experiment_name(i);

    app.add_option("experiment", experiment, "One of: " + names);
    app.add_option("--config", config_path, "key=value configuration file");
    auto* seed_opt = app.add_option("--seed", seed, "Experiment seed");
    app.add_option("--out", out_dir, "Directory for CSV and summary output");
    auto* threads_opt = app.add_option("--threads", threads, "Worker threads (0 = all cores)");
    app.add_flag("--list", list, "List experiments and exit");
    app.footer("Any other --key value pair overrides the configuration file.");

    CLI11_PARSE(app, argc, argv);

    if (list) {
        for (std::size_t i = 0; i < spdemc_experiment_count(); ++i) std::printf("%s\n", spdemc_experiment_name(i));
        return 0;
    }
    if (experiment.empty()) {
        std::fprintf(stderr, "%s", app.help().c_str());
        return 2;
    }

    std::vector<std::pair<std::string, std::string>> extra;
    if (!overrides(app.remaining(), extra)) return 2;

    Config config;
    spdemc_status st = spdemc_config_create(experiment.c_str(), &config.handle);
    if (st != SPDEMC_OK) return failure(st);
    if (!config_path.empty() && (st = spdemc_config_load(config.handle, config_path.c_str())) != SPDEMC_OK)
        return failure(st);
    for (const auto& [key, value] : extra)
        if ((st = spdemc_config_set(config.handle, key.c_str(), value.c_str())) != SPDEMC_OK) return failure(st);
    if (*seed_opt && (st = spdemc_config_set(config.handle, "seed", std::to_string(seed).c_str())) != SPDEMC_OK)
        return failure(st);
    if (*threads_opt &&
        (st = spdemc_config_set(config.handle, "threads", std::to_string(threads).c_str())) != SPDEMC_OK)
        return failure(st);

    Report report;
    if ((st = spdemc_run(config.handle, &report.handle)) != SPDEMC_OK) return failure(st);
    if (!out_dir.empty() && (st = spdemc_report_write(report.handle, out_dir.c_str())) != SPDEMC_OK)
        return failure(st);
    std::fputs(spdemc_report_summary(report.handle), stdout);
    return 0;
}
