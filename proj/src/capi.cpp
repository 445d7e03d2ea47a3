#include "spdemc/spdemc.h"

#include <algorithm>
#include <cmath>
#include <new>
#include <string>
#include <vector>

#include "spdemc/error.hpp"
#include "spdemc/experiments.hpp"
#include "spdemc/fd_solver.hpp"
#include "spdemc/stability.hpp"

struct spdemc_config {
    spdemc::RunConfig config;
};

struct spdemc_report {
    spdemc::Report report;
    std::string summary;
    std::vector<std::string> csv;
};

struct spdemc_solver {
    spdemc::PathSolver solver;
};

namespace {

thread_local std::string last_error;

spdemc_status status_of(spdemc::ErrorKind kind) {
    using spdemc::ErrorKind;
    switch (kind) {
        case ErrorKind::invalid_argument: return SPDEMC_ERR_INVALID_ARGUMENT;
        case ErrorKind::domain: return SPDEMC_ERR_DOMAIN;
        case ErrorKind::configuration: return SPDEMC_ERR_CONFIGURATION;
        case ErrorKind::numeric: return SPDEMC_ERR_NUMERIC;
        case ErrorKind::stability: return SPDEMC_ERR_STABILITY;
        case ErrorKind::convergence: return SPDEMC_ERR_CONVERGENCE;
        case ErrorKind::degenerate: return SPDEMC_ERR_DEGENERATE;
        case ErrorKind::io: return SPDEMC_ERR_IO;
    }
    return SPDEMC_ERR_INTERNAL;
}

template <class F>
spdemc_status guarded(F&& body) {
    try {
        body();
        last_error.clear();
        return SPDEMC_OK;
    } catch (const spdemc::Error& e) {
        last_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return SPDEMC_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return SPDEMC_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown failure";
        return SPDEMC_ERR_INTERNAL;
    }
}

void need(const void* p, const char* what) {
    if (!p) spdemc::fail(spdemc::ErrorKind::invalid_argument, std::string(what) + " must not be null");
}

spdemc::ModelParams to_params(const spdemc_model* m) {
    need(m, "model");
    spdemc::ModelParams p{m->mu, m->rho, m->sigma, m->r};
    p.validate();
    return p;
}

}  // namespace

extern "C" {

const char* spdemc_version(void) { return "0.1.0"; }

const char* spdemc_status_string(spdemc_status status) {
    switch (status) {
        case SPDEMC_OK: return "ok";
        case SPDEMC_ERR_INVALID_ARGUMENT: return "invalid argument";
        case SPDEMC_ERR_DOMAIN: return "domain error";
        case SPDEMC_ERR_CONFIGURATION: return "configuration error";
        case SPDEMC_ERR_NUMERIC: return "numeric error";
        case SPDEMC_ERR_STABILITY: return "stability violation";
        case SPDEMC_ERR_CONVERGENCE: return "convergence failure";
        case SPDEMC_ERR_DEGENERATE: return "degenerate input";
        case SPDEMC_ERR_IO: return "i/o error";
        case SPDEMC_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* spdemc_last_error(void) { return last_error.c_str(); }

size_t spdemc_experiment_count(void) { return spdemc::experiment_names().size(); }

const char* spdemc_experiment_name(size_t index) {
    const auto& names = spdemc::experiment_names();
    return index < names.size() ? names[index].c_str() : nullptr;
}

spdemc_status spdemc_config_create(const char* experiment, spdemc_config** out) {
    return guarded([&] {
        need(out, "out");
        *out = nullptr;
        need(experiment, "experiment");
        *out = new spdemc_config{spdemc::RunConfig(experiment)};
    });
}

void spdemc_config_destroy(spdemc_config* config) { delete config; }

spdemc_status spdemc_config_set(spdemc_config* config, const char* key, const char* value) {
    return guarded([&] {
        need(config, "config");
        need(key, "key");
        need(value, "value");
        config->config.set(key, value);
    });
}

spdemc_status spdemc_config_parse(spdemc_config* config, const char* text) {
    return guarded([&] {
        need(config, "config");
        need(text, "text");
        config->config.parse(text);
    });
}

spdemc_status spdemc_config_load(spdemc_config* config, const char* path) {
    return guarded([&] {
        need(config, "config");
        need(path, "path");
        config->config.load_file(path);
    });
}

spdemc_status spdemc_run(const spdemc_config* config, spdemc_report** out) {
    return guarded([&] {
        need(config, "config");
        need(out, "out");
        *out = nullptr;
        auto* r = new spdemc_report{spdemc::run_experiment(config->config), {}, {}};
        r->summary = r->report.summary_text();
        for (const auto& t : r->report.tables) r->csv.push_back(t.csv());
        *out = r;
    });
}

void spdemc_report_destroy(spdemc_report* report) { delete report; }

const char* spdemc_report_summary(const spdemc_report* report) {
    return report ? report->summary.c_str() : nullptr;
}

int spdemc_report_passed(const spdemc_report* report) { return report && report->report.passed() ? 1 : 0; }

size_t spdemc_report_table_count(const spdemc_report* report) {
    return report ? report->report.tables.size() : 0;
}

const char* spdemc_report_table_name(const spdemc_report* report, size_t index) {
    if (!report || index >= report->report.tables.size()) return nullptr;
    return report->report.tables[index].name.c_str();
}

const char* spdemc_report_table_csv(const spdemc_report* report, size_t index) {
    if (!report || index >= report->csv.size()) return nullptr;
    return report->csv[index].c_str();
}

spdemc_status spdemc_report_write(const spdemc_report* report, const char* directory) {
    return guarded([&] {
        need(report, "report");
        need(directory, "directory");
        report->report.write(directory);
    });
}

spdemc_status spdemc_model_from_credit(double sigma, double rho, double r, spdemc_model* out) {
    return guarded([&] {
        need(out, "out");
        const auto p = spdemc::ModelParams::from_credit(sigma, rho, r);
        *out = {p.mu, p.rho, p.sigma, p.r};
    });
}

spdemc_status spdemc_ms_amplification(const spdemc_model* model, double theta, double h, double k,
                                      double* out) {
    return guarded([&] {
        need(out, "out");
        spdemc::require(h > 0.0 && k > 0.0, spdemc::ErrorKind::invalid_argument, "h and k must be positive");
        *out = spdemc::ms_amplification(theta, to_params(model), h, k);
    });
}

spdemc_status spdemc_exact_density(const spdemc_model* model, double x, double t, double market_endpoint,
                                   double x0, double* out) {
    return guarded([&] {
        need(out, "out");
        *out = spdemc::exact_density(x, t, market_endpoint, x0, to_params(model));
    });
}

spdemc_status spdemc_solver_create(const spdemc_model* model, double x_min, double h, int intervals,
                                   double k, double x0, int pentadiagonal, spdemc_solver** out) {
    return guarded([&] {
        need(out, "out");
        *out = nullptr;
        const spdemc::GridSpec grid(x_min, h, intervals, k);
        const auto scheme = pentadiagonal ? spdemc::Scheme::pentadiagonal : spdemc::Scheme::tridiagonal;
        auto* s = new spdemc_solver{spdemc::PathSolver(grid, to_params(model), scheme)};
        try {
            s->solver.reset(spdemc::project_initial(spdemc::InitialCondition::point_mass(x0), grid));
        } catch (...) {
            delete s;
            throw;
        }
        *out = s;
    });
}

void spdemc_solver_destroy(spdemc_solver* solver) { delete solver; }

spdemc_status spdemc_solver_step(spdemc_solver* solver, const double* z, size_t count) {
    return guarded([&] {
        need(solver, "solver");
        if (count) need(z, "z");
        for (size_t i = 0; i < count; ++i) solver->solver.advance(z[i]);
    });
}

spdemc_status spdemc_solver_monitor(spdemc_solver* solver) {
    return guarded([&] {
        need(solver, "solver");
        solver->solver.monitor();
    });
}

size_t spdemc_solver_size(const spdemc_solver* solver) { return solver ? solver->solver.values().size() : 0; }

spdemc_status spdemc_solver_values(const spdemc_solver* solver, double* out, size_t capacity) {
    return guarded([&] {
        need(solver, "solver");
        need(out, "out");
        const auto v = solver->solver.values();
        spdemc::require(capacity >= v.size(), spdemc::ErrorKind::invalid_argument, "output buffer too small");
        std::copy(v.begin(), v.end(), out);
    });
}

spdemc_status spdemc_solver_mass(const spdemc_solver* solver, double* out) {
    return guarded([&] {
        need(solver, "solver");
        need(out, "out");
        *out = solver->solver.mass();
    });
}

}  // extern "C"
