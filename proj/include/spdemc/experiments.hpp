#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace spdemc {

/// Flat key=value settings for one experiment. Values stay as text until the
/// experiment reads them; keys it does not read are rejected.
class RunConfig {
public:
    explicit RunConfig(std::string experiment = {});

    const std::string& experiment() const noexcept { return experiment_; }
    void set_experiment(std::string name) { experiment_ = std::move(name); }

    /// Later calls override earlier values.
    void set(const std::string& key, const std::string& value);
    /// Lines of key=value; '#' starts a comment; blank lines ignored.
    void parse(const std::string& text, const std::string& origin = "<text>");
    void load_file(const std::string& path);

    const std::map<std::string, std::string>& values() const noexcept { return values_; }

private:
    std::string experiment_;
    std::map<std::string, std::string> values_;
};

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add(std::vector<double> row);
    /// Header plus rows, numbers with 17 significant digits.
    std::string csv() const;
};

struct Report {
    std::string experiment;
    /// Ordered key=value lines; keys starting with "pass" are 0/1 flags.
    std::vector<std::pair<std::string, std::string>> summary;
    std::vector<Table> tables;

    void note(const std::string& key, double value);
    void note(const std::string& key, const std::string& value);
    void flag(const std::string& key, bool ok);

    /// True when every pass flag is set.
    bool passed() const;
    std::string summary_text() const;
    const Table* table(const std::string& name) const;
    /// Writes <name>.csv per table and summary.txt into `directory`.
    void write(const std::string& directory) const;
};

const std::vector<std::string>& experiment_names();

Report run_experiment(const RunConfig& config);

/// Formats with 17 significant digits.
std::string format_number(double value);

}  // namespace spdemc
