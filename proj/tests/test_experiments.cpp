#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "spdemc/error.hpp"
#include "spdemc/experiments.hpp"

using namespace spdemc;

namespace {

std::string summary_value(const Report& r, const std::string& key) {
    for (const auto& [k, v] : r.summary)
        if (k == key) return v;
    FAIL("missing summary key " << key);
    return {};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("experiment registry") {
    const auto& names = experiment_names();
    CHECK(names.size() == 10);
    for (const char* n : {"stability-scan", "eigencheck", "converge-unbounded", "converge-bounded",
                          "fourier-accuracy", "regularity", "price-tranches", "price-discrete",
                          "particle-compare", "mlmc-complexity"})
        CHECK(std::find(names.begin(), names.end(), n) != names.end());
    try {
        run_experiment(RunConfig("no-such-thing"));
        FAIL("expected a configuration error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::configuration);
    }
}

TEST_CASE("config text") {
    RunConfig c("eigencheck");
    c.parse("# comment\n\nJ = 6, 16\n  tolerance=1e-10  # trailing\n");
    CHECK(c.values().at("J") == "6, 16");
    CHECK(c.values().at("tolerance") == "1e-10");
    c.set("J", "6");
    CHECK(c.values().at("J") == "6");
    CHECK_THROWS_AS(c.parse("no equals sign"), Error);
    CHECK_THROWS_AS(c.load_file("/nonexistent/file.cfg"), Error);
}

TEST_CASE("unknown or malformed keys are rejected") {
    RunConfig c("stability-scan");
    c.set("hh", "1.0");
    CHECK_THROWS_WITH_AS(run_experiment(c), doctest::Contains("unknown configuration key"), Error);
    RunConfig bad("stability-scan");
    bad.set("h", "one");
    CHECK_THROWS_AS(run_experiment(bad), Error);
    RunConfig frac("eigencheck");
    frac.set("J", "6.5");
    CHECK_THROWS_AS(run_experiment(frac), Error);
}

TEST_CASE("stability scan defaults") {
    const Report r = run_experiment(RunConfig("stability-scan"));
    CHECK(r.passed());
    CHECK(std::stod(summary_value(r, "max_amplification")) <= 1.0);
    const Table* t = r.table("amplification");
    REQUIRE(t);
    CHECK(t->rows.size() >= 10000);
    CHECK(t->columns == std::vector<std::string>{"theta", "S"});

    RunConfig unstable("stability-scan");
    unstable.set("ratio", "1.02/1.08");
    const Report u = run_experiment(unstable);
    CHECK(std::stod(summary_value(u, "max_amplification")) > 1.0);
    CHECK(u.passed());
}

TEST_CASE("eigencheck") {
    RunConfig c("eigencheck");
    c.set("J", "6");
    const Report r = run_experiment(c);
    CHECK(r.passed());
    CHECK(r.table("eigen")->rows.size() == 1);
}

TEST_CASE("csv output is reproducible across threads") {
    RunConfig c("converge-unbounded");
    c.set("seed", "7");
    c.set("levels", "3");
    c.set("paths", "20");
    c.set("threads", "1");
    const std::string a = run_experiment(c).table("convergence")->csv();
    const std::string b = run_experiment(c).table("convergence")->csv();
    c.set("threads", "3");
    const std::string d = run_experiment(c).table("convergence")->csv();
    CHECK(a == b);
    CHECK(a == d);
    c.set("seed", "8");
    CHECK(run_experiment(c).table("convergence")->csv() != a);
}

TEST_CASE("reports write csv and summary files") {
    const auto dir = std::filesystem::temp_directory_path() / "spdemc_report_test";
    std::filesystem::remove_all(dir);
    RunConfig c("eigencheck");
    const Report r = run_experiment(c);
    r.write(dir.string());
    CHECK(slurp(dir / "eigencheck_eigen.csv") == r.table("eigen")->csv());
    CHECK(slurp(dir / "eigencheck_summary.txt") == r.summary_text());
    std::filesystem::remove_all(dir);
}

TEST_CASE("number formatting and tables") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(2.0) == "2");
    Table t{"x", {"a", "b"}, {}};
    t.add({1.0, 0.5});
    CHECK(t.csv() == "a,b\n1,0.5\n");
    CHECK_THROWS(t.add({1.0}));

    Report r;
    r.flag("pass_one", true);
    r.note("value", 1.5);
    CHECK(r.passed());
    r.flag("pass_two", false);
    CHECK_FALSE(r.passed());
    CHECK(r.summary_text().find("value=1.5\n") != std::string::npos);
}
