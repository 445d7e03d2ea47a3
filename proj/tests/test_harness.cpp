#include <doctest.h>

#include <cmath>

#include "spdemc/error.hpp"
#include "spdemc/harness.hpp"

using namespace spdemc;

namespace {

StudySetup small_study(double x_min) {
    StudySetup s;
    s.params = ModelParams::from_credit(0.22, 0.2, 0.042);
    s.x_min = x_min;
    s.levels = 3;
    s.paths = 16;
    s.seed = 4;
    return s;
}

}  // namespace

TEST_CASE("study grids and stability guard") {
    StudySetup s = small_study(-16.0 / 3.0);
    CHECK(s.grid(0).intervals() == 16);
    CHECK(s.grid(2).h() == doctest::Approx(1.0 / 3.0));
    CHECK(s.grid(2).k() == doctest::Approx(0.25 / 16));
    CHECK_NOTHROW(s.require_stable());

    s.k0 = 2.0;
    try {
        s.require_stable();
        FAIL("expected a stability error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::stability);
    }
    CHECK_THROWS_AS(converge_unbounded(s), Error);

    StudySetup off = small_study(0.0);
    off.maturity = 5.1;
    CHECK_THROWS_AS(off.require_stable(), Error);
}

TEST_CASE("without market noise every path gives the same error") {
    StudySetup s = small_study(-16.0 / 3.0);
    s.params = ModelParams::from_credit(0.22, 0.0, 0.042);
    const auto r = converge_unbounded(s);
    REQUIRE(r.levels.size() == 4);
    for (const auto& l : r.levels) {
        CHECK(l.std_error == doctest::Approx(0.0).scale(1e-300));
        CHECK(l.value > 0.0);
        CHECK(l.samples == 16);
    }
    for (std::size_t l = 2; l < r.levels.size(); ++l) CHECK(r.levels[l].value < r.levels[l - 1].value);
}

TEST_CASE("convergence studies are reproducible") {
    const StudySetup s = small_study(-16.0 / 3.0);
    const auto a = converge_unbounded(s);
    StudySetup threaded = s;
    threaded.threads = 3;
    const auto b = converge_unbounded(threaded);
    for (std::size_t l = 0; l < a.levels.size(); ++l) {
        CHECK(a.levels[l].value == b.levels[l].value);
        CHECK(a.levels[l].std_error == b.levels[l].std_error);
    }
    CHECK(a.fit.slope == b.fit.slope);
}

TEST_CASE("bounded differences grow near the barrier") {
    StudySetup near = small_study(0.0);
    near.x0 = 1.0;
    StudySetup far = small_study(0.0);
    far.x0 = 5.0;
    const auto a = converge_bounded(near);
    const auto b = converge_bounded(far);
    REQUIRE(a.levels.size() == 3);
    CHECK(a.levels.front().level == 1);
    for (std::size_t l = 0; l < a.levels.size(); ++l) CHECK(a.levels[l].value > b.levels[l].value);
}

TEST_CASE("Fourier-mode errors") {
    StudySetup s = small_study(0.0);
    s.paths = 64;
    const auto zero = fourier_mode_accuracy(s, 0.0);
    for (const auto& l : zero.levels) CHECK(l.value == 0.0);

    StudySetup det = s;
    det.params = ModelParams{0.0, 0.0, 1.0, 0.0};
    det.levels = 4;
    const auto d = fourier_mode_accuracy(det, 1.0);
    for (const auto& l : d.levels) CHECK(l.std_error == doctest::Approx(0.0).scale(1e-300));
    CHECK(d.fit.slope == doctest::Approx(-2.0).epsilon(0.05));

    const auto r = fourier_mode_accuracy(s, 1.0);
    for (std::size_t l = 1; l < r.levels.size(); ++l) CHECK(r.levels[l].value < r.levels[l - 1].value);
}

TEST_CASE("boundary second difference") {
    StudySetup s = small_study(0.0);
    s.x0 = 1.0;
    s.h0 = 0.25;
    s.maturity = 0.2;
    s.k0 = 0.05;
    s.levels = 2;
    s.paths = 50;
    s.params = ModelParams::from_credit(0.22, 0.0, 0.042);
    for (const auto& l : regularity_diagnostic(s)) CHECK(l.variance == doctest::Approx(0.0).scale(1e-300));

    s.params = ModelParams::from_credit(0.22, 0.2, 0.042);
    const auto r = regularity_diagnostic(s);
    REQUIRE(r.size() == 3);
    CHECK(r[2].variance > r[1].variance);
}

TEST_CASE("slope fit ignores coarse and empty levels") {
    std::vector<ConvergenceLevel> levels;
    for (int l = 0; l < 5; ++l) levels.push_back({l, 0, 0, std::pow(2.0, -4.0 * l) * (l == 0 ? 5 : 1), 0, 1});
    levels.push_back({5, 0, 0, 0.0, 0, 1});
    CHECK(fit_convergence(levels, 1).slope == doctest::Approx(-4.0));
}
