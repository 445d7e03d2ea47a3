#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "spdemc/error.hpp"
#include "spdemc/fd_solver.hpp"
#include "spdemc/paths.hpp"
#include "spdemc/stability.hpp"

using namespace spdemc;

namespace {

const ModelParams kCredit = ModelParams::from_credit(0.22, 0.2, 0.042);

SolverState gaussian(const GridSpec& g, double centre, double width) {
    SolverState s{std::vector<double>(g.interior_count()), 0};
    for (int j = 1; j < g.intervals(); ++j) {
        const double d = (g.node(j) - centre) / width;
        s.values[j - 1] = std::exp(-0.5 * d * d);
    }
    return s;
}

double l2(const std::vector<double>& a, const std::vector<double>& b, double h) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(sum * h);
}

}  // namespace

TEST_CASE("grid construction") {
    const GridSpec g = GridSpec::from_bounds(-16.0 / 3.0, 16.0, 4.0 / 3.0, 0.25);
    CHECK(g.intervals() == 16);
    CHECK(g.interior_count() == 15);
    CHECK(g.x_max() == doctest::Approx(16.0));
    CHECK(g.zero_node() == 4);
    const GridSpec r = g.refined(2);
    CHECK(r.h() == doctest::Approx(1.0 / 3.0));
    CHECK(r.k() == doctest::Approx(0.25 / 16));
    CHECK(r.intervals() == 64);
    CHECK_THROWS_AS(GridSpec::from_bounds(0.0, 1.0, 0.3, 0.1), Error);
    CHECK_THROWS_AS(GridSpec(0.0, -1.0, 4, 0.1), Error);
    CHECK_FALSE(GridSpec::from_bounds(-1.0 / 3.0, 1.0, 2.0 / 3.0, 0.1).zero_node().has_value());
}

TEST_CASE("credit drift") {
    CHECK(kCredit.mu == doctest::Approx((0.042 - 0.5 * 0.22 * 0.22) / 0.22));
    CHECK_THROWS_AS(ModelParams::from_credit(0.0, 0.2, 0.04), Error);
    CHECK_THROWS_AS(ModelParams::from_credit(0.2, 1.2, 0.04), Error);
}

TEST_CASE("point-mass projection") {
    const GridSpec g(0.0, 0.5, 10, 0.01);
    SUBCASE("on a node") {
        const auto s = project_initial(InitialCondition::point_mass(2.0), g);
        for (int j = 1; j < 10; ++j) CHECK(s.values[j - 1] == doctest::Approx(j == 4 ? 2.0 : 0.0));
        CHECK(s.mass(g) == doctest::Approx(1.0));
    }
    SUBCASE("midway") {
        const auto s = project_initial(InitialCondition::point_mass(2.25), g);
        CHECK(s.values[3] == doctest::Approx(1.0));
        CHECK(s.values[4] == doctest::Approx(1.0));
        CHECK(s.mass(g) == doctest::Approx(1.0));
    }
    SUBCASE("off-node start on the coarse unbounded grid") {
        const GridSpec u = GridSpec::from_bounds(-16.0 / 3.0, 16.0, 4.0 / 3.0, 0.25);
        const auto s = project_initial(InitialCondition::point_mass(5.0), u);
        // x = 4 is node 7 and x = 16/3 is node 8; hat weights 1/4 and 3/4, divided by h.
        CHECK(s.values[6] == doctest::Approx(0.1875).epsilon(1e-14));
        CHECK(s.values[7] == doctest::Approx(0.5625).epsilon(1e-14));
        CHECK(s.mass(u) == doctest::Approx(1.0).epsilon(1e-14));
        int nonzero = 0;
        for (double v : s.values) nonzero += v != 0.0;
        CHECK(nonzero == 2);
    }
    CHECK_THROWS_AS(project_initial(InitialCondition::point_mass(0.0), g), Error);
    CHECK_THROWS_AS(project_initial(InitialCondition::point_mass(7.0), g), Error);
}

TEST_CASE("tabulated projection reproduces piecewise-linear densities at nodes") {
    const GridSpec g(0.0, 0.25, 16, 0.01);
    // Tent on [1, 3] peaking at 2, breakpoints off the grid nodes elsewhere.
    const auto ic = InitialCondition::tabulated({1.0, 2.0, 3.0}, {0.0, 1.0, 0.0});
    const auto s = project_initial(ic, g);
    for (int j = 1; j < 16; ++j) {
        const double x = g.node(j);
        // Linear pieces are reproduced; kinks are averaged against the hat.
        double expected = std::max(0.0, 1.0 - std::abs(x - 2.0));
        if (std::abs(x - 2.0) < 1e-12) expected = 1.0 - g.h() / 3;
        if (std::abs(std::abs(x - 2.0) - 1.0) < 1e-12) expected = g.h() / 6;
        CHECK(s.values[j - 1] == doctest::Approx(expected).epsilon(1e-13));
    }
    CHECK(s.mass(g) == doctest::Approx(1.0));
    // Breakpoints between nodes: mass is still the exact integral.
    const auto off = InitialCondition::tabulated({0.9, 1.6, 2.3}, {0.0, 2.0 / 1.4, 0.0});
    CHECK(project_initial(off, g).mass(g) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("heat step when the noise and drift vanish") {
    const GridSpec g(0.0, 0.1, 20, 0.004);
    const ModelParams p{0.0, 0.0, 1.0, 0.0};
    const auto s = gaussian(g, 1.0, 0.3);
    const auto out = milstein_step_tridiagonal(s, 0.0, p, g);
    const double r = g.k() / (2 * g.h() * g.h());
    for (std::size_t j = 0; j < s.values.size(); ++j) {
        const double left = j ? s.values[j - 1] : 0.0;
        const double right = j + 1 < s.values.size() ? s.values[j + 1] : 0.0;
        CHECK(out.values[j] == doctest::Approx(s.values[j] + r * (right - 2 * s.values[j] + left)));
    }
    CHECK(out.time_index == 1);
}

TEST_CASE("constant stencil is preserved") {
    const GridSpec g(0.0, 0.2, 10, 0.01);
    SolverState s{std::vector<double>(9, 0.0), 0};
    s.values[3] = s.values[4] = s.values[5] = 0.7;
    const auto out = milstein_step_tridiagonal(s, 1.3, kCredit, g);
    CHECK(out.values[4] == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("a Fourier mode is multiplied by the stability symbol") {
    const GridSpec g(0.0, 0.1, 200, 0.003);
    const double theta = 0.37;
    SolverState c{std::vector<double>(199), 0}, s{std::vector<double>(199), 0};
    for (int j = 1; j < 200; ++j) {
        c.values[j - 1] = std::cos(j * theta);
        s.values[j - 1] = std::sin(j * theta);
    }
    for (double z : {-1.7, 0.0, 0.4, 2.2}) {
        const auto c1 = milstein_step_tridiagonal(c, z, kCredit, g);
        const auto s1 = milstein_step_tridiagonal(s, z, kCredit, g);
        const auto g_theta = fourier_symbols(theta, kCredit, g.h(), g.k()).factor(z);
        for (int j = 2; j < 199; ++j) {
            const std::complex<double> got(c1.values[j - 1], s1.values[j - 1]);
            const std::complex<double> want = g_theta * std::polar(1.0, j * theta);
            CHECK(std::abs(got - want) <= 1e-12 * std::abs(want));
        }
    }
}

TEST_CASE("steps are linear in the state") {
    const GridSpec g(0.0, 0.25, 40, 0.02);
    const auto u = gaussian(g, 3.0, 0.8);
    const auto v = gaussian(g, 6.0, 1.5);
    SolverState w{std::vector<double>(u.values.size()), 0};
    for (std::size_t i = 0; i < w.values.size(); ++i) w.values[i] = 2.0 * u.values[i] - 0.5 * v.values[i];
    for (Scheme sc : {Scheme::tridiagonal, Scheme::pentadiagonal}) {
        auto step = [&](const SolverState& x) {
            return sc == Scheme::tridiagonal ? milstein_step_tridiagonal(x, 0.9, kCredit, g)
                                             : milstein_step_pentadiagonal(x, 0.9, kCredit, g);
        };
        const auto su = step(u), sv = step(v), sw = step(w);
        for (std::size_t i = 0; i < w.values.size(); ++i)
            CHECK(sw.values[i] == doctest::Approx(2.0 * su.values[i] - 0.5 * sv.values[i]).epsilon(1e-12));
    }
}

TEST_CASE("pentadiagonal step special cases") {
    const GridSpec g(0.0, 0.25, 40, 0.02);
    const auto s = gaussian(g, 4.0, 1.0);
    SUBCASE("unit Z removes the Ito correction from both schemes") {
        for (double z : {1.0, -1.0}) {
            const auto a = milstein_step_tridiagonal(s, z, kCredit, g);
            const auto b = milstein_step_pentadiagonal(s, z, kCredit, g);
            for (std::size_t i = 0; i < s.values.size(); ++i)
                CHECK(b.values[i] == doctest::Approx(a.values[i]).epsilon(1e-14));
        }
    }
    SUBCASE("schemes coincide without noise") {
        const ModelParams p{0.3, 0.0, 1.0, 0.0};
        const auto a = milstein_step_tridiagonal(s, 0.0, p, g);
        const auto b = milstein_step_pentadiagonal(s, 0.0, p, g);
        for (std::size_t i = 0; i < s.values.size(); ++i)
            CHECK(b.values[i] == doctest::Approx(a.values[i]).epsilon(1e-14));
    }
}

TEST_CASE("the two schemes agree to second order in h") {
    // One step from a smooth state at fixed k/h^2 and |Z| = 2.
    std::vector<double> diffs;
    for (int level = 0; level < 4; ++level) {
        const double h = 0.4 / (1 << level);
        const GridSpec g = GridSpec::from_bounds(-6.0, 6.0, h, 0.5 * h * h);
        const auto s = gaussian(g, 0.0, 1.0);
        const auto a = milstein_step_tridiagonal(s, 2.0, kCredit, g);
        const auto b = milstein_step_pentadiagonal(s, 2.0, kCredit, g);
        diffs.push_back(l2(a.values, b.values, h));
    }
    for (std::size_t i = 1; i < diffs.size(); ++i) CHECK(diffs[i - 1] / diffs[i] > 3.5);

    // Terminal states over whole paths, same Brownian path on every level.
    const int top = 4;
    const GridSpec base = GridSpec::from_bounds(-16.0 / 3.0, 16.0, 4.0 / 3.0, 0.25);
    std::vector<double> mean_sq(top + 1, 0.0);
    for (std::uint64_t m = 0; m < 8; ++m) {
        auto path = generate_fine_path({5, top, m}, 20u << (2 * top), base.refined(top).k());
        std::vector<BrownianPath> paths{path};
        for (int l = top; l > 0; --l) paths.insert(paths.begin(), coarsen_path(paths.front(), 4));
        for (int l = 1; l <= top; ++l) {
            const GridSpec g = base.refined(l);
            SolveOptions tri{Scheme::tridiagonal, {}, {}, false};
            SolveOptions pen{Scheme::pentadiagonal, {}, {}, false};
            const auto ic = InitialCondition::point_mass(5.0);
            const auto a = solve_path(g, kCredit, ic, paths[l], tri).terminal;
            const auto b = solve_path(g, kCredit, ic, paths[l], pen).terminal;
            const double d = l2(a.values, b.values, g.h());
            mean_sq[l] += d * d / 8;
        }
    }
    // Three refinements at second order: a factor 64, allow for noise.
    CHECK(std::sqrt(mean_sq[1] / mean_sq[top]) > 30.0);
    for (int l = 2; l <= top; ++l) CHECK(mean_sq[l] < mean_sq[l - 1]);
}

TEST_CASE("default monitoring") {
    const GridSpec g(-1.0, 0.25, 8, 0.01);  // node 4 is x = 0
    SUBCASE("positive support is unchanged") {
        SolverState s{{0, 0, 0, 0, 1, 2, 3}, 0};
        CHECK(apply_monitoring(s, g).values == s.values);
    }
    SUBCASE("negative support is removed and x = 0 halved") {
        SolverState s{{1, 2, 3, 4, 0, 0, 0}, 0};
        const auto out = apply_monitoring(s, g);
        CHECK(out.values == std::vector<double>{0, 0, 0, 2, 0, 0, 0});
    }
    SUBCASE("a symmetric profile loses half its mass") {
        SolverState s{{0.1, 0.5, 1.0, 1.4, 1.0, 0.5, 0.1}, 0};
        CHECK(apply_monitoring(s, g).mass(g) == doctest::Approx(0.5 * s.mass(g)).epsilon(1e-15));
    }
    CHECK_THROWS_AS(apply_monitoring(SolverState{std::vector<double>(5), 0}, GridSpec(-0.3, 0.25, 6, 0.01)),
                    Error);
}

TEST_CASE("closed-form density") {
    const ModelParams heat{0.0, 0.0, 1.0, 0.0};
    CHECK(exact_density(0.7, 2.0, 5.0, 0.0, heat) ==
          doctest::Approx(std::exp(-0.49 / 4.0) / std::sqrt(4.0 * std::numbers::pi)));
    CHECK(exact_density(0.7, 2.0, -3.0, 0.0, heat) == exact_density(0.7, 2.0, 5.0, 0.0, heat));
    const double peak_x = 5.0 + kCredit.mu * 5.0 + std::sqrt(0.2) * 1.3;
    CHECK(exact_density(peak_x, 5.0, 1.3, 5.0, kCredit) == doctest::Approx(1.0 / std::sqrt(8.0 * std::numbers::pi)));
    CHECK(1.0 / std::sqrt(8.0 * std::numbers::pi) == doctest::Approx(0.19947).epsilon(1e-4));
    CHECK_THROWS_AS(exact_density(0.0, 0.0, 0.0, 1.0, kCredit), Error);
    CHECK_THROWS_AS(exact_density(0.0, 1.0, 0.0, 1.0, ModelParams{0.1, 1.0, 1.0, 0.0}), Error);
}

TEST_CASE("solve_path basics") {
    const GridSpec g = GridSpec::from_bounds(0.0, 16.0, 1.6, 0.25);
    const auto ic = InitialCondition::point_mass(5.0);
    SUBCASE("zero steps return the projection") {
        const auto t = solve_path(g, kCredit, ic, BrownianPath{0, 0.25, {}});
        CHECK(t.terminal.values == project_initial(ic, g).values);
    }
    SUBCASE("path solver matches the reference step") {
        const auto path = generate_fine_path({1, 0, 0}, 20, 0.25);
        auto ref = project_initial(ic, g);
        for (double z : path.z) ref = milstein_step_tridiagonal(ref, z, kCredit, g);
        const auto t = solve_path(g, kCredit, ic, path);
        for (std::size_t i = 0; i < ref.values.size(); ++i)
            CHECK(t.terminal.values[i] == doctest::Approx(ref.values[i]).epsilon(1e-13));
        CHECK(t.terminal.time_index == 20);
    }
    SUBCASE("mass stays in [0, 1] and drains through the boundary") {
        const GridSpec fine = g.refined(2);
        double total = 0.0;
        for (std::uint64_t m = 0; m < 20; ++m) {
            const auto path = generate_fine_path({2, 2, m}, 320, fine.k());
            const auto t = solve_path(fine, kCredit, ic, path);
            const double mass = t.terminal.mass(fine);
            CHECK(mass >= 0.0);
            CHECK(mass <= 1.0 + 1e-3);
            total += mass / 20;
        }
        CHECK(total < 1.0);
    }
    SUBCASE("observation after monitoring at a shared date") {
        const GridSpec d = GridSpec::from_bounds(-4.0, 16.0, 0.5, 0.0625);
        const auto path = generate_fine_path({3, 0, 0}, 8, 0.0625);
        SolveOptions opt;
        opt.monitoring = Monitoring::discrete({0.25, 0.5});
        opt.observation_dates = {0.25, 0.5};
        const auto t = solve_path(d, kCredit, InitialCondition::point_mass(0.5), path, opt);
        REQUIRE(t.states.size() == 2);
        const auto zero = *d.zero_node();
        for (int j = 1; j < zero; ++j) CHECK(t.states[0].values[j - 1] == 0.0);
        CHECK(t.times == std::vector<double>{0.25, 0.5});
    }
    SUBCASE("off-grid dates are rejected") {
        SolveOptions opt;
        opt.observation_dates = {0.3};
        CHECK_THROWS_AS(solve_path(g, kCredit, ic, generate_fine_path({0, 0, 0}, 20, 0.25), opt), Error);
    }
    SUBCASE("non-finite increments are rejected") {
        PathSolver solver(g, kCredit);
        solver.reset(project_initial(ic, g));
        CHECK_THROWS_AS(solver.advance(std::nan("")), Error);
    }
}

TEST_CASE("deterministic solution converges to the closed form") {
    const ModelParams p = ModelParams::from_credit(0.22, 0.0, 0.042);
    std::vector<double> err;
    for (int l = 0; l <= 4; ++l) {
        const GridSpec g = GridSpec::from_bounds(-16.0 / 3.0, 16.0, 4.0 / 3.0, 0.25).refined(l);
        const std::size_t n = 20u << (2 * l);
        const auto t = solve_path(g, p, InitialCondition::point_mass(5.0), BrownianPath{l, g.k(), std::vector<double>(n)});
        double sum = 0.0;
        for (int j = 1; j < g.intervals(); ++j) {
            const double d = t.terminal.values[j - 1] - exact_density(g.node(j), 5.0, 0.0, 5.0, p);
            sum += d * d;
        }
        err.push_back(std::sqrt(sum * g.h()));
    }
    for (int l = 2; l <= 4; ++l) {
        CHECK(err[l - 1] / err[l] > 3.0);
        CHECK(err[l - 1] / err[l] < 5.0);
    }
}
