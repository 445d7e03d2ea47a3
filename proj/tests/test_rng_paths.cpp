#include <doctest.h>

#include <cmath>
#include <vector>

#include "spdemc/error.hpp"
#include "spdemc/paths.hpp"
#include "spdemc/rng.hpp"
#include "spdemc/stats.hpp"

using namespace spdemc;

TEST_CASE("philox known-answer vectors") {
    using C = Philox4x32::Counter;
    using K = Philox4x32::Key;
    CHECK(Philox4x32::generate(C{0, 0, 0, 0}, K{0, 0}) ==
          C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(Philox4x32::generate(C{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                               K{0xffffffffu, 0xffffffffu}) ==
          C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(Philox4x32::generate(C{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                               K{0xa4093822u, 0x299f31d0u}) ==
          C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("mix_key depends on order and every word") {
    CHECK(mix_key({1, 2, 3}) == mix_key({1, 2, 3}));
    CHECK(mix_key({1, 2, 3}) != mix_key({3, 2, 1}));
    CHECK(mix_key({1, 2, 3}) != mix_key({1, 2, 4}));
    CHECK(mix_key({0}) != mix_key({0, 0}));
}

TEST_CASE("normal stream moments") {
    NormalStream s(12345);
    RunningMoments m;
    RunningMoments fourth;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
        const double z = s.next();
        m.add(z);
        fourth.add(z * z * z * z);
    }
    CHECK(std::abs(m.mean) < 4.0 / std::sqrt(n));
    CHECK(std::abs(m.variance() - 1.0) < 0.01);
    CHECK(std::abs(fourth.mean - 3.0) < 0.05);
}

TEST_CASE("normal stream is reproducible and fill matches next") {
    NormalStream a(7), b(7);
    std::vector<double> buf(9);
    a.fill(buf);
    for (double z : buf) CHECK(z == b.next());
}

TEST_CASE("paths are deterministic per seed triple") {
    const auto p = generate_fine_path({3, 2, 11}, 64, 0.01);
    const auto q = generate_fine_path({3, 2, 11}, 64, 0.01);
    CHECK(p.z == q.z);
    CHECK(generate_fine_path({3, 2, 12}, 64, 0.01).z != p.z);
    CHECK(generate_fine_path({3, 1, 11}, 64, 0.01).z != p.z);
    CHECK(generate_fine_path({4, 2, 11}, 64, 0.01).z != p.z);
}

TEST_CASE("paths for different samples are uncorrelated") {
    const std::size_t n = 100000;
    const auto a = generate_fine_path({0, 0, 0}, n, 1.0);
    const auto b = generate_fine_path({0, 0, 1}, n, 1.0);
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sab += a.z[i] * b.z[i];
        saa += a.z[i] * a.z[i];
        sbb += b.z[i] * b.z[i];
    }
    CHECK(std::abs(sab / std::sqrt(saa * sbb)) < 0.02);
}

TEST_CASE("coarsening sums blocks") {
    BrownianPath zero{2, 0.25, std::vector<double>(8, 0.0)};
    for (double z : coarsen_path(zero, 4).z) CHECK(z == 0.0);

    BrownianPath ones{1, 0.25, {1, 1, 1, 1}};
    const auto c = coarsen_path(ones, 4);
    REQUIRE(c.z.size() == 1);
    CHECK(c.z[0] == doctest::Approx(2.0));
    CHECK(c.k == doctest::Approx(1.0));
    CHECK(c.level == 0);

    CHECK_THROWS_AS(coarsen_path(BrownianPath{1, 0.1, {1, 2, 3}}, 2), Error);
    CHECK_THROWS_AS(coarsen_path(ones, 0), Error);
}

TEST_CASE("coarsening preserves the endpoint") {
    const auto fine = generate_fine_path({1, 3, 5}, 256, 1.0 / 256);
    const auto c4 = coarsen_path(fine, 4);
    const auto c16 = coarsen_path(c4, 4);
    CHECK(std::abs(c4.endpoint() - fine.endpoint()) < 1e-12);
    CHECK(std::abs(c16.endpoint() - coarsen_path(fine, 16).endpoint()) < 1e-12);
    CHECK(std::abs(c16.endpoint() - fine.endpoint()) < 1e-12);
}

TEST_CASE("coarse increments are standard normal") {
    const auto fine = generate_fine_path({9, 0, 0}, 400000, 1.0);
    const auto coarse = coarsen_path(fine, 4);
    RunningMoments m;
    for (double z : coarse.z) m.add(z);
    CHECK(std::abs(m.mean) < 4.0 / std::sqrt(static_cast<double>(m.count)));
    CHECK(std::abs(m.variance() - 1.0) < 0.02);
}
