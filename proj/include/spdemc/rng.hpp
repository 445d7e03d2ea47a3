#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>

namespace spdemc {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// Stateless: the output is a pure function of (counter, key).
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter counter, Key key) noexcept;
};

/// Folds a sequence of 64-bit words into one well-mixed 64-bit key.
std::uint64_t mix_key(std::initializer_list<std::uint64_t> words) noexcept;

/// Reproducible stream of exact standard normal deviates (Box-Muller over
/// Philox blocks). Two streams with different keys are statistically
/// independent; the same key always reproduces the same sequence.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t key) noexcept;

    double next() noexcept;
    void fill(std::span<double> out) noexcept;

private:
    void refill() noexcept;

    Philox4x32::Key key_;
    std::uint64_t block_ = 0;
    std::array<double, 2> pair_{};
    int next_in_pair_ = 2;
};

/// Stream domains keep market, firm and auxiliary draws disjoint.
enum class StreamDomain : std::uint64_t {
    market = 0x6d61726b6574ULL,
    firm = 0x6669726dULL,
};

}  // namespace spdemc
