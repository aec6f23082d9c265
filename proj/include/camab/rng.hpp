#pragma once

#include <cstdint>
#include <random>

namespace camab {

// splitmix64 finalizer; used to derive independent stream seeds
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stream ids are fixed per consumer so that adding a consumer never shifts
// the draws of another one.
enum class Stream : std::uint64_t {
    Base = 1,
    Ucb = 2,
    TOpt = 3,
    Imit = 4,
    TExp = 5,
    RewardTransfer = 6,
    Test = 99,
};

// mt19937_64 engine with a hand-rolled uniform conversion; std distributions
// are implementation-defined and would break cross-toolchain reproducibility.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}
    Rng(std::uint64_t seed, Stream stream, std::uint64_t variant = 0)
        : engine_(mix64(mix64(seed) ^ mix64((static_cast<std::uint64_t>(stream) << 32) + variant))) {}

    // uniform on [0, 1) with 53 random bits
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::uint64_t next() { return engine_(); }

    // uniform integer in [0, n)
    std::size_t below(std::size_t n) {
        const double u = uniform();
        auto k = static_cast<std::size_t>(u * static_cast<double>(n));
        return k < n ? k : n - 1;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace camab
