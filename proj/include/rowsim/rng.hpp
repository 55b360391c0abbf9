#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rowsim {

// splitmix64: used to derive independent, reproducible sub-streams from one seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic RNG wrapper. Avoids std::*_distribution so streams are
// bit-identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : gen_(splitmix64(seed ^ splitmix64(stream))) {}

    std::uint64_t next_u64() { return gen_(); }

    // uniform in (0, 1), never exactly 0 or 1
    double u01() {
        return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
    }

    double exponential(double mean) { return -mean * std::log(1.0 - u01()); }

    bool bernoulli(double p) { return u01() < p; }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

private:
    std::mt19937_64 gen_;
};

}  // namespace rowsim
