#pragma once

#include <array>
#include <cstdint>

namespace fbell {

// SplitMix64 finalizer; used for seeding and for deriving independent
// sub-stream seeds from (seed, index).
std::uint64_t splitmix64(std::uint64_t& state) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

// xoshiro256** with portable samplers. Every draw is defined in terms of the
// raw 64-bit outputs so a (seed, call order) pair reproduces bit-identical
// streams on any platform; std:: distributions are deliberately not used.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0) noexcept;

    std::uint64_t next() noexcept;
    std::uint64_t operator()() noexcept { return next(); }
    static constexpr std::uint64_t min() noexcept { return 0; }
    static constexpr std::uint64_t max() noexcept { return ~std::uint64_t{0}; }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept;
    // Uniform in (0, 1).
    double uniform_open() noexcept;
    double normal() noexcept;
    std::uint64_t poisson(double mean);

private:
    std::uint64_t poisson_ptrs(double mean) noexcept;

    std::array<std::uint64_t, 4> s_{};
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace fbell
