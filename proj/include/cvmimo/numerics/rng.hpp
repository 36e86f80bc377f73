#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "cvmimo/types.hpp"

namespace cvmimo {

// Seedable random stream identified by (seed, stream label).
//
// The engine key is a splitmix64 mix of the seed and an FNV-1a hash of the
// label, so "noise" and "channel" under one seed never share a sequence and a
// given pair always replays the same draws.
class Rng {
public:
    Rng(std::uint64_t seed, std::string_view stream_label);

    std::uint64_t seed() const noexcept { return seed_; }
    const std::string& label() const noexcept { return label_; }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform_open();

    // Fair bit.
    std::uint8_t bit() { return static_cast<std::uint8_t>(engine_() >> 63); }

    // Independent stream "<label>/<sub_label>" under the same seed.
    Rng derive(std::string_view sub_label) const;

    static std::uint64_t stream_key(std::uint64_t seed, std::string_view label);

private:
    std::uint64_t seed_;
    std::string label_;
    std::mt19937_64 engine_;
};

// i.i.d. circularly-symmetric complex Gaussian draws with E|z|^2 = variance,
// generated by Box-Muller on the open unit interval.
std::vector<cplx> sample_cgauss(Rng& rng, std::size_t n, double variance);

// Single draw of the same distribution.
cplx sample_cgauss(Rng& rng, double variance);

}  // namespace cvmimo
