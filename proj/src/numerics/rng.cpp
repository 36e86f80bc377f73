#include "cvmimo/numerics/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace cvmimo {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

std::uint64_t Rng::stream_key(std::uint64_t seed, std::string_view label) {
    return splitmix64(splitmix64(seed) ^ fnv1a(label));
}

Rng::Rng(std::uint64_t seed, std::string_view stream_label)
    : seed_(seed), label_(stream_label), engine_(stream_key(seed, stream_label)) {}

double Rng::uniform_open() {
    // (k + 0.5) / 2^53 never hits 0 or 1.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

Rng Rng::derive(std::string_view sub_label) const {
    std::string child = label_;
    child += '/';
    child += sub_label;
    return Rng(seed_, child);
}

cplx sample_cgauss(Rng& rng, double variance) {
    if (!(variance >= 0.0)) throw std::invalid_argument("sample_cgauss: variance must be non-negative");
    const double u1 = rng.uniform_open();
    const double u2 = rng.uniform_open();
    // -ln(u1) ~ Exp(1), so |z|^2 has mean `variance`.
    const double r = std::sqrt(-variance * std::log(u1));
    return std::polar(r, 2.0 * kPi * u2);
}

std::vector<cplx> sample_cgauss(Rng& rng, std::size_t n, double variance) {
    if (!(variance >= 0.0)) throw std::invalid_argument("sample_cgauss: variance must be non-negative");
    std::vector<cplx> out(n);
    for (auto& z : out) z = sample_cgauss(rng, variance);
    return out;
}

}  // namespace cvmimo
