#include "cvmimo/numerics/fft.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "cvmimo/errors.hpp"

namespace cvmimo {

FftPlan::FftPlan(std::size_t n) : n_(n) {
    if (n < 2 || !is_power_of_two(n))
        throw SizingError("fft: length " + std::to_string(n) + " is not a power of two >= 2");

    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    bitrev_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < bits; ++b)
            if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
        bitrev_[i] = r;
    }

    twiddle_.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k)
        twiddle_[k] = std::polar(1.0, -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n));
}

void FftPlan::transform(std::span<cplx> data, FftDirection dir) const {
    if (data.size() != n_)
        throw SizingError("fft: plan length " + std::to_string(n_) + " applied to " + std::to_string(data.size()) +
                          " samples");

    for (std::size_t i = 0; i < n_; ++i)
        if (i < bitrev_[i]) std::swap(data[i], data[bitrev_[i]]);

    const bool inverse = dir == FftDirection::Inverse;
    for (std::size_t len = 2; len <= n_; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t stride = n_ / len;
        for (std::size_t start = 0; start < n_; start += len) {
            for (std::size_t j = 0; j < half; ++j) {
                cplx w = twiddle_[j * stride];
                if (inverse) w = std::conj(w);
                const cplx t = w * data[start + j + half];
                data[start + j + half] = data[start + j] - t;
                data[start + j] += t;
            }
        }
    }

    const double scale = 1.0 / std::sqrt(static_cast<double>(n_));
    for (auto& z : data) z *= scale;
}

std::vector<cplx> fft(std::span<const cplx> x, FftDirection dir) {
    FftPlan plan(x.size());
    std::vector<cplx> out(x.begin(), x.end());
    plan.transform(out, dir);
    return out;
}

}  // namespace cvmimo
