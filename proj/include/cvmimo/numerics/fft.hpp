#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cvmimo/types.hpp"

namespace cvmimo {

enum class FftDirection { Forward, Inverse };

// Iterative radix-2 decimation-in-time FFT with unitary scaling (1/sqrt(N)
// in both directions). Twiddles and the bit-reversal permutation are cached
// per length, so one plan can serve every OFDM symbol of a run.
class FftPlan {
public:
    explicit FftPlan(std::size_t n);

    std::size_t size() const noexcept { return n_; }

    void transform(std::span<cplx> data, FftDirection dir) const;
    void forward(std::span<cplx> data) const { transform(data, FftDirection::Forward); }
    void inverse(std::span<cplx> data) const { transform(data, FftDirection::Inverse); }

private:
    std::size_t n_;
    std::vector<std::size_t> bitrev_;
    std::vector<cplx> twiddle_;  // exp(-j 2 pi k / N), k < N/2
};

std::vector<cplx> fft(std::span<const cplx> x, FftDirection dir);

}  // namespace cvmimo
