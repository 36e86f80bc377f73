#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cvmimo/numerics/fft.hpp"
#include "cvmimo/stc/qostbc.hpp"
#include "cvmimo/types.hpp"

namespace cvmimo {

struct OfdmLayout {
    std::size_t nfft = 0;
    std::size_t ncp = 0;
    std::size_t ntp = 0;  // OFDM symbols per frame

    std::size_t symbol_length() const { return nfft + ncp; }
    std::size_t frame_length() const { return ntp * symbol_length(); }
    void validate() const;
};

// Subcarrier-time grid of one frame, indexed (time, subcarrier, antenna).
class OfdmGrid {
public:
    OfdmGrid() = default;
    OfdmGrid(OfdmLayout layout, std::size_t antennas);

    const OfdmLayout& layout() const noexcept { return layout_; }
    std::size_t antennas() const noexcept { return antennas_; }

    cplx& at(std::size_t t, std::size_t k, std::size_t a) { return data_[index(t, k, a)]; }
    cplx at(std::size_t t, std::size_t k, std::size_t a) const { return data_[index(t, k, a)]; }

    // Ntp x antennas block seen on subcarrier k.
    CMatrix subcarrier(std::size_t k) const;

    void scale(double factor);

    const std::vector<cplx>& data() const noexcept { return data_; }

private:
    std::size_t index(std::size_t t, std::size_t k, std::size_t a) const {
        return (t * layout_.nfft + k) * antennas_ + a;
    }

    OfdmLayout layout_{};
    std::size_t antennas_ = 0;
    std::vector<cplx> data_;
};

// Places S[k](t, a) on OFDM symbol t, subcarrier k, antenna a.
OfdmGrid build_frame(std::span<const QostbcBlock> blocks, std::size_t ncp);

// Unitary IFFT per symbol and antenna, cyclic prefix prepended; returns
// [ntp * (nfft + ncp)] x antennas.
Samples ofdm_modulate(const OfdmGrid& grid);
Samples ofdm_modulate(const OfdmGrid& grid, const FftPlan& plan);

// Drops the prefix of each symbol and applies the unitary FFT.
OfdmGrid ofdm_demodulate(const Samples& samples, const OfdmLayout& layout);
OfdmGrid ofdm_demodulate(const Samples& samples, const OfdmLayout& layout, const FftPlan& plan);

}  // namespace cvmimo
