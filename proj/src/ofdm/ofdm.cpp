#include "cvmimo/ofdm/ofdm.hpp"

#include <string>

#include "cvmimo/errors.hpp"

namespace cvmimo {

void OfdmLayout::validate() const {
    if (nfft < 2 || !is_power_of_two(nfft)) throw SizingError("ofdm: nfft must be a power of two >= 2");
    if (ncp >= nfft) throw SizingError("ofdm: cyclic prefix must be shorter than nfft");
    if (ntp == 0) throw SizingError("ofdm: a frame needs at least one OFDM symbol");
}

OfdmGrid::OfdmGrid(OfdmLayout layout, std::size_t antennas)
    : layout_(layout), antennas_(antennas), data_(layout.ntp * layout.nfft * antennas) {
    layout_.validate();
    if (antennas == 0) throw SizingError("ofdm: grid needs at least one antenna");
}

CMatrix OfdmGrid::subcarrier(std::size_t k) const {
    CMatrix m(static_cast<Eigen::Index>(layout_.ntp), static_cast<Eigen::Index>(antennas_));
    for (std::size_t t = 0; t < layout_.ntp; ++t)
        for (std::size_t a = 0; a < antennas_; ++a) m(t, a) = at(t, k, a);
    return m;
}

void OfdmGrid::scale(double factor) {
    for (auto& z : data_) z *= factor;
}

OfdmGrid build_frame(std::span<const QostbcBlock> blocks, std::size_t ncp) {
    if (blocks.empty()) throw SizingError("build_frame: no blocks");
    const auto ntp = static_cast<std::size_t>(blocks.front().S.rows());
    const auto ntx = static_cast<std::size_t>(blocks.front().S.cols());
    OfdmGrid grid(OfdmLayout{blocks.size(), ncp, ntp}, ntx);
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const CMatrix& S = blocks[k].S;
        if (static_cast<std::size_t>(S.rows()) != ntp || static_cast<std::size_t>(S.cols()) != ntx)
            throw SizingError("build_frame: block " + std::to_string(k) + " has shape " + std::to_string(S.rows()) +
                              "x" + std::to_string(S.cols()) + ", expected " + std::to_string(ntp) + "x" +
                              std::to_string(ntx));
        for (std::size_t t = 0; t < ntp; ++t)
            for (std::size_t a = 0; a < ntx; ++a) grid.at(t, k, a) = S(t, a);
    }
    return grid;
}

Samples ofdm_modulate(const OfdmGrid& grid) { return ofdm_modulate(grid, FftPlan(grid.layout().nfft)); }

Samples ofdm_modulate(const OfdmGrid& grid, const FftPlan& plan) {
    const OfdmLayout& lay = grid.layout();
    const std::size_t sym = lay.symbol_length();
    Samples out(static_cast<Eigen::Index>(lay.frame_length()), static_cast<Eigen::Index>(grid.antennas()));
    std::vector<cplx> buf(lay.nfft);
    for (std::size_t t = 0; t < lay.ntp; ++t) {
        for (std::size_t a = 0; a < grid.antennas(); ++a) {
            for (std::size_t k = 0; k < lay.nfft; ++k) buf[k] = grid.at(t, k, a);
            plan.inverse(buf);
            const std::size_t base = t * sym;
            for (std::size_t i = 0; i < lay.ncp; ++i) out(base + i, a) = buf[lay.nfft - lay.ncp + i];
            for (std::size_t i = 0; i < lay.nfft; ++i) out(base + lay.ncp + i, a) = buf[i];
        }
    }
    return out;
}

OfdmGrid ofdm_demodulate(const Samples& samples, const OfdmLayout& layout) {
    return ofdm_demodulate(samples, layout, FftPlan(layout.nfft));
}

OfdmGrid ofdm_demodulate(const Samples& samples, const OfdmLayout& layout, const FftPlan& plan) {
    layout.validate();
    if (static_cast<std::size_t>(samples.rows()) != layout.frame_length())
        throw SizingError("ofdm_demodulate: got " + std::to_string(samples.rows()) + " samples per antenna, expected " +
                          std::to_string(layout.frame_length()));
    const auto nrx = static_cast<std::size_t>(samples.cols());
    OfdmGrid grid(layout, nrx);
    std::vector<cplx> buf(layout.nfft);
    for (std::size_t t = 0; t < layout.ntp; ++t) {
        const std::size_t base = t * layout.symbol_length() + layout.ncp;
        for (std::size_t r = 0; r < nrx; ++r) {
            for (std::size_t i = 0; i < layout.nfft; ++i) buf[i] = samples(base + i, r);
            plan.forward(buf);
            for (std::size_t k = 0; k < layout.nfft; ++k) grid.at(t, k, r) = buf[k];
        }
    }
    return grid;
}

}  // namespace cvmimo
