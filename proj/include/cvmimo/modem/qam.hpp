#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cvmimo/types.hpp"

namespace cvmimo {

using Bits = std::vector<std::uint8_t>;

// Square M-QAM with per-axis Gray labelling and unit average symbol energy.
//
// A label of log2(M) bits is split in two halves: the first (most
// significant) half selects the in-phase level, the second the quadrature
// level. Each half is a Gray code over the sqrt(M) PAM levels.
class Constellation {
public:
    explicit Constellation(unsigned order);

    unsigned order() const noexcept { return order_; }
    unsigned bits_per_symbol() const noexcept { return bits_per_symbol_; }

    // points()[label] is the symbol carrying `label` (MSB first).
    const std::vector<cplx>& points() const noexcept { return points_; }

    std::vector<cplx> map(std::span<const std::uint8_t> bits) const;

    // Minimum-distance hard decision; exact ties go to the smaller integer label.
    Bits demap(std::span<const cplx> symbols) const;

    unsigned decide(cplx symbol) const;

private:
    unsigned axis_decide(double v) const;

    unsigned order_;
    unsigned bits_per_symbol_;
    unsigned levels_;                 // sqrt(M)
    double scale_;                    // 1 / sqrt(2 (M - 1) / 3)
    std::vector<double> level_amp_;   // amplitude of Gray label g on one axis
    std::vector<cplx> points_;
};

std::vector<cplx> qam_map(std::span<const std::uint8_t> bits, unsigned order);
Bits qam_demap(std::span<const cplx> symbols, unsigned order);

// Per-sample complex noise variance for a given Eb/N0, with unit average
// received symbol energy and no pilot/CP overhead charged to Eb.
double noise_variance(double ebn0_db, unsigned order);

// Nearest-neighbour approximation of Gray M-QAM bit error rate in AWGN.
double qam_ber_approx(double ebn0_db, unsigned order);

}  // namespace cvmimo
