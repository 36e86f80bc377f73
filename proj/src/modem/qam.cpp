#include "cvmimo/modem/qam.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "cvmimo/errors.hpp"

namespace cvmimo {

namespace {

bool is_power_of_four(unsigned m) { return m >= 4 && is_power_of_two(m) && (std::countr_zero(m) % 2 == 0); }

unsigned log2u(unsigned m) { return static_cast<unsigned>(std::countr_zero(m)); }

}  // namespace

Constellation::Constellation(unsigned order) : order_(order) {
    if (!is_power_of_four(order))
        throw SizingError("qam: order " + std::to_string(order) + " is not a square power of four");
    bits_per_symbol_ = log2u(order);
    levels_ = 1u << (bits_per_symbol_ / 2);
    scale_ = 1.0 / std::sqrt(2.0 * (order - 1) / 3.0);

    level_amp_.assign(levels_, 0.0);
    for (unsigned i = 0; i < levels_; ++i) {
        const unsigned gray = i ^ (i >> 1);
        level_amp_[gray] = (2.0 * i - (levels_ - 1.0)) * scale_;
    }

    const unsigned half = bits_per_symbol_ / 2;
    points_.resize(order);
    for (unsigned label = 0; label < order; ++label) {
        const unsigned gi = label >> half;
        const unsigned gq = label & (levels_ - 1);
        points_[label] = {level_amp_[gi], level_amp_[gq]};
    }
}

std::vector<cplx> Constellation::map(std::span<const std::uint8_t> bits) const {
    if (bits.size() % bits_per_symbol_ != 0)
        throw SizingError("qam_map: " + std::to_string(bits.size()) + " bits is not a multiple of " +
                          std::to_string(bits_per_symbol_));
    std::vector<cplx> out(bits.size() / bits_per_symbol_);
    for (std::size_t s = 0; s < out.size(); ++s) {
        unsigned label = 0;
        for (unsigned b = 0; b < bits_per_symbol_; ++b) {
            const std::uint8_t bit = bits[s * bits_per_symbol_ + b];
            if (bit > 1) throw std::invalid_argument("qam_map: bit values must be 0 or 1");
            label = (label << 1) | bit;
        }
        out[s] = points_[label];
    }
    return out;
}

unsigned Constellation::axis_decide(double v) const {
    unsigned best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (unsigned g = 0; g < levels_; ++g) {
        const double d = (v - level_amp_[g]) * (v - level_amp_[g]);
        if (d < best_d || (d == best_d && g < best)) {
            best = g;
            best_d = d;
        }
    }
    return best;
}

unsigned Constellation::decide(cplx symbol) const {
    // The label set factorises over the two axes, so the smallest tied label
    // is the pair of smallest tied axis labels.
    return (axis_decide(symbol.real()) << (bits_per_symbol_ / 2)) | axis_decide(symbol.imag());
}

Bits Constellation::demap(std::span<const cplx> symbols) const {
    Bits out(symbols.size() * bits_per_symbol_);
    for (std::size_t s = 0; s < symbols.size(); ++s) {
        const unsigned label = decide(symbols[s]);
        for (unsigned b = 0; b < bits_per_symbol_; ++b)
            out[s * bits_per_symbol_ + b] = static_cast<std::uint8_t>((label >> (bits_per_symbol_ - 1 - b)) & 1u);
    }
    return out;
}

std::vector<cplx> qam_map(std::span<const std::uint8_t> bits, unsigned order) { return Constellation(order).map(bits); }

Bits qam_demap(std::span<const cplx> symbols, unsigned order) { return Constellation(order).demap(symbols); }

double noise_variance(double ebn0_db, unsigned order) {
    if (order < 4) throw SizingError("noise_variance: modulation order must be >= 4");
    return 1.0 / (std::log2(static_cast<double>(order)) * db_to_linear(ebn0_db));
}

double qam_ber_approx(double ebn0_db, unsigned order) {
    const double k = std::log2(static_cast<double>(order));
    const double ebn0 = db_to_linear(ebn0_db);
    const double arg = std::sqrt(3.0 * k * ebn0 / (order - 1.0));
    const double q = 0.5 * std::erfc(arg / std::sqrt(2.0));
    return 4.0 / k * (1.0 - 1.0 / std::sqrt(static_cast<double>(order))) * q;
}

}  // namespace cvmimo
