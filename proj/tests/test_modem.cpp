#include <gtest/gtest.h>

#include <cmath>

#include "cvmimo/errors.hpp"
#include "cvmimo/modem/qam.hpp"
#include "cvmimo/numerics/rng.hpp"

using namespace cvmimo;

namespace {

Bits to_bits(unsigned value, unsigned width) {
    Bits b(width);
    for (unsigned i = 0; i < width; ++i) b[i] = static_cast<std::uint8_t>((value >> (width - 1 - i)) & 1u);
    return b;
}

unsigned hamming(unsigned a, unsigned b) { return static_cast<unsigned>(__builtin_popcount(a ^ b)); }

// Gray M-QAM BER approximation evaluated from scratch:
// 4/log2M (1 - 1/sqrt M) Q(sqrt(3 log2M / (M-1) Eb/N0)).
double reference_ber(double ebn0_db, unsigned m) {
    const double k = std::log2(static_cast<double>(m));
    const double g = std::pow(10.0, ebn0_db / 10.0);
    const double arg = std::sqrt(3.0 * k * g / (m - 1.0));
    const double q = 0.5 * std::erfc(arg / std::sqrt(2.0));
    return 4.0 / k * (1.0 - 1.0 / std::sqrt(static_cast<double>(m))) * q;
}

}  // namespace

TEST(Qam, QpskPoints) {
    const double a = 1.0 / std::sqrt(2.0);
    const Constellation c(4);
    // first bit picks the I sign, second the Q sign
    EXPECT_LT(std::abs(c.points()[0b00] - cplx(-a, -a)), 1e-15);
    EXPECT_LT(std::abs(c.points()[0b01] - cplx(-a, a)), 1e-15);
    EXPECT_LT(std::abs(c.points()[0b11] - cplx(a, a)), 1e-15);
    EXPECT_LT(std::abs(c.points()[0b10] - cplx(a, -a)), 1e-15);
}

TEST(Qam, Unit16QamPowerAndLattice) {
    const Constellation c(16);
    double power = 0.0;
    for (auto p : c.points()) {
        power += std::norm(p);
        const double re = p.real() * std::sqrt(10.0), im = p.imag() * std::sqrt(10.0);
        EXPECT_NEAR(std::abs(re), std::round(std::abs(re)), 1e-12);
        EXPECT_TRUE(std::abs(std::abs(re) - 1.0) < 1e-12 || std::abs(std::abs(re) - 3.0) < 1e-12);
        EXPECT_TRUE(std::abs(std::abs(im) - 1.0) < 1e-12 || std::abs(std::abs(im) - 3.0) < 1e-12);
    }
    EXPECT_NEAR(power / 16.0, 1.0, 1e-14);
}

TEST(Qam, UnitPowerAllOrders) {
    for (unsigned m : {4u, 16u, 64u, 256u}) {
        const Constellation c(m);
        double power = 0.0;
        for (auto p : c.points()) power += std::norm(p);
        EXPECT_NEAR(power / m, 1.0, 1e-13) << m;
    }
}

TEST(Qam, GrayAdjacency) {
    // Nearest neighbours (distance 2/sqrt(10) at M=16) differ in exactly one bit.
    for (unsigned m : {4u, 16u, 64u}) {
        const Constellation c(m);
        const auto& pts = c.points();
        double dmin = 1e9;
        for (unsigned a = 0; a < m; ++a)
            for (unsigned b = a + 1; b < m; ++b) dmin = std::min(dmin, std::abs(pts[a] - pts[b]));
        for (unsigned a = 0; a < m; ++a)
            for (unsigned b = a + 1; b < m; ++b)
                if (std::abs(std::abs(pts[a] - pts[b]) - dmin) < 1e-12) EXPECT_EQ(hamming(a, b), 1u) << a << "," << b;
    }
}

TEST(Qam, RoundTripEvery16BitString) {
    const Constellation c(16);
    Bits all;
    all.reserve(16u << 16);
    for (unsigned v = 0; v < (1u << 16); ++v) {
        const auto b = to_bits(v, 16);
        all.insert(all.end(), b.begin(), b.end());
    }
    EXPECT_EQ(c.demap(c.map(all)), all);
    EXPECT_EQ(qam_demap(qam_map(all, 16), 16), all);
}

TEST(Qam, ExactPointsDemapToOwnLabel) {
    for (unsigned m : {4u, 16u, 64u}) {
        const Constellation c(m);
        for (unsigned l = 0; l < m; ++l) EXPECT_EQ(c.decide(c.points()[l]), l);
    }
}

TEST(Qam, OriginTieGoesToSmallestInnerLabel) {
    const Constellation c(16);
    const double inner = 1.0 / std::sqrt(10.0);
    unsigned best = 16;
    for (unsigned l = 0; l < 16; ++l)
        if (std::abs(std::abs(c.points()[l].real()) - inner) < 1e-12 &&
            std::abs(std::abs(c.points()[l].imag()) - inner) < 1e-12)
            best = std::min(best, l);
    EXPECT_EQ(c.decide({0.0, 0.0}), best);
}

TEST(Qam, RejectsBadInput) {
    EXPECT_THROW(Constellation(8), std::invalid_argument);
    EXPECT_THROW(Constellation(2), std::invalid_argument);
    const Constellation c(16);
    EXPECT_THROW(c.map(Bits(6)), SizingError);
    EXPECT_THROW(c.map(Bits{0, 1, 2, 0}), std::invalid_argument);
}

TEST(NoiseVariance, KnownValues) {
    EXPECT_DOUBLE_EQ(noise_variance(0.0, 4), 0.5);
    EXPECT_NEAR(noise_variance(20.0, 16), 0.0025, 1e-15);
    EXPECT_EQ(noise_variance(std::numeric_limits<double>::infinity(), 16), 0.0);
    double prev = noise_variance(-10.0, 16);
    for (double e = -9.0; e <= 60.0; e += 1.0) {
        const double v = noise_variance(e, 16);
        EXPECT_LT(v, prev);
        prev = v;
    }
}

TEST(Qam, BerApproxMatchesReference) {
    for (double e : {0.0, 6.0, 10.0, 20.0}) EXPECT_NEAR(qam_ber_approx(e, 16) / reference_ber(e, 16), 1.0, 1e-12);
}

// At 20 dB the Gray 16-QAM BER is ~1e-19, so 1e6 symbols show no errors at
// all; the factor-1.5 agreement is checked where errors are countable.
TEST(Qam, EmpiricalBerInAwgn) {
    const Constellation c(16);
    Rng bit_rng(3, "bits"), noise_rng(3, "noise");
    const std::size_t symbols = 1000000;
    Bits bits(symbols * 4);
    for (auto& b : bits) b = bit_rng.bit();
    const auto tx = c.map(bits);
    for (double e : {6.0, 8.0, 10.0, 20.0}) {
        auto rx = tx;
        const auto noise = sample_cgauss(noise_rng, symbols, noise_variance(e, 16));
        for (std::size_t i = 0; i < symbols; ++i) rx[i] += noise[i];
        const auto out = c.demap(rx);
        std::size_t errors = 0;
        for (std::size_t i = 0; i < bits.size(); ++i) errors += out[i] != bits[i];
        const double ber = static_cast<double>(errors) / static_cast<double>(bits.size());
        const double ref = reference_ber(e, 16);
        if (e >= 20.0) {
            EXPECT_EQ(errors, 0u);
        } else {
            EXPECT_GT(ber, ref / 1.5) << e;
            EXPECT_LT(ber, ref * 1.5) << e;
        }
    }
}
