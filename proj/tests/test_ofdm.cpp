#include <gtest/gtest.h>

#include "cvmimo/channel/tdl.hpp"
#include "cvmimo/errors.hpp"
#include "cvmimo/numerics/rng.hpp"
#include "cvmimo/ofdm/ofdm.hpp"
#include "cvmimo/stc/qostbc.hpp"

using namespace cvmimo;

namespace {

OfdmGrid random_grid(Rng& rng, OfdmLayout layout, std::size_t antennas) {
    OfdmGrid g(layout, antennas);
    for (std::size_t t = 0; t < layout.ntp; ++t)
        for (std::size_t k = 0; k < layout.nfft; ++k)
            for (std::size_t a = 0; a < antennas; ++a) g.at(t, k, a) = sample_cgauss(rng, 1.0);
    return g;
}

std::vector<QostbcBlock> random_blocks(Rng& rng, std::size_t nfft, std::size_t ntx) {
    std::vector<QostbcBlock> blocks;
    for (std::size_t k = 0; k < nfft; ++k) {
        const auto q = sample_cgauss(rng, ntx, 1.0);
        blocks.push_back(qostbc_encode(q));
    }
    return blocks;
}

double max_abs_diff(const OfdmGrid& a, const OfdmGrid& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

}  // namespace

TEST(BuildFrame, TwoSubcarrierAlamoutiPlacement) {
    const CVector q0 = (CVector(2) << cplx(1, 2), cplx(3, 4)).finished();
    const CVector q1 = (CVector(2) << cplx(-1, 0.5), cplx(0, -2)).finished();
    const std::vector<QostbcBlock> blocks{qostbc_encode(q0), qostbc_encode(q1)};
    const OfdmGrid g = build_frame(blocks, 0);
    EXPECT_EQ(g.layout().nfft, 2u);
    EXPECT_EQ(g.layout().ntp, 2u);
    EXPECT_EQ(g.antennas(), 2u);
    for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t t = 0; t < 2; ++t)
            for (std::size_t a = 0; a < 2; ++a)
                EXPECT_EQ(g.at(t, k, a), blocks[k].S(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(a)));
    EXPECT_EQ(g.at(1, 0, 0), -std::conj(q0(1)));
    EXPECT_EQ(g.at(1, 1, 1), std::conj(q1(0)));
}

TEST(BuildFrame, ZeroBlocksGiveZeroGrid) {
    std::vector<QostbcBlock> blocks(8, qostbc_encode(CVector::Zero(4)));
    for (auto z : build_frame(blocks, 2).data()) EXPECT_EQ(z, cplx{});
}

TEST(BuildFrame, SubcarrierExtractionRecoversBlocks) {
    Rng rng(1, "ofdm");
    const auto blocks = random_blocks(rng, 16, 4);
    const OfdmGrid g = build_frame(blocks, 1);
    for (std::size_t k = 0; k < 16; ++k) EXPECT_EQ(g.subcarrier(k), blocks[k].S);
}

TEST(BuildFrame, RejectsRaggedInput) {
    Rng rng(2, "ofdm");
    auto blocks = random_blocks(rng, 4, 4);
    blocks[2] = qostbc_encode(sample_cgauss(rng, 2, 1.0));
    EXPECT_THROW(build_frame(blocks, 1), SizingError);
    EXPECT_THROW(build_frame(random_blocks(rng, 6, 2), 1), SizingError);
}

TEST(Ofdm, ImpulseOnSubcarrierZero) {
    const OfdmLayout layout{8, 2, 1};
    OfdmGrid g(layout, 1);
    g.at(0, 0, 0) = 1.0;
    const Samples s = ofdm_modulate(g);
    ASSERT_EQ(s.rows(), 10);
    for (Eigen::Index i = 0; i < s.rows(); ++i) EXPECT_NEAR(std::abs(s(i, 0) - 1.0 / std::sqrt(8.0)), 0.0, 1e-15);
}

TEST(Ofdm, CyclicPrefixIsTail) {
    Rng rng(3, "ofdm");
    const OfdmLayout layout{16, 4, 3};
    const Samples s = ofdm_modulate(random_grid(rng, layout, 2));
    for (std::size_t t = 0; t < 3; ++t)
        for (std::size_t i = 0; i < 4; ++i)
            for (Eigen::Index a = 0; a < 2; ++a)
                EXPECT_EQ(s(static_cast<Eigen::Index>(t * 20 + i), a), s(static_cast<Eigen::Index>(t * 20 + 16 + i), a));
}

TEST(Ofdm, ParsevalOnSymbolBodies) {
    Rng rng(4, "ofdm");
    const OfdmLayout layout{64, 16, 2};
    const OfdmGrid g = random_grid(rng, layout, 3);
    double freq = 0.0;
    for (auto z : g.data()) freq += std::norm(z);
    const Samples s = ofdm_modulate(g);
    double body = 0.0;
    for (std::size_t t = 0; t < 2; ++t) body += s.middleRows(static_cast<Eigen::Index>(t * 80 + 16), 64).squaredNorm();
    EXPECT_NEAR(body, freq, 1e-10 * freq);
}

TEST(Ofdm, ParsevalWithPrefixFlatSymbols) {
    // Constant-envelope time signal (single subcarrier): prefix carries
    // exactly ncp/nfft of the body energy.
    const OfdmLayout layout{32, 8, 4};
    OfdmGrid g(layout, 1);
    for (std::size_t t = 0; t < 4; ++t) g.at(t, 5, 0) = cplx(0.6, 0.8);
    double freq = 0.0;
    for (auto z : g.data()) freq += std::norm(z);
    EXPECT_NEAR(ofdm_modulate(g).squaredNorm(), freq * 40.0 / 32.0, 1e-12);
}

TEST(Ofdm, RoundTrip) {
    Rng rng(5, "ofdm");
    const OfdmLayout layout{256, 16, 4};
    const OfdmGrid g = random_grid(rng, layout, 4);
    EXPECT_LT(max_abs_diff(ofdm_demodulate(ofdm_modulate(g), layout), g), 1e-10);
}

TEST(Ofdm, SingleTapScalesFlat) {
    Rng rng(6, "ofdm");
    const OfdmLayout layout{32, 4, 2};
    const OfdmGrid g = random_grid(rng, layout, 1);
    const cplx h0{0.3, -1.1};
    const Samples rx = h0 * ofdm_modulate(g);
    const OfdmGrid out = ofdm_demodulate(rx, layout);
    for (std::size_t i = 0; i < g.data().size(); ++i) EXPECT_LT(std::abs(out.data()[i] - h0 * g.data()[i]), 1e-12);
}

TEST(Ofdm, TwoTapChannelWithinPrefix) {
    Rng rng(7, "ofdm");
    const std::size_t n = 64;
    const OfdmLayout layout{n, 4, 3};
    const OfdmGrid g = random_grid(rng, layout, 1);
    const cplx h0 = sample_cgauss(rng, 1.0), h1 = sample_cgauss(rng, 1.0);
    TdlChannel ch = TdlChannel::fixed({CMatrix::Constant(1, 1, h0), CMatrix::Constant(1, 1, h1)});
    const OfdmGrid out = ofdm_demodulate(ch.apply(ofdm_modulate(g)), layout);
    double err = 0.0;
    for (std::size_t t = 0; t < 3; ++t)
        for (std::size_t k = 0; k < n; ++k) {
            const cplx hk = h0 + h1 * std::polar(1.0, -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n));
            err = std::max(err, std::abs(out.at(t, k, 0) - hk * g.at(t, k, 0)));
        }
    EXPECT_LT(err, 1e-9);
}

TEST(Ofdm, StaticMimoChannelActsPerSubcarrier) {
    // Any static channel with Nds - 1 <= Ncp: Y(t,k) = H(k) X(t,k),
    // H(k) = sum_i H_i exp(-j 2 pi k i / N), across consecutive frames.
    Rng rng(8, "ofdm");
    const std::size_t n = 64, ncp = 4, ntx = 4, nrx = 3;
    const OfdmLayout layout{n, ncp, ntx};
    for (std::size_t nds = 1; nds <= ncp + 1; ++nds) {
        std::vector<CMatrix> taps;
        for (std::size_t i = 0; i < nds; ++i) {
            const auto v = sample_cgauss(rng, nrx * ntx, 1.0);
            taps.push_back(Eigen::Map<const CMatrix>(v.data(), nrx, ntx));
        }
        TdlChannel ch = TdlChannel::fixed(taps);
        double err = 0.0;
        for (int frame = 0; frame < 3; ++frame) {
            const OfdmGrid g = random_grid(rng, layout, ntx);
            const OfdmGrid out = ofdm_demodulate(ch.apply(ofdm_modulate(g)), layout);
            for (std::size_t k = 0; k < n; ++k) {
                CMatrix hk = CMatrix::Zero(nrx, ntx);
                for (std::size_t i = 0; i < nds; ++i)
                    hk += taps[i] * std::polar(1.0, -2.0 * kPi * static_cast<double>(k * i) / static_cast<double>(n));
                for (std::size_t t = 0; t < ntx; ++t) {
                    CVector x(ntx), y(nrx);
                    for (std::size_t a = 0; a < ntx; ++a) x(static_cast<Eigen::Index>(a)) = g.at(t, k, a);
                    for (std::size_t r = 0; r < nrx; ++r) y(static_cast<Eigen::Index>(r)) = out.at(t, k, r);
                    err = std::max(err, (y - hk * x).cwiseAbs().maxCoeff());
                }
            }
        }
        EXPECT_LT(err, 1e-9) << "nds=" << nds;
    }
}

TEST(Ofdm, RejectsBadLayouts) {
    EXPECT_THROW((OfdmLayout{12, 2, 2}.validate()), SizingError);
    EXPECT_THROW((OfdmLayout{16, 16, 2}.validate()), SizingError);
    EXPECT_THROW((OfdmLayout{16, 2, 0}.validate()), SizingError);
    const OfdmLayout layout{16, 2, 2};
    EXPECT_THROW(ofdm_demodulate(Samples(35, 1), layout), SizingError);
}
