#include "cvmimo/channel/tdl.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cvmimo/errors.hpp"

namespace cvmimo {

namespace {

// Phasors advanced by repeated rotation are re-evaluated exactly this often.
constexpr std::size_t kAnchorInterval = 256;

}  // namespace

TdlChannel::TdlChannel(const TdlProfile& profile, std::size_t nrx, std::size_t ntx, double ts_seconds, Rng& rng,
                       std::size_t oscillators)
    : nrx_(nrx), ntx_(ntx), oscillators_(oscillators), doppler_hz_(profile.doppler_hz) {
    if (nrx == 0 || ntx == 0) throw SizingError("tdl channel: antenna counts must be >= 1");
    if (oscillators == 0) throw SizingError("tdl channel: need at least one oscillator");
    powers_ = discretize_profile(profile, ts_seconds);

    const std::size_t processes = powers_.size() * nrx_ * ntx_;
    omega_.resize(processes * oscillators_);
    phase_.resize(processes * oscillators_);
    phasor_.resize(processes * oscillators_);
    amp_.resize(processes);
    for (std::size_t p = 0; p < processes; ++p) {
        const std::size_t tap = p / (nrx_ * ntx_);
        amp_[p] = std::sqrt(powers_[tap] / static_cast<double>(oscillators_));
        for (std::size_t n = 0; n < oscillators_; ++n) {
            const double angle = 2.0 * kPi * rng.uniform_open();
            const double phase = 2.0 * kPi * rng.uniform_open();
            omega_[p * oscillators_ + n] = 2.0 * kPi * doppler_hz_ * std::cos(angle);
            phase_[p * oscillators_ + n] = phase;
            phasor_[p * oscillators_ + n] = std::polar(1.0, phase);
        }
    }
    taps_.assign(powers_.size(), CMatrix::Zero(static_cast<Eigen::Index>(nrx_), static_cast<Eigen::Index>(ntx_)));
    refresh_taps();
    reset_tail();
}

TdlChannel TdlChannel::fixed(std::vector<CMatrix> taps) {
    if (taps.empty()) throw SizingError("tdl channel: no taps");
    TdlChannel ch;
    ch.nrx_ = static_cast<std::size_t>(taps.front().rows());
    ch.ntx_ = static_cast<std::size_t>(taps.front().cols());
    for (const auto& h : taps)
        if (static_cast<std::size_t>(h.rows()) != ch.nrx_ || static_cast<std::size_t>(h.cols()) != ch.ntx_)
            throw SizingError("tdl channel: taps must share one shape");
    for (const auto& h : taps) ch.powers_.push_back(h.squaredNorm() / static_cast<double>(ch.nrx_ * ch.ntx_));
    ch.taps_ = std::move(taps);
    ch.reset_tail();
    return ch;
}

void TdlChannel::refresh_taps() {
    for (std::size_t i = 0; i < taps_.size(); ++i) {
        for (std::size_t r = 0; r < nrx_; ++r) {
            for (std::size_t c = 0; c < ntx_; ++c) {
                const std::size_t p = (i * nrx_ + r) * ntx_ + c;
                cplx sum{0.0, 0.0};
                const cplx* z = &phasor_[p * oscillators_];
                for (std::size_t n = 0; n < oscillators_; ++n) sum += z[n];
                taps_[i](static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = amp_[p] * sum;
            }
        }
    }
}

void TdlChannel::evolve(double dt) {
    if (!(dt >= 0.0)) throw std::invalid_argument("tdl channel: evolve needs dt >= 0");
    if (dt == 0.0 || omega_.empty()) {
        t_ += dt;
        return;
    }
    t_ += dt;
    if (doppler_hz_ == 0.0) return;

    if (++steps_since_anchor_ >= kAnchorInterval || dt != last_dt_) {
        if (dt != last_dt_) {
            rotation_.resize(omega_.size());
            for (std::size_t k = 0; k < omega_.size(); ++k) rotation_[k] = std::polar(1.0, omega_[k] * dt);
            last_dt_ = dt;
        }
        for (std::size_t k = 0; k < omega_.size(); ++k)
            phasor_[k] = std::polar(1.0, std::fmod(omega_[k] * t_ + phase_[k], 2.0 * kPi));
        steps_since_anchor_ = 0;
    } else {
        for (std::size_t k = 0; k < omega_.size(); ++k) phasor_[k] *= rotation_[k];
    }
    refresh_taps();
}

Samples TdlChannel::apply(const Samples& x) {
    if (static_cast<std::size_t>(x.cols()) != ntx_)
        throw SizingError("tdl channel: input has " + std::to_string(x.cols()) + " antennas, channel expects " +
                          std::to_string(ntx_));
    const Eigen::Index len = x.rows();
    const auto mem = static_cast<Eigen::Index>(taps_.size()) - 1;

    Samples ext(mem + len, static_cast<Eigen::Index>(ntx_));
    if (mem > 0) ext.topRows(mem) = tail_;
    ext.bottomRows(len) = x;

    Samples y = Samples::Zero(len, static_cast<Eigen::Index>(nrx_));
    for (Eigen::Index i = 0; i <= mem; ++i) y.noalias() += ext.middleRows(mem - i, len) * taps_[i].transpose();

    if (mem > 0) tail_ = ext.bottomRows(mem);
    return y;
}

void TdlChannel::reset_tail() {
    const auto mem = static_cast<Eigen::Index>(taps_.size()) - 1;
    tail_ = Samples::Zero(mem, static_cast<Eigen::Index>(ntx_));
}

TdlChannel init_channel(const TdlProfile& profile, std::size_t nrx, std::size_t ntx, double ts_seconds, Rng& rng,
                        std::size_t oscillators) {
    return TdlChannel(profile, nrx, ntx, ts_seconds, rng, oscillators);
}

void add_noise(Samples& y, double variance, Rng& rng) {
    if (!(variance >= 0.0)) throw std::invalid_argument("add_noise: variance must be non-negative");
    if (variance == 0.0) return;
    for (Eigen::Index r = 0; r < y.rows(); ++r)
        for (Eigen::Index c = 0; c < y.cols(); ++c) y(r, c) += sample_cgauss(rng, variance);
}

}  // namespace cvmimo
