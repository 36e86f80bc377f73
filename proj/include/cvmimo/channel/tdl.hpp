#pragma once

#include <cstddef>
#include <vector>

#include "cvmimo/channel/profile.hpp"
#include "cvmimo/numerics/rng.hpp"
#include "cvmimo/types.hpp"

namespace cvmimo {

// Time-varying sample-spaced MIMO channel
//   y[n] = sum_i H_i[n] x[n - i]
// Each (tap, rx, tx) coefficient is an independent Rayleigh process realised
// as a sum of unit phasors with Jakes-distributed frequencies fD*cos(angle),
// scaled so that E|h_i|^2 equals the discretised tap power. Taps stay
// constant inside apply() and only change in evolve().
class TdlChannel {
public:
    static constexpr std::size_t kDefaultOscillators = 64;

    TdlChannel(const TdlProfile& profile, std::size_t nrx, std::size_t ntx, double ts_seconds, Rng& rng,
               std::size_t oscillators = kDefaultOscillators);

    // Fixed taps, no Doppler.
    static TdlChannel fixed(std::vector<CMatrix> taps);

    std::size_t num_taps() const noexcept { return taps_.size(); }
    std::size_t nrx() const noexcept { return nrx_; }
    std::size_t ntx() const noexcept { return ntx_; }
    double time() const noexcept { return t_; }
    double doppler_hz() const noexcept { return doppler_hz_; }
    const std::vector<double>& tap_powers() const noexcept { return powers_; }

    // H_i at the current time, nrx x ntx.
    const CMatrix& tap(std::size_t i) const { return taps_.at(i); }

    void evolve(double dt);

    // Convolves [L x ntx] input with the current taps, using and refreshing
    // the stored tail of the previous Nds-1 input rows.
    Samples apply(const Samples& x);

    void reset_tail();

private:
    TdlChannel() = default;

    void refresh_taps();

    std::size_t nrx_ = 0;
    std::size_t ntx_ = 0;
    std::size_t oscillators_ = 0;
    double doppler_hz_ = 0.0;
    double t_ = 0.0;
    std::vector<double> powers_;
    std::vector<CMatrix> taps_;

    // Per process p = (tap * nrx + rx) * ntx + tx, oscillator n at p * oscillators + n.
    std::vector<double> omega_;   // angular Doppler frequency
    std::vector<double> phase_;   // initial phase
    std::vector<double> amp_;     // per process sqrt(p_i / oscillators)
    std::vector<cplx> phasor_;    // exp(j (omega t + phase)) at time t_
    std::vector<cplx> rotation_;  // exp(j omega last_dt_)
    double last_dt_ = -1.0;
    std::size_t steps_since_anchor_ = 0;

    Samples tail_;
};

TdlChannel init_channel(const TdlProfile& profile, std::size_t nrx, std::size_t ntx, double ts_seconds, Rng& rng,
                        std::size_t oscillators = TdlChannel::kDefaultOscillators);

// Adds i.i.d. CN(0, variance) to every sample in place.
void add_noise(Samples& y, double variance, Rng& rng);

}  // namespace cvmimo
