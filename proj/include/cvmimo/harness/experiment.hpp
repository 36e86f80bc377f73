#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cvmimo/channel/profile.hpp"
#include "cvmimo/cvnn/network.hpp"
#include "cvmimo/types.hpp"

namespace cvmimo {

struct SystemDims {
    std::size_t ntx = 0;
    std::size_t nrx = 0;
    std::size_t nfft = 0;
    std::size_t ncp = 0;
    unsigned modulation = 16;
    double subcarrier_spacing_hz = 60e3;

    double sample_period() const { return 1.0 / (static_cast<double>(nfft) * subcarrier_spacing_hz); }
    double symbol_duration() const { return static_cast<double>(nfft + ncp) * sample_period(); }
};

enum class UpsampleMode {
    Sequence,  // the ordered pilot sequence is replayed `upsample` times
    Example,   // each pilot example is presented `upsample` times in a row
};

struct ExperimentConfig {
    SystemDims dims;
    cvnn::Architecture architecture = cvnn::Architecture::CRBF;
    std::size_t hidden = 0;
    cvnn::Hyperparameters hp;
    // Receiver gain on the network input; automatic kernel widths follow it.
    double input_gain = 1.0;

    std::string profile_path;
    TdlProfile profile;
    std::size_t oscillators = 64;
    // Replaces the fading channel with fixed taps (tests and sanity runs).
    std::optional<std::vector<CMatrix>> fixed_taps;

    std::size_t pilot_period = 6;
    std::size_t upsample = 30;
    UpsampleMode upsample_mode = UpsampleMode::Sequence;

    double ebn0_db = 20.0;  // +inf disables noise
    std::size_t n_frames = 0;
    std::size_t warmup_frames = 360;
    double ber_threshold = 2e-2;

    std::vector<std::uint64_t> seeds{0};
    std::optional<std::uint64_t> noise_seed;
    std::vector<double> ebn0_list;
    std::size_t threads = 0;  // 0: hardware concurrency

    std::size_t ntp() const { return dims.ntx; }
    std::size_t n_in() const { return ntp() * dims.nrx; }
    cvnn::NetworkConfig network() const;
    void validate() const;
};

enum class FrameKind { Pilot, Data };

struct FrameRecord {
    std::size_t index = 0;
    FrameKind kind = FrameKind::Data;
    double mse = 0.0;     // linear; training MSE on pilot frames, inference MSE on data frames
    double mse_db = 0.0;
    double ber = std::numeric_limits<double>::quiet_NaN();  // data frames only
    std::size_t bits_tx = 0;
    std::size_t bits_rx = 0;
    std::size_t bit_errors = 0;
};

struct RunResult {
    ExperimentConfig config;
    std::uint64_t seed = 0;
    std::vector<FrameRecord> frames;
    double steady_state_mse_db = std::numeric_limits<double>::quiet_NaN();
    double ber_overall = std::numeric_limits<double>::quiet_NaN();
    std::optional<std::size_t> convergence_frame;
};

// Online pilot-trained joint estimation/decoding over `n_frames` frames.
// `on_frame` (optional) sees every record as it is produced.
RunResult run_experiment(const ExperimentConfig& config, std::uint64_t seed,
                         const std::function<void(const FrameRecord&)>& on_frame = {});

// Steady-state aggregates and convergence frame, recomputed from the records.
void summarize(RunResult& run);

struct BerPoint {
    double ebn0_db = 0.0;
    double mean_ber = 0.0;
    double std_ber = 0.0;
    std::vector<double> per_seed;
};

// Runs (ebn0, seed) pairs on up to `threads` workers; points are returned in
// ebn0 order regardless of completion order. `on_run` is called from worker
// threads under a lock as runs complete.
std::vector<BerPoint> ber_curve(const ExperimentConfig& config, const std::vector<double>& ebn0_list,
                                const std::vector<std::uint64_t>& seeds, std::size_t threads = 0,
                                const std::function<void(const RunResult&)>& on_run = {});

// Runs every seed of `config` concurrently; results in seed order.
std::vector<RunResult> run_seeds(const ExperimentConfig& config, const std::vector<std::uint64_t>& seeds,
                                 std::size_t threads = 0);

}  // namespace cvmimo
