#include "cvmimo/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "cvmimo/channel/tdl.hpp"
#include "cvmimo/errors.hpp"
#include "cvmimo/harness/metrics.hpp"
#include "cvmimo/modem/qam.hpp"
#include "cvmimo/numerics/fft.hpp"
#include "cvmimo/ofdm/ofdm.hpp"
#include "cvmimo/stc/qostbc.hpp"

namespace cvmimo {

cvnn::NetworkConfig ExperimentConfig::network() const {
    return {architecture, n_in(), hidden == 0 ? cvnn::default_hidden(architecture) : hidden, dims.ntx};
}

void ExperimentConfig::validate() const {
    if (dims.ntx < 2 || !is_power_of_two(dims.ntx)) throw SizingError("ntx must be a power of two >= 2");
    if (dims.nrx == 0) throw SizingError("nrx must be >= 1");
    OfdmLayout{dims.nfft, dims.ncp, ntp()}.validate();
    Constellation check(dims.modulation);
    if (!(dims.subcarrier_spacing_hz > 0.0)) throw std::invalid_argument("subcarrier spacing must be positive");
    if (pilot_period == 0) throw std::invalid_argument("pilot_period must be >= 1");
    if (upsample == 0) throw std::invalid_argument("upsample must be >= 1");
    if (n_frames == 0) throw std::invalid_argument("n_frames must be >= 1");
    if (oscillators == 0) throw std::invalid_argument("oscillators must be >= 1");
    if (std::isnan(ebn0_db) || ebn0_db == -std::numeric_limits<double>::infinity())
        throw std::invalid_argument("ebn0_db must be a number or +inf");
    if (!(ber_threshold > 0.0 && ber_threshold < 1.0)) throw std::invalid_argument("ber_threshold must lie in (0, 1)");
    if (seeds.empty()) throw std::invalid_argument("at least one seed is required");
    if (!(input_gain > 0.0) || !std::isfinite(input_gain)) throw std::invalid_argument("input_gain must be positive");
    network().validate();
    hp.validate(architecture);
    if (fixed_taps) {
        for (const auto& h : *fixed_taps)
            if (static_cast<std::size_t>(h.rows()) != dims.nrx || static_cast<std::size_t>(h.cols()) != dims.ntx)
                throw SizingError("fixed channel taps must be nrx x ntx");
    } else {
        profile.validate();
    }
}

RunResult run_experiment(const ExperimentConfig& cfg, std::uint64_t seed,
                         const std::function<void(const FrameRecord&)>& on_frame) {
    cfg.validate();
    const SystemDims& dims = cfg.dims;
    const std::size_t ns = cfg.ntp();
    const std::size_t nfft = dims.nfft;

    Rng bits_rng(seed, "bits");
    Rng pilot_rng(seed, "pilots");
    Rng channel_rng(seed, "channel");
    Rng noise_rng(cfg.noise_seed.value_or(seed), "noise");
    Rng init_rng(seed, "init");

    const Constellation qam(dims.modulation);
    const FftPlan plan(nfft);
    const OfdmLayout layout{nfft, dims.ncp, ns};
    TdlChannel channel = cfg.fixed_taps ? TdlChannel::fixed(*cfg.fixed_taps)
                                        : TdlChannel(cfg.profile, dims.nrx, dims.ntx, dims.sample_period(),
                                                     channel_rng, cfg.oscillators);
    cvnn::Hyperparameters init_hp = cfg.hp;
    if (!init_hp.sigma_init)
        init_hp.sigma_init = cvnn::initial_variance(cfg.architecture, cfg.n_in(), cfg.hp, cfg.input_gain * cfg.input_gain);
    cvnn::Network net = cvnn::Network::init(cfg.network(), init_hp, init_rng);

    // Eb/N0 = +inf gives zero noise.
    const double noise_var = noise_variance(cfg.ebn0_db, dims.modulation);
    const double tx_scale = 1.0 / std::sqrt(static_cast<double>(dims.ntx));
    const std::size_t bps = qam.bits_per_symbol();
    const std::size_t bits_per_frame = nfft * ns * bps;
    const std::size_t sym_len = layout.symbol_length();
    const double t_sym = dims.symbol_duration();

    RunResult result;
    result.config = cfg;
    result.seed = seed;
    result.frames.reserve(cfg.n_frames);

    Bits bits(bits_per_frame);
    std::vector<QostbcBlock> blocks(nfft);
    std::vector<CVector> inputs(nfft);

    for (std::size_t f = 0; f < cfg.n_frames; ++f) {
        const bool pilot = f % cfg.pilot_period == 0;
        Rng& source = pilot ? pilot_rng : bits_rng;
        for (auto& b : bits) b = source.bit();
        const std::vector<cplx> symbols = qam.map(bits);
        for (std::size_t k = 0; k < nfft; ++k)
            blocks[k] = qostbc_encode(std::span<const cplx>(symbols).subspan(k * ns, ns));

        OfdmGrid grid = build_frame(blocks, dims.ncp);
        grid.scale(tx_scale);
        const Samples tx = ofdm_modulate(grid, plan);

        Samples rx(tx.rows(), static_cast<Eigen::Index>(dims.nrx));
        for (std::size_t t = 0; t < ns; ++t) {
            const auto start = static_cast<Eigen::Index>(t * sym_len);
            const auto len = static_cast<Eigen::Index>(sym_len);
            rx.middleRows(start, len) = channel.apply(tx.middleRows(start, len));
            channel.evolve(t_sym);
        }
        add_noise(rx, noise_var, noise_rng);
        const OfdmGrid received = ofdm_demodulate(rx, layout, plan);

        // Network input: s_hat[k] flattened row-major (time slot, rx antenna).
        for (std::size_t k = 0; k < nfft; ++k) {
            CVector& x = inputs[k];
            x.resize(static_cast<Eigen::Index>(ns * dims.nrx));
            for (std::size_t t = 0; t < ns; ++t)
                for (std::size_t r = 0; r < dims.nrx; ++r) x(static_cast<Eigen::Index>(t * dims.nrx + r)) = cfg.input_gain * received.at(t, k, r);
        }

        FrameRecord rec;
        rec.index = f;
        rec.kind = pilot ? FrameKind::Pilot : FrameKind::Data;
        std::size_t k = 0;
        try {
            if (pilot) {
                double total = 0.0;
                std::size_t steps = 0;
                auto step = [&](std::size_t sc) {
                    k = sc;
                    total += net.train_step(inputs[sc], blocks[sc].q, cfg.hp);
                    ++steps;
                };
                if (cfg.upsample_mode == UpsampleMode::Sequence) {
                    for (std::size_t rep = 0; rep < cfg.upsample; ++rep)
                        for (std::size_t sc = 0; sc < nfft; ++sc) step(sc);
                } else {
                    for (std::size_t sc = 0; sc < nfft; ++sc)
                        for (std::size_t rep = 0; rep < cfg.upsample; ++rep) step(sc);
                }
                rec.mse = total / static_cast<double>(steps * ns);
            } else {
                double total = 0.0;
                std::vector<cplx> estimate(ns);
                for (k = 0; k < nfft; ++k) {
                    const CVector y = net.forward(inputs[k]);
                    total += (blocks[k].q - y).squaredNorm();
                    for (std::size_t i = 0; i < ns; ++i) estimate[i] = y(static_cast<Eigen::Index>(i));
                    const Bits decided = qam.demap(estimate);
                    const std::size_t offset = k * ns * bps;
                    for (std::size_t b = 0; b < decided.size(); ++b)
                        rec.bit_errors += decided[b] != bits[offset + b] ? 1u : 0u;
                    rec.bits_rx += decided.size();
                }
                rec.bits_tx = bits_per_frame;
                rec.mse = total / static_cast<double>(nfft * ns);
                rec.ber = static_cast<double>(rec.bit_errors) / static_cast<double>(rec.bits_tx);
            }
        } catch (const std::exception& e) {
            throw RunError(e.what(), f, k);
        }
        rec.mse_db = to_db(rec.mse);
        result.frames.push_back(rec);
        if (on_frame) on_frame(rec);
    }

    summarize(result);
    return result;
}

void summarize(RunResult& run) {
    double mse_sum = 0.0;
    std::size_t mse_count = 0, errors = 0, bits = 0;
    for (const auto& r : run.frames) {
        if (r.kind != FrameKind::Data || r.index < run.config.warmup_frames) continue;
        mse_sum += r.mse;
        ++mse_count;
        errors += r.bit_errors;
        bits += r.bits_tx;
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    run.steady_state_mse_db = mse_count ? to_db(mse_sum / static_cast<double>(mse_count)) : nan;
    run.ber_overall = bits ? static_cast<double>(errors) / static_cast<double>(bits) : nan;
    run.convergence_frame =
        convergence_frame(run, run.config.ber_threshold, static_cast<std::size_t>(run.config.hp.lambda));
}

namespace {

template <typename Job>
void run_pool(std::size_t jobs, std::size_t threads, const Job& job) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, jobs);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t j = next++; j < jobs; j = next++) {
            try {
                job(j);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = jobs;
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<RunResult> run_seeds(const ExperimentConfig& config, const std::vector<std::uint64_t>& seeds,
                                 std::size_t threads) {
    std::vector<RunResult> out(seeds.size());
    run_pool(seeds.size(), threads, [&](std::size_t j) { out[j] = run_experiment(config, seeds[j]); });
    return out;
}

std::vector<BerPoint> ber_curve(const ExperimentConfig& config, const std::vector<double>& ebn0_list,
                                const std::vector<std::uint64_t>& seeds, std::size_t threads,
                                const std::function<void(const RunResult&)>& on_run) {
    if (ebn0_list.empty() || seeds.empty()) throw std::invalid_argument("ber_curve: empty Eb/N0 or seed list");
    std::vector<double> grid = ebn0_list;
    std::sort(grid.begin(), grid.end());

    const std::size_t jobs = grid.size() * seeds.size();
    std::vector<double> ber(jobs);
    std::mutex report_mutex;
    run_pool(jobs, threads, [&](std::size_t j) {
        ExperimentConfig c = config;
        c.ebn0_db = grid[j / seeds.size()];
        RunResult r = run_experiment(c, seeds[j % seeds.size()]);
        ber[j] = r.ber_overall;
        if (on_run) {
            std::lock_guard lock(report_mutex);
            on_run(r);
        }
    });

    std::vector<BerPoint> points;
    for (std::size_t p = 0; p < grid.size(); ++p) {
        BerPoint pt;
        pt.ebn0_db = grid[p];
        pt.per_seed.assign(ber.begin() + static_cast<std::ptrdiff_t>(p * seeds.size()),
                           ber.begin() + static_cast<std::ptrdiff_t>((p + 1) * seeds.size()));
        double sum = 0.0;
        for (double b : pt.per_seed) sum += b;
        pt.mean_ber = sum / static_cast<double>(pt.per_seed.size());
        double var = 0.0;
        for (double b : pt.per_seed) var += (b - pt.mean_ber) * (b - pt.mean_ber);
        pt.std_ber = pt.per_seed.size() > 1 ? std::sqrt(var / static_cast<double>(pt.per_seed.size() - 1)) : 0.0;
        points.push_back(std::move(pt));
    }
    return points;
}

}  // namespace cvmimo
