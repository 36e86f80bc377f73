#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cvmimo/harness/experiment.hpp"

namespace cvmimo {

double to_db(double linear);

// Trailing moving average over min(window, available) frames, taken in linear
// power; input and output in dB.
std::vector<double> smooth_mse(std::span<const double> series_db, std::size_t window);

// Trailing moving average of a linear series.
std::vector<double> moving_average(std::span<const double> series, std::size_t window);

// Index (frame number) of the first data frame from which the smoothed BER
// stays below `threshold` for `window` consecutive data frames (or until the
// run ends); nullopt if never.
std::optional<std::size_t> convergence_frame(const RunResult& run, double threshold, std::size_t window);

// Least-squares slope (dB per frame) of inference MSE against frame index for
// each complete inter-pilot gap whose first frame is >= `from_frame`. Each
// frame's linear MSE is averaged over `runs` before conversion to dB. All runs
// must share one schedule.
std::vector<double> gap_slopes(std::span<const RunResult> runs, std::size_t from_frame);

}  // namespace cvmimo
