#include "cvmimo/harness/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cvmimo {

double to_db(double linear) { return 10.0 * std::log10(linear); }

std::vector<double> moving_average(std::span<const double> series, std::size_t window) {
    if (window == 0) throw std::invalid_argument("moving_average: window must be >= 1");
    std::vector<double> out(series.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        sum += series[i];
        if (i >= window) sum -= series[i - window];
        out[i] = sum / static_cast<double>(std::min(window, i + 1));
    }
    return out;
}

std::vector<double> smooth_mse(std::span<const double> series_db, std::size_t window) {
    std::vector<double> linear(series_db.size());
    for (std::size_t i = 0; i < series_db.size(); ++i) linear[i] = db_to_linear(series_db[i]);
    if (window == 1) return {series_db.begin(), series_db.end()};
    std::vector<double> out = moving_average(linear, window);
    for (double& v : out) v = to_db(v);
    return out;
}

std::optional<std::size_t> convergence_frame(const RunResult& run, double threshold, std::size_t window) {
    if (window == 0) throw std::invalid_argument("convergence_frame: window must be >= 1");
    std::vector<double> ber;
    std::vector<std::size_t> index;
    for (const auto& r : run.frames) {
        if (r.kind != FrameKind::Data) continue;
        ber.push_back(r.ber);
        index.push_back(r.index);
    }
    if (ber.empty()) return std::nullopt;
    const std::vector<double> smooth = moving_average(ber, window);

    // below[j]: number of consecutive below-threshold frames starting at j.
    std::vector<std::size_t> below(smooth.size() + 1, 0);
    for (std::size_t j = smooth.size(); j-- > 0;) below[j] = smooth[j] < threshold ? below[j + 1] + 1 : 0;
    for (std::size_t j = 0; j < smooth.size(); ++j) {
        const std::size_t needed = std::min(window, smooth.size() - j);
        if (below[j] >= needed && needed > 0) return index[j];
    }
    return std::nullopt;
}

std::vector<double> gap_slopes(std::span<const RunResult> runs, std::size_t from_frame) {
    if (runs.empty()) return {};
    const auto& ref = runs.front().frames;
    for (const auto& r : runs)
        if (r.frames.size() != ref.size()) throw std::invalid_argument("gap_slopes: runs have different lengths");

    std::vector<double> slopes;
    std::size_t i = 0;
    while (i < ref.size()) {
        if (ref[i].kind != FrameKind::Data) {
            ++i;
            continue;
        }
        std::size_t end = i;
        while (end < ref.size() && ref[end].kind == FrameKind::Data) ++end;
        // Only complete gaps: bounded by a pilot on the right.
        if (ref[i].index >= from_frame && end < ref.size() && end - i >= 2) {
            const double n = static_cast<double>(end - i);
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (std::size_t f = i; f < end; ++f) {
                double mean = 0.0;
                for (const auto& r : runs) mean += r.frames[f].mse;
                const double y = to_db(mean / static_cast<double>(runs.size()));
                const double x = static_cast<double>(f - i);
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
            }
            slopes.push_back((n * sxy - sx * sy) / (n * sxx - sx * sx));
        }
        i = end;
    }
    return slopes;
}

}  // namespace cvmimo
