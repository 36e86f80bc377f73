#include "cvmimo/channel/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cvmimo/errors.hpp"
#include "cvmimo/types.hpp"

namespace cvmimo {

void TdlProfile::validate() const {
    if (delays_ns.empty()) throw std::invalid_argument("tdl profile: no taps");
    if (delays_ns.size() != powers_db.size()) throw std::invalid_argument("tdl profile: delay/power length mismatch");
    for (std::size_t i = 0; i < delays_ns.size(); ++i) {
        if (!(delays_ns[i] >= 0.0) || !std::isfinite(delays_ns[i]))
            throw std::invalid_argument("tdl profile: tap " + std::to_string(i) + " has a negative delay");
        if (!std::isfinite(powers_db[i]))
            throw std::invalid_argument("tdl profile: tap " + std::to_string(i) + " has a non-finite power");
    }
    if (!(doppler_hz >= 0.0) || !std::isfinite(doppler_hz))
        throw std::invalid_argument("tdl profile: doppler_hz must be finite and non-negative");
}

TdlProfile parse_profile(std::istream& in, const std::string& source) {
    TdlProfile p;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string first;
        if (!(ss >> first)) continue;

        if (first == "doppler_hz") {
            double v = 0.0;
            std::string extra;
            if (!(ss >> v) || (ss >> extra) || v < 0.0)
                throw ConfigError("doppler_hz", lineno, source + ": expected 'doppler_hz <non-negative value>'");
            p.doppler_hz = v;
            continue;
        }

        std::istringstream row(line);
        double delay = 0.0, power = 0.0;
        std::string extra;
        if (!(row >> delay >> power) || (row >> extra))
            throw ConfigError("", lineno, source + ": expected 'delay_ns power_db', got '" + line + "'");
        if (delay < 0.0) throw ConfigError("", lineno, source + ": negative tap delay");
        p.delays_ns.push_back(delay);
        p.powers_db.push_back(power);
    }
    if (p.delays_ns.empty()) throw ConfigError("", lineno, source + ": profile has no taps");

    std::vector<std::size_t> order(p.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p.delays_ns[a] < p.delays_ns[b]; });
    TdlProfile sorted;
    sorted.doppler_hz = p.doppler_hz;
    for (auto i : order) {
        sorted.delays_ns.push_back(p.delays_ns[i]);
        sorted.powers_db.push_back(p.powers_db[i]);
    }
    return sorted;
}

TdlProfile load_profile(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("channel.profile", 0, "cannot open profile '" + path.string() + "'");
    return parse_profile(in, path.string());
}

std::vector<double> discretize_profile(const TdlProfile& profile, double ts_seconds) {
    profile.validate();
    if (!(ts_seconds > 0.0)) throw std::invalid_argument("discretize_profile: sample period must be positive");

    std::vector<double> taps;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const auto idx = static_cast<std::size_t>(std::llround(profile.delays_ns[i] * 1e-9 / ts_seconds));
        if (idx >= taps.size()) taps.resize(idx + 1, 0.0);
        taps[idx] += db_to_linear(profile.powers_db[i]);
    }
    double total = 0.0;
    for (double v : taps) total += v;
    for (double& v : taps) v /= total;
    return taps;
}

}  // namespace cvmimo
