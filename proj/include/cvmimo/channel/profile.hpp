#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

namespace cvmimo {

struct TdlProfile {
    std::vector<double> delays_ns;
    std::vector<double> powers_db;
    double doppler_hz = 0.0;

    std::size_t size() const { return delays_ns.size(); }
    void validate() const;
};

// Plain-text profile: one "delay_ns power_db" row per tap, a "doppler_hz <v>"
// field, '#' comments. Malformed rows raise ConfigError naming the line.
TdlProfile parse_profile(std::istream& in, const std::string& source = "<profile>");
TdlProfile load_profile(const std::filesystem::path& path);

// Sample-spaced power delay profile: tap i lands on index round(delay/Ts),
// taps sharing an index add in linear power, result sums to one.
std::vector<double> discretize_profile(const TdlProfile& profile, double ts_seconds);

}  // namespace cvmimo
