#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cvmimo/harness/experiment.hpp"

namespace cvmimo {

// Flat key-value config with [system], [channel], [network], [training] and
// [run] sections. Keys are addressed as "section.key"; docs/config.md lists
// every key with its default.
struct ConfigKey {
    std::string name;           // "system.ntx"
    bool mandatory = false;
    std::string default_value;  // empty: unset / derived
    std::string help;
};

const std::vector<ConfigKey>& config_keys();

struct RawConfig {
    struct Entry {
        std::string value;
        int line = 0;  // 0: command-line override
    };
    std::map<std::string, Entry> entries;
    std::filesystem::path base_dir = ".";
};

RawConfig read_config(std::istream& in, const std::filesystem::path& base_dir = ".");

// "key=value"; key may be "section.key" or an unambiguous bare key.
void apply_override(RawConfig& raw, std::string_view assignment);

ExperimentConfig resolve_config(const RawConfig& raw);

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

// Every key with its resolved value, in config_keys() order.
std::vector<std::pair<std::string, std::string>> resolved_entries(const ExperimentConfig& config);

std::vector<std::uint64_t> parse_seed_list(std::string_view text);
std::vector<double> parse_real_list(std::string_view text);

}  // namespace cvmimo
