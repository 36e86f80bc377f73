#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cvmimo {

// Dimension or length that an operation cannot accept (non power-of-two FFT,
// ragged bit vector, mismatched antenna counts, ...).
class SizingError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A network evaluation produced a non-finite intermediate value.
class NumericDomainError : public std::domain_error {
public:
    NumericDomainError(const std::string& what, std::size_t neuron)
        : std::domain_error(what + " (neuron " + std::to_string(neuron) + ")"), neuron_(neuron) {}

    std::size_t neuron() const noexcept { return neuron_; }

private:
    std::size_t neuron_;
};

// Malformed or out-of-range configuration; carries the key and the 1-based
// source line (0 when the value did not come from a file).
class ConfigError : public std::invalid_argument {
public:
    ConfigError(const std::string& key, int line, const std::string& message)
        : std::invalid_argument(format(key, line, message)), key_(key), line_(line) {}

    const std::string& key() const noexcept { return key_; }
    int line() const noexcept { return line_; }

private:
    static std::string format(const std::string& key, int line, const std::string& message) {
        std::string out = "config";
        if (line > 0) out += " line " + std::to_string(line);
        if (!key.empty()) out += " key '" + key + "'";
        return out + ": " + message;
    }

    std::string key_;
    int line_;
};

// Failure inside an experiment run, tagged with where it happened.
class RunError : public std::runtime_error {
public:
    RunError(const std::string& what, std::size_t frame, std::size_t subcarrier)
        : std::runtime_error("frame " + std::to_string(frame) + ", subcarrier " + std::to_string(subcarrier) + ": " +
                             what),
          frame_(frame),
          subcarrier_(subcarrier) {}

    std::size_t frame() const noexcept { return frame_; }
    std::size_t subcarrier() const noexcept { return subcarrier_; }

private:
    std::size_t frame_;
    std::size_t subcarrier_;
};

}  // namespace cvmimo
