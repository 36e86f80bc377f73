#pragma once

#include <filesystem>
#include <iosfwd>

#include "cvmimo/cvnn/network.hpp"

namespace cvmimo::cvnn {

inline constexpr int kCheckpointVersion = 1;

// Versioned text dump of every tensor (values and momentum buffers, hex
// floats) plus the init stream record; load(save(net)) == net bit-exactly.
void save_checkpoint(std::ostream& out, const Network& net);
Network load_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const Network& net);
Network load_checkpoint(const std::filesystem::path& path);

}  // namespace cvmimo::cvnn
