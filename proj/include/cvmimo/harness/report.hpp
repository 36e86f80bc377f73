#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cvmimo/harness/experiment.hpp"

namespace cvmimo {

inline constexpr int kReportSchemaVersion = 1;

// Library version baked in at build time.
std::string code_version();

// Summary JSON of one run: schema, version, resolved config, seed,
// aggregates. No timestamps, so equal runs give equal bytes.
std::string run_summary_json(const RunResult& run);

// Per-frame CSV with columns frame,kind,mse_db,ber; '#' header lines carry
// the schema, version and resolved config. ber is empty on pilot frames.
void write_frames_csv(std::ostream& out, const RunResult& run);

struct BerRow {
    double ebn0_db = 0.0;
    std::string architecture;
    double mean_ber = 0.0;
    double std_ber = 0.0;
};

// Columns ebn0_db,architecture,mean_ber,std_ber.
void write_ber_table(std::ostream& out, const ExperimentConfig& config, const std::vector<BerRow>& rows);

// <dir>/<stem>.json and <dir>/<stem>.frames.csv
void write_run_artifacts(const std::filesystem::path& dir, const std::string& stem, const RunResult& run);

// Shortest decimal that reads back to the same double.
std::string format_real(double v);

}  // namespace cvmimo
