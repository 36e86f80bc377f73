#include "cvmimo/harness/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "cvmimo/cli/config.hpp"

#ifndef CVMIMO_VERSION
#define CVMIMO_VERSION "unknown"
#endif

namespace cvmimo {

std::string code_version() { return CVMIMO_VERSION; }

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

namespace {

nlohmann::ordered_json real_or_null(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

void write_header(std::ostream& out, const ExperimentConfig& config, const char* kind) {
    out << "# cvmimo " << kind << " schema " << kReportSchemaVersion << "\n";
    out << "# version " << code_version() << "\n";
    for (const auto& [k, v] : resolved_entries(config)) out << "# config " << k << " = " << v << "\n";
}

}  // namespace

std::string run_summary_json(const RunResult& run) {
    nlohmann::ordered_json j;
    j["schema"] = kReportSchemaVersion;
    j["version"] = code_version();
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : resolved_entries(run.config)) cfg[k] = v;
    j["config"] = cfg;
    j["seed"] = run.seed;
    std::size_t pilots = 0, bits = 0, errors = 0;
    for (const auto& f : run.frames) {
        pilots += f.kind == FrameKind::Pilot;
        bits += f.bits_tx;
        errors += f.bit_errors;
    }
    j["frames"] = run.frames.size();
    j["pilot_frames"] = pilots;
    j["bits_transmitted"] = bits;
    j["bit_errors"] = errors;
    j["steady_state_mse_db"] = real_or_null(run.steady_state_mse_db);
    j["ber"] = real_or_null(run.ber_overall);
    if (run.convergence_frame)
        j["convergence_frame"] = *run.convergence_frame;
    else
        j["convergence_frame"] = nullptr;
    return j.dump(2) + "\n";
}

void write_frames_csv(std::ostream& out, const RunResult& run) {
    write_header(out, run.config, "frames");
    out << "# seed " << run.seed << "\n";
    out << "frame,kind,mse_db,ber\n";
    for (const auto& f : run.frames) {
        out << f.index << ',' << (f.kind == FrameKind::Pilot ? "pilot" : "data") << ',' << format_real(f.mse_db) << ',';
        if (f.kind == FrameKind::Data) out << format_real(f.ber);
        out << '\n';
    }
}

void write_ber_table(std::ostream& out, const ExperimentConfig& config, const std::vector<BerRow>& rows) {
    write_header(out, config, "ber-table");
    out << "ebn0_db,architecture,mean_ber,std_ber\n";
    for (const auto& r : rows)
        out << format_real(r.ebn0_db) << ',' << r.architecture << ',' << format_real(r.mean_ber) << ','
            << format_real(r.std_ber) << '\n';
}

void write_run_artifacts(const std::filesystem::path& dir, const std::string& stem, const RunResult& run) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream js(dir / (stem + ".json"), std::ios::binary);
        js << run_summary_json(run);
        if (!js) throw std::runtime_error("cannot write " + (dir / (stem + ".json")).string());
    }
    std::ofstream csv(dir / (stem + ".frames.csv"), std::ios::binary);
    write_frames_csv(csv, run);
    if (!csv) throw std::runtime_error("cannot write " + (dir / (stem + ".frames.csv")).string());
}

}  // namespace cvmimo
