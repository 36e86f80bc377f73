#include "cvmimo/cli/app.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "cvmimo/cli/config.hpp"
#include "cvmimo/cvnn/complexity.hpp"
#include "cvmimo/cvnn/gradcheck.hpp"
#include "cvmimo/errors.hpp"
#include "cvmimo/harness/report.hpp"

namespace cvmimo {

namespace {

struct Options {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    std::string architectures;
    // gradcheck
    std::size_t draws = 20;
    std::size_t n_in = 8;
    std::size_t hidden = 5;
    std::size_t n_out = 2;
    double step = 1e-6;
    double tolerance = 1e-5;
    double floor = cvnn::kGradCheckFloor;
};

ExperimentConfig load(const Options& o) {
    ExperimentConfig c = load_config(o.config_path, o.overrides);
    if (o.seed) c.seeds = {*o.seed};
    if (o.threads) c.threads = *o.threads;
    return c;
}

std::string seed_stem(double ebn0, std::uint64_t seed) {
    return "ebn0_" + format_real(ebn0) + "_seed_" + std::to_string(seed);
}

// Another architecture on the same link: that architecture's table rates and
// default width, the shared settings carried over.
ExperimentConfig for_architecture(const ExperimentConfig& base, cvnn::Architecture arch) {
    if (arch == base.architecture) return base;
    ExperimentConfig c = base;
    c.architecture = arch;
    c.hidden = 0;
    c.hp = cvnn::Hyperparameters::defaults_for(arch);
    c.hp.lambda = base.hp.lambda;
    c.hp.epsilon = base.hp.epsilon;
    c.hp.sigma_init = base.hp.sigma_init;
    return c;
}

std::vector<cvnn::Architecture> parse_architectures(const std::string& text, cvnn::Architecture fallback) {
    if (text.empty()) return {fallback};
    if (text == "all") return {std::begin(cvnn::kAllArchitectures), std::end(cvnn::kAllArchitectures)};
    std::vector<cvnn::Architecture> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(cvnn::parse_architecture(item));
    return out;
}

int cmd_validate(const Options& o, std::ostream& out) {
    const ExperimentConfig c = load(o);
    for (const auto& [k, v] : resolved_entries(c)) out << k << " = " << v << "\n";
    return kExitOk;
}

int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
    const ExperimentConfig c = load(o);
    const std::uint64_t seed = c.seeds.front();
    err << "run: " << cvnn::to_string(c.architecture) << ", " << c.n_frames << " frames, Eb/N0 "
        << format_real(c.ebn0_db) << " dB, seed " << seed << "\n";
    const RunResult r = run_experiment(c, seed);
    const std::filesystem::path dir = o.out_dir;
    write_run_artifacts(dir, "run", r);
    out << "steady_state_mse_db " << format_real(r.steady_state_mse_db) << "\n";
    out << "ber " << format_real(r.ber_overall) << "\n";
    out << "convergence_frame " << (r.convergence_frame ? std::to_string(*r.convergence_frame) : "none") << "\n";
    out << "wrote " << (dir / "run.json").string() << " and " << (dir / "run.frames.csv").string() << "\n";
    return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
    const ExperimentConfig base = load(o);
    const auto archs = parse_architectures(o.architectures, base.architecture);
    const std::filesystem::path dir = o.out_dir;
    std::filesystem::create_directories(dir);

    std::vector<BerRow> rows;
    for (const auto arch : archs) {
        const ExperimentConfig c = for_architecture(base, arch);
        const std::string name(cvnn::to_string(arch));
        const std::filesystem::path run_dir = dir / "runs" / name;
        // Per-run artifacts land as each run completes.
        const auto points = ber_curve(c, c.ebn0_list, c.seeds, c.threads, [&](const RunResult& r) {
            write_run_artifacts(run_dir, seed_stem(r.config.ebn0_db, r.seed), r);
            err << "sweep: " << name << " Eb/N0 " << format_real(r.config.ebn0_db) << " seed " << r.seed << " ber "
                << format_real(r.ber_overall) << "\n";
        });
        for (const auto& p : points) rows.push_back({p.ebn0_db, name, p.mean_ber, p.std_ber});
        std::ofstream partial(dir / "ber_table.csv", std::ios::binary);
        write_ber_table(partial, base, rows);
    }
    std::stable_sort(rows.begin(), rows.end(), [](const BerRow& a, const BerRow& b) { return a.ebn0_db < b.ebn0_db; });
    std::ofstream table(dir / "ber_table.csv", std::ios::binary);
    write_ber_table(table, base, rows);
    if (!table) throw std::runtime_error("cannot write " + (dir / "ber_table.csv").string());
    for (const auto& r : rows)
        out << std::setw(8) << format_real(r.ebn0_db) << "  " << std::setw(7) << r.architecture << "  "
            << format_real(r.mean_ber) << " +- " << format_real(r.std_ber) << "\n";
    out << "wrote " << (dir / "ber_table.csv").string() << "\n";
    return kExitOk;
}

int cmd_gradcheck(const Options& o, std::ostream& out) {
    bool ok = true;
    const std::uint64_t seed = o.seed.value_or(1);
    out << "gradcheck n_in=" << o.n_in << " hidden=" << o.hidden << " n_out=" << o.n_out << " draws=" << o.draws
        << " h=" << format_real(o.step) << " tol=" << format_real(o.tolerance) << " floor=" << format_real(o.floor)
        << "\n";
    for (const auto arch : cvnn::kAllArchitectures) {
        const auto r = cvnn::gradient_check(arch, o.n_in, o.hidden, o.n_out, o.draws, seed, o.step, o.floor);
        const bool pass = r.max_rel_error < o.tolerance;
        ok = ok && pass;
        char err_buf[32];
        std::snprintf(err_buf, sizeof err_buf, "%.3e", r.max_rel_error);
        out << std::left << std::setw(8) << cvnn::to_string(arch) << std::right << " partials " << std::setw(6)
            << r.coordinates << " (floored " << std::setw(4) << r.floored << ")  max_rel_error " << err_buf << "  worst " << r.worst << " ("
            << format_real(r.worst_analytic) << " vs " << format_real(r.worst_numeric) << ")  "
            << (pass ? "PASS" : "FAIL") << "\n";
    }
    out << (ok ? "gradcheck PASS" : "gradcheck FAIL") << "\n";
    return ok ? kExitOk : kExitRuntime;
}

int cmd_complexity(const Options& o, std::ostream& out) {
    std::size_t n_in = 32 * 32, n_out = 32;
    std::optional<ExperimentConfig> c;
    if (!o.config_path.empty()) {
        c = load(o);
        n_in = c->n_in();
        n_out = c->dims.ntx;
    }
    struct Row {
        cvnn::NetworkConfig net;
        cvnn::Complexity cx;
    };
    std::vector<Row> rows;
    for (const auto arch : cvnn::kAllArchitectures) {
        std::size_t hidden = cvnn::default_hidden(arch);
        if (c && c->architecture == arch && c->hidden != 0) hidden = c->hidden;
        const cvnn::NetworkConfig net{arch, n_in, hidden, n_out};
        rows.push_back({net, cvnn::complexity(net)});
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.cx.train_real_mults < b.cx.train_real_mults; });

    std::ostringstream csv;
    csv << "architecture,n_in,hidden,n_out,train_real_mults,infer_real_mults\n";
    out << std::left << std::setw(8) << "arch" << std::right << std::setw(7) << "n_in" << std::setw(8) << "hidden"
        << std::setw(7) << "n_out" << std::setw(14) << "train" << std::setw(14) << "infer" << "\n";
    for (const auto& r : rows) {
        out << std::left << std::setw(8) << cvnn::to_string(r.net.architecture) << std::right << std::setw(7)
            << r.net.n_in << std::setw(8) << r.net.hidden << std::setw(7) << r.net.n_out << std::setw(14)
            << r.cx.train_real_mults << std::setw(14) << r.cx.infer_real_mults << "\n";
        csv << cvnn::to_string(r.net.architecture) << ',' << r.net.n_in << ',' << r.net.hidden << ',' << r.net.n_out
            << ',' << r.cx.train_real_mults << ',' << r.cx.infer_real_mults << "\n";
    }
    if (o.out_dir != ".") {
        std::filesystem::create_directories(o.out_dir);
        std::ofstream f(std::filesystem::path(o.out_dir) / "complexity.csv", std::ios::binary);
        f << "# cvmimo complexity schema " << kReportSchemaVersion << "\n# version " << code_version() << "\n";
        if (c)
            for (const auto& [k, v] : resolved_entries(*c)) f << "# config " << k << " = " << v << "\n";
        else
            f << "# config none, n_in = " << n_in << ", n_out = " << n_out << "\n";
        f << csv.str();
    }
    return kExitOk;
}

}  // namespace

int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"QOSTBC MIMO-OFDM link with online-trained complex-valued networks", "cvmimo"};
    app.set_version_flag("--version", code_version());
    app.require_subcommand(1);

    auto add_config = [&](CLI::App* sub, bool required) {
        auto* opt = sub->add_option("-c,--config", o.config_path, "config file")->check(CLI::ExistingFile);
        if (required) opt->required();
        sub->add_option("-s,--set", o.overrides, "override, key=value (repeatable)");
    };
    auto* run = app.add_subcommand("run", "one run, writes run.json and run.frames.csv");
    add_config(run, true);
    run->add_option("-o,--out", o.out_dir, "output directory");
    run->add_option("--seed", o.seed, "seed (replaces run.seeds)");

    auto* sweep = app.add_subcommand("sweep", "BER against Eb/N0 over run.ebn0_list and run.seeds");
    add_config(sweep, true);
    sweep->add_option("-o,--out", o.out_dir, "output directory");
    sweep->add_option("--seed", o.seed, "single seed (replaces run.seeds)");
    sweep->add_option("-j,--threads", o.threads, "parallel runs (replaces run.threads)");
    sweep->add_option("-a,--architectures", o.architectures, "comma list or 'all' (default: configured one)");

    auto* grad = app.add_subcommand("gradcheck", "finite-difference check of every analytic gradient");
    grad->add_option("--draws", o.draws, "random (state, x, d) draws per architecture");
    grad->add_option("--n-in", o.n_in, "input width");
    grad->add_option("--hidden", o.hidden, "hidden width");
    grad->add_option("--n-out", o.n_out, "output width");
    grad->add_option("--step", o.step, "finite-difference step");
    grad->add_option("--tol", o.tolerance, "relative error tolerance");
    grad->add_option("--floor", o.floor, "partials below this are compared absolutely");
    grad->add_option("--seed", o.seed, "seed");

    auto* cx = app.add_subcommand("complexity", "real multiplications per iteration, ordered by training cost");
    add_config(cx, false);
    cx->add_option("-o,--out", o.out_dir, "also write complexity.csv here");

    auto* val = app.add_subcommand("validate-config", "parse a config and print every resolved key");
    add_config(val, true);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << code_version() << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }

    try {
        if (run->parsed()) return cmd_run(o, out, err);
        if (sweep->parsed()) return cmd_sweep(o, out, err);
        if (grad->parsed()) return cmd_gradcheck(o, out);
        if (cx->parsed()) return cmd_complexity(o, out);
        return cmd_validate(o, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const SizingError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const RunError& e) {
        err << "error: run failed at " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace cvmimo
