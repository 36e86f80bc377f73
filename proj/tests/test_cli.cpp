#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cvmimo/cli/app.hpp"
#include "cvmimo/cli/config.hpp"
#include "cvmimo/errors.hpp"

using namespace cvmimo;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = CVMIMO_CONFIG_DIR;

struct Result {
    int code;
    std::string out, err;
};

Result cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = execute(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("cvmimo_cli_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

// 2x2 link, 16 subcarriers, for quick CLI runs.
const std::vector<std::string> kSmall{"-s", "ntx=2", "-s", "nrx=2", "-s", "nfft=16", "-s", "ncp=1", "-s", "hidden=8",
                                      "-s", "upsample=2"};

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

TEST(Config, FullConfigurationParses) {
    const auto c = load_config(kConfigs / "paper-full.cfg");
    EXPECT_EQ(c.dims.ntx, 32u);
    EXPECT_EQ(c.dims.nrx, 32u);
    EXPECT_EQ(c.dims.nfft, 256u);
    EXPECT_EQ(c.dims.ncp, 16u);
    EXPECT_EQ(c.dims.modulation, 16u);
    EXPECT_EQ(c.dims.subcarrier_spacing_hz, 60e3);
    EXPECT_EQ(c.pilot_period, 6u);
    EXPECT_EQ(c.upsample, 30u);
    EXPECT_EQ(c.architecture, cvnn::Architecture::CRBF);
    EXPECT_EQ(c.network().hidden, 100u);
    EXPECT_EQ(c.n_in(), 1024u);
    const auto table = cvnn::Hyperparameters::defaults_for(cvnn::Architecture::CRBF);
    EXPECT_EQ(c.hp.eta_w, table.eta_w);
    EXPECT_EQ(c.hp.eta_b, table.eta_b);
    EXPECT_EQ(c.hp.eta_gamma, table.eta_gamma);
    EXPECT_EQ(c.hp.eta_sigma, table.eta_sigma);
    EXPECT_EQ(c.hp.alpha, table.alpha);
    EXPECT_EQ(c.hp.mu0, table.mu0);
    EXPECT_EQ(c.hp.lambda, 20);
    EXPECT_EQ(c.profile.doppler_hz, 5.0);
    EXPECT_EQ(c.profile.size(), 12u);
    EXPECT_EQ(c.warmup_frames, 360u);
    EXPECT_EQ(c.seeds.size(), 10u);
    EXPECT_EQ(c.ebn0_list.size(), 11u);
    EXPECT_EQ(c.ber_threshold, 0.02);
}

TEST(Config, EmptyFileNamesFirstMandatoryKey) {
    try {
        parse_config("");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.key(), "system.ntx");
    }
}

TEST(Config, OverrideChangesExactlyThatField) {
    const auto base = resolved_entries(load_config(kConfigs / "paper-full.cfg"));
    const auto over = resolved_entries(load_config(kConfigs / "paper-full.cfg", {"ebn0_db=14"}));
    ASSERT_EQ(base.size(), over.size());
    std::size_t diffs = 0;
    for (std::size_t i = 0; i < base.size(); ++i) {
        EXPECT_EQ(base[i].first, over[i].first);
        if (base[i].second != over[i].second) {
            ++diffs;
            EXPECT_EQ(over[i].first, "run.ebn0_db");
            EXPECT_EQ(over[i].second, "14");
        }
    }
    EXPECT_EQ(diffs, 1u);
    EXPECT_EQ(load_config(kConfigs / "paper-full.cfg", {"run.ebn0_db=14"}).ebn0_db, 14.0);
}

TEST(Config, ErrorsNameKeyAndLine) {
    const std::string head = "[system]\nntx = 4\nnrx = 4\nnfft = 64\nmodulation = 16\n";
    const std::string tail = "[network]\narchitecture = crbf\n[run]\nebn0_db = 10\nn_frames = 5\n[channel]\nmodel = identity\n";
    EXPECT_NO_THROW(parse_config(head + tail));
    auto expect_error = [&](const std::string& text, const std::string& key, int line) {
        try {
            parse_config(text);
            ADD_FAILURE() << "accepted: " << text;
        } catch (const ConfigError& e) {
            EXPECT_EQ(e.key(), key) << e.what();
            EXPECT_EQ(e.line(), line) << e.what();
        }
    };
    expect_error(head + "bogus = 1\n" + tail, "system.bogus", 6);
    expect_error("[system]\nntx = 3\nnrx = 4\nnfft = 64\nmodulation = 16\n" + tail, "system.ntx", 2);
    expect_error(head + "[network]\narchitecture = rbf\n[run]\nebn0_db = 10\nn_frames = 5\n[channel]\nmodel = identity\n",
                 "network.architecture", 7);
    expect_error("[system]\nntx = 4\nntx = 4\n", "system.ntx", 3);
    expect_error(head + "[nowhere]\n" + tail, "nowhere", 6);
    expect_error(head + tail + "n_frames = -2\n", "channel.n_frames", 13);
}

TEST(Config, UnknownOverrideRejected) {
    EXPECT_THROW(load_config(kConfigs / "desk.cfg", {"nonsense=1"}), ConfigError);
    EXPECT_THROW(load_config(kConfigs / "desk.cfg", {"ebn0_db"}), ConfigError);
}

TEST(Config, ListSyntax) {
    EXPECT_EQ(parse_seed_list("0-3"), (std::vector<std::uint64_t>{0, 1, 2, 3}));
    EXPECT_EQ(parse_seed_list("7,2"), (std::vector<std::uint64_t>{7, 2}));
    EXPECT_EQ(parse_real_list("0:5:20"), (std::vector<double>{0, 5, 10, 15, 20}));
    EXPECT_EQ(parse_real_list("1.5,3"), (std::vector<double>{1.5, 3}));
    EXPECT_ANY_THROW(parse_seed_list("3-1"));
    EXPECT_ANY_THROW(parse_real_list("0:0:1"));
}

TEST(Cli, OneFrameRunWritesOneRow) {
    const fs::path dir = scratch("one");
    const auto r = cli(with({"run", "-c", (kConfigs / "desk.cfg").string(), "-s", "n_frames=1", "-o", dir.string()}, kSmall));
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream csv(slurp(dir / "run.frames.csv"));
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(csv, line))
        if (!line.starts_with("#")) rows.push_back(line);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0], "frame,kind,mse_db,ber");
    EXPECT_TRUE(rows[1].starts_with("0,pilot,"));
    const auto j = nlohmann::json::parse(slurp(dir / "run.json"));
    EXPECT_EQ(j["frames"], 1);
    EXPECT_TRUE(j["convergence_frame"].is_null());
    fs::remove_all(dir);
}

TEST(Cli, ArtifactsCarryConfigAndVersion) {
    const fs::path dir = scratch("prov");
    ASSERT_EQ(cli(with({"run", "-c", (kConfigs / "desk.cfg").string(), "-s", "n_frames=3", "-o", dir.string()}, kSmall)).code, 0);
    const std::string csv = slurp(dir / "run.frames.csv");
    EXPECT_NE(csv.find("# version "), std::string::npos);
    EXPECT_NE(csv.find("# config system.nfft = 16"), std::string::npos);
    EXPECT_NE(csv.find("# config training.eta_w = 0.01"), std::string::npos);
    const auto j = nlohmann::json::parse(slurp(dir / "run.json"));
    EXPECT_EQ(j["config"]["system.nfft"], "16");
    EXPECT_TRUE(j.contains("version"));
    fs::remove_all(dir);
}

TEST(Cli, RerunIsByteIdentical) {
    const fs::path a = scratch("a"), b = scratch("b");
    const auto args = with({"run", "-c", (kConfigs / "desk.cfg").string(), "-s", "n_frames=8", "--seed", "4"}, kSmall);
    ASSERT_EQ(cli(with(args, {"-o", a.string()})).code, 0);
    ASSERT_EQ(cli(with(args, {"-o", b.string()})).code, 0);
    EXPECT_EQ(slurp(a / "run.frames.csv"), slurp(b / "run.frames.csv"));
    EXPECT_EQ(slurp(a / "run.json"), slurp(b / "run.json"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Cli, SweepWritesTableAndPerRunArtifacts) {
    const fs::path dir = scratch("sweep");
    const auto r = cli(with({"sweep", "-c", (kConfigs / "desk.cfg").string(), "-s", "n_frames=4", "-s", "ebn0_list=0,10",
                             "-s", "seeds=0-1", "-a", "crbf,scfnn", "-j", "2", "-o", dir.string()},
                            kSmall));
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream table(slurp(dir / "ber_table.csv"));
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(table, line))
        if (!line.starts_with("#")) rows.push_back(line);
    ASSERT_EQ(rows.size(), 5u);
    EXPECT_EQ(rows[0], "ebn0_db,architecture,mean_ber,std_ber");
    EXPECT_TRUE(rows[1].starts_with("0,C-RBF,"));
    EXPECT_TRUE(rows[2].starts_with("0,SCFNN,"));
    EXPECT_TRUE(rows[4].starts_with("10,SCFNN,"));
    for (const char* arch : {"C-RBF", "SCFNN"})
        for (const char* stem : {"ebn0_0_seed_0", "ebn0_0_seed_1", "ebn0_10_seed_0", "ebn0_10_seed_1"}) {
            EXPECT_TRUE(fs::exists(dir / "runs" / arch / (std::string(stem) + ".json")));
            EXPECT_TRUE(fs::exists(dir / "runs" / arch / (std::string(stem) + ".frames.csv")));
        }
    fs::remove_all(dir);
}

TEST(Cli, GradcheckPasses) {
    const auto r = cli({"gradcheck", "--draws", "3"});
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("gradcheck PASS"), std::string::npos);
    for (const char* a : {"CVFNN", "SCFNN", "C-RBF", "FC-RBF", "PT-RBF"}) EXPECT_NE(r.out.find(a), std::string::npos);
}

TEST(Cli, GradcheckFailureIsNonZero) {
    // An absurd tolerance cannot be met.
    const auto r = cli({"gradcheck", "--draws", "1", "--tol", "1e-300"});
    EXPECT_EQ(r.code, kExitRuntime);
    EXPECT_NE(r.out.find("gradcheck FAIL"), std::string::npos);
}

TEST(Cli, ComplexityTableHasFiveOrderedRows) {
    const fs::path dir = scratch("cx");
    const auto r = cli({"complexity", "-c", (kConfigs / "paper-full.cfg").string(), "-o", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream csv(slurp(dir / "complexity.csv"));
    std::string line;
    std::vector<std::uint64_t> train;
    std::vector<std::string> names;
    bool header = false;
    while (std::getline(csv, line)) {
        if (line.starts_with("#")) continue;
        if (!header) {
            header = true;
            continue;
        }
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> f;
        while (std::getline(ss, field, ',')) f.push_back(field);
        ASSERT_EQ(f.size(), 6u);
        names.push_back(f[0]);
        train.push_back(std::stoull(f[4]));
    }
    ASSERT_EQ(train.size(), 5u);
    EXPECT_TRUE(std::is_sorted(train.begin(), train.end()));
    EXPECT_EQ(names.front(), "C-RBF");
    EXPECT_EQ(names.back(), "FC-RBF");
    fs::remove_all(dir);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(cli({}).code, kExitValidation);
    EXPECT_EQ(cli({"frobnicate"}).code, kExitValidation);
    EXPECT_EQ(cli({"run", "-c", "/nonexistent.cfg"}).code, kExitValidation);
    EXPECT_EQ(cli({"validate-config", "-c", (kConfigs / "desk.cfg").string(), "-s", "bogus=1"}).code, kExitValidation);
    EXPECT_EQ(cli({"validate-config", "-c", (kConfigs / "desk.cfg").string(), "-s", "ntx=3"}).code, kExitValidation);
    EXPECT_EQ(cli({"validate-config", "-c", (kConfigs / "desk.cfg").string()}).code, kExitOk);
    EXPECT_EQ(cli({"--help"}).code, kExitOk);
}

TEST(Cli, ValidateConfigPrintsEveryKey) {
    const auto r = cli({"validate-config", "-c", (kConfigs / "desk.cfg").string()});
    ASSERT_EQ(r.code, 0);
    for (const auto& k : config_keys()) EXPECT_NE(r.out.find(k.name + " = "), std::string::npos) << k.name;
}
