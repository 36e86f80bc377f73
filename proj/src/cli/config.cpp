#include "cvmimo/cli/config.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "cvmimo/errors.hpp"
#include "cvmimo/harness/report.hpp"

namespace cvmimo {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

const std::vector<std::string>& sections() {
    static const std::vector<std::string> s{"system", "channel", "network", "training", "run"};
    return s;
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys{
        {"system.ntx", true, "", "transmit antennas = code length = network outputs (power of two)"},
        {"system.nrx", true, "", "receive antennas"},
        {"system.nfft", true, "", "subcarriers per OFDM symbol, all active (power of two)"},
        {"system.ncp", false, "", "cyclic prefix in samples (default nfft/16)"},
        {"system.modulation", true, "", "square QAM order M"},
        {"system.subcarrier_spacing_hz", false, "60000", "subcarrier spacing; Fs = nfft * spacing"},
        {"channel.model", false, "tdl", "tdl (fading profile) or identity (H0 = I, no Doppler)"},
        {"channel.profile", false, "", "profile file, relative to the config file (required for tdl)"},
        {"channel.doppler_hz", false, "", "overrides the profile's doppler_hz"},
        {"channel.oscillators", false, "64", "sinusoids per fading process"},
        {"network.architecture", true, "", "cvfnn | scfnn | crbf | fcrbf | ptrbf"},
        {"network.hidden", false, "", "hidden neurons / kernels (default 68 feedforward, 100 RBF)"},
        {"network.epsilon", false, "0.01", "lower bound on kernel variances"},
        {"network.sigma_init", false, "auto", "initial kernel variance; auto scales with the input energy"},
        {"network.input_gain", false, "1", "receiver gain applied to the network input"},
        {"training.eta_w", false, "", "weight learning rate (default: table row of the architecture)"},
        {"training.eta_b", false, "", "bias learning rate"},
        {"training.eta_gamma", false, "", "center learning rate"},
        {"training.eta_sigma", false, "", "variance learning rate"},
        {"training.eta_upsilon", false, "", "FC-RBF scale learning rate"},
        {"training.alpha", false, "", "momentum coefficient"},
        {"training.mu0", false, "", "init standard deviation per real component"},
        {"training.lambda", false, "20", "smoothing window for reported MSE/BER, frames"},
        {"training.pilot_period", false, "6", "one pilot frame every P frames"},
        {"training.upsample", false, "30", "training passes over each pilot frame"},
        {"training.upsample_mode", false, "sequence", "sequence | example"},
        {"run.ebn0_db", true, "", "Eb/N0 in dB (inf disables noise)"},
        {"run.n_frames", true, "", "frames per run"},
        {"run.warmup_frames", false, "360", "frames excluded from steady-state statistics"},
        {"run.seeds", false, "0", "seed list: '0-9' or '1,5,7'"},
        {"run.noise_seed", false, "", "separate seed for the noise stream"},
        {"run.ebn0_list", false, "0:2:20", "sweep grid: 'start:step:stop' or comma list"},
        {"run.threads", false, "0", "parallel runs (0: hardware concurrency)"},
        {"run.ber_threshold", false, "0.02", "BER threshold for the convergence frame"},
    };
    return keys;
}

namespace {

const ConfigKey* find_key(const std::string& name) {
    for (const auto& k : config_keys())
        if (k.name == name) return &k;
    return nullptr;
}

std::string canonical_key(std::string_view key, int line) {
    const std::string k = lower(trim(key));
    if (k.find('.') != std::string::npos) {
        if (!find_key(k)) throw ConfigError(k, line, "unknown key");
        return k;
    }
    const ConfigKey* match = nullptr;
    for (const auto& c : config_keys()) {
        if (c.name.substr(c.name.find('.') + 1) == k) {
            if (match) throw ConfigError(k, line, "ambiguous key, qualify it with its section");
            match = &c;
        }
    }
    if (!match) throw ConfigError(k, line, "unknown key");
    return match->name;
}

class Resolver {
public:
    explicit Resolver(const RawConfig& raw) : raw_(raw) {
        for (const auto& k : config_keys())
            if (k.mandatory && !has(k.name)) throw ConfigError(k.name, 0, "missing mandatory key");
    }

    bool has(const std::string& key) const { return raw_.entries.count(key) != 0; }

    std::string text(const std::string& key) const {
        if (auto it = raw_.entries.find(key); it != raw_.entries.end()) return it->second.value;
        const ConfigKey* k = find_key(key);
        return k ? k->default_value : std::string{};
    }

    int line(const std::string& key) const {
        auto it = raw_.entries.find(key);
        return it == raw_.entries.end() ? 0 : it->second.line;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        throw ConfigError(key, line(key), msg);
    }

    std::size_t count(const std::string& key) const {
        const std::string v = text(key);
        std::size_t out = 0;
        const auto* end = v.data() + v.size();
        auto [p, ec] = std::from_chars(v.data(), end, out);
        if (v.empty() || ec != std::errc{} || p != end) fail(key, "expected a non-negative integer, got '" + v + "'");
        return out;
    }

    double real(const std::string& key) const {
        const std::string v = lower(text(key));
        if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
        try {
            std::size_t used = 0;
            const double out = std::stod(v, &used);
            if (used != v.size() || !std::isfinite(out)) throw std::invalid_argument("");
            return out;
        } catch (const std::exception&) {
            fail(key, "expected a number, got '" + v + "'");
        }
    }

    double rate(const std::string& key, double fallback) const { return has(key) ? real(key) : fallback; }

    const RawConfig& raw() const { return raw_; }

private:
    const RawConfig& raw_;
};

}  // namespace

RawConfig read_config(std::istream& in, const std::filesystem::path& base_dir) {
    RawConfig raw;
    raw.base_dir = base_dir;
    std::string section;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto c = line.find_first_of("#;"); c != std::string::npos) line.erase(c);
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw ConfigError("", lineno, "unterminated section header '" + t + "'");
            section = lower(trim(std::string_view(t).substr(1, t.size() - 2)));
            bool known = false;
            for (const auto& s : sections()) known = known || s == section;
            if (!known) throw ConfigError(section, lineno, "unknown section");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError("", lineno, "expected 'key = value', got '" + t + "'");
        if (section.empty()) throw ConfigError(trim(t.substr(0, eq)), lineno, "key outside of any section");
        const std::string key = section + "." + lower(trim(t.substr(0, eq)));
        if (!find_key(key)) throw ConfigError(key, lineno, "unknown key");
        if (raw.entries.count(key)) throw ConfigError(key, lineno, "duplicate key");
        raw.entries[key] = {trim(t.substr(eq + 1)), lineno};
    }
    return raw;
}

void apply_override(RawConfig& raw, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) throw ConfigError(std::string(assignment), 0, "override must be key=value");
    const std::string key = canonical_key(assignment.substr(0, eq), 0);
    raw.entries[key] = {trim(assignment.substr(eq + 1)), 0};
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
    std::vector<std::uint64_t> out;
    std::stringstream ss{std::string(text)};
    std::string item;
    auto number = [](const std::string& s) {
        std::uint64_t v = 0;
        const std::string t = trim(s);
        auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (t.empty() || ec != std::errc{} || p != t.data() + t.size())
            throw std::invalid_argument("bad seed '" + s + "'");
        return v;
    };
    while (std::getline(ss, item, ',')) {
        if (auto dash = item.find('-'); dash != std::string::npos) {
            const auto lo = number(item.substr(0, dash));
            const auto hi = number(item.substr(dash + 1));
            if (hi < lo) throw std::invalid_argument("bad seed range '" + item + "'");
            for (auto s = lo; s <= hi; ++s) out.push_back(s);
        } else {
            out.push_back(number(item));
        }
    }
    if (out.empty()) throw std::invalid_argument("empty seed list");
    return out;
}

std::vector<double> parse_real_list(std::string_view text) {
    const std::string t = trim(text);
    std::vector<double> out;
    if (std::count(t.begin(), t.end(), ':') == 2) {
        const auto a = t.find(':'), b = t.find(':', a + 1);
        const double start = std::stod(t.substr(0, a));
        const double step = std::stod(t.substr(a + 1, b - a - 1));
        const double stop = std::stod(t.substr(b + 1));
        if (!(step > 0.0) || stop < start) throw std::invalid_argument("bad range '" + t + "'");
        const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        for (std::size_t i = 0; i < n; ++i) out.push_back(start + static_cast<double>(i) * step);
        return out;
    }
    std::stringstream ss{t};
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        const std::string v = trim(item);
        out.push_back(std::stod(v, &used));
        if (used != v.size()) throw std::invalid_argument("bad number '" + v + "'");
    }
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

ExperimentConfig resolve_config(const RawConfig& raw) {
    const Resolver r(raw);
    ExperimentConfig c;

    c.dims.ntx = r.count("system.ntx");
    c.dims.nrx = r.count("system.nrx");
    c.dims.nfft = r.count("system.nfft");
    c.dims.ncp = r.has("system.ncp") ? r.count("system.ncp") : c.dims.nfft / 16;
    c.dims.modulation = static_cast<unsigned>(r.count("system.modulation"));
    c.dims.subcarrier_spacing_hz = r.real("system.subcarrier_spacing_hz");
    if (c.dims.ntx < 2 || !is_power_of_two(c.dims.ntx)) r.fail("system.ntx", "must be a power of two >= 2");
    if (c.dims.nrx < 1) r.fail("system.nrx", "must be >= 1");
    if (c.dims.nfft < 2 || !is_power_of_two(c.dims.nfft)) r.fail("system.nfft", "must be a power of two >= 2");
    if (c.dims.ncp >= c.dims.nfft) r.fail("system.ncp", "must be smaller than nfft");
    {
        const unsigned m = c.dims.modulation;
        const bool ok = m >= 4 && is_power_of_two(m) && (std::countr_zero(m) % 2 == 0);
        if (!ok) r.fail("system.modulation", "must be a square power of four (4, 16, 64, ...)");
    }
    if (!(c.dims.subcarrier_spacing_hz > 0.0)) r.fail("system.subcarrier_spacing_hz", "must be positive");

    const std::string model = lower(r.text("channel.model"));
    if (model == "identity") {
        if (c.dims.nrx != c.dims.ntx) r.fail("channel.model", "identity channel needs nrx == ntx");
        c.fixed_taps = std::vector<CMatrix>{
            CMatrix::Identity(static_cast<Eigen::Index>(c.dims.nrx), static_cast<Eigen::Index>(c.dims.ntx))};
    } else if (model == "tdl") {
        if (!r.has("channel.profile")) r.fail("channel.profile", "missing mandatory key");
        c.profile_path = r.text("channel.profile");
        std::filesystem::path p = c.profile_path;
        if (p.is_relative()) p = raw.base_dir / p;
        try {
            c.profile = load_profile(p);
        } catch (const ConfigError& e) {
            if (e.line() == 0) r.fail("channel.profile", e.what());
            throw;
        }
        if (r.has("channel.doppler_hz")) {
            c.profile.doppler_hz = r.real("channel.doppler_hz");
            if (c.profile.doppler_hz < 0.0) r.fail("channel.doppler_hz", "must be >= 0");
        }
    } else {
        r.fail("channel.model", "expected 'tdl' or 'identity'");
    }
    c.oscillators = r.count("channel.oscillators");
    if (c.oscillators == 0) r.fail("channel.oscillators", "must be >= 1");

    try {
        c.architecture = cvnn::parse_architecture(r.text("network.architecture"));
    } catch (const std::invalid_argument& e) {
        r.fail("network.architecture", e.what());
    }
    c.hidden = r.has("network.hidden") ? r.count("network.hidden") : cvnn::default_hidden(c.architecture);
    if (c.hidden == 0) r.fail("network.hidden", "must be >= 1");

    const cvnn::Hyperparameters table = cvnn::Hyperparameters::defaults_for(c.architecture);
    cvnn::Hyperparameters& hp = c.hp;
    hp.eta_w = r.rate("training.eta_w", table.eta_w);
    hp.eta_b = r.rate("training.eta_b", table.eta_b);
    hp.eta_gamma = r.rate("training.eta_gamma", table.eta_gamma);
    hp.eta_sigma = r.rate("training.eta_sigma", table.eta_sigma);
    hp.eta_upsilon = r.rate("training.eta_upsilon", table.eta_upsilon);
    hp.alpha = r.rate("training.alpha", table.alpha);
    hp.mu0 = r.rate("training.mu0", table.mu0);
    hp.lambda = static_cast<int>(r.count("training.lambda"));
    hp.epsilon = r.real("network.epsilon");
    if (const std::string s = lower(r.text("network.sigma_init")); s != "auto") hp.sigma_init = r.real("network.sigma_init");
    c.input_gain = r.real("network.input_gain");
    if (!(c.input_gain > 0.0) || !std::isfinite(c.input_gain)) r.fail("network.input_gain", "must be positive and finite");
    for (const char* key : {"training.eta_w", "training.eta_b", "training.eta_gamma", "training.eta_sigma",
                            "training.eta_upsilon", "training.alpha", "training.mu0"})
        if (r.has(key) && r.real(key) < 0.0) r.fail(key, "must be >= 0");
    try {
        hp.validate(c.architecture);
    } catch (const std::invalid_argument& e) {
        const std::string what = e.what();
        const std::string key = what.substr(0, what.find(' '));
        const std::string full = find_key("training." + key) ? "training." + key : "network." + key;
        r.fail(full, what);
    }

    c.pilot_period = r.count("training.pilot_period");
    if (c.pilot_period == 0) r.fail("training.pilot_period", "must be >= 1");
    c.upsample = r.count("training.upsample");
    if (c.upsample == 0) r.fail("training.upsample", "must be >= 1");
    const std::string mode = lower(r.text("training.upsample_mode"));
    if (mode == "sequence")
        c.upsample_mode = UpsampleMode::Sequence;
    else if (mode == "example")
        c.upsample_mode = UpsampleMode::Example;
    else
        r.fail("training.upsample_mode", "expected 'sequence' or 'example'");

    c.ebn0_db = r.real("run.ebn0_db");
    c.n_frames = r.count("run.n_frames");
    if (c.n_frames == 0) r.fail("run.n_frames", "must be >= 1");
    c.warmup_frames = r.count("run.warmup_frames");
    c.threads = r.count("run.threads");
    c.ber_threshold = r.real("run.ber_threshold");
    if (!(c.ber_threshold > 0.0 && c.ber_threshold < 1.0)) r.fail("run.ber_threshold", "must lie in (0, 1)");
    try {
        c.seeds = parse_seed_list(r.text("run.seeds"));
    } catch (const std::exception& e) {
        r.fail("run.seeds", e.what());
    }
    if (r.has("run.noise_seed")) {
        try {
            c.noise_seed = parse_seed_list(r.text("run.noise_seed")).at(0);
        } catch (const std::exception& e) {
            r.fail("run.noise_seed", e.what());
        }
    }
    try {
        c.ebn0_list = parse_real_list(r.text("run.ebn0_list"));
    } catch (const std::exception& e) {
        r.fail("run.ebn0_list", std::string("bad list: ") + e.what());
    }

    c.validate();
    return c;
}

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
    std::istringstream in{std::string(text)};
    return resolve_config(read_config(in, base_dir));
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", 0, "cannot open config '" + path.string() + "'");
    RawConfig raw = read_config(in, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
    for (const auto& o : overrides) apply_override(raw, o);
    return resolve_config(raw);
}

std::vector<std::pair<std::string, std::string>> resolved_entries(const ExperimentConfig& c) {
    auto join_seeds = [](const std::vector<std::uint64_t>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
        return s;
    };
    auto join_reals = [](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_real(v[i]);
        return s;
    };
    const auto& hp = c.hp;
    const auto net = c.network();
    return {
        {"system.ntx", std::to_string(c.dims.ntx)},
        {"system.nrx", std::to_string(c.dims.nrx)},
        {"system.nfft", std::to_string(c.dims.nfft)},
        {"system.ncp", std::to_string(c.dims.ncp)},
        {"system.modulation", std::to_string(c.dims.modulation)},
        {"system.subcarrier_spacing_hz", format_real(c.dims.subcarrier_spacing_hz)},
        {"channel.model", c.fixed_taps ? "identity" : "tdl"},
        {"channel.profile", c.profile_path},
        {"channel.doppler_hz", format_real(c.profile.doppler_hz)},
        {"channel.oscillators", std::to_string(c.oscillators)},
        {"network.architecture", std::string(cvnn::to_string(c.architecture))},
        {"network.hidden", std::to_string(net.hidden)},
        {"network.epsilon", format_real(hp.epsilon)},
        {"network.sigma_init", hp.sigma_init ? format_real(*hp.sigma_init) : "auto"},
        {"network.input_gain", format_real(c.input_gain)},
        {"training.eta_w", format_real(hp.eta_w)},
        {"training.eta_b", format_real(hp.eta_b)},
        {"training.eta_gamma", format_real(hp.eta_gamma)},
        {"training.eta_sigma", format_real(hp.eta_sigma)},
        {"training.eta_upsilon", format_real(hp.eta_upsilon)},
        {"training.alpha", format_real(hp.alpha)},
        {"training.mu0", format_real(hp.mu0)},
        {"training.lambda", std::to_string(hp.lambda)},
        {"training.pilot_period", std::to_string(c.pilot_period)},
        {"training.upsample", std::to_string(c.upsample)},
        {"training.upsample_mode", c.upsample_mode == UpsampleMode::Sequence ? "sequence" : "example"},
        {"run.ebn0_db", format_real(c.ebn0_db)},
        {"run.n_frames", std::to_string(c.n_frames)},
        {"run.warmup_frames", std::to_string(c.warmup_frames)},
        {"run.seeds", join_seeds(c.seeds)},
        {"run.noise_seed", c.noise_seed ? std::to_string(*c.noise_seed) : ""},
        {"run.ebn0_list", join_reals(c.ebn0_list)},
        {"run.threads", std::to_string(c.threads)},
        {"run.ber_threshold", format_real(c.ber_threshold)},
    };
}

}  // namespace cvmimo
