#include "cvmimo/cvnn/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace cvmimo::cvnn {

namespace {

const char* group_name(ParamGroup g) {
    switch (g) {
        case ParamGroup::Weight: return "weight";
        case ParamGroup::Bias: return "bias";
        case ParamGroup::Center: return "center";
        case ParamGroup::Variance: return "variance";
        case ParamGroup::Scale: return "scale";
    }
    return "?";
}

ParamGroup parse_group(const std::string& s) {
    if (s == "weight") return ParamGroup::Weight;
    if (s == "bias") return ParamGroup::Bias;
    if (s == "center") return ParamGroup::Center;
    if (s == "variance") return ParamGroup::Variance;
    if (s == "scale") return ParamGroup::Scale;
    throw std::runtime_error("checkpoint: unknown parameter group '" + s + "'");
}

std::string hex(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

void write_tensor(std::ostream& out, const char* tag, const ParamMatrix& m) {
    out << tag;
    for (Eigen::Index i = 0; i < m.size(); ++i) out << ' ' << hex(m.data()[i].real()) << ' ' << hex(m.data()[i].imag());
    out << '\n';
}

std::string expect_word(std::istream& in, const std::string& word) {
    std::string tok;
    if (!(in >> tok) || tok != word) throw std::runtime_error("checkpoint: expected '" + word + "', got '" + tok + "'");
    return tok;
}

double read_double(std::istream& in) {
    std::string tok;
    if (!(in >> tok)) throw std::runtime_error("checkpoint: truncated tensor");
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') throw std::runtime_error("checkpoint: bad number '" + tok + "'");
    return v;
}

void read_tensor(std::istream& in, const char* tag, ParamMatrix& m) {
    expect_word(in, tag);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const double re = read_double(in);
        const double im = read_double(in);
        m.data()[i] = {re, im};
    }
}

}  // namespace

void save_checkpoint(std::ostream& out, const Network& net) {
    const auto& cfg = net.config();
    out << "cvmimo-checkpoint " << kCheckpointVersion << '\n';
    out << "architecture " << to_string(cfg.architecture) << '\n';
    out << "dims " << cfg.n_in << ' ' << cfg.hidden << ' ' << cfg.n_out << '\n';
    out << "init " << net.init_record().seed << ' ' << (net.init_record().stream.empty() ? "-" : net.init_record().stream)
        << '\n';
    out << "params " << net.params().size() << '\n';
    for (const auto& p : net.params()) {
        out << "param " << p.name << ' ' << group_name(p.group) << ' ' << (p.real_valued ? 1 : 0) << ' '
            << p.value.rows() << ' ' << p.value.cols() << '\n';
        write_tensor(out, "value", p.value);
        write_tensor(out, "velocity", p.velocity);
    }
    out << "end\n";
}

Network load_checkpoint(std::istream& in) {
    expect_word(in, "cvmimo-checkpoint");
    int version = 0;
    if (!(in >> version) || version != kCheckpointVersion)
        throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));

    std::string arch_name, stream;
    NetworkConfig cfg;
    std::uint64_t seed = 0;
    std::size_t count = 0;
    expect_word(in, "architecture");
    in >> arch_name;
    cfg.architecture = parse_architecture(arch_name);
    expect_word(in, "dims");
    in >> cfg.n_in >> cfg.hidden >> cfg.n_out;
    expect_word(in, "init");
    in >> seed >> stream;
    if (stream == "-") stream.clear();
    expect_word(in, "params");
    in >> count;
    if (!in) throw std::runtime_error("checkpoint: malformed header");

    // Build the skeleton with the right shapes, then overwrite every tensor.
    Hyperparameters hp = Hyperparameters::defaults_for(cfg.architecture);
    hp.mu0 = 0.0;
    hp.sigma_init = 1.0;
    Rng dummy(seed, stream);
    Network net = Network::init(cfg, hp, dummy);
    if (count != net.params().size()) throw std::runtime_error("checkpoint: parameter count mismatch");

    for (auto& p : net.params()) {
        std::string name, group;
        int real = 0;
        Eigen::Index rows = 0, cols = 0;
        expect_word(in, "param");
        in >> name >> group >> real >> rows >> cols;
        if (!in || name != p.name || parse_group(group) != p.group || rows != p.value.rows() || cols != p.value.cols())
            throw std::runtime_error("checkpoint: tensor '" + name + "' does not match the architecture");
        read_tensor(in, "value", p.value);
        read_tensor(in, "velocity", p.velocity);
    }
    expect_word(in, "end");
    return net;
}

void save_checkpoint(const std::filesystem::path& path, const Network& net) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("checkpoint: cannot write '" + path.string() + "'");
    save_checkpoint(out, net);
}

Network load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("checkpoint: cannot read '" + path.string() + "'");
    return load_checkpoint(in);
}

}  // namespace cvmimo::cvnn
