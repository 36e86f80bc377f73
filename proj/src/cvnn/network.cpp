#include "cvmimo/cvnn/network.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "cvmimo/errors.hpp"

namespace cvmimo::cvnn {

namespace {

// Tensor slots. The readout weight sits at index 2 for every architecture.
constexpr std::size_t kHiddenW = 0, kHiddenB = 1;          // CVFNN, SCFNN
constexpr std::size_t kCenter = 0, kVariance = 1;          // C-RBF, PT-RBF
constexpr std::size_t kScale = 1;                          // FC-RBF
constexpr std::size_t kOutW = 2, kOutB = 3;

constexpr double kAtanhGuard = 1e-9;

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

Parameter make_param(std::string name, ParamGroup group, Eigen::Index rows, Eigen::Index cols, bool real = false) {
    Parameter p;
    p.name = std::move(name);
    p.group = group;
    p.real_valued = real;
    p.value = ParamMatrix::Zero(rows, cols);
    p.velocity = ParamMatrix::Zero(rows, cols);
    return p;
}

void fill_gaussian(ParamMatrix& m, double stddev, Rng& rng) {
    // Each real component ~ N(0, stddev^2).
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = sample_cgauss(rng, 2.0 * stddev * stddev);
}

cplx guarded_atanh_arg(cplx z) {
    if (std::abs(z - 1.0) < kAtanhGuard || std::abs(z + 1.0) < kAtanhGuard) z += kAtanhGuard;
    return z;
}

// Per-neuron quantities of the backward pass. The big layer tensors are
// rank-1-per-row in the gradient, so they are kept factored here.
struct Backward {
    CVector e;         // d - y
    double cost = 0.0;
    CVector out_grad;  // W^H e
    CVector gz;        // FNN: dE/dz; FC-RBF: dE/du   (real-coordinate encoding)
    RVector c_re;      // C-RBF center coefficient; PT-RBF real-part coefficient
    RVector c_im;      // PT-RBF imaginary-part coefficient
    CVector g_var;     // C-RBF / PT-RBF variance gradient
};

}  // namespace

std::string_view to_string(Architecture arch) {
    switch (arch) {
        case Architecture::CVFNN: return "CVFNN";
        case Architecture::SCFNN: return "SCFNN";
        case Architecture::CRBF: return "C-RBF";
        case Architecture::FCRBF: return "FC-RBF";
        case Architecture::PTRBF: return "PT-RBF";
    }
    return "?";
}

Architecture parse_architecture(std::string_view name) {
    std::string key;
    for (char c : name)
        if (c != '-' && c != '_') key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (key == "cvfnn") return Architecture::CVFNN;
    if (key == "scfnn") return Architecture::SCFNN;
    if (key == "crbf") return Architecture::CRBF;
    if (key == "fcrbf") return Architecture::FCRBF;
    if (key == "ptrbf") return Architecture::PTRBF;
    throw std::invalid_argument("unknown architecture '" + std::string(name) + "'");
}

bool is_rbf(Architecture arch) { return arch == Architecture::CRBF || arch == Architecture::FCRBF || arch == Architecture::PTRBF; }

void NetworkConfig::validate() const {
    if (n_in == 0 || hidden == 0 || n_out == 0) throw SizingError("network: widths must be >= 1");
}

std::size_t default_hidden(Architecture arch) { return is_rbf(arch) ? 100 : 68; }

Hyperparameters Hyperparameters::defaults_for(Architecture arch) {
    Hyperparameters hp;
    hp.mu0 = 0.01;
    hp.lambda = 20;
    switch (arch) {
        case Architecture::CVFNN:
        case Architecture::SCFNN:
            hp.eta_w = 0.0125;
            hp.eta_b = 0.0125;
            hp.alpha = 0.00125;
            break;
        case Architecture::CRBF:
            hp.eta_w = 0.01;
            hp.eta_b = 0.02;
            hp.eta_gamma = 0.02;
            hp.eta_sigma = 0.01;
            hp.alpha = 0.001;
            break;
        case Architecture::FCRBF:
            hp.eta_w = 0.0125;
            hp.eta_gamma = 0.0125;
            hp.eta_upsilon = 0.0125;
            hp.alpha = 0.00125;
            break;
        case Architecture::PTRBF:
            hp.eta_w = 0.002;
            hp.eta_b = 0.02;
            hp.eta_gamma = 0.02;
            hp.eta_sigma = 0.01;
            hp.alpha = 0.0002;
            break;
    }
    return hp;
}

void Hyperparameters::validate(Architecture arch) const {
    auto check = [](double v, const char* name) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be finite and >= 0");
    };
    check(eta_w, "eta_w");
    check(eta_b, "eta_b");
    check(eta_gamma, "eta_gamma");
    check(eta_sigma, "eta_sigma");
    check(eta_upsilon, "eta_upsilon");
    check(alpha, "alpha");
    check(mu0, "mu0");
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
    if (lambda < 1) throw std::invalid_argument("lambda must be >= 1");
    if (sigma_init && !(*sigma_init >= epsilon)) throw std::invalid_argument("sigma_init must be >= epsilon");

    const bool has_bias = arch != Architecture::FCRBF;
    const bool has_center = is_rbf(arch);
    const bool has_variance = arch == Architecture::CRBF || arch == Architecture::PTRBF;
    const bool has_scale = arch == Architecture::FCRBF;
    auto absent = [&](bool applicable, double v, const char* name) {
        if (!applicable && v != 0.0)
            throw std::invalid_argument(std::string(name) + " does not apply to " + std::string(to_string(arch)));
    };
    absent(has_bias, eta_b, "eta_b");
    absent(has_center, eta_gamma, "eta_gamma");
    absent(has_variance, eta_sigma, "eta_sigma");
    absent(has_scale, eta_upsilon, "eta_upsilon");
}

double initial_variance(Architecture arch, std::size_t n_in, const Hyperparameters& hp, double input_power) {
    if (hp.sigma_init) return *hp.sigma_init;
    const double n = static_cast<double>(n_in) * input_power;
    return arch == Architecture::CRBF ? std::sqrt(n) : n / 2.0;
}

Network Network::init(const NetworkConfig& config, const Hyperparameters& hp, Rng& rng) {
    config.validate();
    hp.validate(config.architecture);

    Network net;
    net.config_ = config;
    net.init_ = {rng.seed(), rng.label()};
    const auto n = static_cast<Eigen::Index>(config.n_in);
    const auto h = static_cast<Eigen::Index>(config.hidden);
    const auto o = static_cast<Eigen::Index>(config.n_out);
    auto& ps = net.params_;

    switch (config.architecture) {
        case Architecture::CVFNN:
        case Architecture::SCFNN:
            ps.push_back(make_param("W1", ParamGroup::Weight, h, n));
            ps.push_back(make_param("b1", ParamGroup::Bias, h, 1));
            break;
        case Architecture::CRBF:
            ps.push_back(make_param("gamma", ParamGroup::Center, h, n));
            ps.push_back(make_param("sigma", ParamGroup::Variance, h, 1, true));
            break;
        case Architecture::FCRBF:
            ps.push_back(make_param("gamma", ParamGroup::Center, h, n));
            ps.push_back(make_param("upsilon", ParamGroup::Scale, h, n));
            break;
        case Architecture::PTRBF:
            ps.push_back(make_param("gamma", ParamGroup::Center, h, n));
            ps.push_back(make_param("sigma", ParamGroup::Variance, h, 1));
            break;
    }
    ps.push_back(make_param("W", ParamGroup::Weight, o, h));
    if (config.architecture != Architecture::FCRBF) ps.push_back(make_param("b", ParamGroup::Bias, o, 1));
    if (!is_rbf(config.architecture)) {
        ps[kOutW].name = "W2";
        ps[kOutB].name = "b2";
    }

    for (auto& p : ps) {
        if (p.group == ParamGroup::Variance) {
            const double v = initial_variance(config.architecture, config.n_in, hp);
            p.value.setConstant(p.real_valued ? cplx{v, 0.0} : cplx{v, v});
        } else {
            fill_gaussian(p.value, hp.mu0, rng);
        }
    }
    return net;
}

const Parameter& Network::param(std::string_view name) const {
    for (const auto& p : params_)
        if (p.name == name) return p;
    throw std::out_of_range("network has no parameter '" + std::string(name) + "'");
}

Parameter& Network::param(std::string_view name) {
    return const_cast<Parameter&>(static_cast<const Network&>(*this).param(name));
}

ForwardTrace Network::trace(const CVector& x) const {
    if (static_cast<std::size_t>(x.size()) != config_.n_in)
        throw SizingError("network: input width " + std::to_string(x.size()) + ", expected " +
                          std::to_string(config_.n_in));
    const auto h = static_cast<Eigen::Index>(config_.hidden);
    ForwardTrace tr;
    tr.x = x;
    tr.a.resize(h);

    switch (config_.architecture) {
        case Architecture::CVFNN: {
            tr.z = params_[kHiddenW].value * x + params_[kHiddenB].value.col(0);
            for (Eigen::Index i = 0; i < h; ++i) {
                tr.z(i) = guarded_atanh_arg(tr.z(i));
                tr.a(i) = std::atanh(tr.z(i));
            }
            break;
        }
        case Architecture::SCFNN: {
            tr.z = params_[kHiddenW].value * x + params_[kHiddenB].value.col(0);
            for (Eigen::Index i = 0; i < h; ++i) tr.a(i) = {std::tanh(tr.z(i).real()), std::tanh(tr.z(i).imag())};
            break;
        }
        case Architecture::CRBF: {
            const auto& gamma = params_[kCenter].value;
            const auto& sigma = params_[kVariance].value;
            tr.dist.resize(h);
            for (Eigen::Index i = 0; i < h; ++i) {
                tr.dist(i) = (x - gamma.row(i).transpose()).squaredNorm();
                const double s = sigma(i, 0).real();
                tr.a(i) = std::exp(-tr.dist(i) / (s * s));
            }
            break;
        }
        case Architecture::FCRBF: {
            const auto& gamma = params_[kCenter].value;
            const auto& ups = params_[kScale].value;
            tr.z.resize(h);
            for (Eigen::Index i = 0; i < h; ++i) {
                tr.z(i) = ups.row(i).transpose().cwiseProduct(x - gamma.row(i).transpose()).sum();
                tr.a(i) = 1.0 / std::cosh(tr.z(i));
            }
            break;
        }
        case Architecture::PTRBF: {
            const auto& gamma = params_[kCenter].value;
            const auto& sigma = params_[kVariance].value;
            tr.dist.resize(h);
            tr.dist_im.resize(h);
            for (Eigen::Index i = 0; i < h; ++i) {
                tr.dist(i) = (x.real() - gamma.row(i).real().transpose()).squaredNorm();
                tr.dist_im(i) = (x.imag() - gamma.row(i).imag().transpose()).squaredNorm();
                tr.a(i) = {std::exp(-tr.dist(i) / sigma(i, 0).real()), std::exp(-tr.dist_im(i) / sigma(i, 0).imag())};
            }
            break;
        }
    }

    for (Eigen::Index i = 0; i < h; ++i)
        if (!finite(tr.a(i)))
            throw NumericDomainError(std::string(to_string(config_.architecture)) + ": non-finite hidden activation",
                                     static_cast<std::size_t>(i));

    tr.y = params_[kOutW].value * tr.a;
    if (params_.size() > kOutB) tr.y += params_[kOutB].value.col(0);
    for (Eigen::Index o = 0; o < tr.y.size(); ++o)
        if (!finite(tr.y(o)))
            throw NumericDomainError(std::string(to_string(config_.architecture)) + ": non-finite output",
                                     static_cast<std::size_t>(o));
    return tr;
}

CVector Network::forward(const CVector& x) const { return trace(x).y; }

double Network::cost(const CVector& x, const CVector& d) const {
    if (d.size() != static_cast<Eigen::Index>(config_.n_out)) throw SizingError("network: target width mismatch");
    return (d - forward(x)).squaredNorm();
}

namespace {

Backward backward(const Network& net, const ForwardTrace& tr, const CVector& d) {
    const auto& ps = net.params();
    const auto& cfg = net.config();
    if (d.size() != static_cast<Eigen::Index>(cfg.n_out)) throw SizingError("network: target width mismatch");
    const auto h = static_cast<Eigen::Index>(cfg.hidden);

    Backward bw;
    bw.e = d - tr.y;
    bw.cost = bw.e.squaredNorm();
    bw.out_grad = ps[kOutW].value.adjoint() * bw.e;
    // Real-coordinate gradient of E with respect to the hidden output a.
    const CVector ga = -2.0 * bw.out_grad;

    switch (cfg.architecture) {
        case Architecture::CVFNN:
            bw.gz.resize(h);
            for (Eigen::Index i = 0; i < h; ++i) {
                const cplx deriv = 1.0 / (1.0 - tr.z(i) * tr.z(i));
                bw.gz(i) = std::conj(deriv) * ga(i);
            }
            break;
        case Architecture::SCFNN:
            bw.gz.resize(h);
            for (Eigen::Index i = 0; i < h; ++i) {
                const double tr_re = tr.a(i).real(), tr_im = tr.a(i).imag();
                bw.gz(i) = {ga(i).real() * (1.0 - tr_re * tr_re), ga(i).imag() * (1.0 - tr_im * tr_im)};
            }
            break;
        case Architecture::CRBF: {
            const auto& sigma = ps[kVariance].value;
            bw.c_re.resize(h);
            bw.g_var.resize(h);
            for (Eigen::Index i = 0; i < h; ++i) {
                const double s = sigma(i, 0).real();
                const double c = ga(i).real() * tr.a(i).real() * 2.0 / (s * s);
                bw.c_re(i) = c;
                bw.g_var(i) = c * tr.dist(i) / s;
            }
            break;
        }
        case Architecture::FCRBF:
            bw.gz.resize(h);
            for (Eigen::Index i = 0; i < h; ++i) {
                const cplx deriv = -tr.a(i) * std::tanh(tr.z(i));
                bw.gz(i) = std::conj(deriv) * ga(i);
            }
            break;
        case Architecture::PTRBF: {
            const auto& sigma = ps[kVariance].value;
            bw.c_re.resize(h);
            bw.c_im.resize(h);
            bw.g_var.resize(h);
            for (Eigen::Index i = 0; i < h; ++i) {
                const double sr = sigma(i, 0).real(), si = sigma(i, 0).imag();
                const double pr = ga(i).real() * tr.a(i).real();
                const double pi = ga(i).imag() * tr.a(i).imag();
                bw.c_re(i) = pr * 2.0 / sr;
                bw.c_im(i) = pi * 2.0 / si;
                bw.g_var(i) = {pr * tr.dist(i) / (sr * sr), pi * tr.dist_im(i) / (si * si)};
            }
            break;
        }
    }

    if (!std::isfinite(bw.cost)) throw NumericDomainError("non-finite cost", 0);
    auto check = [](const auto& v, const char* what) {
        for (Eigen::Index i = 0; i < v.size(); ++i)
            if (!std::isfinite(std::abs(v(i))))
                throw NumericDomainError(std::string("non-finite ") + what, static_cast<std::size_t>(i));
    };
    check(bw.out_grad, "output gradient");
    check(bw.gz, "hidden gradient");
    check(bw.c_re, "kernel gradient");
    check(bw.c_im, "kernel gradient");
    check(bw.g_var, "variance gradient");
    return bw;
}

}  // namespace

double Network::gradient(const CVector& x, const CVector& d, std::vector<ParamMatrix>& grads) const {
    const ForwardTrace tr = trace(x);
    const Backward bw = backward(*this, tr, d);
    const auto h = static_cast<Eigen::Index>(config_.hidden);

    grads.resize(params_.size());
    for (std::size_t p = 0; p < params_.size(); ++p) grads[p].resize(params_[p].value.rows(), params_[p].value.cols());

    grads[kOutW] = -2.0 * bw.e * tr.a.adjoint();
    if (params_.size() > kOutB) grads[kOutB] = -2.0 * bw.e;

    switch (config_.architecture) {
        case Architecture::CVFNN:
        case Architecture::SCFNN:
            grads[kHiddenW] = bw.gz * x.adjoint();
            grads[kHiddenB] = bw.gz;
            break;
        case Architecture::CRBF: {
            const auto& gamma = params_[kCenter].value;
            for (Eigen::Index i = 0; i < h; ++i) grads[kCenter].row(i) = bw.c_re(i) * (x.transpose() - gamma.row(i));
            grads[kVariance] = bw.g_var.real().cast<cplx>();
            break;
        }
        case Architecture::FCRBF: {
            const auto& gamma = params_[kCenter].value;
            const auto& ups = params_[kScale].value;
            for (Eigen::Index i = 0; i < h; ++i) {
                grads[kScale].row(i) = bw.gz(i) * (x.transpose() - gamma.row(i)).conjugate();
                grads[kCenter].row(i) = -bw.gz(i) * ups.row(i).conjugate();
            }
            break;
        }
        case Architecture::PTRBF: {
            const auto& gamma = params_[kCenter].value;
            for (Eigen::Index i = 0; i < h; ++i) {
                const auto diff = (x.transpose() - gamma.row(i)).eval();
                grads[kCenter].row(i).real() = bw.c_re(i) * diff.real();
                grads[kCenter].row(i).imag() = bw.c_im(i) * diff.imag();
            }
            grads[kVariance] = bw.g_var;
            break;
        }
    }
    return bw.cost;
}

double Network::learning_rate(ParamGroup group, const Hyperparameters& hp) const {
    switch (group) {
        case ParamGroup::Weight: return hp.eta_w;
        case ParamGroup::Bias: return hp.eta_b;
        case ParamGroup::Center: return hp.eta_gamma;
        case ParamGroup::Variance: return hp.eta_sigma;
        case ParamGroup::Scale: return hp.eta_upsilon;
    }
    return 0.0;
}

double Network::train_step(const CVector& x, const CVector& d, const Hyperparameters& hp) {
    const ForwardTrace tr = trace(x);
    const Backward bw = backward(*this, tr, d);
    const auto h = static_cast<Eigen::Index>(config_.hidden);
    const double alpha = hp.alpha;

    // Every factor below is (eta / 2) times the real-coordinate gradient, with
    // the sign folded in: v <- alpha v + step.
    auto& out_w = params_[kOutW];
    const double kw = learning_rate(out_w.group, hp);

    switch (config_.architecture) {
        case Architecture::CVFNN:
        case Architecture::SCFNN: {
            auto& w1 = params_[kHiddenW];
            auto& b1 = params_[kHiddenB];
            const double k1 = learning_rate(w1.group, hp) / 2.0;
            const double kb1 = learning_rate(b1.group, hp) / 2.0;
            for (Eigen::Index i = 0; i < h; ++i) {
                w1.velocity.row(i) = alpha * w1.velocity.row(i) - (k1 * bw.gz(i)) * x.adjoint();
                w1.value.row(i) += w1.velocity.row(i);
            }
            b1.velocity.col(0) = alpha * b1.velocity.col(0) - kb1 * bw.gz;
            b1.value += b1.velocity;
            break;
        }
        case Architecture::CRBF:
        case Architecture::PTRBF: {
            auto& gamma = params_[kCenter];
            auto& sigma = params_[kVariance];
            const double kg = learning_rate(gamma.group, hp) / 2.0;
            const double ks = learning_rate(sigma.group, hp) / 2.0;
            const bool split = config_.architecture == Architecture::PTRBF;
            for (Eigen::Index i = 0; i < h; ++i) {
                auto v = gamma.velocity.row(i);
                if (split) {
                    const auto diff = (x.transpose() - gamma.value.row(i)).eval();
                    v.real() = alpha * v.real() - (kg * bw.c_re(i)) * diff.real();
                    v.imag() = alpha * v.imag() - (kg * bw.c_im(i)) * diff.imag();
                } else {
                    v = alpha * v - (kg * bw.c_re(i)) * (x.transpose() - gamma.value.row(i));
                }
                gamma.value.row(i) += v;
            }
            sigma.velocity.col(0) = alpha * sigma.velocity.col(0) - ks * bw.g_var;
            sigma.value += sigma.velocity;
            break;
        }
        case Architecture::FCRBF: {
            auto& gamma = params_[kCenter];
            auto& ups = params_[kScale];
            const double kg = learning_rate(gamma.group, hp) / 2.0;
            const double ku = learning_rate(ups.group, hp) / 2.0;
            for (Eigen::Index i = 0; i < h; ++i) {
                const auto diff_conj = (x.transpose() - gamma.value.row(i)).conjugate().eval();
                ups.velocity.row(i) = alpha * ups.velocity.row(i) - (ku * bw.gz(i)) * diff_conj;
                gamma.velocity.row(i) = alpha * gamma.velocity.row(i) + (kg * bw.gz(i)) * ups.value.row(i).conjugate();
                ups.value.row(i) += ups.velocity.row(i);
                gamma.value.row(i) += gamma.velocity.row(i);
            }
            break;
        }
    }

    // Readout last: out_grad above already used the old weights.
    out_w.velocity = alpha * out_w.velocity + kw * (bw.e * tr.a.adjoint());
    out_w.value += out_w.velocity;
    if (params_.size() > kOutB) {
        auto& out_b = params_[kOutB];
        out_b.velocity.col(0) = alpha * out_b.velocity.col(0) + learning_rate(out_b.group, hp) * bw.e;
        out_b.value += out_b.velocity;
    }

    clamp_variances(hp.epsilon);
    return bw.cost;
}

void Network::clamp_variances(double epsilon) {
    if (config_.architecture != Architecture::CRBF && config_.architecture != Architecture::PTRBF) return;
    auto& sigma = params_[kVariance].value;
    for (Eigen::Index i = 0; i < sigma.rows(); ++i) {
        cplx& s = sigma(i, 0);
        if (config_.architecture == Architecture::CRBF)
            s = {std::max(s.real(), epsilon), 0.0};
        else
            s = {std::max(s.real(), epsilon), std::max(s.imag(), epsilon)};
    }
}

bool operator==(const Network& a, const Network& b) {
    if (a.config_.architecture != b.config_.architecture || a.config_.n_in != b.config_.n_in ||
        a.config_.hidden != b.config_.hidden || a.config_.n_out != b.config_.n_out)
        return false;
    if (a.init_.seed != b.init_.seed || a.init_.stream != b.init_.stream) return false;
    if (a.params_.size() != b.params_.size()) return false;
    for (std::size_t i = 0; i < a.params_.size(); ++i) {
        const auto& p = a.params_[i];
        const auto& q = b.params_[i];
        if (p.name != q.name || p.group != q.group || p.real_valued != q.real_valued) return false;
        if (p.value.rows() != q.value.rows() || p.value.cols() != q.value.cols()) return false;
        if (p.value != q.value || p.velocity != q.velocity) return false;
    }
    return true;
}

}  // namespace cvmimo::cvnn
