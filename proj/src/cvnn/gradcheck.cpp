#include "cvmimo/cvnn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cvmimo/errors.hpp"

namespace cvmimo::cvnn {

std::pair<double, double> numeric_gradient(const Network& net, const CVector& x, const CVector& d,
                                           const ParamCoord& coord, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("numeric_gradient: h must be positive");
    if (coord.param >= net.params().size()) throw std::out_of_range("numeric_gradient: parameter index out of range");
    const auto& value = net.params()[coord.param].value;
    if (coord.row < 0 || coord.row >= value.rows() || coord.col < 0 || coord.col >= value.cols())
        throw std::out_of_range("numeric_gradient: entry out of range");

    Network probe = net;
    cplx& entry = probe.params()[coord.param].value(coord.row, coord.col);
    const cplx base = entry;
    if (d.size() != static_cast<Eigen::Index>(net.config().n_out))
        throw SizingError("numeric_gradient: target width mismatch");
    // |d - y+|^2 - |d - y-|^2 = Re((y- - y+) conj(2d - y+ - y-)); differencing the
    // outputs rather than the two costs keeps the cancellation error at the
    // scale of y instead of E.
    auto diff = [&](cplx step) {
        entry = base + step;
        const CVector up = probe.forward(x);
        entry = base - step;
        const CVector down = probe.forward(x);
        entry = base;
        double delta = 0.0;
        for (Eigen::Index k = 0; k < d.size(); ++k)
            delta += (std::conj(down(k) - up(k)) * (2.0 * d(k) - up(k) - down(k))).real();
        return delta / (2.0 * h);
    };
    return {diff({h, 0.0}), diff({0.0, h})};
}

double gradient_relative_error(double analytic, double numeric, double floor) {
    const double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
    return std::abs(analytic - numeric) / scale;
}

namespace {

// Spreads the parameters so the check exercises the non-linear regime.
void randomise(Network& net, Rng& rng) {
    const auto arch = net.architecture();
    const double n = static_cast<double>(net.config().n_in);
    for (auto& p : net.params()) {
        for (Eigen::Index i = 0; i < p.value.size(); ++i) {
            cplx& v = p.value.data()[i];
            switch (p.group) {
                case ParamGroup::Variance: {
                    const double u1 = 0.6 + 0.8 * rng.uniform_open();
                    const double u2 = 0.6 + 0.8 * rng.uniform_open();
                    v = arch == Architecture::CRBF ? cplx{u1 * std::sqrt(2.0 * n), 0.0} : cplx{u1 * n, u2 * n};
                    break;
                }
                case ParamGroup::Scale: v = sample_cgauss(rng, 0.2 / n); break;
                case ParamGroup::Center: v = sample_cgauss(rng, 1.0); break;
                default: v = sample_cgauss(rng, 0.25 / n); break;
            }
        }
    }
    // Readout weights of order one so every hidden unit carries gradient.
    auto& readout = net.params()[2].value;
    for (Eigen::Index i = 0; i < readout.size(); ++i) readout.data()[i] = sample_cgauss(rng, 1.0);
}

}  // namespace

GradCheckResult gradient_check(Architecture arch, std::size_t n_in, std::size_t hidden, std::size_t n_out,
                               std::size_t draws, std::uint64_t seed, double h,
                               double floor) {
    GradCheckResult res;
    res.architecture = arch;
    res.draws = draws;

    Rng rng(seed, std::string("gradcheck/") + std::string(to_string(arch)));
    const NetworkConfig cfg{arch, n_in, hidden, n_out};
    Hyperparameters hp = Hyperparameters::defaults_for(arch);

    std::vector<ParamMatrix> grads;
    for (std::size_t draw = 0; draw < draws; ++draw) {
        Network net = Network::init(cfg, hp, rng);
        randomise(net, rng);
        const auto xs = sample_cgauss(rng, n_in, 1.0);
        const auto ds = sample_cgauss(rng, n_out, 1.0);
        const CVector x = Eigen::Map<const CVector>(xs.data(), static_cast<Eigen::Index>(n_in));
        const CVector d = Eigen::Map<const CVector>(ds.data(), static_cast<Eigen::Index>(n_out));

        net.gradient(x, d, grads);
        for (std::size_t p = 0; p < net.params().size(); ++p) {
            const auto& value = net.params()[p].value;
            for (Eigen::Index r = 0; r < value.rows(); ++r) {
                for (Eigen::Index c = 0; c < value.cols(); ++c) {
                    const auto [num_re, num_im] = numeric_gradient(net, x, d, {p, r, c}, h);
                    const cplx g = grads[p](r, c);
                    const double err_re = gradient_relative_error(g.real(), num_re, floor);
                    const double err_im = gradient_relative_error(g.imag(), num_im, floor);
                    res.coordinates += 2;
                    res.floored += std::max(std::abs(g.real()), std::abs(num_re)) < floor;
                    res.floored += std::max(std::abs(g.imag()), std::abs(num_im)) < floor;
                    const std::string where =
                        net.params()[p].name + "[" + std::to_string(r) + "," + std::to_string(c) + "]";
                    if (err_re > res.max_rel_error) {
                        res.max_rel_error = err_re;
                        res.worst = where + ".re";
                        res.worst_analytic = g.real();
                        res.worst_numeric = num_re;
                    }
                    if (err_im > res.max_rel_error) {
                        res.max_rel_error = err_im;
                        res.worst = where + ".im";
                        res.worst_analytic = g.imag();
                        res.worst_numeric = num_im;
                    }
                }
            }
        }
    }
    return res;
}

}  // namespace cvmimo::cvnn
