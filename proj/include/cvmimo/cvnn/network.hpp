#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cvmimo/numerics/rng.hpp"
#include "cvmimo/types.hpp"

namespace cvmimo::cvnn {

enum class Architecture { CVFNN, SCFNN, CRBF, FCRBF, PTRBF };

inline constexpr Architecture kAllArchitectures[] = {Architecture::CVFNN, Architecture::SCFNN, Architecture::CRBF,
                                                     Architecture::FCRBF, Architecture::PTRBF};

std::string_view to_string(Architecture arch);
// Accepts "cvfnn", "C-RBF", "ptrbf", ... (case and '-' insensitive).
Architecture parse_architecture(std::string_view name);
bool is_rbf(Architecture arch);

struct NetworkConfig {
    Architecture architecture = Architecture::CRBF;
    std::size_t n_in = 0;
    std::size_t hidden = 0;  // hidden neurons (feedforward) or kernels (RBF)
    std::size_t n_out = 0;

    void validate() const;
};

struct Hyperparameters {
    double eta_w = 0.0;
    double eta_b = 0.0;
    double eta_gamma = 0.0;
    double eta_sigma = 0.0;
    double eta_upsilon = 0.0;
    double alpha = 0.0;  // momentum
    double mu0 = 0.0;    // init standard deviation per real component
    int lambda = 20;     // reporting smoothing window, frames
    double epsilon = 0.01;
    // Initial kernel variance (C-RBF sigma, PT-RBF Re/Im sigma). Unset: scaled
    // to the input width, see initial_variance().
    std::optional<double> sigma_init;

    // Rates of the published hyperparameter table for one architecture.
    static Hyperparameters defaults_for(Architecture arch);
    void validate(Architecture arch) const;
};

// Hidden width used by the published configurations (68 / 100).
std::size_t default_hidden(Architecture arch);

// Scaled to the expected input energy E = n_in * input_power. C-RBF: sigma^2 = E
// so exp(-||x - c||^2 / sigma^2) starts near 1/e; PT-RBF: each split variance = E / 2.
double initial_variance(Architecture arch, std::size_t n_in, const Hyperparameters& hp, double input_power = 1.0);

enum class ParamGroup { Weight, Bias, Center, Variance, Scale };

// Row i of a layer tensor holds everything attached to neuron/kernel i.
using ParamMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Parameter {
    std::string name;
    ParamGroup group;
    bool real_valued = false;  // imaginary part held at zero
    ParamMatrix value;
    ParamMatrix velocity;      // previous update, for momentum
};

struct InitRecord {
    std::uint64_t seed = 0;
    std::string stream;
};

// Forward intermediates reused by the backward pass.
struct ForwardTrace {
    CVector x;
    CVector z;        // CVFNN/SCFNN pre-activation, FC-RBF kernel argument
    CVector a;        // hidden activations / kernel outputs
    RVector dist;     // C-RBF ||x - c||^2, PT-RBF real-part distance
    RVector dist_im;  // PT-RBF imaginary-part distance
    CVector y;
};

class Network {
public:
    static Network init(const NetworkConfig& config, const Hyperparameters& hp, Rng& rng);

    const NetworkConfig& config() const noexcept { return config_; }
    Architecture architecture() const noexcept { return config_.architecture; }
    const InitRecord& init_record() const noexcept { return init_; }

    std::vector<Parameter>& params() noexcept { return params_; }
    const std::vector<Parameter>& params() const noexcept { return params_; }
    const Parameter& param(std::string_view name) const;
    Parameter& param(std::string_view name);

    CVector forward(const CVector& x) const;
    ForwardTrace trace(const CVector& x) const;

    // Instantaneous cost E = sum_o |d_o - y_o|^2.
    double cost(const CVector& x, const CVector& d) const;

    // Real-coordinate gradient of E for every parameter tensor, encoded as
    // dE/dRe + j dE/dIm (twice the conjugate Wirtinger derivative). Returns E.
    double gradient(const CVector& x, const CVector& d, std::vector<ParamMatrix>& grads) const;

    // One online update: v <- alpha v - (eta/2) grad, theta <- theta + v, then
    // the variance bounds are enforced. Returns E before the update. Throws
    // NumericDomainError and leaves the state untouched on non-finite values.
    double train_step(const CVector& x, const CVector& d, const Hyperparameters& hp);

    friend bool operator==(const Network& a, const Network& b);

private:
    double learning_rate(ParamGroup group, const Hyperparameters& hp) const;
    void clamp_variances(double epsilon);

    NetworkConfig config_{};
    InitRecord init_{};
    std::vector<Parameter> params_;
};

}  // namespace cvmimo::cvnn
