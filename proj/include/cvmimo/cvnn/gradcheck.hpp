#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cvmimo/cvnn/network.hpp"

namespace cvmimo::cvnn {

struct ParamCoord {
    std::size_t param = 0;
    Eigen::Index row = 0;
    Eigen::Index col = 0;
};

// Central differences of E = sum |d - y|^2 under +-h perturbation of the real
// and imaginary part of one parameter entry. Only forward() is used.
std::pair<double, double> numeric_gradient(const Network& net, const CVector& x, const CVector& d,
                                           const ParamCoord& coord, double h);

struct GradCheckResult {
    Architecture architecture{};
    std::size_t draws = 0;
    std::size_t coordinates = 0;   // real partials compared
    double max_rel_error = 0.0;
    std::string worst;             // "param[row,col].re" of the worst partial
    double worst_analytic = 0.0;
    double worst_numeric = 0.0;
    std::size_t floored = 0;       // partials below the floor on both sides
};

// Relative error of one partial; the denominator is floored at `floor` so
// that partials that are zero analytically are compared absolutely.
double gradient_relative_error(double analytic, double numeric, double floor);

// At h = 1e-6 the central difference carries up to ~3e-9 of rounding noise
// for outputs of order one, so partials below 1e-3 are held to 1e-3 * tol
// absolutely instead of tol relatively.
inline constexpr double kGradCheckFloor = 1e-3;

// Random (state, x, d) draws at the given widths with parameters spread so
// that every kernel/neuron is active, every partial compared against
// numeric_gradient().
GradCheckResult gradient_check(Architecture arch, std::size_t n_in, std::size_t hidden, std::size_t n_out,
                               std::size_t draws, std::uint64_t seed, double h = 1e-6,
                               double floor = kGradCheckFloor);

}  // namespace cvmimo::cvnn
