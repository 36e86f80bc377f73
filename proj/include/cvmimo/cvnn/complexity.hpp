#pragma once

#include <cstdint>

#include "cvmimo/cvnn/network.hpp"

namespace cvmimo::cvnn {

struct Complexity {
    std::uint64_t train_real_mults = 0;
    std::uint64_t infer_real_mults = 0;
};

// Real multiplications per iteration (one example), counted from the
// forward/backward formulas implemented in Network:
//   complex*complex = 4, complex*real = 2, real*real = 1, |z|^2 = 2,
//   a real division counts as one multiplication, a complex reciprocal as 5;
//   exp/tanh/atanh/sech/cosh evaluations and additions are not counted.
// Training counts the inference pass, the cost, the backward pass and the
// momentum update with learning rates folded into per-neuron coefficients.
// docs/complexity.md carries the term-by-term derivation.
Complexity complexity(const NetworkConfig& config);

}  // namespace cvmimo::cvnn
