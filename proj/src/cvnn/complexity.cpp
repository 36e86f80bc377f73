#include "cvmimo/cvnn/complexity.hpp"

namespace cvmimo::cvnn {

Complexity complexity(const NetworkConfig& config) {
    config.validate();
    const std::uint64_t n = config.n_in;
    const std::uint64_t h = config.hidden;
    const std::uint64_t o = config.n_out;

    Complexity c;
    switch (config.architecture) {
        case Architecture::CVFNN:
            c.infer_real_mults = 4 * h * n + 4 * o * h;
            // readout: 10oh + 8o; hidden: z^2 4h, reciprocal 5h, conj(f')*delta 4h,
            // eta scaling 2h, outer product 4hn, momentum 2hn, bias 4h.
            c.train_real_mults = c.infer_real_mults + 10 * o * h + 8 * o + 19 * h + 6 * h * n;
            break;
        case Architecture::SCFNN:
            c.infer_real_mults = 4 * h * n + 4 * o * h;
            // hidden: squares 2h, split product 2h, eta 2h, outer 4hn, momentum 2hn, bias 4h.
            c.train_real_mults = c.infer_real_mults + 10 * o * h + 8 * o + 10 * h + 6 * h * n;
            break;
        case Architecture::CRBF:
            // distances 2hn, sigma^2 h, division h, real-valued readout 2oh.
            c.infer_real_mults = 2 * h * n + 2 * h + 2 * o * h;
            // readout with real kernels: 6oh + 8o; centers: coefficient 3h,
            // scaling 2hn, momentum 2hn; variances 6h.
            c.train_real_mults = c.infer_real_mults + 6 * o * h + 8 * o + 9 * h + 4 * h * n;
            break;
        case Architecture::FCRBF:
            // kernel argument 4hn, readout 4oh, no bias.
            c.infer_real_mults = 4 * h * n + 4 * o * h;
            // readout without bias: 10oh + 4o; sech' 4h, conj*delta 4h, two eta
            // scalings 4h; scale and center rows 4hn + 2hn each.
            c.train_real_mults = c.infer_real_mults + 10 * o * h + 4 * o + 12 * h + 12 * h * n;
            break;
        case Architecture::PTRBF:
            // split distances 2hn, two divisions 2h, complex readout 4oh.
            c.infer_real_mults = 2 * h * n + 2 * h + 4 * o * h;
            // readout 10oh + 8o; centers: coefficients 6h, split scaling 2hn,
            // momentum 2hn; variances 10h.
            c.train_real_mults = c.infer_real_mults + 10 * o * h + 8 * o + 16 * h + 4 * h * n;
            break;
    }
    return c;
}

}  // namespace cvmimo::cvnn
