#include "cvmimo/stc/qostbc.hpp"

#include <string>

#include "cvmimo/errors.hpp"

namespace cvmimo {

namespace {

void encode_into(std::span<const cplx> q, Eigen::Ref<CMatrix> out) {
    const Eigen::Index n = static_cast<Eigen::Index>(q.size());
    if (n == 1) {
        out(0, 0) = q[0];
        return;
    }
    const Eigen::Index m = n / 2;
    encode_into(q.first(m), out.topLeftCorner(m, m));
    encode_into(q.subspan(m), out.topRightCorner(m, m));
    out.bottomLeftCorner(m, m) = -out.topRightCorner(m, m).conjugate();
    out.bottomRightCorner(m, m) = out.topLeftCorner(m, m).conjugate();
}

}  // namespace

QostbcBlock qostbc_encode(std::span<const cplx> q) {
    if (q.size() < 2 || !is_power_of_two(q.size()))
        throw SizingError("qostbc_encode: symbol count " + std::to_string(q.size()) + " is not a power of two >= 2");
    const auto n = static_cast<Eigen::Index>(q.size());
    QostbcBlock block;
    block.q = Eigen::Map<const CVector>(q.data(), n);
    block.S.resize(n, n);
    encode_into(q, block.S);
    return block;
}

QostbcBlock qostbc_encode(const CVector& q) {
    return qostbc_encode(std::span<const cplx>(q.data(), static_cast<std::size_t>(q.size())));
}

double quasi_orthogonality_defect(const CMatrix& S) {
    const CMatrix gram = S.adjoint() * S;
    const double diag = gram.diagonal().norm();
    if (diag == 0.0) return 0.0;
    CMatrix off = gram;
    off.diagonal().setZero();
    return off.norm() / diag;
}

}  // namespace cvmimo
