#pragma once

#include <span>

#include "cvmimo/types.hpp"

namespace cvmimo {

// One space-time codeword: S has rows = time slots, columns = antennas.
struct QostbcBlock {
    CVector q;
    CMatrix S;
};

// Rate-one recursive quasi-orthogonal code:
//   S_2(q1, q2) = [[q1, q2], [-conj(q2), conj(q1)]]
//   S_2m(q)     = [[A, B], [-conj(B), conj(A)]],  A = S_m(q_1..m), B = S_m(q_m+1..2m)
// so Ns = Ntp = Ntx.
QostbcBlock qostbc_encode(std::span<const cplx> q);
QostbcBlock qostbc_encode(const CVector& q);

// ||offdiag(S^H S)||_F / ||diag(S^H S)||_F; zero for the all-zero matrix.
double quasi_orthogonality_defect(const CMatrix& S);

}  // namespace cvmimo
