#pragma once

// Symbolic expansion of the recursive code, used as an independent oracle for
// the structure of S^H S.

#include <algorithm>
#include <map>
#include <tuple>
#include <vector>

#include "cvmimo/types.hpp"

namespace cvmimo::oracle {

// One code-matrix entry as a signed, possibly conjugated symbol.
struct Sym {
    int sign = 1;
    int index = 0;
    bool conj = false;
};
using SymMatrix = std::vector<std::vector<Sym>>;

// The recursion applied to symbols rather than numbers.
inline SymMatrix symbolic_code(int first, int n) {
    if (n == 1) return {{Sym{1, first, false}}};
    const int h = n / 2;
    const SymMatrix a = symbolic_code(first, h), b = symbolic_code(first + h, h);
    SymMatrix s(n, std::vector<Sym>(n));
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < h; ++c) {
            s[r][c] = a[r][c];
            s[r][c + h] = b[r][c];
            s[r + h][c] = Sym{-b[r][c].sign, b[r][c].index, !b[r][c].conj};
            s[r + h][c + h] = Sym{a[r][c].sign, a[r][c].index, !a[r][c].conj};
        }
    return s;
}

// Entry (i, j) of S^H S as a polynomial: coefficient of qa^(ca) * qb^(cb).
using Term = std::tuple<int, bool, int, bool>;
using Poly = std::map<Term, int>;

inline std::vector<std::vector<Poly>> symbolic_gram(const SymMatrix& s) {
    const std::size_t n = s.size();
    std::vector<std::vector<Poly>> g(n, std::vector<Poly>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t t = 0; t < n; ++t) {
                const Sym& a = s[t][i];
                const Sym& b = s[t][j];
                // products commute: store the factors in a fixed order
                std::pair<int, bool> x{a.index, !a.conj}, y{b.index, b.conj};
                if (y < x) std::swap(x, y);
                Term term{x.first, x.second, y.first, y.second};
                g[i][j][term] += a.sign * b.sign;
            }
    for (auto& row : g)
        for (auto& p : row)
            std::erase_if(p, [](const auto& kv) { return kv.second == 0; });
    return g;
}

inline cplx eval(const Poly& p, const CVector& q) {
    cplx acc{};
    for (const auto& [term, coef] : p) {
        const auto [a, ca, b, cb] = term;
        const cplx x = ca ? std::conj(q(a)) : q(a);
        const cplx y = cb ? std::conj(q(b)) : q(b);
        acc += static_cast<double>(coef) * x * y;
    }
    return acc;
}

}  // namespace cvmimo::oracle
