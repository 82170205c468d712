#pragma once

#include <vector>

#include "qtx/errors.hpp"

namespace qtx {

// base^e for e >= 0.
template <class F>
typename F::Elem elem_pow(const F& f, typename F::Elem base, long e) {
    if (e < 0) throw DomainError("elem_pow: negative exponent");
    typename F::Elem r = f.one();
    while (e) {
        if (e & 1) r = f.mul(r, base);
        base = f.mul(base, base);
        e >>= 1;
    }
    return r;
}

// Quantum integer (k)_t = 1 + t + ... + t^{k-1}; (0)_t = 0.
template <class F>
typename F::Elem qint(const F& f, long k, const typename F::Elem& t) {
    if (k < 0) throw DomainError("qint: negative argument");
    typename F::Elem acc = f.zero();
    typename F::Elem tk = f.one();
    for (long i = 0; i < k; ++i) {
        acc = f.add(acc, tk);
        tk = f.mul(tk, t);
    }
    return acc;
}

// Compositions of d into `parts` nonnegative parts, ascending lexicographic.
inline std::vector<std::vector<int>> compositions(int d, int parts) {
    std::vector<std::vector<int>> out;
    if (parts <= 0) {
        if (d == 0) out.push_back({});
        return out;
    }
    std::vector<int> cur(static_cast<std::size_t>(parts), 0);
    auto rec = [&](auto&& self, int slot, int rest) -> void {
        if (slot + 1 == parts) {
            cur[slot] = rest;
            out.push_back(cur);
            return;
        }
        for (int v = 0; v <= rest; ++v) {
            cur[slot] = v;
            self(self, slot + 1, rest - v);
        }
    };
    rec(rec, 0, d);
    return out;
}

inline long binomial(long n, long k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Gaussian binomial at parameter t, by the q-Pascal recurrence
//   C(n,k) = C(n-1,k-1) + t^k C(n-1,k).
template <class F>
typename F::Elem qbinom(const F& f, long n, long k, const typename F::Elem& t) {
    if (k < 0 || n < 0 || k > n) throw DomainError("qbinom: need 0 <= k <= n");
    std::vector<typename F::Elem> row(static_cast<std::size_t>(k) + 1, f.zero());
    row[0] = f.one();
    for (long i = 1; i <= n; ++i) {
        long top = std::min<long>(i, k);
        for (long j = top; j >= 1; --j) {
            // row[j] currently holds C(i-1, j), row[j-1] holds C(i-1, j-1).
            row[j] = f.add(row[j - 1], f.mul(elem_pow(f, t, j), row[j]));
        }
    }
    return row[k];
}

}  // namespace qtx
