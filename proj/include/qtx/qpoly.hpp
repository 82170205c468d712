#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qtx/errors.hpp"
#include "qtx/line.hpp"
#include "qtx/ncomplex.hpp"
#include "qtx/qcombinatorics.hpp"
#include "qtx/sparse.hpp"

namespace qtx {

// Monomials are exponent vectors in n variables, normal-ordered
// x_1^{a_1} ... x_n^{a_n}. A pure tensor is a short vector of monomials.
using ExpVec = std::vector<int>;
using Tensor = std::vector<ExpVec>;

template <class F>
using TensorSum = std::map<Tensor, typename F::Elem>;

inline int exp_weight(const ExpVec& a) {
    int w = 0;
    for (int v : a) w += v;
    return w;
}

inline std::string mono_label(const ExpVec& a) {
    std::string s;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        if (!s.empty()) s += "*";
        s += "x" + std::to_string(i + 1);
        if (a[i] > 1) s += "^" + std::to_string(a[i]);
    }
    return s.empty() ? "1" : s;
}

// Structure constants of the quantum polynomial algebra and its braiding.
// The commutation exponent fixes the algebra (x_j x_i = q^{c1} x_i x_j for
// i < j); the elementary braiding on variables is written
//   R(x_i (x) x_i) = q^{c2} x_i (x) x_i,
//   R(x_i (x) x_j) = q^{s_lo} x_j (x) x_i                     (i < j),
//   R(x_i (x) x_j) = q^{s_hi} x_j (x) x_i [+ tau x_i (x) x_j] (i > j),
// with the swap scalars forced by the detwisting relation
// mu . R = q^{|x||y|} mu, and tau = q^{c2} - q^{-c2} on the side the cross
// form selects. Only conventions that survive calibration are meaningful.
struct Convention {
    enum class Cross { HeckeHi, HeckeLo, Swap };

    int c1 = 1;
    int c2 = 1;
    Cross cross = Cross::HeckeHi;
    // elementary braiding data; normally forced from (c1, c2, cross)
    int s_lo = 0;
    int s_hi = 0;
    bool tau_on_hi = true;
    bool tau_on_lo = false;
    bool calibrated = false;

    static Convention make(int c1, int c2, Cross cross) {
        Convention c;
        c.c1 = c1;
        c.c2 = c2;
        c.cross = cross;
        switch (cross) {
            case Cross::Swap:
                c.s_lo = c2 - c1;
                c.s_hi = c1 + c2;
                c.tau_on_hi = c.tau_on_lo = false;
                break;
            case Cross::HeckeHi:
                c.s_lo = c2 - c1;
                c.s_hi = c1 - c2;
                c.tau_on_hi = true;
                c.tau_on_lo = false;
                break;
            case Cross::HeckeLo:
                c.s_lo = -c1 - c2;
                c.s_hi = c1 + c2;
                c.tau_on_hi = false;
                c.tau_on_lo = true;
                break;
        }
        return c;
    }

    static const char* cross_name(Cross c) {
        switch (c) {
            case Cross::HeckeHi: return "hecke-hi";
            case Cross::HeckeLo: return "hecke-lo";
            default: return "swap";
        }
    }

    bool scalars_forced() const {
        const Convention ref = make(c1, c2, cross);
        return ref.s_lo == s_lo && ref.s_hi == s_hi && ref.tau_on_hi == tau_on_hi &&
               ref.tau_on_lo == tau_on_lo;
    }

    std::string descriptor() const {
        std::ostringstream os;
        os << "c1=" << c1 << ";c2=" << c2 << ";cross=" << cross_name(cross);
        if (!scalars_forced()) os << ";slo=" << s_lo << ";shi=" << s_hi;
        return os.str();
    }

    // All candidate conventions, in ascending descriptor order.
    static std::vector<Convention> candidates() {
        std::vector<Convention> out;
        for (int c1 : {1, 2})
            for (int c2 : {1, 2})
                for (Cross cr : {Cross::HeckeHi, Cross::HeckeLo, Cross::Swap})
                    out.push_back(make(c1, c2, cr));
        return out;
    }

    // Negative control: bump the commutation exponent while freezing the
    // braiding scalars, leaving an inconsistent structure.
    Convention perturbed_commutation() const {
        Convention c = *this;
        c.c1 = (c1 == 1) ? 2 : 1;
        c.calibrated = false;
        return c;
    }
};

// All monomials of total degree d in n variables, ascending lexicographic.
struct MonoBasis {
    std::vector<ExpVec> list;
    std::map<ExpVec, int> pos;

    static MonoBasis make(int n, int d) {
        MonoBasis b;
        for (auto& c : compositions(d, n)) b.list.push_back(c);
        std::sort(b.list.begin(), b.list.end());
        for (std::size_t i = 0; i < b.list.size(); ++i) b.pos[b.list[i]] = static_cast<int>(i);
        return b;
    }
};

// The quantum polynomial algebra S_q(n) under one convention: normal-ordered
// products, braidings R^{(d1,d2)} and coproducts Delta^{(d1,d2)} computed on
// monomials. Braidings and coproducts are derived from the degree-one data by
// the product/coproduct compatibility moves; whether the convention actually
// satisfies the full relation list is a matter for verify_relations.
template <class F>
class SAlgebra {
  public:
    using Elem = typename F::Elem;

    SAlgebra(const F& f, int n, const Convention& conv) : f_(f), n_(n), conv_(conv) {}

    const F& field() const { return f_; }
    int vars() const { return n_; }
    const Convention& convention() const { return conv_; }

    long inversions(const ExpVec& a, const ExpVec& b) const {
        long inv = 0;
        for (int i = 1; i < n_; ++i)
            for (int j = 0; j < i; ++j) inv += static_cast<long>(a[i]) * b[j];
        return inv;
    }

    std::pair<Elem, ExpVec> mono_mul(const ExpVec& a, const ExpVec& b) const {
        ExpVec s(a);
        for (int i = 0; i < n_; ++i) s[i] += b[i];
        return {f_.qpow(conv_.c1 * inversions(a, b)), s};
    }

    // R^{(|u|,|v|)}(u (x) v), a sparse sum of pure tensors {v', u'}.
    const TensorSum<F>& braid(const ExpVec& u, const ExpVec& v) const {
        const std::pair<ExpVec, ExpVec> key{u, v};
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = braid_cache_.find(key);
            if (it != braid_cache_.end()) return it->second;
        }
        TensorSum<F> out = compute_braid(u, v);
        std::lock_guard<std::mutex> lock(mu_);
        return braid_cache_.emplace(key, std::move(out)).first->second;
    }

    // Delta^{(d1, |m|-d1)}(m), a sparse sum of pure tensors {left, right}.
    const TensorSum<F>& coprod(const ExpVec& m, int d1) const {
        const std::pair<ExpVec, int> key{m, d1};
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = coprod_cache_.find(key);
            if (it != coprod_cache_.end()) return it->second;
        }
        TensorSum<F> out = compute_coprod(m, d1);
        std::lock_guard<std::mutex> lock(mu_);
        return coprod_cache_.emplace(key, std::move(out)).first->second;
    }

    void add_term(TensorSum<F>& sum, Tensor t, const Elem& c) const {
        if (f_.is_zero(c)) return;
        auto [it, inserted] = sum.try_emplace(std::move(t), c);
        if (!inserted) {
            it->second = f_.add(it->second, c);
            if (f_.is_zero(it->second)) sum.erase(it);
        }
    }

    bool sum_eq(const TensorSum<F>& a, const TensorSum<F>& b) const {
        if (a.size() != b.size()) return false;
        for (const auto& [t, c] : a) {
            auto it = b.find(t);
            if (it == b.end() || !f_.eq(c, it->second)) return false;
        }
        return true;
    }

    std::string sum_str(const TensorSum<F>& s) const {
        std::ostringstream os;
        bool first = true;
        for (const auto& [t, c] : s) {
            if (!first) os << " + ";
            os << "(" << f_.str(c) << ")";
            for (const auto& m : t) os << " [" << mono_label(m) << "]";
            first = false;
        }
        if (first) os << "0";
        return os.str();
    }

  private:
    // elementary braiding on variables: list of (coeff, (k, l)) with output
    // x_k (x) x_l
    std::vector<std::pair<Elem, std::pair<int, int>>> r11(int i, int j) const {
        std::vector<std::pair<Elem, std::pair<int, int>>> out;
        if (i == j) {
            out.push_back({f_.qpow(conv_.c2), {i, i}});
        } else if (i < j) {
            out.push_back({f_.qpow(conv_.s_lo), {j, i}});
            if (conv_.tau_on_lo)
                out.push_back({f_.sub(f_.qpow(conv_.c2), f_.qpow(-conv_.c2)), {i, j}});
        } else {
            out.push_back({f_.qpow(conv_.s_hi), {j, i}});
            if (conv_.tau_on_hi)
                out.push_back({f_.sub(f_.qpow(conv_.c2), f_.qpow(-conv_.c2)), {i, j}});
        }
        return out;
    }

    static int min_var(const ExpVec& a) {
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i] > 0) return static_cast<int>(i);
        return -1;
    }

    // R^{(1,|v|)}(x_i (x) v) with terms {v', x_m}.
    TensorSum<F> braid_one(int i, const ExpVec& v) const {
        TensorSum<F> out;
        if (exp_weight(v) == 0) {
            add_term(out, {v, unit_var(i)}, f_.one());
            return out;
        }
        const int j = min_var(v);
        ExpVec v1(v);
        v1[j] -= 1;
        for (const auto& [c0, kl] : r11(i, j)) {
            const auto& [k, l] = kl;
            TensorSum<F> inner = braid_one(l, v1);
            for (const auto& [t, c1] : inner) {
                auto [s, w] = mono_mul(unit_var(k), t[0]);
                add_term(out, {w, t[1]}, f_.mul(f_.mul(c0, c1), s));
            }
        }
        return out;
    }

    TensorSum<F> compute_braid(const ExpVec& u, const ExpVec& v) const {
        TensorSum<F> out;
        if (exp_weight(u) == 0 || exp_weight(v) == 0) {
            add_term(out, {v, u}, f_.one());
            return out;
        }
        const int i = min_var(u);
        ExpVec u1(u);
        u1[i] -= 1;
        const TensorSum<F>& rest = braid(u1, v);
        for (const auto& [t, ck] : rest) {
            const TensorSum<F> one = braid_one(i, t[0]);
            for (const auto& [t1, c1] : one) {
                auto [s, w] = mono_mul(t1[1], t[1]);
                add_term(out, {t1[0], w}, f_.mul(f_.mul(ck, c1), s));
            }
        }
        return out;
    }

    TensorSum<F> compute_coprod(const ExpVec& m, int d1) const {
        const int d = exp_weight(m);
        const int d2 = d - d1;
        if (d1 < 0 || d2 < 0) throw DomainError("coprod: invalid splitting");
        TensorSum<F> out;
        if (d1 == 0) {
            add_term(out, {ExpVec(static_cast<std::size_t>(n_), 0), m}, f_.one());
            return out;
        }
        if (d2 == 0) {
            add_term(out, {m, ExpVec(static_cast<std::size_t>(n_), 0)}, f_.one());
            return out;
        }
        const int i = min_var(m);
        ExpVec m1(m);
        m1[i] -= 1;
        // x_i lands in the left slot
        for (const auto& [t, c] : coprod(m1, d1 - 1)) {
            auto [s, w] = mono_mul(unit_var(i), t[0]);
            add_term(out, {w, t[1]}, f_.mul(c, s));
        }
        // x_i lands in the right slot, crossing the left one
        const Elem lead = f_.qpow(d1);
        for (const auto& [t, c] : coprod(m1, d1)) {
            const TensorSum<F> moved = braid_one(i, t[0]);
            for (const auto& [t1, c1] : moved) {
                auto [s, w] = mono_mul(t1[1], t[1]);
                add_term(out, {t1[0], w}, f_.mul(f_.mul(lead, c), f_.mul(c1, s)));
            }
        }
        return out;
    }

    ExpVec unit_var(int i) const {
        ExpVec e(static_cast<std::size_t>(n_), 0);
        e[i] = 1;
        return e;
    }

    const F f_;
    const int n_;
    const Convention conv_;
    mutable std::mutex mu_;
    mutable std::map<std::pair<ExpVec, ExpVec>, TensorSum<F>> braid_cache_;
    mutable std::map<std::pair<ExpVec, int>, TensorSum<F>> coprod_cache_;
};

// ---- spec operations on S_q(n) ----

template <class F>
std::pair<typename F::Elem, ExpVec> product(const SAlgebra<F>& alg, const ExpVec& a,
                                            const ExpVec& b) {
    return alg.mono_mul(a, b);
}

template <class F>
const TensorSum<F>& coproduct(const SAlgebra<F>& alg, const ExpVec& m, int d1) {
    return alg.coprod(m, d1);
}

// Matrix of R^{(d1,d2)} : S^{d1} (x) S^{d2} -> S^{d2} (x) S^{d1} on the
// lexicographic pair bases.
template <class F>
SparseMat<F> braiding_matrix(const SAlgebra<F>& alg, int d1, int d2) {
    const F& f = alg.field();
    const MonoBasis b1 = MonoBasis::make(alg.vars(), d1);
    const MonoBasis b2 = MonoBasis::make(alg.vars(), d2);
    const int cols = static_cast<int>(b1.list.size() * b2.list.size());
    const int rows = cols;
    TripletBuilder<F> tb(rows, cols);
    for (std::size_t i = 0; i < b1.list.size(); ++i)
        for (std::size_t j = 0; j < b2.list.size(); ++j) {
            const int col = static_cast<int>(i * b2.list.size() + j);
            for (const auto& [t, c] : alg.braid(b1.list[i], b2.list[j])) {
                const int row =
                    b2.pos.at(t[0]) * static_cast<int>(b1.list.size()) + b1.pos.at(t[1]);
                tb.add(row, col, c);
            }
        }
    return tb.build(f);
}

template <class F>
SparseMat<F> coproduct_matrix(const SAlgebra<F>& alg, int d1, int d2) {
    const F& f = alg.field();
    const MonoBasis bs = MonoBasis::make(alg.vars(), d1 + d2);
    const MonoBasis b1 = MonoBasis::make(alg.vars(), d1);
    const MonoBasis b2 = MonoBasis::make(alg.vars(), d2);
    TripletBuilder<F> tb(static_cast<int>(b1.list.size() * b2.list.size()),
                         static_cast<int>(bs.list.size()));
    for (std::size_t c = 0; c < bs.list.size(); ++c)
        for (const auto& [t, coeff] : alg.coprod(bs.list[c], d1)) {
            const int row = b1.pos.at(t[0]) * static_cast<int>(b2.list.size()) + b2.pos.at(t[1]);
            tb.add(row, static_cast<int>(c), coeff);
        }
    return tb.build(f);
}

// Partition of a tensor basis by total weight vector.
inline std::map<ExpVec, std::vector<int>> weight_decompose(const std::vector<Tensor>& basis) {
    std::map<ExpVec, std::vector<int>> out;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (basis[i].empty()) continue;
        ExpVec w(basis[i][0].size(), 0);
        for (const auto& m : basis[i])
            for (std::size_t v = 0; v < m.size(); ++v) w[v] += m[v];
        out[w].push_back(static_cast<int>(i));
    }
    return out;
}

// Kernel of Delta^{(3d-1,1)} on S^{3d}_q(n); columns are coordinate vectors
// on the lexicographic monomial basis of S^{3d}.
template <class F>
SparseMat<F> phi_kernel(const SAlgebra<F>& alg, int d) {
    if (alg.field().ell() != 3) throw DomainError("phi_kernel: needs a root of order 3");
    if (d == 0) return identity_mat(alg.field(), 1);
    const SparseMat<F> m = coproduct_matrix(alg, 3 * d - 1, 1);
    return columns_to_sparse(alg.field(), m.cols, kernel_basis(alg.field(), m));
}

// ---- relations (2)-(8) ----

struct RelationReport {
    struct Check {
        int relation;
        std::string context;
        bool pass;
        std::string counterexample;
    };
    int n = 0;
    int dmax = 0;
    std::vector<Check> checks;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
    bool relation_fails(int rel, const std::string& context_substr = "") const {
        for (const auto& c : checks)
            if (c.relation == rel && !c.pass &&
                c.context.find(context_substr) != std::string::npos)
                return true;
        return false;
    }
};

namespace detail {

// shared loop: compare lhs/rhs builders over all monomial tuples of the
// given degrees, recording the first counterexample
template <class F, class Fn>
void check_over_tuples(const SAlgebra<F>& alg, RelationReport& report, int relation,
                       const std::vector<int>& degrees, Fn&& both_sides,
                       const std::string& extra_context = "") {
    std::vector<MonoBasis> bases;
    for (int d : degrees) bases.push_back(MonoBasis::make(alg.vars(), d));
    RelationReport::Check chk;
    chk.relation = relation;
    std::ostringstream ctx;
    ctx << "(";
    for (std::size_t i = 0; i < degrees.size(); ++i) ctx << (i ? "," : "") << degrees[i];
    ctx << ")" << extra_context;
    chk.context = ctx.str();
    chk.pass = true;

    std::vector<std::size_t> idx(degrees.size(), 0);
    for (;;) {
        std::vector<ExpVec> tuple;
        for (std::size_t i = 0; i < idx.size(); ++i) tuple.push_back(bases[i].list[idx[i]]);
        auto [lhs, rhs] = both_sides(tuple);
        if (!alg.sum_eq(lhs, rhs)) {
            chk.pass = false;
            std::ostringstream os;
            os << "inputs:";
            for (const auto& m : tuple) os << " " << mono_label(m);
            os << " | lhs = " << alg.sum_str(lhs) << " | rhs = " << alg.sum_str(rhs);
            chk.counterexample = os.str();
            break;
        }
        std::size_t p = 0;
        while (p < idx.size() && ++idx[p] == bases[p].list.size()) idx[p++] = 0;
        if (p == idx.size()) break;
    }
    report.checks.push_back(std::move(chk));
}

}  // namespace detail

// Exact check of the compatibility relations between products, coproducts
// and switches on every monomial input with total degree <= dmax.
template <class F>
RelationReport verify_relations(const SAlgebra<F>& alg, int dmax) {
    const F& f = alg.field();
    RelationReport report;
    report.n = alg.vars();
    report.dmax = dmax;

    // (2) mu . R = q^{|x||y|} mu
    for (int d1 = 1; d1 <= dmax; ++d1)
        for (int d2 = 1; d1 + d2 <= dmax; ++d2)
            detail::check_over_tuples(alg, report, 2, {d1, d2}, [&](const std::vector<ExpVec>& in) {
                TensorSum<F> lhs, rhs;
                for (const auto& [t, c] : alg.braid(in[0], in[1])) {
                    auto [s, w] = alg.mono_mul(t[0], t[1]);
                    alg.add_term(lhs, {w}, f.mul(c, s));
                }
                auto [s, w] = alg.mono_mul(in[0], in[1]);
                alg.add_term(rhs, {w}, f.mul(f.qpow(1L * d1 * d2), s));
                return std::pair{lhs, rhs};
            });

    // (3) switching z past a product xy, factorwise
    for (int d1 = 1; d1 <= dmax; ++d1)
        for (int d2 = 1; d1 + d2 <= dmax; ++d2)
            for (int d3 = 1; d1 + d2 + d3 <= dmax; ++d3)
                detail::check_over_tuples(
                    alg, report, 3, {d1, d2, d3}, [&](const std::vector<ExpVec>& in) {
                        TensorSum<F> lhs, rhs;
                        for (const auto& [tyz, cyz] : alg.braid(in[1], in[2]))
                            for (const auto& [txz, cxz] : alg.braid(in[0], tyz[0])) {
                                auto [s, w] = alg.mono_mul(txz[1], tyz[1]);
                                alg.add_term(lhs, {txz[0], w},
                                             f.mul(f.mul(cyz, cxz), s));
                            }
                        auto [s, xy] = alg.mono_mul(in[0], in[1]);
                        for (const auto& [t, c] : alg.braid(xy, in[2]))
                            alg.add_term(rhs, {t[0], t[1]}, f.mul(s, c));
                        return std::pair{lhs, rhs};
                    });

    // (4) switching x past a product yz, factorwise
    for (int d1 = 1; d1 <= dmax; ++d1)
        for (int d2 = 1; d1 + d2 <= dmax; ++d2)
            for (int d3 = 1; d1 + d2 + d3 <= dmax; ++d3)
                detail::check_over_tuples(
                    alg, report, 4, {d1, d2, d3}, [&](const std::vector<ExpVec>& in) {
                        TensorSum<F> lhs, rhs;
                        for (const auto& [txy, cxy] : alg.braid(in[0], in[1]))
                            for (const auto& [txz, cxz] : alg.braid(txy[1], in[2])) {
                                auto [s, w] = alg.mono_mul(txy[0], txz[0]);
                                alg.add_term(lhs, {w, txz[1]},
                                             f.mul(f.mul(cxy, cxz), s));
                            }
                        auto [s, yz] = alg.mono_mul(in[1], in[2]);
                        for (const auto& [t, c] : alg.braid(in[0], yz))
                            alg.add_term(rhs, {t[0], t[1]}, f.mul(s, c));
                        return std::pair{lhs, rhs};
                    });

    // (5) switching y past the two coproduct legs of x
    for (int dx = 1; dx <= dmax; ++dx)
        for (int dy = 1; dx + dy <= dmax; ++dy)
            for (int d1 = 0; d1 <= dx; ++d1)
                detail::check_over_tuples(
                    alg, report, 5, {dx, dy}, [&, d1](const std::vector<ExpVec>& in) {
                        TensorSum<F> lhs, rhs;
                        for (const auto& [tx, cx] : alg.coprod(in[0], d1))
                            for (const auto& [t1, c1] : alg.braid(tx[1], in[1]))
                                for (const auto& [t2, c2] : alg.braid(tx[0], t1[0]))
                                    alg.add_term(lhs, {t2[0], t2[1], t1[1]},
                                                 f.mul(f.mul(cx, c1), c2));
                        for (const auto& [txy, cxy] : alg.braid(in[0], in[1]))
                            for (const auto& [tt, cc] : alg.coprod(txy[1], d1))
                                alg.add_term(rhs, {txy[0], tt[0], tt[1]}, f.mul(cxy, cc));
                        return std::pair{lhs, rhs};
                    },
                    " split=" + std::to_string(d1));

    // (6) switching x past the two coproduct legs of y
    for (int dx = 1; dx <= dmax; ++dx)
        for (int dy = 1; dx + dy <= dmax; ++dy)
            for (int d1 = 0; d1 <= dy; ++d1)
                detail::check_over_tuples(
                    alg, report, 6, {dx, dy}, [&, d1](const std::vector<ExpVec>& in) {
                        TensorSum<F> lhs, rhs;
                        for (const auto& [ty, cy] : alg.coprod(in[1], d1))
                            for (const auto& [t1, c1] : alg.braid(in[0], ty[0]))
                                for (const auto& [t2, c2] : alg.braid(t1[1], ty[1]))
                                    alg.add_term(lhs, {t1[0], t2[0], t2[1]},
                                                 f.mul(f.mul(cy, c1), c2));
                        for (const auto& [txy, cxy] : alg.braid(in[0], in[1]))
                            for (const auto& [tt, cc] : alg.coprod(txy[0], d1))
                                alg.add_term(rhs, {tt[0], tt[1], txy[1]}, f.mul(cxy, cc));
                        return std::pair{lhs, rhs};
                    },
                    " split=" + std::to_string(d1));

    // (7) coproduct of a product, with the q^{j(d1-i)} crossing factor
    for (int dx = 1; dx <= dmax; ++dx)
        for (int dy = 1; dx + dy <= dmax; ++dy)
            for (int d1 = 0; d1 <= dx + dy; ++d1)
                detail::check_over_tuples(
                    alg, report, 7, {dx, dy}, [&, d1](const std::vector<ExpVec>& in) {
                        const int d2 = dx + dy - d1;
                        TensorSum<F> lhs, rhs;
                        auto [sxy, xy] = alg.mono_mul(in[0], in[1]);
                        for (const auto& [t, c] : alg.coprod(xy, d1))
                            alg.add_term(lhs, {t[0], t[1]}, f.mul(sxy, c));
                        for (int i = std::max(0, d1 - exp_weight(in[1]));
                             i <= std::min(d1, exp_weight(in[0])); ++i) {
                            const int j = exp_weight(in[0]) - i;
                            if (j > d2) continue;
                            for (const auto& [tx, cx] : alg.coprod(in[0], i))
                                for (const auto& [ty, cy] : alg.coprod(in[1], d1 - i))
                                    for (const auto& [tb, cb] : alg.braid(tx[1], ty[0])) {
                                        auto [s1, left] = alg.mono_mul(tx[0], tb[0]);
                                        auto [s2, right] = alg.mono_mul(tb[1], ty[1]);
                                        const auto lead = f.qpow(1L * (d1 - i) * j);
                                        alg.add_term(
                                            rhs, {left, right},
                                            f.mul(f.mul(lead, f.mul(cx, cy)),
                                                  f.mul(cb, f.mul(s1, s2))));
                                    }
                        }
                        return std::pair{lhs, rhs};
                    },
                    " split=" + std::to_string(d1));

    // (8) the (d-1,1) specialization written with a single crossing
    for (int dx = 1; dx <= dmax; ++dx)
        for (int dy = 1; dx + dy <= dmax; ++dy)
            detail::check_over_tuples(
                alg, report, 8, {dx, dy}, [&](const std::vector<ExpVec>& in) {
                    const int d = dx + dy;
                    TensorSum<F> lhs, rhs;
                    auto [sxy, xy] = alg.mono_mul(in[0], in[1]);
                    for (const auto& [t, c] : alg.coprod(xy, d - 1))
                        alg.add_term(lhs, {t[0], t[1]}, f.mul(sxy, c));
                    for (const auto& [ty, cy] : alg.coprod(in[1], dy - 1)) {
                        auto [s, left] = alg.mono_mul(in[0], ty[0]);
                        alg.add_term(rhs, {left, ty[1]}, f.mul(cy, s));
                    }
                    const auto lead = f.qpow(dy);
                    for (const auto& [tx, cx] : alg.coprod(in[0], dx - 1))
                        for (const auto& [tb, cb] : alg.braid(tx[1], in[1])) {
                            auto [s, left] = alg.mono_mul(tx[0], tb[0]);
                            alg.add_term(rhs, {left, tb[1]},
                                         f.mul(f.mul(lead, cx), f.mul(cb, s)));
                        }
                    return std::pair{lhs, rhs};
                });

    return report;
}

// Coassociativity on the same grid; part of the calibration acceptance.
template <class F>
bool coassociative(const SAlgebra<F>& alg, int dmax) {
    const F& f = alg.field();
    for (int d = 0; d <= dmax; ++d) {
        const MonoBasis b = MonoBasis::make(alg.vars(), d);
        for (int a = 0; a <= d; ++a)
            for (int bb = 0; a + bb <= d; ++bb) {
                const int c = d - a - bb;
                for (const auto& m : b.list) {
                    TensorSum<F> lhs, rhs;
                    for (const auto& [t, c1] : alg.coprod(m, a + bb))
                        for (const auto& [t2, c2] : alg.coprod(t[0], a))
                            alg.add_term(lhs, {t2[0], t2[1], t[1]}, f.mul(c1, c2));
                    for (const auto& [t, c1] : alg.coprod(m, a))
                        for (const auto& [t2, c2] : alg.coprod(t[1], bb))
                            alg.add_term(rhs, {t[0], t2[0], t2[1]}, f.mul(c1, c2));
                    (void)c;
                    if (!alg.sum_eq(lhs, rhs)) return false;
                }
            }
    }
    return true;
}

// ---- the direct model of B_d(n) and its product ----

// Basis of B_d(n): triples of monomials, grouped by degree |m2| + 2|m3|,
// ordered lexicographically on the slot tuple.
struct DirectBasis {
    std::map<int, std::vector<Tensor>> by_degree;
    std::map<Tensor, std::pair<int, int>> index;

    static DirectBasis make(int n, int d) {
        DirectBasis b;
        for (int d1 = 0; d1 <= d; ++d1)
            for (int d2 = 0; d1 + d2 <= d; ++d2) {
                const int d3 = d - d1 - d2;
                const MonoBasis m1 = MonoBasis::make(n, d1);
                const MonoBasis m2 = MonoBasis::make(n, d2);
                const MonoBasis m3 = MonoBasis::make(n, d3);
                for (const auto& a : m1.list)
                    for (const auto& bb : m2.list)
                        for (const auto& c : m3.list)
                            b.by_degree[d2 + 2 * d3].push_back(Tensor{a, bb, c});
            }
        for (auto& [deg, v] : b.by_degree) {
            std::sort(v.begin(), v.end());
            for (std::size_t i = 0; i < v.size(); ++i)
                b.index[v[i]] = {deg, static_cast<int>(i)};
        }
        return b;
    }
};

inline std::string slot_tensor_label(const Tensor& t) {
    std::string s;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) s += "|";
        s += mono_label(t[i]);
    }
    return s;
}

inline std::string weight_sector(const Tensor& t) {
    ExpVec w(t[0].size(), 0);
    for (const auto& m : t)
        for (std::size_t v = 0; v < m.size(); ++v) w[v] += m[v];
    std::string s = "w=(";
    for (std::size_t v = 0; v < w.size(); ++v) s += (v ? "," : "") + std::to_string(w[v]);
    return s + ")";
}

// delta on one slot triple: move one unit of weight from slot 1 to 2 and
// from slot 2 to 3, via the coproduct and the slot product.
template <class F>
TensorSum<F> delta_direct(const SAlgebra<F>& alg, const Tensor& t) {
    const F& f = alg.field();
    TensorSum<F> out;
    const int w1 = exp_weight(t[0]), w2 = exp_weight(t[1]);
    if (w1 > 0) {
        for (const auto& [tc, c] : alg.coprod(t[0], w1 - 1)) {
            auto [s, mid] = alg.mono_mul(tc[1], t[1]);
            alg.add_term(out, {tc[0], mid, t[2]}, f.mul(c, s));
        }
    }
    if (w2 > 0) {
        const auto tw = f.qpow(2L * w2);
        for (const auto& [tc, c] : alg.coprod(t[1], w2 - 1)) {
            auto [s, last] = alg.mono_mul(tc[1], t[2]);
            alg.add_term(out, {t[0], tc[0], last}, f.mul(tw, f.mul(c, s)));
        }
    }
    return out;
}

template <class F>
LComplex<F> build_B_direct(const SAlgebra<F>& alg, int d, bool checked = true) {
    const F& f = alg.field();
    if (f.ell() != 3) throw DomainError("build_B_direct: needs a root of order 3");
    LComplex<F> c;
    c.field = f;
    c.ell = 3;
    const DirectBasis basis = DirectBasis::make(alg.vars(), d);
    for (const auto& [deg, v] : basis.by_degree) {
        std::vector<std::string> labels, secs;
        for (const auto& t : v) {
            labels.push_back(slot_tensor_label(t));
            secs.push_back(weight_sector(t));
        }
        c.space[deg] = std::move(labels);
        c.sectors[deg] = std::move(secs);
    }
    for (const auto& [deg, v] : basis.by_degree) {
        TripletBuilder<F> tb(c.dim_at(deg + 1), c.dim_at(deg));
        for (std::size_t col = 0; col < v.size(); ++col)
            for (const auto& [t, coeff] : delta_direct(alg, v[col]))
                tb.add(basis.index.at(t).second, static_cast<int>(col), coeff);
        c.diff[deg] = tb.build(f);
    }
    if (checked) assert_complex_valid(c, "build_B_direct");
    return c;
}

// The twisted product mu_B on slot triples:
//   q^{(|a2|+|a3|)|b1|} a1 r2(r1(b1)) (x) r2(a2) r3(b2) (x) r3(r1(a3)) b3.
template <class F>
TensorSum<F> mu_B(const SAlgebra<F>& alg, const Tensor& a, const Tensor& b) {
    const F& f = alg.field();
    TensorSum<F> out;
    const auto lead = f.qpow(1L * (exp_weight(a[1]) + exp_weight(a[2])) * exp_weight(b[0]));
    for (const auto& [t1, c1] : alg.braid(a[2], b[0]))          // r1: a3 past b1
        for (const auto& [t2, c2] : alg.braid(a[1], t1[0]))     // r2: a2 past r1(b1)
            for (const auto& [t3, c3] : alg.braid(t1[1], b[1])) {  // r3: r1(a3) past b2
                auto [s1, slot1] = alg.mono_mul(a[0], t2[0]);
                auto [s2, slot2] = alg.mono_mul(t2[1], t3[0]);
                auto [s3, slot3] = alg.mono_mul(t3[1], b[2]);
                alg.add_term(out, {slot1, slot2, slot3},
                             f.mul(f.mul(lead, f.mul(c1, c2)),
                                   f.mul(c3, f.mul(s1, f.mul(s2, s3)))));
            }
    return out;
}

// mu_B . delta_tensor = delta . mu_B as an exact identity on all pairs of
// slot triples with the given weights.
template <class F>
bool mu_delta_compatible(const SAlgebra<F>& alg, int d1, int d2) {
    const F& f = alg.field();
    const DirectBasis ba = DirectBasis::make(alg.vars(), d1);
    const DirectBasis bb = DirectBasis::make(alg.vars(), d2);
    for (const auto& [dega, va] : ba.by_degree)
        for (const auto& [degb, vb] : bb.by_degree)
            for (const auto& a : va)
                for (const auto& b : vb) {
                    TensorSum<F> lhs;
                    for (const auto& [t, c] : delta_direct(alg, a))
                        for (const auto& [m, c2] : mu_B(alg, t, b))
                            alg.add_term(lhs, m, f.mul(c, c2));
                    const auto tw = f.qpow(2L * dega);
                    for (const auto& [t, c] : delta_direct(alg, b))
                        for (const auto& [m, c2] : mu_B(alg, a, t))
                            alg.add_term(lhs, m, f.mul(tw, f.mul(c, c2)));
                    TensorSum<F> rhs;
                    for (const auto& [m, c] : mu_B(alg, a, b))
                        for (const auto& [t, c2] : delta_direct(alg, m))
                            alg.add_term(rhs, t, f.mul(c, c2));
                    if (!alg.sum_eq(lhs, rhs)) return false;
                }
    (void)f;
    return true;
}

// ---- the tensor model and the exponential isomorphism ----

// Basis of (+)_{alpha} B_{alpha_1}(1) (x) ... (x) B_{alpha_n}(1): tuples of
// slot monomials, one per variable, grouped by total degree. Summands are
// ordered by alpha ascending; within a summand the order is the one the
// iterated (left-associated) twisted tensor product produces.
struct TensorModelBasis {
    std::map<int, std::vector<std::vector<SlotMonomial>>> by_degree;
    std::map<std::vector<SlotMonomial>, std::pair<int, int>> index;

    static TensorModelBasis make(int d, int n) {
        TensorModelBasis out;
        for (const auto& alpha : compositions(d, n)) {
            std::map<int, std::vector<std::vector<SlotMonomial>>> acc;
            {
                const SlotBasis b0 = SlotBasis::make(3, alpha[0]);
                for (const auto& [g, v] : b0.by_degree)
                    for (const auto& m : v) acc[g].push_back({m});
            }
            for (std::size_t i = 1; i < alpha.size(); ++i) {
                const SlotBasis bi = SlotBasis::make(3, alpha[i]);
                std::map<int, std::vector<std::vector<SlotMonomial>>> next;
                for (const auto& [gl, tuples] : acc)
                    for (const auto& [gr, ws] : bi.by_degree)
                        for (const auto& t : tuples)
                            for (const auto& w : ws) {
                                auto ext = t;
                                ext.push_back(w);
                                next[gl + gr].push_back(std::move(ext));
                            }
                acc = std::move(next);
            }
            for (const auto& [g, tuples] : acc)
                for (const auto& t : tuples) out.by_degree[g].push_back(t);
        }
        for (const auto& [g, tuples] : out.by_degree)
            for (std::size_t i = 0; i < tuples.size(); ++i)
                out.index[tuples[i]] = {g, static_cast<int>(i)};
        return out;
    }
};

inline std::string tuple_label(const std::vector<SlotMonomial>& t) {
    if (t.size() == 1) return t[0].label();
    std::string s;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) s += " (x) ";
        s += t[i].label();
    }
    return s;
}

inline std::string tuple_sector(const std::vector<SlotMonomial>& t) {
    std::string s = "w=(";
    for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i].weight());
    return s + ")";
}

// The convention-free tensor model of B_d(n), with the iterated twisted
// tensor differential: the i-th factor's move is twisted by q^{2 (degree of
// the factors to its left)}.
template <class F>
LComplex<F> build_B_tensor(const F& f, int d, int n, bool checked = true) {
    if (f.ell() != 3) throw DomainError("build_B_tensor: needs a root of order 3");
    if (d < 0 || n < 0) throw DomainError("build_B_tensor: negative parameters");
    LComplex<F> c;
    c.field = f;
    c.ell = 3;
    if (n == 0) {
        if (d > 0) return c;  // zero complex
        c.space[0] = {"1"};
        return c;
    }
    const TensorModelBasis basis = TensorModelBasis::make(d, n);
    for (const auto& [g, tuples] : basis.by_degree) {
        std::vector<std::string> labels, secs;
        for (const auto& t : tuples) {
            labels.push_back(tuple_label(t));
            secs.push_back(tuple_sector(t));
        }
        c.space[g] = std::move(labels);
        c.sectors[g] = std::move(secs);
    }
    for (const auto& [g, tuples] : basis.by_degree) {
        TripletBuilder<F> tb(c.dim_at(g + 1), c.dim_at(g));
        for (std::size_t col = 0; col < tuples.size(); ++col) {
            const auto& t = tuples[col];
            long left_degree = 0;
            for (std::size_t i = 0; i < t.size(); ++i) {
                const auto twist = f.qpow(2 * left_degree);
                for (const auto& [coeff, moved] : slot_delta_terms(f, t[i])) {
                    auto target = t;
                    target[i] = moved;
                    tb.add(basis.index.at(target).second, static_cast<int>(col),
                           f.mul(twist, coeff));
                }
                left_degree += t[i].degree();
            }
        }
        c.diff[g] = tb.build(f);
    }
    if (checked) assert_complex_valid(c, "build_B_tensor");
    return c;
}

// The exponential map: a tuple of one-variable slot monomials multiplies out
// (via mu_B, variables kept disjoint and ascending) to an element of B_d(n).
template <class F>
Morphism<F> exponential_iso(const SAlgebra<F>& alg, int d) {
    const F& f = alg.field();
    const int n = alg.vars();
    Morphism<F> out;
    out.source = build_B_tensor(f, d, n);
    out.target = build_B_direct(alg, d);
    out.t = 0;

    auto var_triple = [&](const SlotMonomial& w, int var) {
        Tensor t(3, ExpVec(static_cast<std::size_t>(n), 0));
        for (int s = 0; s < 3; ++s) t[s][var] = w.k[s];
        return t;
    };

    const TensorModelBasis basis = TensorModelBasis::make(d, n);
    const DirectBasis target = DirectBasis::make(n, d);
    for (const auto& [g, tuples] : basis.by_degree) {
        TripletBuilder<F> tb(out.target.dim_at(g), static_cast<int>(tuples.size()));
        for (std::size_t col = 0; col < tuples.size(); ++col) {
            TensorSum<F> cur;
            alg.add_term(cur, var_triple(tuples[col][0], 0), f.one());
            for (int i = 1; i < n; ++i) {
                TensorSum<F> next;
                const Tensor rhs = var_triple(tuples[col][i], i);
                for (const auto& [t, c] : cur)
                    for (const auto& [m, c2] : mu_B(alg, t, rhs))
                        alg.add_term(next, m, f.mul(c, c2));
                cur = std::move(next);
            }
            for (const auto& [t, c] : cur)
                tb.add(target.index.at(t).second, static_cast<int>(col), c);
        }
        out.mat[g] = tb.build(f);
    }
    return out;
}

// ---- calibration ----

// At n = 1 the coproducts must produce quantum-integer coefficients at q^2.
template <class F>
bool one_var_coproduct_ok(const F& f, const Convention& conv, int kmax) {
    SAlgebra<F> alg(f, 1, conv);
    for (int k = 1; k <= kmax; ++k) {
        const auto& terms = alg.coprod(ExpVec{k}, k - 1);
        auto it = terms.find(Tensor{ExpVec{k - 1}, ExpVec{1}});
        const auto expect = qint(f, k, f.qpow(2));
        if (f.is_zero(expect)) {
            if (it != terms.end()) return false;
        } else {
            if (it == terms.end() || !f.eq(it->second, expect)) return false;
        }
        if (terms.size() > 1) return false;
    }
    return true;
}

struct CalibrationOutcome {
    Convention selected;
    std::vector<std::string> passers;
};

// Enumerates the candidate conventions and keeps those that (i) produce the
// quantum-integer coproduct coefficients in one variable, (ii) satisfy
// relations (2)-(8) and coassociativity at n <= 2 up to total degree 3, and
// (iii) give a 3-nilpotent direct differential for d <= 4, n = 2. The
// lexicographically least descriptor wins.
template <class F>
CalibrationOutcome calibrate_convention(const F& f) {
    if (f.ell() != 3) throw NotCalibratedError("calibration requires a root of order 3");
    CalibrationOutcome out;
    bool found = false;
    for (const Convention& cand : Convention::candidates()) {
        if (!one_var_coproduct_ok(f, cand, 6)) continue;
        SAlgebra<F> alg1(f, 1, cand);
        SAlgebra<F> alg2(f, 2, cand);
        if (!verify_relations(alg1, 3).all_pass()) continue;
        if (!verify_relations(alg2, 3).all_pass()) continue;
        if (!coassociative(alg2, 3)) continue;
        bool nilpotent = true;
        for (int d = 0; d <= 4 && nilpotent; ++d)
            nilpotent = check_nilpotency(build_B_direct(alg2, d, /*checked=*/false));
        if (!nilpotent) continue;
        out.passers.push_back(cand.descriptor());
        if (!found) {
            out.selected = cand;
            out.selected.calibrated = true;
            found = true;
        }
    }
    if (!found) throw NotCalibratedError("no candidate convention passed calibration");
    return out;
}

// Calibration runs once per field spec; afterwards the convention is frozen.
template <class F>
const CalibrationOutcome& calibrated_convention(const F& f) {
    static std::map<std::string, CalibrationOutcome> cache;
    static std::mutex m;
    const std::string key = f.spec().str() + "#" + std::to_string(f.ell());
    {
        std::lock_guard<std::mutex> lock(m);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    CalibrationOutcome out = calibrate_convention(f);
    std::lock_guard<std::mutex> lock(m);
    return cache.emplace(key, std::move(out)).first->second;
}

}  // namespace qtx
