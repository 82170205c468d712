#pragma once

#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "qtx/errors.hpp"
#include "qtx/ncomplex.hpp"
#include "qtx/qcombinatorics.hpp"

namespace qtx {

// Exponent tuple (k_1, ..., k_ell), the basis label e^{k_1} (x) ... (x) e^{k_ell}
// of the one-variable slot algebra. Ordered lexicographically.
struct SlotMonomial {
    std::vector<int> k;

    int weight() const { return std::accumulate(k.begin(), k.end(), 0); }
    int degree() const {
        int g = 0;
        for (std::size_t i = 0; i < k.size(); ++i) g += static_cast<int>(i) * k[i];
        return g;
    }
    std::string label() const {
        std::string s;
        for (std::size_t i = 0; i < k.size(); ++i) {
            if (i) s += "|";
            if (k[i] == 0)
                s += "1";
            else if (k[i] == 1)
                s += "e";
            else
                s += "e^" + std::to_string(k[i]);
        }
        return s;
    }
    auto operator<=>(const SlotMonomial&) const = default;
};

// All ell-slot monomials of the given weight, grouped by degree, each group
// sorted lexicographically on the exponent tuple.
struct SlotBasis {
    std::map<int, std::vector<SlotMonomial>> by_degree;
    std::map<SlotMonomial, std::pair<int, int>> index;  // monomial -> (degree, position)

    static SlotBasis make(int ell, int weight) {
        SlotBasis b;
        std::vector<int> k(static_cast<std::size_t>(ell), 0);
        enumerate(b, k, 0, weight);
        for (auto& [deg, v] : b.by_degree) {
            std::sort(v.begin(), v.end());
            for (std::size_t p = 0; p < v.size(); ++p)
                b.index[v[p]] = {deg, static_cast<int>(p)};
        }
        return b;
    }

  private:
    static void enumerate(SlotBasis& b, std::vector<int>& k, std::size_t slot, int rest) {
        if (slot + 1 == k.size()) {
            k[slot] = rest;
            SlotMonomial m{k};
            b.by_degree[m.degree()].push_back(m);
            return;
        }
        for (int v = 0; v <= rest; ++v) {
            k[slot] = v;
            enumerate(b, k, slot + 1, rest - v);
        }
    }
};

// Sparse combination of slot monomials of one common weight.
template <class F>
class LineElement {
  public:
    void add(const F& f, const SlotMonomial& m, const typename F::Elem& c) {
        if (!terms_.empty() && terms_.begin()->first.weight() != m.weight())
            throw DomainError("LineElement: mixed weights");
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) it->second = f.add(it->second, c);
        if (f.is_zero(it->second)) terms_.erase(it);
    }
    const std::map<SlotMonomial, typename F::Elem>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

  private:
    std::map<SlotMonomial, typename F::Elem> terms_;
};

// q-exponent of the product (e^{a_1}|e^{a_2}|e^{a_3}) . (e^{b_1}|e^{b_2}|e^{b_3}):
// the leading twist (a_2+a_3)b_1 plus one braiding power per crossing, with the
// calibrated one-variable self-braiding R(e^x (x) e^y) = q^{xy} e^y (x) e^x.
inline long line_q_exponent(const SlotMonomial& a, const SlotMonomial& b) {
    if (a.k.size() != 3 || b.k.size() != 3) throw DomainError("line product: need 3 slots");
    const long a2 = a.k[1], a3 = a.k[2], b1 = b.k[0], b2 = b.k[1];
    return (a2 + a3) * b1 + (a2 * b1 + a3 * b1 + a3 * b2);
}

template <class F>
std::pair<typename F::Elem, SlotMonomial> line_product(const F& f, const SlotMonomial& a,
                                                       const SlotMonomial& b) {
    SlotMonomial prod;
    prod.k.resize(3);
    for (int i = 0; i < 3; ++i) prod.k[i] = a.k[i] + b.k[i];
    return {f.qpow(line_q_exponent(a, b)), prod};
}

// Terms of the slot-move differential on one monomial:
//   delta(e^{k1}|e^{k2}|e^{k3}) = (k1)_{q^2} e^{k1-1}|e^{k2+1}|e^{k3}
//                               + q^{2 k2} (k2)_{q^2} e^{k1}|e^{k2-1}|e^{k3+1}.
template <class F>
std::vector<std::pair<typename F::Elem, SlotMonomial>> slot_delta_terms(const F& f,
                                                                        const SlotMonomial& m) {
    std::vector<std::pair<typename F::Elem, SlotMonomial>> out;
    const typename F::Elem q2 = f.qpow(2);
    if (m.k[0] > 0)
        out.emplace_back(qint(f, m.k[0], q2), SlotMonomial{{m.k[0] - 1, m.k[1] + 1, m.k[2]}});
    if (m.k[1] > 0)
        out.emplace_back(f.mul(f.qpow(2L * m.k[1]), qint(f, m.k[1], q2)),
                         SlotMonomial{{m.k[0], m.k[1] - 1, m.k[2] + 1}});
    return out;
}

// The weight-d piece of the one-variable model with the slot-move differential.
template <class F>
LComplex<F> build_B1(const F& f, int d) {
    if (f.ell() != 3) throw DomainError("build_B1: needs a root of order 3");
    if (d < 0) throw DomainError("build_B1: negative weight");
    LComplex<F> c;
    c.field = f;
    c.ell = 3;
    const SlotBasis basis = SlotBasis::make(3, d);
    for (const auto& [deg, v] : basis.by_degree) {
        std::vector<std::string> labels;
        labels.reserve(v.size());
        for (const auto& m : v) labels.push_back(m.label());
        c.space[deg] = std::move(labels);
    }
    for (const auto& [deg, v] : basis.by_degree) {
        TripletBuilder<F> tb(c.dim_at(deg + 1), c.dim_at(deg));
        for (std::size_t col = 0; col < v.size(); ++col)
            for (const auto& [coeff, t] : slot_delta_terms(f, v[col]))
                tb.add(basis.index.at(t).second, static_cast<int>(col), coeff);
        c.diff[deg] = tb.build(f);
    }
    assert_complex_valid(c, "build_B1");
    return c;
}

// Right multiplication a -> a . (e^{k1}|e^{k2}|e^{k3}) as a degree-0 morphism
// from the shifted source. Does not check that it commutes.
template <class F>
Morphism<F> right_mult_map(const F& f, int d, const SlotMonomial& k) {
    const int t = k.k[1] + 2 * k.k[2];
    Morphism<F> out;
    out.source = shift(build_B1(f, d), t);
    out.target = build_B1(f, d + k.weight());
    out.t = 0;
    const SlotBasis src = SlotBasis::make(3, d);
    const SlotBasis dst = SlotBasis::make(3, d + k.weight());
    for (const auto& [deg, v] : src.by_degree) {
        TripletBuilder<F> tb(out.target.dim_at(deg + t), static_cast<int>(v.size()));
        for (std::size_t col = 0; col < v.size(); ++col) {
            auto [scalar, prod] = line_product(f, v[col], k);
            tb.add(dst.index.at(prod).second, static_cast<int>(col), scalar);
        }
        out.mat[deg + t] = tb.build(f);
    }
    return out;
}

// The injective complex morphism B_d(1)[k2+2k3] -> B_{d+|k|}(1), a -> a.e^k,
// defined when 3 | k1 and 3 | k2 (the factor is then a delta-cycle).
template <class F>
Morphism<F> embed(const F& f, int d, const SlotMonomial& k) {
    if (k.k.size() != 3) throw PreconditionError("embed: need 3 slots");
    if (k.k[0] % 3 != 0 || k.k[1] % 3 != 0)
        throw PreconditionError("embed: 3 must divide the first two exponents");
    Morphism<F> out = right_mult_map(f, d, k);
    if (!morphism_commutes(out))
        throw InvariantError("embed: morphism fails to commute with differentials");
    return out;
}

}  // namespace qtx
