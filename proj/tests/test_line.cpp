#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qtx/field.hpp"
#include "qtx/line.hpp"

#include "oracle.hpp"

using namespace qtx;
using F = CycloField;

namespace {

SlotMonomial mono(int a, int b, int c) { return SlotMonomial{{a, b, c}}; }

// The slot-move differential on a single monomial, written straight from its
// closed form. Used as the reference for the matrix assembly and as one side
// of the Leibniz checks.
LineElement<F> delta_monomial(const F& f, const SlotMonomial& m) {
    LineElement<F> out;
    const auto q2 = f.qpow(2);
    if (m.k[0] > 0) out.add(f, mono(m.k[0] - 1, m.k[1] + 1, m.k[2]), qint(f, m.k[0], q2));
    if (m.k[1] > 0)
        out.add(f, mono(m.k[0], m.k[1] - 1, m.k[2] + 1),
                f.mul(f.qpow(2L * m.k[1]), qint(f, m.k[1], q2)));
    return out;
}

LineElement<F> mul_elem_mono(const F& f, const LineElement<F>& a, const SlotMonomial& b) {
    LineElement<F> out;
    for (const auto& [m, c] : a.terms()) {
        auto [s, p] = line_product(f, m, b);
        out.add(f, p, f.mul(c, s));
    }
    return out;
}

LineElement<F> mul_mono_elem(const F& f, const SlotMonomial& a, const LineElement<F>& b) {
    LineElement<F> out;
    for (const auto& [m, c] : b.terms()) {
        auto [s, p] = line_product(f, a, m);
        out.add(f, p, f.mul(c, s));
    }
    return out;
}

bool elem_eq(const F& f, const LineElement<F>& a, const LineElement<F>& b) {
    if (a.terms().size() != b.terms().size()) return false;
    for (const auto& [m, c] : a.terms()) {
        auto it = b.terms().find(m);
        if (it == b.terms().end() || !f.eq(c, it->second)) return false;
    }
    return true;
}

std::vector<SlotMonomial> monomials_of_weight(int w) {
    std::vector<SlotMonomial> out;
    for (int a = 0; a <= w; ++a)
        for (int b = 0; b + a <= w; ++b) out.push_back(mono(a, b, w - a - b));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("monomial weight, degree, label, ordering") {
    auto m = mono(2, 0, 1);
    CHECK(m.weight() == 3);
    CHECK(m.degree() == 2);
    CHECK(m.label() == "e^2|1|e");
    CHECK(mono(1, 2, 0) < mono(2, 0, 1));
    CHECK(mono(0, 0, 0).label() == "1|1|1");
}

TEST_CASE("build_B1(1) is the three-term complex with the recorded arrows") {
    F f(3);
    auto c = build_B1(f, 1);
    CHECK(c.dim_at(0) == 1);
    CHECK(c.dim_at(1) == 1);
    CHECK(c.dim_at(2) == 1);
    // delta(e|1|1) = 1|e|1 and delta(1|e|1) = q^2 1|1|e
    CHECK(f.eq(c.diff_at(0).row[0][0].second, f.one()));
    CHECK(f.eq(c.diff_at(1).row[0][0].second, f.qpow(2)));
    CHECK(classify(c).cls == HomologyTable::Class::Acyclic);
}

TEST_CASE("delta kills e^3|1|1 and exactly the doubly-divisible monomials") {
    F f(3);
    CHECK(delta_monomial(f, mono(3, 0, 0)).is_zero());
    for (int w = 0; w <= 8; ++w)
        for (const auto& m : monomials_of_weight(w)) {
            const bool killed = delta_monomial(f, m).is_zero();
            CHECK(killed == (m.k[0] % 3 == 0 && m.k[1] % 3 == 0));
        }
}

TEST_CASE("build_B1 matrices agree with the per-monomial differential") {
    F f(3);
    for (int d = 0; d <= 6; ++d) {
        auto c = build_B1(f, d);
        const SlotBasis basis = SlotBasis::make(3, d);
        for (const auto& [deg, v] : basis.by_degree) {
            auto m = c.diff_at(deg);
            for (std::size_t col = 0; col < v.size(); ++col) {
                LineElement<F> expect = delta_monomial(f, v[col]);
                LineElement<F> got;
                for (int r = 0; r < m.rows; ++r)
                    for (const auto& [cc, val] : m.row[r])
                        if (cc == static_cast<int>(col))
                            got.add(f, basis.by_degree.at(deg + 1)[r], val);
                CHECK(elem_eq(f, got, expect));
            }
        }
    }
}

TEST_CASE("graded dimensions count 3-part compositions") {
    F f(3);
    for (int d = 0; d <= 10; ++d) {
        auto c = build_B1(f, d);
        CHECK(c.total_dim() == (d + 1) * (d + 2) / 2);
        long by_deg = 0;
        for (int g = 0; g <= 2 * d; ++g) by_deg += c.dim_at(g);
        CHECK(by_deg == c.total_dim());
    }
    auto c3 = build_B1(f, 3);
    const int expect[] = {1, 1, 2, 2, 2, 1, 1};
    for (int g = 0; g <= 6; ++g) CHECK(c3.dim_at(g) == expect[g]);
}

TEST_CASE("line product: unit, squares, and the calibrated crossing scalar") {
    F f(3);
    auto [s0, p0] = line_product(f, mono(0, 0, 0), mono(2, 1, 0));
    CHECK(f.eq(s0, f.one()));
    CHECK(p0 == mono(2, 1, 0));
    auto [s1, p1] = line_product(f, mono(1, 0, 0), mono(1, 0, 0));
    CHECK(f.eq(s1, f.one()));
    CHECK(p1 == mono(2, 0, 0));
    // moving e|1|1 leftward past 1|1|e costs exactly q^2
    auto [s2, p2] = line_product(f, mono(0, 0, 1), mono(1, 0, 0));
    CHECK(f.eq(s2, f.qpow(2)));
    CHECK(p2 == mono(1, 0, 1));
}

TEST_CASE("line product is associative and unital for total weight <= 9") {
    F f(3);
    for (int wa = 0; wa <= 3; ++wa)
        for (int wb = 0; wb <= 3; ++wb)
            for (int wc = 0; wc <= 3; ++wc) {
                if (wa + wb + wc > 9) continue;
                for (const auto& a : monomials_of_weight(wa))
                    for (const auto& b : monomials_of_weight(wb))
                        for (const auto& c : monomials_of_weight(wc)) {
                            auto [sab, ab] = line_product(f, a, b);
                            auto [sl, l] = line_product(f, ab, c);
                            auto [sbc, bc] = line_product(f, b, c);
                            auto [sr, r] = line_product(f, a, bc);
                            CHECK(l == r);
                            CHECK(f.eq(f.mul(sab, sl), f.mul(sbc, sr)));
                        }
            }
}

TEST_CASE("twisted Leibniz rule for all monomial pairs of total weight <= 10") {
    F f(3);
    for (int wa = 0; wa <= 10; ++wa)
        for (int wb = 0; wa + wb <= 10; ++wb)
            for (const auto& a : monomials_of_weight(wa))
                for (const auto& b : monomials_of_weight(wb)) {
                    auto [sab, ab] = line_product(f, a, b);
                    const LineElement<F> d_ab = delta_monomial(f, ab);
                    LineElement<F> lhs;
                    for (const auto& [m, c] : d_ab.terms()) lhs.add(f, m, f.mul(sab, c));
                    LineElement<F> rhs = mul_elem_mono(f, delta_monomial(f, a), b);
                    const auto twist = f.qpow(2L * a.k[1] + 4L * a.k[2]);
                    const LineElement<F> a_db = mul_mono_elem(f, a, delta_monomial(f, b));
                    for (const auto& [m, c] : a_db.terms()) rhs.add(f, m, f.mul(twist, c));
                    CHECK(elem_eq(f, lhs, rhs));
                }
}

TEST_CASE("embeddings are injective complex morphisms") {
    F f(3);
    // right multiplication by 1|1|e, 1|1|e^2, e^3|1|1
    for (int d : {1, 2, 3, 4, 5}) {
        auto psi = embed(f, d, mono(0, 0, 1));
        CHECK(morphism_commutes(psi));
        CHECK(morphism_injective(psi));
        CHECK(psi.source.dim_at(2) == psi.source.dim_at(2));
    }
    auto psi2 = embed(f, 3, mono(0, 0, 2));
    CHECK(morphism_commutes(psi2));
    CHECK(morphism_injective(psi2));
    auto psi3 = embed(f, 1, mono(3, 0, 0));  // the weight-3 left factor
    CHECK(morphism_commutes(psi3));
    CHECK(morphism_injective(psi3));
}

TEST_CASE("embedding preconditions: 3 must divide the first two exponents") {
    F f(3);
    CHECK_THROWS_AS(embed(f, 2, mono(1, 0, 0)), PreconditionError);
    CHECK_THROWS_AS(embed(f, 2, mono(0, 2, 0)), PreconditionError);
    CHECK_NOTHROW(embed(f, 2, mono(0, 3, 1)));
}

TEST_CASE("right multiplication by 1|e|e does not commute before quotienting") {
    F f(3);
    auto m = right_mult_map(f, 2, mono(0, 1, 1));
    CHECK_FALSE(morphism_commutes(m));
}

TEST_CASE("LineElement refuses mixed weights and drops cancelled terms") {
    F f(3);
    LineElement<F> x;
    x.add(f, mono(1, 0, 0), f.one());
    CHECK_THROWS_AS(x.add(f, mono(1, 1, 0), f.one()), DomainError);
    x.add(f, mono(1, 0, 0), f.neg(f.one()));
    CHECK(x.is_zero());
}
