#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qtx/field.hpp"
#include "qtx/ncomplex.hpp"
#include "qtx/sparse.hpp"

#include "oracle.hpp"

using namespace qtx;

namespace {

// Deterministic pseudo-random entries: a fixed linear-congruential walk.
struct Lcg {
    std::uint64_t state = 0x2545F4914F6CDD1Dull;
    std::uint64_t next() {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return state >> 33;
    }
};

template <class F>
SparseMat<F> random_mat(const F& f, Lcg& g, int rows, int cols, int fill_percent) {
    TripletBuilder<F> tb(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            if (static_cast<int>(g.next() % 100) >= fill_percent) continue;
            const long c = static_cast<long>(g.next() % 5) - 2;
            const long e = static_cast<long>(g.next() % 3);
            tb.add(i, j, f.mul(f.from_int(c), f.qpow(e)));
        }
    return tb.build(f);
}

}  // namespace

TEST_CASE("builder merges duplicates and drops zeros") {
    CycloField f(3);
    TripletBuilder<CycloField> tb(2, 2);
    tb.add(0, 0, f.one());
    tb.add(0, 0, f.neg(f.one()));
    tb.add(1, 1, f.q());
    auto m = tb.build(f);
    CHECK(m.row[0].empty());
    CHECK(m.row[1].size() == 1);
}

TEST_CASE("rank agrees with the dense oracle on a grid of matrices") {
    CycloField f(3);
    Lcg g;
    for (int trial = 0; trial < 25; ++trial) {
        const int rows = 1 + static_cast<int>(g.next() % 8);
        const int cols = 1 + static_cast<int>(g.next() % 8);
        auto m = random_mat(f, g, rows, cols, 40);
        CHECK(rank(f, m) ==
              qtx_test::dense_rank_oracle(f, qtx_test::dense_from_sparse_oracle(f, m)));
    }
}

TEST_CASE("rank over a prime field matches the cyclotomic rank for q-power matrices") {
    CycloField fc(3);
    PrimeField fp(7, 3);
    Lcg g;
    for (int trial = 0; trial < 10; ++trial) {
        const int rows = 2 + static_cast<int>(g.next() % 6);
        const int cols = 2 + static_cast<int>(g.next() % 6);
        TripletBuilder<CycloField> tc(rows, cols);
        TripletBuilder<PrimeField> tp(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) {
                if (g.next() % 100 >= 35) continue;
                const long e = static_cast<long>(g.next() % 3);
                tc.add(i, j, fc.qpow(e));
                tp.add(i, j, fp.qpow(e));
            }
        CHECK(rank(fc, tc.build(fc)) == rank(fp, tp.build(fp)));
    }
}

TEST_CASE("kernel basis spans the null space exactly") {
    CycloField f(3);
    Lcg g;
    for (int trial = 0; trial < 15; ++trial) {
        const int rows = 1 + static_cast<int>(g.next() % 6);
        const int cols = 1 + static_cast<int>(g.next() % 6);
        auto m = random_mat(f, g, rows, cols, 45);
        auto basis = kernel_basis(f, m);
        CHECK(static_cast<int>(basis.size()) == m.cols - rank(f, m));
        if (!basis.empty()) {
            auto k = columns_to_sparse(f, m.cols, basis);
            CHECK(is_zero_mat(f, mat_mul(f, m, k)));
            CHECK(rank(f, k) == static_cast<int>(basis.size()));
        }
    }
}

TEST_CASE("matrix product matches a direct dense computation") {
    CycloField f(3);
    Lcg g;
    auto a = random_mat(f, g, 5, 4, 50);
    auto b = random_mat(f, g, 4, 6, 50);
    auto ab = mat_mul(f, a, b);
    auto da = qtx_test::dense_from_sparse_oracle(f, a);
    auto db = qtx_test::dense_from_sparse_oracle(f, b);
    auto dab = qtx_test::dense_from_sparse_oracle(f, ab);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 6; ++j) {
            auto acc = f.zero();
            for (int k = 0; k < 4; ++k) acc = f.add(acc, f.mul(da[i][k], db[k][j]));
            CHECK(f.eq(acc, dab[i][j]));
        }
}

TEST_CASE("column echelon reduces vectors into the cokernel complement") {
    CycloField f(3);
    // columns (1, q, 0) and (0, 1, 1) in K^3
    TripletBuilder<CycloField> tb(3, 2);
    tb.add(0, 0, f.one());
    tb.add(1, 0, f.q());
    tb.add(1, 1, f.one());
    tb.add(2, 1, f.one());
    auto m = tb.build(f);
    auto ce = column_echelon(f, m);
    CHECK(ce.pivots.size() == 2);
    CHECK(ce.free_rows.size() == 1);
    for (int j = 0; j < 2; ++j) {
        std::vector<CycloField::Elem> v(3, f.zero());
        for (int i = 0; i < m.rows; ++i)
            for (const auto& [c, val] : m.row[i])
                if (c == j) v[i] = val;
        auto red = ce.reduce(f, v);
        for (const auto& e : red) CHECK(f.is_zero(e));
    }
}

TEST_CASE("column echelon rejects dependent columns") {
    CycloField f(3);
    TripletBuilder<CycloField> tb(2, 2);
    tb.add(0, 0, f.one());
    tb.add(0, 1, f.q());
    auto m = tb.build(f);
    CHECK_THROWS_AS(column_echelon(f, m), NotInjectiveError);
}

TEST_CASE("same_column_span") {
    CycloField f(3);
    TripletBuilder<CycloField> ta(3, 1), tb(3, 1), tc(3, 2);
    ta.add(0, 0, f.one());
    ta.add(1, 0, f.one());
    tb.add(0, 0, f.q());
    tb.add(1, 0, f.q());
    tc.add(0, 0, f.one());
    tc.add(1, 1, f.one());
    CHECK(same_column_span(f, ta.build(f), tb.build(f)));
    CHECK_FALSE(same_column_span(f, ta.build(f), tc.build(f)));
}
