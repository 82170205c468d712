#pragma once

#include <algorithm>
#include <tuple>
#include <utility>
#include <vector>

#include "qtx/errors.hpp"

namespace qtx {

// Row-major sparse matrix over an exact field. Rows hold (col, value) pairs
// sorted by column; zero values are never stored.
template <class F>
struct SparseMat {
    using Elem = typename F::Elem;
    int rows = 0;
    int cols = 0;
    std::vector<std::vector<std::pair<int, Elem>>> row;

    SparseMat() = default;
    SparseMat(int r, int c) : rows(r), cols(c), row(static_cast<std::size_t>(r)) {}

    bool empty_shape() const { return rows == 0 || cols == 0; }
};

template <class F>
class TripletBuilder {
  public:
    TripletBuilder(int rows, int cols) : rows_(rows), cols_(cols) {}

    void add(int r, int c, typename F::Elem v) {
        entries_.emplace_back(r, c, std::move(v));
    }

    SparseMat<F> build(const F& f) {
        SparseMat<F> m(rows_, cols_);
        std::sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) {
            return std::tie(std::get<0>(a), std::get<1>(a)) <
                   std::tie(std::get<0>(b), std::get<1>(b));
        });
        for (std::size_t i = 0; i < entries_.size();) {
            const int r = std::get<0>(entries_[i]);
            const int c = std::get<1>(entries_[i]);
            typename F::Elem acc = std::get<2>(entries_[i]);
            std::size_t j = i + 1;
            while (j < entries_.size() && std::get<0>(entries_[j]) == r &&
                   std::get<1>(entries_[j]) == c) {
                acc = f.add(acc, std::get<2>(entries_[j]));
                ++j;
            }
            if (!f.is_zero(acc)) m.row[r].emplace_back(c, std::move(acc));
            i = j;
        }
        return m;
    }

  private:
    int rows_, cols_;
    std::vector<std::tuple<int, int, typename F::Elem>> entries_;
};

template <class F>
bool is_zero_mat(const F& f, const SparseMat<F>& m) {
    (void)f;
    for (const auto& r : m.row)
        if (!r.empty()) return false;
    return true;
}

template <class F>
bool mat_eq(const F& f, const SparseMat<F>& a, const SparseMat<F>& b) {
    if (a.rows != b.rows || a.cols != b.cols) return false;
    for (int i = 0; i < a.rows; ++i) {
        if (a.row[i].size() != b.row[i].size()) return false;
        for (std::size_t k = 0; k < a.row[i].size(); ++k) {
            if (a.row[i][k].first != b.row[i][k].first) return false;
            if (!f.eq(a.row[i][k].second, b.row[i][k].second)) return false;
        }
    }
    return true;
}

template <class F>
SparseMat<F> identity_mat(const F& f, int n) {
    SparseMat<F> m(n, n);
    for (int i = 0; i < n; ++i) m.row[i].emplace_back(i, f.one());
    return m;
}

template <class F>
SparseMat<F> mat_add(const F& f, const SparseMat<F>& a, const SparseMat<F>& b) {
    if (a.rows != b.rows || a.cols != b.cols) throw DomainError("mat_add: shape mismatch");
    TripletBuilder<F> tb(a.rows, a.cols);
    for (int i = 0; i < a.rows; ++i) {
        for (const auto& [c, v] : a.row[i]) tb.add(i, c, v);
        for (const auto& [c, v] : b.row[i]) tb.add(i, c, v);
    }
    return tb.build(f);
}

template <class F>
SparseMat<F> mat_scale(const F& f, const typename F::Elem& s, const SparseMat<F>& a) {
    SparseMat<F> m(a.rows, a.cols);
    if (f.is_zero(s)) return m;
    for (int i = 0; i < a.rows; ++i)
        for (const auto& [c, v] : a.row[i]) m.row[i].emplace_back(c, f.mul(s, v));
    return m;
}

// a * b with a: m x k, b: k x n.
template <class F>
SparseMat<F> mat_mul(const F& f, const SparseMat<F>& a, const SparseMat<F>& b) {
    if (a.cols != b.rows) throw DomainError("mat_mul: shape mismatch");
    SparseMat<F> m(a.rows, b.cols);
    std::vector<typename F::Elem> scratch(static_cast<std::size_t>(b.cols), f.zero());
    std::vector<int> touched;
    for (int i = 0; i < a.rows; ++i) {
        touched.clear();
        for (const auto& [k, av] : a.row[i]) {
            for (const auto& [c, bv] : b.row[k]) {
                if (f.is_zero(scratch[c])) touched.push_back(c);
                scratch[c] = f.add(scratch[c], f.mul(av, bv));
            }
        }
        std::sort(touched.begin(), touched.end());
        for (int c : touched) {
            if (!f.is_zero(scratch[c])) m.row[i].emplace_back(c, scratch[c]);
            scratch[c] = f.zero();
        }
    }
    return m;
}

template <class F>
SparseMat<F> mat_transpose(const F&, const SparseMat<F>& a) {
    SparseMat<F> m(a.cols, a.rows);
    for (int i = 0; i < a.rows; ++i)
        for (const auto& [c, v] : a.row[i]) m.row[c].emplace_back(i, v);
    return m;
}

// Dense working form for elimination. Blocks are small once complexes are
// split by conserved weight, so dense exact elimination is the simple choice.
template <class F>
using DenseMat = std::vector<std::vector<typename F::Elem>>;

template <class F>
DenseMat<F> to_dense(const F& f, const SparseMat<F>& a) {
    DenseMat<F> d(static_cast<std::size_t>(a.rows),
                  std::vector<typename F::Elem>(static_cast<std::size_t>(a.cols), f.zero()));
    for (int i = 0; i < a.rows; ++i)
        for (const auto& [c, v] : a.row[i]) d[i][c] = v;
    return d;
}

// In-place reduced row echelon form. Returns pivot columns in order.
template <class F>
std::vector<int> rref_inplace(const F& f, DenseMat<F>& m) {
    std::vector<int> pivots;
    if (m.empty()) return pivots;
    const int rows = static_cast<int>(m.size());
    const int cols = static_cast<int>(m[0].size());
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int pr = -1;
        for (int i = r; i < rows; ++i) {
            if (!f.is_zero(m[i][c])) {
                pr = i;
                break;
            }
        }
        if (pr < 0) continue;
        std::swap(m[r], m[pr]);
        const typename F::Elem scale = f.inv(m[r][c]);
        for (int j = c; j < cols; ++j) m[r][j] = f.mul(scale, m[r][j]);
        for (int i = 0; i < rows; ++i) {
            if (i == r || f.is_zero(m[i][c])) continue;
            const typename F::Elem coeff = m[i][c];
            for (int j = c; j < cols; ++j)
                m[i][j] = f.sub(m[i][j], f.mul(coeff, m[r][j]));
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

template <class F>
int rank(const F& f, const SparseMat<F>& a) {
    if (a.empty_shape()) return 0;
    DenseMat<F> d = to_dense(f, a);
    return static_cast<int>(rref_inplace(f, d).size());
}

// Basis of the right null space, one dense column per basis vector.
template <class F>
std::vector<std::vector<typename F::Elem>> kernel_basis(const F& f, const SparseMat<F>& a) {
    std::vector<std::vector<typename F::Elem>> basis;
    if (a.cols == 0) return basis;
    if (a.rows == 0) {
        for (int j = 0; j < a.cols; ++j) {
            std::vector<typename F::Elem> v(static_cast<std::size_t>(a.cols), f.zero());
            v[j] = f.one();
            basis.push_back(std::move(v));
        }
        return basis;
    }
    DenseMat<F> d = to_dense(f, a);
    const std::vector<int> pivots = rref_inplace(f, d);
    std::vector<int> pivot_of_col(static_cast<std::size_t>(a.cols), -1);
    for (std::size_t k = 0; k < pivots.size(); ++k) pivot_of_col[pivots[k]] = static_cast<int>(k);
    for (int j = 0; j < a.cols; ++j) {
        if (pivot_of_col[j] >= 0) continue;
        std::vector<typename F::Elem> v(static_cast<std::size_t>(a.cols), f.zero());
        v[j] = f.one();
        for (std::size_t k = 0; k < pivots.size(); ++k)
            v[pivots[k]] = f.neg(d[k][j]);
        basis.push_back(std::move(v));
    }
    return basis;
}

// Column-echelon data for an injective matrix: a basis of the column space
// with distinct unit pivot rows, plus the complementary ("free") rows that
// index a basis of the cokernel.
template <class F>
struct ColumnEchelon {
    std::vector<std::pair<int, int>> pivots;  // (pivot row, echelon column index)
    DenseMat<F> cols;                         // echelonized columns, indexed [j][row]
    std::vector<int> free_rows;
    int rows = 0;

    // v - (combination of columns) so that all pivot rows vanish. The result,
    // restricted to free_rows, is the class of v in the cokernel.
    std::vector<typename F::Elem> reduce(const F& f, std::vector<typename F::Elem> v) const {
        for (const auto& [pr, j] : pivots) {
            if (f.is_zero(v[pr])) continue;
            const typename F::Elem coeff = v[pr];
            for (int i = 0; i < rows; ++i) {
                if (f.is_zero(cols[j][i])) continue;
                v[i] = f.sub(v[i], f.mul(coeff, cols[j][i]));
            }
        }
        return v;
    }
};

// Echelonize the columns of m (column operations only, so the span is kept).
// Throws NotInjectiveError if the columns are dependent.
template <class F>
ColumnEchelon<F> column_echelon(const F& f, const SparseMat<F>& m) {
    ColumnEchelon<F> ce;
    ce.rows = m.rows;
    DenseMat<F> cols(static_cast<std::size_t>(m.cols),
                     std::vector<typename F::Elem>(static_cast<std::size_t>(m.rows), f.zero()));
    for (int i = 0; i < m.rows; ++i)
        for (const auto& [c, v] : m.row[i]) cols[c][i] = v;

    std::vector<bool> row_used(static_cast<std::size_t>(m.rows), false);
    for (int j = 0; j < m.cols; ++j) {
        // eliminate previously fixed pivot rows from this column
        for (const auto& [pr, pj] : ce.pivots) {
            if (f.is_zero(cols[j][pr])) continue;
            const typename F::Elem coeff = cols[j][pr];
            for (int i = 0; i < m.rows; ++i)
                cols[j][i] = f.sub(cols[j][i], f.mul(coeff, cols[pj][i]));
        }
        int pr = -1;
        for (int i = 0; i < m.rows; ++i) {
            if (!row_used[i] && !f.is_zero(cols[j][i])) {
                pr = i;
                break;
            }
        }
        if (pr < 0) throw NotInjectiveError("column_echelon: columns are linearly dependent");
        const typename F::Elem scale = f.inv(cols[j][pr]);
        for (int i = 0; i < m.rows; ++i) cols[j][i] = f.mul(scale, cols[j][i]);
        row_used[pr] = true;
        ce.pivots.emplace_back(pr, j);
    }
    for (int i = 0; i < m.rows; ++i)
        if (!row_used[i]) ce.free_rows.push_back(i);
    ce.cols = std::move(cols);
    return ce;
}

// Do the columns of a and b span the same subspace?
template <class F>
bool same_column_span(const F& f, const SparseMat<F>& a, const SparseMat<F>& b) {
    if (a.rows != b.rows) return false;
    SparseMat<F> joint(a.rows, a.cols + b.cols);
    for (int i = 0; i < a.rows; ++i) {
        joint.row[i] = a.row[i];
        for (const auto& [c, v] : b.row[i]) joint.row[i].emplace_back(c + a.cols, v);
    }
    const int ra = rank(f, a);
    const int rb = rank(f, b);
    return ra == rb && rank(f, joint) == ra;
}

template <class F>
SparseMat<F> columns_to_sparse(const F& f, int rows,
                               const std::vector<std::vector<typename F::Elem>>& cols) {
    SparseMat<F> m(rows, static_cast<int>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (int i = 0; i < rows; ++i)
            if (!f.is_zero(cols[j][i])) m.row[i].emplace_back(static_cast<int>(j), cols[j][i]);
    return m;
}

}  // namespace qtx
