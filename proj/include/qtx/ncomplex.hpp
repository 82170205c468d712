#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qtx/errors.hpp"
#include "qtx/pool.hpp"
#include "qtx/sparse.hpp"

namespace qtx {

// Ordered named basis per cohomological degree. Only finitely many degrees
// are present; absent degrees are zero spaces.
using GradedSpace = std::map<int, std::vector<std::string>>;

struct HomologyTable {
    enum class Class { Acyclic, Coresolution, Other };
    int ell = 0;
    std::map<std::pair<int, int>, long> entries;  // (i, s) -> dim H^i_[s]
    Class cls = Class::Acyclic;
    long h0 = 0;  // common degree-0 dimension when cls == Coresolution

    long at(int i, int s) const {
        auto it = entries.find({i, s});
        return it == entries.end() ? 0 : it->second;
    }
    static const char* class_name(Class c) {
        switch (c) {
            case Class::Acyclic: return "acyclic";
            case Class::Coresolution: return "coresolution";
            default: return "other";
        }
    }
    const char* class_name() const { return class_name(cls); }
};

// Graded space with a degree-1 differential delta satisfying delta^ell = 0.
// diff[i] maps C^i to C^{i+1}; columns index the degree-i basis.
// sectors, when present, tag each basis element with a conserved class; the
// differential never crosses sectors, so ranks split blockwise.
template <class F>
struct LComplex {
    F field;
    int ell = 0;
    GradedSpace space;
    std::map<int, std::vector<std::string>> sectors;
    std::map<int, SparseMat<F>> diff;

    int dim_at(int i) const {
        auto it = space.find(i);
        return it == space.end() ? 0 : static_cast<int>(it->second.size());
    }
    int top_degree() const {
        int top = -1;
        for (const auto& [i, labels] : space)
            if (!labels.empty()) top = std::max(top, i);
        return top;
    }
    long total_dim() const {
        long n = 0;
        for (const auto& [i, labels] : space) n += static_cast<long>(labels.size());
        return n;
    }
    SparseMat<F> diff_at(int i) const {
        auto it = diff.find(i);
        if (it != diff.end()) return it->second;
        return SparseMat<F>(dim_at(i + 1), dim_at(i));
    }
    bool has_sectors() const { return !sectors.empty(); }
};

template <class F>
bool complex_eq(const LComplex<F>& a, const LComplex<F>& b) {
    if (a.ell != b.ell || a.space != b.space) return false;
    const int top = a.top_degree();
    for (int i = 0; i <= top; ++i)
        if (!mat_eq(a.field, a.diff_at(i), b.diff_at(i))) return false;
    return true;
}

// delta^s as a matrix C^i -> C^{i+s}; s = 0 gives the identity.
template <class F>
SparseMat<F> delta_power(const LComplex<F>& c, int s, int i) {
    if (s == 0) return identity_mat(c.field, c.dim_at(i));
    SparseMat<F> m = c.diff_at(i);
    for (int k = 1; k < s; ++k) m = mat_mul(c.field, c.diff_at(i + k), m);
    return m;
}

template <class F>
bool check_nilpotency(const LComplex<F>& c) {
    const int top = c.top_degree();
    for (int i = 0; i <= top; ++i) {
        if (c.dim_at(i) == 0) continue;
        if (!is_zero_mat(c.field, delta_power(c, c.ell, i))) return false;
    }
    return true;
}

template <class F>
void assert_complex_valid(const LComplex<F>& c, const std::string& what) {
    const int top = c.top_degree();
    for (int i = 0; i <= top; ++i) {
        const SparseMat<F> d = c.diff_at(i);
        if (d.cols != c.dim_at(i) || d.rows != c.dim_at(i + 1))
            throw InvariantError(what + ": differential shape mismatch at degree " +
                                 std::to_string(i));
        if (c.has_sectors()) {
            auto si = c.sectors.find(i);
            auto st = c.sectors.find(i + 1);
            for (int r = 0; r < d.rows; ++r)
                for (const auto& [col, v] : d.row[r]) {
                    (void)v;
                    if (st->second[r] != si->second[col])
                        throw InvariantError(what + ": differential crosses sectors at degree " +
                                             std::to_string(i));
                }
        }
    }
    if (!check_nilpotency(c))
        throw InvariantError(what + ": delta^" + std::to_string(c.ell) + " != 0");
}

namespace detail {

// Rank of delta^s restricted to one sector's columns (rows follow suit).
template <class F>
int sector_rank(const LComplex<F>& c, int s, int i) {
    const SparseMat<F> m = delta_power(c, s, i);
    if (!c.has_sectors() || m.empty_shape()) return rank(c.field, m);
    auto src = c.sectors.find(i);
    auto dst = c.sectors.find(i + s);
    if (src == c.sectors.end() || dst == c.sectors.end()) return rank(c.field, m);

    std::map<std::string, std::vector<int>> src_by, dst_by;
    for (int j = 0; j < m.cols; ++j) src_by[src->second[j]].push_back(j);
    for (int r = 0; r < m.rows; ++r) dst_by[dst->second[r]].push_back(r);

    int total = 0;
    for (const auto& [key, cols] : src_by) {
        auto dit = dst_by.find(key);
        if (dit == dst_by.end()) continue;
        std::map<int, int> col_pos, row_pos;
        for (std::size_t k = 0; k < cols.size(); ++k) col_pos[cols[k]] = static_cast<int>(k);
        for (std::size_t k = 0; k < dit->second.size(); ++k)
            row_pos[dit->second[k]] = static_cast<int>(k);
        SparseMat<F> sub(static_cast<int>(dit->second.size()), static_cast<int>(cols.size()));
        for (int r : dit->second)
            for (const auto& [col, v] : m.row[r]) sub.row[row_pos[r]].emplace_back(col_pos[col], v);
        total += rank(c.field, sub);
    }
    return total;
}

}  // namespace detail

// dim H^i_[s] = dim ker(delta^s : C^i -> C^{i+s}) - rank(delta^{ell-s} into C^i).
template <class F>
long homology(const LComplex<F>& c, int s, int i) {
    if (s < 1 || s >= c.ell) throw DomainError("homology: s must satisfy 1 <= s <= ell-1");
    if (i < 0) return 0;
    const int di = c.dim_at(i);
    if (di == 0) return 0;
    const int rk_s = detail::sector_rank(c, s, i);
    const long ker = static_cast<long>(di) - rk_s;  // rank-nullity audit, by construction
    long im = 0;
    const int j = i - (c.ell - s);
    if (j >= 0 && c.dim_at(j) > 0) im = detail::sector_rank(c, c.ell - s, j);
    const long h = ker - im;
    if (h < 0) throw InvariantError("homology: negative dimension (is delta^ell = 0?)");
    return h;
}

// Columns span ker(delta^s : C^i -> C^{i+s}).
template <class F>
SparseMat<F> kernel_at(const LComplex<F>& c, int s, int i) {
    const SparseMat<F> m = delta_power(c, s, i);
    return columns_to_sparse(c.field, c.dim_at(i), kernel_basis(c.field, m));
}

template <class F>
HomologyTable classify(const LComplex<F>& c, int jobs = 1) {
    HomologyTable table;
    table.ell = c.ell;
    const int top = c.top_degree();
    std::vector<std::pair<int, int>> tasks;
    for (int s = 1; s <= c.ell - 1; ++s)
        for (int i = 0; i <= top; ++i) tasks.emplace_back(i, s);
    std::vector<long> dims(tasks.size(), 0);
    parallel_for(jobs, tasks.size(),
                 [&](std::size_t k) { dims[k] = homology(c, tasks[k].second, tasks[k].first); });
    for (std::size_t k = 0; k < tasks.size(); ++k) table.entries[tasks[k]] = dims[k];

    bool all_zero = true, positive_zero_row = true, higher_zero = true;
    long h0 = -1;
    for (int s = 1; s <= c.ell - 1; ++s) {
        const long v = table.at(0, s);
        if (h0 < 0) h0 = v;
        if (v != h0 || v <= 0) positive_zero_row = false;
        if (v != 0) all_zero = false;
        for (int i = 1; i <= top; ++i) {
            if (table.at(i, s) != 0) {
                all_zero = false;
                higher_zero = false;
            }
        }
    }
    if (top < 0 || all_zero) {
        table.cls = HomologyTable::Class::Acyclic;
    } else if (higher_zero && positive_zero_row) {
        table.cls = HomologyTable::Class::Coresolution;
        table.h0 = h0;
    } else {
        table.cls = HomologyTable::Class::Other;
    }
    return table;
}

template <class F>
LComplex<F> shift(const LComplex<F>& c, int t) {
    if (t < 0) throw DomainError("shift: negative shift");
    LComplex<F> out;
    out.field = c.field;
    out.ell = c.ell;
    for (const auto& [i, labels] : c.space) out.space[i + t] = labels;
    for (const auto& [i, sec] : c.sectors) out.sectors[i + t] = sec;
    for (const auto& [i, m] : c.diff) out.diff[i + t] = m;
    return out;
}

// Twisted tensor product: on C^i (x) D^j the differential is
// d_C (x) 1 + q^{2i} (1 (x) d_D), with i the degree of the left factor.
template <class F>
LComplex<F> tensor(const LComplex<F>& c, const LComplex<F>& d) {
    if (c.ell != d.ell) throw IncompatibleError("tensor: mismatched ell");
    if (c.field.spec().str() != d.field.spec().str() || c.field.ell() != d.field.ell())
        throw IncompatibleError("tensor: mismatched coefficient field");
    const F& f = c.field;
    LComplex<F> out;
    out.field = f;
    out.ell = c.ell;

    const int topc = c.top_degree(), topd = d.top_degree();
    if (topc < 0 || topd < 0) return out;  // zero complex

    const bool with_sectors = c.has_sectors() && d.has_sectors();
    // offset[k][i] = first index of block C^i (x) D^{k-i} inside degree k
    std::map<int, std::map<int, int>> offset;
    for (int k = 0; k <= topc + topd; ++k) {
        std::vector<std::string> labels, secs;
        for (int i = std::max(0, k - topd); i <= std::min(k, topc); ++i) {
            const int j = k - i;
            const int ci = c.dim_at(i), dj = d.dim_at(j);
            if (ci == 0 || dj == 0) continue;
            offset[k][i] = static_cast<int>(labels.size());
            for (int a = 0; a < ci; ++a)
                for (int b = 0; b < dj; ++b) {
                    labels.push_back(c.space.at(i)[a] + " (x) " + d.space.at(j)[b]);
                    if (with_sectors)
                        secs.push_back(c.sectors.at(i)[a] + "&" + d.sectors.at(j)[b]);
                }
        }
        if (!labels.empty()) {
            out.space[k] = std::move(labels);
            if (with_sectors) out.sectors[k] = std::move(secs);
        }
    }

    for (int k = 0; k <= topc + topd; ++k) {
        const int dim_k = out.dim_at(k), dim_k1 = out.dim_at(k + 1);
        if (dim_k == 0) continue;
        TripletBuilder<F> tb(dim_k1, dim_k);
        for (const auto& [i, base] : offset[k]) {
            const int j = k - i;
            const int ci = c.dim_at(i), dj = d.dim_at(j);
            // d_C (x) 1 : block (i, j) -> (i+1, j)
            if (c.dim_at(i + 1) > 0 && offset[k + 1].count(i + 1)) {
                const int tbase = offset[k + 1][i + 1];
                const SparseMat<F> dc = c.diff_at(i);
                for (int rr = 0; rr < dc.rows; ++rr)
                    for (const auto& [a, v] : dc.row[rr])
                        for (int b = 0; b < dj; ++b)
                            tb.add(tbase + rr * dj + b, base + a * dj + b, v);
            }
            // q^{2i} (1 (x) d_D) : block (i, j) -> (i, j+1)
            if (d.dim_at(j + 1) > 0 && offset[k + 1].count(i)) {
                const int tbase = offset[k + 1][i];
                const typename F::Elem tw = f.qpow(2L * i);
                const SparseMat<F> dd = d.diff_at(j);
                const int dj1 = d.dim_at(j + 1);
                (void)dj1;
                for (int rr = 0; rr < dd.rows; ++rr)
                    for (const auto& [b, v] : dd.row[rr])
                        for (int a = 0; a < ci; ++a)
                            tb.add(tbase + a * dd.rows + rr, base + a * dj + b, f.mul(tw, v));
            }
        }
        out.diff[k] = tb.build(f);
    }
    assert_complex_valid(out, "tensor");
    return out;
}

// Direct sum, tagging each summand's basis with its key as a sector.
template <class F>
LComplex<F> direct_sum(const std::vector<std::pair<std::string, LComplex<F>>>& parts) {
    if (parts.empty()) throw DomainError("direct_sum: no summands");
    LComplex<F> out;
    out.field = parts.front().second.field;
    out.ell = parts.front().second.ell;
    int top = -1;
    for (const auto& [key, c] : parts) {
        (void)key;
        if (c.ell != out.ell) throw IncompatibleError("direct_sum: mismatched ell");
        top = std::max(top, c.top_degree());
    }
    for (int k = 0; k <= top; ++k) {
        std::vector<std::string> labels, secs;
        std::vector<int> bases;
        for (const auto& [key, c] : parts) {
            bases.push_back(static_cast<int>(labels.size()));
            const int n = c.dim_at(k);
            for (int a = 0; a < n; ++a) {
                labels.push_back(key + ": " + c.space.at(k)[a]);
                secs.push_back(c.has_sectors() ? key + "&" + c.sectors.at(k)[a] : key);
            }
        }
        if (!labels.empty()) {
            out.space[k] = labels;
            out.sectors[k] = secs;
        }
        const int dim_k = static_cast<int>(labels.size());
        int dim_k1 = 0;
        std::vector<int> bases1;
        for (const auto& [key, c] : parts) {
            (void)key;
            bases1.push_back(dim_k1);
            dim_k1 += c.dim_at(k + 1);
        }
        if (dim_k == 0) continue;
        TripletBuilder<F> tb2(dim_k1, dim_k);
        for (std::size_t pi = 0; pi < parts.size(); ++pi) {
            const auto& c = parts[pi].second;
            if (c.dim_at(k) == 0) continue;
            const SparseMat<F> dm = c.diff_at(k);
            for (int rr = 0; rr < dm.rows; ++rr)
                for (const auto& [col, v] : dm.row[rr])
                    tb2.add(bases1[pi] + rr, bases[pi] + col, v);
        }
        out.diff[k] = tb2.build(out.field);
    }
    assert_complex_valid(out, "direct_sum");
    return out;
}

template <class F>
LComplex<F> strip_sectors(LComplex<F> c) {
    c.sectors.clear();
    return c;
}

// Ordinary complex (d^2 = 0, realized as ell = 2) alternating delta^s and
// delta^{ell-s}: C^0 -> C^s -> C^ell -> C^{ell+s} -> ...
template <class F>
LComplex<F> contract(const LComplex<F>& c, int s) {
    if (s < 1 || s >= c.ell) throw DomainError("contract: s must satisfy 1 <= s <= ell-1");
    LComplex<F> out;
    out.field = c.field;
    out.ell = 2;
    const int top = c.top_degree();
    auto source_degree = [&](int pos) {
        return (pos % 2 == 0) ? (pos / 2) * c.ell : (pos / 2) * c.ell + s;
    };
    for (int pos = 0; source_degree(pos) <= top; ++pos) {
        const int deg = source_degree(pos);
        if (c.dim_at(deg) == 0) continue;
        out.space[pos] = c.space.at(deg);
        if (c.has_sectors()) out.sectors[pos] = c.sectors.at(deg);
    }
    for (int pos = 0; source_degree(pos) <= top; ++pos) {
        const int deg = source_degree(pos);
        const int step = (pos % 2 == 0) ? s : c.ell - s;
        if (c.dim_at(deg) == 0) continue;
        out.diff[pos] = delta_power(c, step, deg);
    }
    assert_complex_valid(out, "contract");
    return out;
}

// Degree-t morphism of complexes: mat[i] maps source degree i to target
// degree i+t.
template <class F>
struct Morphism {
    LComplex<F> source;
    LComplex<F> target;
    int t = 0;
    std::map<int, SparseMat<F>> mat;

    SparseMat<F> mat_at(int i) const {
        auto it = mat.find(i);
        if (it != mat.end()) return it->second;
        return SparseMat<F>(target.dim_at(i + t), source.dim_at(i));
    }
};

template <class F>
bool morphism_commutes(const Morphism<F>& f) {
    const F& fld = f.source.field;
    const int top = f.source.top_degree();
    for (int i = 0; i <= top; ++i) {
        const SparseMat<F> lhs = mat_mul(fld, f.target.diff_at(i + f.t), f.mat_at(i));
        const SparseMat<F> rhs = mat_mul(fld, f.mat_at(i + 1), f.source.diff_at(i));
        if (!mat_eq(fld, lhs, rhs)) return false;
    }
    return true;
}

template <class F>
bool morphism_injective(const Morphism<F>& f) {
    const int top = f.source.top_degree();
    for (int i = 0; i <= top; ++i) {
        const SparseMat<F> m = f.mat_at(i);
        if (rank(f.source.field, m) != m.cols) return false;
    }
    return true;
}

template <class F>
Morphism<F> compose(const Morphism<F>& g, const Morphism<F>& f) {
    Morphism<F> out;
    out.source = f.source;
    out.target = g.target;
    out.t = f.t + g.t;
    const int top = f.source.top_degree();
    for (int i = 0; i <= top; ++i)
        out.mat[i] = mat_mul(f.source.field, g.mat_at(i + f.t), f.mat_at(i));
    return out;
}

template <class F>
Morphism<F> shift_morphism(const Morphism<F>& f, int t) {
    Morphism<F> out;
    out.source = shift(f.source, t);
    out.target = shift(f.target, t);
    out.t = f.t;
    for (const auto& [i, m] : f.mat) out.mat[i + t] = m;
    return out;
}

// Cokernel of an injective, differential-commuting morphism, together with
// the projection (commutes) and a linear section (does not, in general).
template <class F>
struct QuotientResult {
    LComplex<F> quotient;
    Morphism<F> projection;  // target -> quotient
    Morphism<F> section;     // quotient -> target, picks free coordinates
};

template <class F>
QuotientResult<F> quotient(const Morphism<F>& f) {
    const F& fld = f.source.field;
    if (!morphism_commutes(f))
        throw PreconditionError("quotient: morphism does not commute with differentials");
    const int top = f.target.top_degree();

    std::map<int, ColumnEchelon<F>> ech;
    QuotientResult<F> out;
    out.quotient.field = fld;
    out.quotient.ell = f.target.ell;
    for (int i = 0; i <= top + 1; ++i) {
        const SparseMat<F> m = f.mat_at(i - f.t);
        ech[i] = column_echelon(fld, m);  // throws NotInjectiveError on dependence
        if (!ech[i].free_rows.empty()) {
            std::vector<std::string> labels;
            for (int r : ech[i].free_rows) labels.push_back(f.target.space.at(i)[r]);
            out.quotient.space[i] = std::move(labels);
        }
    }

    auto project_column = [&](int degree, std::vector<typename F::Elem> dense) {
        const auto& e = ech[degree];
        std::vector<typename F::Elem> reduced = e.reduce(fld, std::move(dense));
        std::vector<typename F::Elem> out_coords;
        out_coords.reserve(e.free_rows.size());
        for (int r : e.free_rows) out_coords.push_back(reduced[r]);
        return out_coords;
    };

    // induced differential: project delta on free-coordinate representatives
    for (int i = 0; i <= top; ++i) {
        const int dim_q = out.quotient.dim_at(i);
        const int dim_q1 = out.quotient.dim_at(i + 1);
        const SparseMat<F> dt = f.target.diff_at(i);
        TripletBuilder<F> dq(dim_q1, dim_q);
        for (int jq = 0; jq < dim_q; ++jq) {
            const int rep = ech[i].free_rows[jq];
            std::vector<typename F::Elem> image(static_cast<std::size_t>(f.target.dim_at(i + 1)),
                                                fld.zero());
            for (int rr = 0; rr < dt.rows; ++rr)
                for (const auto& [cc, v] : dt.row[rr])
                    if (cc == rep) image[rr] = fld.add(image[rr], v);
            const auto coords = project_column(i + 1, std::move(image));
            for (std::size_t r = 0; r < coords.size(); ++r)
                if (!fld.is_zero(coords[r])) dq.add(static_cast<int>(r), jq, coords[r]);
        }
        out.quotient.diff[i] = dq.build(fld);
    }
    assert_complex_valid(out.quotient, "quotient");

    out.projection.source = f.target;
    out.projection.target = out.quotient;
    out.projection.t = 0;
    out.section.source = out.quotient;
    out.section.target = f.target;
    out.section.t = 0;
    for (int i = 0; i <= top; ++i) {
        const int dim_t = f.target.dim_at(i);
        const int dim_q = out.quotient.dim_at(i);
        TripletBuilder<F> proj(dim_q, dim_t);
        for (int col = 0; col < dim_t; ++col) {
            std::vector<typename F::Elem> e(static_cast<std::size_t>(dim_t), fld.zero());
            e[col] = fld.one();
            const auto coords = project_column(i, std::move(e));
            for (std::size_t r = 0; r < coords.size(); ++r)
                if (!fld.is_zero(coords[r])) proj.add(static_cast<int>(r), col, coords[r]);
        }
        out.projection.mat[i] = proj.build(fld);
        TripletBuilder<F> sec(dim_t, dim_q);
        for (int jq = 0; jq < dim_q; ++jq) sec.add(ech[i].free_rows[jq], jq, fld.one());
        out.section.mat[i] = sec.build(fld);
    }
    if (!morphism_commutes(out.projection))
        throw InvariantError("quotient: projection fails to commute");
    return out;
}

// Induced map [g] : Q_src -> Q_dst for g : A -> T, given projections with
// sections. Requires proj_dst . g to kill the subobject defining Q_src;
// checked via the section-independence identity on the result.
template <class F>
Morphism<F> induced_on_quotients(const Morphism<F>& g, const QuotientResult<F>& src,
                                 const QuotientResult<F>& dst) {
    Morphism<F> out;
    out.source = src.quotient;
    out.target = dst.quotient;
    out.t = g.t;
    const F& fld = g.source.field;
    const int top = src.quotient.top_degree();
    for (int i = 0; i <= top; ++i) {
        out.mat[i] = mat_mul(fld, dst.projection.mat_at(i + g.t),
                             mat_mul(fld, g.mat_at(i), src.section.mat_at(i)));
    }
    // well-definedness: the induced map must factor the unprojected one
    const int top_src = g.source.top_degree();
    for (int i = 0; i <= top_src; ++i) {
        const SparseMat<F> lhs = mat_mul(fld, out.mat_at(i), src.projection.mat_at(i));
        const SparseMat<F> rhs =
            mat_mul(fld, dst.projection.mat_at(i + g.t), g.mat_at(i));
        if (!mat_eq(fld, lhs, rhs))
            throw PreconditionError("induced_on_quotients: map does not descend to the quotient");
    }
    return out;
}

}  // namespace qtx
