#pragma once

#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "qtx/errors.hpp"
#include "qtx/line.hpp"
#include "qtx/ncomplex.hpp"
#include "qtx/pool.hpp"
#include "qtx/qcombinatorics.hpp"

namespace qtx {

// A candidate ell-differential on slot monomials: slot move i -> i+1 carries
// the quantum integer (k_i)_{q^base} times lambda_i(k) = q^{c_{i0} + sum_j
// c_{ij} k_j}. The recorded ell = 3 differential is the family lambda_1 = 1,
// lambda_2 = q^{2 k_2} at base q^2.
struct DifferentialAnsatz {
    int ell = 3;
    int base = 2;
    std::vector<std::vector<int>> coeffs;  // (ell-1) rows of [c_{i0}, c_{i1}, ..., c_{i ell}]
    std::vector<bool> enabled;             // lambda_i = 0 when disabled (degenerate candidates)

    static DifferentialAnsatz zero_family(int ell) {
        DifferentialAnsatz a;
        a.ell = ell;
        a.base = 2;
        a.coeffs.assign(ell - 1, std::vector<int>(ell + 1, 0));
        a.enabled.assign(ell - 1, false);
        return a;
    }

    static DifferentialAnsatz paper_family() {
        DifferentialAnsatz a;
        a.ell = 3;
        a.base = 2;
        a.coeffs.assign(2, std::vector<int>(4, 0));
        a.coeffs[1][2] = 2;  // lambda_2 = q^{2 k_2}
        a.enabled.assign(2, true);
        return a;
    }

    bool well_formed() const {
        if (ell < 3 || ell % 2 == 0) return false;
        if (coeffs.size() != static_cast<std::size_t>(ell - 1)) return false;
        for (const auto& row : coeffs)
            if (row.size() != static_cast<std::size_t>(ell + 1)) return false;
        return enabled.size() == static_cast<std::size_t>(ell - 1);
    }

    // the k-dependent part only; candidates sharing it differ by constant
    // q-power rescalings of the lambda_i
    std::string gauge_signature() const {
        std::ostringstream os;
        os << "ell=" << ell << ";base=" << base;
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            os << ";l" << (i + 1) << "=";
            if (!enabled[i]) {
                os << "off";
                continue;
            }
            for (std::size_t j = 1; j < coeffs[i].size(); ++j)
                os << (j > 1 ? "," : "") << (coeffs[i][j] % ell + ell) % ell;
        }
        return os.str();
    }

    std::string descriptor() const {
        std::ostringstream os;
        os << "ell=" << ell << ";base=" << base;
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            os << ";c" << (i + 1) << "=";
            if (!enabled[i]) {
                os << "off";
                continue;
            }
            for (std::size_t j = 0; j < coeffs[i].size(); ++j)
                os << (j ? "," : "") << coeffs[i][j];
        }
        return os.str();
    }
};

// Candidate complex on the weight-d slot monomials. Nilpotency is NOT
// assumed: the validator decides.
template <class F>
LComplex<F> instantiate(const F& f, const DifferentialAnsatz& a, int d) {
    if (!a.well_formed()) throw DomainError("instantiate: malformed ansatz");
    if (f.ell() != a.ell) throw IncompatibleError("instantiate: field order does not match ansatz");
    LComplex<F> c;
    c.field = f;
    c.ell = a.ell;
    const SlotBasis basis = SlotBasis::make(a.ell, d);
    for (const auto& [deg, v] : basis.by_degree) {
        std::vector<std::string> labels;
        for (const auto& m : v) labels.push_back(m.label());
        c.space[deg] = std::move(labels);
    }
    const typename F::Elem t = f.qpow(a.base);
    for (const auto& [deg, v] : basis.by_degree) {
        TripletBuilder<F> tb(c.dim_at(deg + 1), c.dim_at(deg));
        for (std::size_t col = 0; col < v.size(); ++col) {
            const SlotMonomial& m = v[col];
            for (int i = 0; i + 1 < a.ell; ++i) {
                if (!a.enabled[i] || m.k[i] == 0) continue;
                long expo = a.coeffs[i][0];
                for (int j = 0; j < a.ell; ++j) expo += static_cast<long>(a.coeffs[i][j + 1]) * m.k[j];
                SlotMonomial target = m;
                target.k[i] -= 1;
                target.k[i + 1] += 1;
                tb.add(basis.index.at(target).second, static_cast<int>(col),
                       f.mul(f.qpow(expo), qint(f, m.k[i], t)));
            }
        }
        c.diff[deg] = tb.build(f);
    }
    return c;
}

enum class Verdict { NilpotentCoresolution, NilpotentOnly, Fails };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::NilpotentCoresolution: return "nilpotent+coresolution";
        case Verdict::NilpotentOnly: return "nilpotent only";
        default: return "fails";
    }
}

struct ValidationResult {
    Verdict verdict = Verdict::Fails;
    int dmax = 0;
    int witness_d = -1;   // smallest weight exhibiting the failure, if any
    std::string detail;
};

// Exact certification up to dmax: delta^ell = 0 for every d <= dmax, then
// the homology pattern (acyclic off multiples of ell, a one-dimensional
// coresolution on them). Rejects at the smallest failing weight.
template <class F>
ValidationResult validate(const F& f, const DifferentialAnsatz& a, int dmax) {
    ValidationResult r;
    r.dmax = dmax;
    std::vector<LComplex<F>> complexes;
    for (int d = 0; d <= dmax; ++d) {
        complexes.push_back(instantiate(f, a, d));
        if (!check_nilpotency(complexes.back())) {
            r.verdict = Verdict::Fails;
            r.witness_d = d;
            r.detail = "delta^" + std::to_string(a.ell) + " != 0 at weight " + std::to_string(d);
            return r;
        }
    }
    for (int d = 0; d <= dmax; ++d) {
        const HomologyTable table = classify(complexes[d]);
        const bool want_cores = (d % a.ell == 0);
        const bool ok =
            want_cores ? table.cls == HomologyTable::Class::Coresolution && table.h0 == 1
                       : table.cls == HomologyTable::Class::Acyclic;
        if (!ok) {
            r.verdict = Verdict::NilpotentOnly;
            r.witness_d = d;
            r.detail = std::string("homology pattern breaks at weight ") + std::to_string(d) +
                       " (" + table.class_name() + ")";
            return r;
        }
    }
    r.verdict = Verdict::NilpotentCoresolution;
    return r;
}

struct SearchResult {
    std::uint64_t index = 0;
    DifferentialAnsatz ansatz;
    ValidationResult validation;
};

struct SearchConfig {
    int ell = 3;
    int dmax = 6;
    std::vector<int> coeff_values = {0, 1, 2};
    std::vector<int> bases = {1, 2};
    std::uint64_t budget = 0;  // 0: run the whole space
    int jobs = 1;
};

struct SearchOutcome {
    std::uint64_t space_size = 0;
    std::uint64_t evaluated = 0;
    bool incomplete = false;
    std::vector<SearchResult> survivors;  // verdict == NilpotentCoresolution
};

inline std::uint64_t ipow_u64(std::uint64_t b, int e) {
    std::uint64_t r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

// Decode candidate #index: the base index is the high digit, then the
// coefficient odometer with c_{10} slowest and c_{(ell-1) ell} fastest.
inline DifferentialAnsatz decode_candidate(const SearchConfig& cfg, std::uint64_t index) {
    const int params = (cfg.ell - 1) * (cfg.ell + 1);
    const std::uint64_t per_base = ipow_u64(cfg.coeff_values.size(), params);
    DifferentialAnsatz a;
    a.ell = cfg.ell;
    a.base = cfg.bases[static_cast<std::size_t>(index / per_base)];
    a.enabled.assign(cfg.ell - 1, true);
    a.coeffs.assign(cfg.ell - 1, std::vector<int>(cfg.ell + 1, 0));
    std::uint64_t rest = index % per_base;
    for (int p = params - 1; p >= 0; --p) {
        const int digit = static_cast<int>(rest % cfg.coeff_values.size());
        rest /= cfg.coeff_values.size();
        a.coeffs[p / (cfg.ell + 1)][p % (cfg.ell + 1)] = cfg.coeff_values[digit];
    }
    return a;
}

// Deterministic bounded enumeration. Every candidate is certified exactly;
// survivors are streamed to `sink` (in index order) as they are decided.
template <class F>
SearchOutcome search_differentials(
    const F& f, const SearchConfig& cfg,
    const std::function<void(const SearchResult&)>& sink = nullptr) {
    if (cfg.ell % 2 == 0 || cfg.ell < 3) throw DomainError("search: ell must be odd and >= 3");
    if (f.ell() != cfg.ell) throw IncompatibleError("search: field order mismatch");
    SearchOutcome out;
    const int params = (cfg.ell - 1) * (cfg.ell + 1);
    out.space_size = ipow_u64(cfg.coeff_values.size(), params) * cfg.bases.size();
    const std::uint64_t limit =
        cfg.budget == 0 ? out.space_size : std::min<std::uint64_t>(cfg.budget, out.space_size);
    out.incomplete = limit < out.space_size;

    const std::uint64_t chunk = 512;
    std::vector<SearchResult> buffer;
    for (std::uint64_t start = 0; start < limit; start += chunk) {
        const std::uint64_t count = std::min<std::uint64_t>(chunk, limit - start);
        buffer.assign(count, SearchResult{});
        parallel_for(cfg.jobs, count, [&](std::size_t k) {
            SearchResult& r = buffer[k];
            r.index = start + k;
            r.ansatz = decode_candidate(cfg, r.index);
            r.validation = validate(f, r.ansatz, cfg.dmax);
        });
        for (const auto& r : buffer) {
            if (sink) sink(r);
            if (r.validation.verdict == Verdict::NilpotentCoresolution) out.survivors.push_back(r);
        }
        out.evaluated += count;
    }
    return out;
}

}  // namespace qtx
