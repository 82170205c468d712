#pragma once

#include <json.hpp>

#include <sstream>
#include <string>

#include "qtx/ncomplex.hpp"
#include "qtx/search.hpp"

namespace qtx {

using ojson = nlohmann::ordered_json;

inline ojson homology_to_json(const HomologyTable& t) {
    ojson entries = ojson::array();
    for (const auto& [is, dim] : t.entries) {
        ojson e;
        e["i"] = is.first;
        e["s"] = is.second;
        e["dim"] = dim;
        entries.push_back(e);
    }
    ojson out;
    out["ell"] = t.ell;
    out["entries"] = entries;
    out["class"] = t.class_name();
    if (t.cls == HomologyTable::Class::Coresolution) out["h0"] = t.h0;
    return out;
}

inline std::string homology_to_csv(const HomologyTable& t) {
    std::ostringstream os;
    os << "i,s,dim\n";
    for (const auto& [is, dim] : t.entries) os << is.first << "," << is.second << "," << dim << "\n";
    os << "# class," << t.class_name() << "\n";
    return os.str();
}

inline ojson ansatz_to_json(const DifferentialAnsatz& a) {
    ojson out;
    out["ell"] = a.ell;
    out["base"] = a.base;
    ojson rows = ojson::array();
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
        if (!a.enabled[i]) {
            rows.push_back(nullptr);
            continue;
        }
        rows.push_back(a.coeffs[i]);
    }
    out["coeffs"] = rows;
    return out;
}

inline ojson validation_to_json(const ValidationResult& v) {
    ojson out;
    out["verdict"] = verdict_name(v.verdict);
    out["dmax_certified"] = v.dmax;
    if (v.witness_d >= 0) {
        out["witness_d"] = v.witness_d;
        out["detail"] = v.detail;
    }
    return out;
}

inline ojson search_result_to_json(const SearchResult& r) {
    ojson out;
    out["index"] = r.index;
    out["ansatz"] = ansatz_to_json(r.ansatz);
    out["validation"] = validation_to_json(r.validation);
    return out;
}

template <class F>
ojson graded_dims_json(const LComplex<F>& c) {
    ojson dims = ojson::array();
    for (int i = 0; i <= c.top_degree(); ++i) {
        ojson e;
        e["degree"] = i;
        e["dim"] = c.dim_at(i);
        dims.push_back(e);
    }
    return dims;
}

}  // namespace qtx
