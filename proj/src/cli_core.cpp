#include "qtx/cli_core.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "qtx/errors.hpp"
#include "qtx/field.hpp"
#include "qtx/jsonio.hpp"
#include "qtx/line.hpp"
#include "qtx/ncomplex.hpp"
#include "qtx/qcombinatorics.hpp"
#include "qtx/qpoly.hpp"
#include "qtx/search.hpp"
#include "qtx/troesch.hpp"

namespace qtx {
namespace {

namespace fs = std::filesystem;

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << v;
    return os.str();
}

std::string cache_directory(const RunConfig& cfg) {
    if (!cfg.cache_dir.empty()) return cfg.cache_dir;
    if (const char* env = std::getenv("QTX_CACHE_DIR")) return env;
    return "";
}

std::optional<std::string> cache_load(const std::string& dir, const std::string& key) {
    if (dir.empty()) return std::nullopt;
    const fs::path p = fs::path(dir) / (key + ".json");
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void cache_store(const std::string& dir, const std::string& key, const std::string& content) {
    if (dir.empty()) return;
    fs::create_directories(dir);
    const fs::path final_path = fs::path(dir) / (key + ".json");
    const fs::path tmp_path = fs::path(dir) / (key + ".tmp");
    {
        std::ofstream out(tmp_path, std::ios::binary);
        out << content;
    }
    fs::rename(tmp_path, final_path);  // atomic publish
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot open output path: " + path);
    file << content;
}

void emit_artifact(const RunConfig& cfg, std::ostream& out, const std::string& content) {
    if (cfg.out_path.empty()) {
        out << content;
        return;
    }
    write_file(cfg.out_path, content);
}

template <class F>
std::string convention_descriptor_for(const F& f) {
    if (f.ell() != 3) return "none";
    return calibrated_convention(f).selected.descriptor();
}

TroeschSpec::Model parse_model(const std::string& text) {
    if (text == "tensor") return TroeschSpec::Model::Tensor;
    if (text == "direct") return TroeschSpec::Model::Direct;
    throw ConfigError("model must be 'tensor' or 'direct', got '" + text + "'");
}

// ---- homology ----

template <class F>
int homology_impl(const F& f, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.ell != 3) throw ConfigError("homology: the constructed differentials require --ell 3");
    const TroeschSpec::Model model = parse_model(cfg.model);
    const std::string convention = convention_descriptor_for(f);

    ojson header;
    header["command"] = "homology";
    header["version"] = kVersion;
    header["field"] = f.spec().str();
    header["ell"] = cfg.ell;
    header["d"] = cfg.d;
    header["n"] = cfg.n;
    header["model"] = cfg.model;
    header["convention"] = convention;
    header["verbose"] = cfg.verbose;
    const std::string key = hex64(fnv1a(header.dump()));
    const std::string dir = cache_directory(cfg);
    if (auto hit = cache_load(dir, key)) {
        emit_artifact(cfg, out, *hit);
        return kExitOk;
    }

    auto complex = build_B(f, cfg.d, cfg.n, model);
    auto table = classify(complex, cfg.jobs);

    ojson artifact;
    artifact["spec"] = header;
    artifact["graded_dims"] = graded_dims_json(complex);
    artifact["homology"] = homology_to_json(table);
    artifact["classification"] = table.class_name();
    if (cfg.verbose && cfg.d % 3 == 0) {
        ojson kernels;
        for (int s = 1; s <= 2; ++s) {
            auto ker = kernel_at(complex, s, 0);
            ojson cols = ojson::array();
            for (int j = 0; j < ker.cols; ++j) {
                ojson col = ojson::array();
                for (int r = 0; r < ker.rows; ++r)
                    for (const auto& [c, v] : ker.row[r])
                        if (c == j) {
                            ojson entry;
                            entry["label"] = complex.space.at(0)[r];
                            entry["coeff"] = f.str(v);
                            col.push_back(entry);
                        }
                cols.push_back(col);
            }
            kernels["s" + std::to_string(s)] = cols;
        }
        artifact["h0_kernel"] = kernels;
    }
    const std::string content = artifact.dump(2) + "\n";
    cache_store(dir, key, content);
    emit_artifact(cfg, out, content);
    if (!cfg.csv_path.empty()) write_file(cfg.csv_path, homology_to_csv(table));
    if (cfg.verbose) err << "homology: " << table.class_name() << "\n";
    return kExitOk;
}

// ---- dims ----

template <class F>
int dims_impl(const F& f, const RunConfig& cfg, std::ostream& out, std::ostream&) {
    ojson header;
    header["command"] = "dims";
    header["version"] = kVersion;
    header["field"] = f.spec().str();
    header["target"] = cfg.target;
    header["ell"] = cfg.ell;
    header["d"] = cfg.d;
    header["n"] = cfg.n;
    header["convention"] = convention_descriptor_for(f);
    const std::string key = hex64(fnv1a(header.dump()));
    const std::string dir = cache_directory(cfg);
    if (auto hit = cache_load(dir, key)) {
        emit_artifact(cfg, out, *hit);
        return kExitOk;
    }

    ojson dims = ojson::array();
    std::ostringstream csv;
    csv << "degree,dim\n";
    if (cfg.target == "B") {
        if (cfg.ell != 3) throw ConfigError("dims: target B requires --ell 3");
        auto complex = build_B_tensor(f, cfg.d, cfg.n);
        for (int g = 0; g <= complex.top_degree(); ++g) {
            ojson e;
            e["degree"] = g;
            e["dim"] = complex.dim_at(g);
            dims.push_back(e);
            csv << g << "," << complex.dim_at(g) << "\n";
        }
    } else if (cfg.target == "SE") {
        auto v = E_graded_dims(cfg.d, cfg.ell);
        for (std::size_t k = 0; k < v.size(); ++k) {
            ojson e;
            e["degree"] = 2 * static_cast<int>(k);
            e["dim"] = v[k];
            dims.push_back(e);
            csv << 2 * k << "," << v[k] << "\n";
        }
    } else if (cfg.target == "divisible") {
        auto v = divisible_slice(cfg.d, cfg.n);
        for (std::size_t k = 0; k < v.size(); ++k) {
            ojson e;
            e["degree"] = 3 * static_cast<int>(k);
            e["dim"] = v[k];
            dims.push_back(e);
            csv << 3 * k << "," << v[k] << "\n";
        }
    } else {
        throw ConfigError("dims: target must be B, SE or divisible, got '" + cfg.target + "'");
    }
    ojson artifact;
    artifact["spec"] = header;
    artifact["dims"] = dims;
    const std::string content = artifact.dump(2) + "\n";
    cache_store(dir, key, content);
    emit_artifact(cfg, out, content);
    if (!cfg.csv_path.empty()) write_file(cfg.csv_path, csv.str());
    return kExitOk;
}

// ---- verify ----

struct SuiteReport {
    struct Line {
        std::string name;
        bool pass;
        std::string detail;
    };
    std::vector<Line> lines;
    void add(const std::string& name, bool pass, const std::string& detail = "") {
        lines.push_back({name, pass, detail});
    }
    bool all_pass() const {
        for (const auto& l : lines)
            if (!l.pass) return false;
        return true;
    }
};

SuiteReport suite_qcombinatorics() {
    SuiteReport rep;
    const std::pair<int, std::uint64_t> fields[] = {{3, 7}, {5, 11}, {7, 29}};
    for (const auto& [ell, p] : fields) {
        CycloField fc(ell);
        PrimeField fp(p, ell);
        bool zero_c = true, zero_p = true;
        for (int k = 1; k < ell; ++k) {
            zero_c = zero_c && fc.is_zero(qbinom(fc, ell, k, fc.qpow(2)));
            zero_p = zero_p && fp.is_zero(qbinom(fp, ell, k, fp.qpow(2)));
        }
        rep.add("qbinom row " + std::to_string(ell) + " vanishes (cyclotomic)", zero_c);
        rep.add("qbinom row " + std::to_string(ell) + " vanishes (fp:" + std::to_string(p) + ")",
                zero_p);
        bool pascal = true;
        for (int nn = 1; nn <= 12 && pascal; ++nn)
            for (int k = 1; k <= nn && pascal; ++k) {
                auto rhs = qbinom(fc, nn - 1, k - 1, fc.qpow(2));
                if (k <= nn - 1)
                    rhs = fc.add(rhs, fc.mul(elem_pow(fc, fc.qpow(2), k),
                                             qbinom(fc, nn - 1, k, fc.qpow(2))));
                pascal = fc.eq(qbinom(fc, nn, k, fc.qpow(2)), rhs);
            }
        rep.add("q-Pascal identity to n=12 (ell=" + std::to_string(ell) + ")", pascal);
        bool agree = true;
        for (int nn = 0; nn <= 8 && agree; ++nn)
            for (int k = 0; k <= nn && agree; ++k)
                agree = evaluate_mod_p(qbinom(fc, nn, k, fc.qpow(2)), fp) ==
                        qbinom(fp, nn, k, fp.qpow(2));
        rep.add("backends agree under q -> residue (ell=" + std::to_string(ell) + ")", agree);
    }
    return rep;
}

template <class F>
SuiteReport suite_relations(const F& f, int n, int dmax) {
    SuiteReport rep;
    const auto& outcome = calibrated_convention(f);
    rep.add("calibration selects " + outcome.selected.descriptor(), true);
    for (int nn = 1; nn <= n; ++nn) {
        SAlgebra<F> alg(f, nn, outcome.selected);
        auto report = verify_relations(alg, dmax);
        for (const auto& c : report.checks) {
            if (c.pass) continue;
            rep.add("relation (" + std::to_string(c.relation) + ") " + c.context +
                        " n=" + std::to_string(nn),
                    false, c.counterexample);
        }
        rep.add("relations (2)-(8) n=" + std::to_string(nn) + " dmax=" + std::to_string(dmax),
                report.all_pass());
        rep.add("coassociativity n=" + std::to_string(nn), coassociative(alg, std::min(dmax, 4)));
    }
    // negative control: a frozen-scalar commutation bump must fail
    SAlgebra<F> bad(f, 2, outcome.selected.perturbed_commutation());
    auto report = verify_relations(bad, 2);
    rep.add("negative control: perturbed commutation fails at least one relation",
            !report.all_pass());
    rep.add("negative control: relation (7) fails at (1,1)", report.relation_fails(7, "(1,1)"));
    return rep;
}

template <class F>
SuiteReport suite_leibniz(const F& f) {
    SuiteReport rep;
    const auto& conv = calibrated_convention(f).selected;
    for (int n = 1; n <= 2; ++n) {
        SAlgebra<F> alg(f, n, conv);
        bool ok = true;
        for (int d1 = 0; d1 <= 4 && ok; ++d1)
            for (int d2 = 0; d1 + d2 <= 4 && ok; ++d2) ok = mu_delta_compatible(alg, d1, d2);
        rep.add("mu_B . delta_tensor = delta . mu_B, d1+d2 <= 4, n=" + std::to_string(n), ok);
    }
    // the one-variable twisted Leibniz rule over all pairs of weight <= 10
    bool leib = true;
    std::string witness;
    auto accumulate = [&f](std::map<SlotMonomial, typename F::Elem>& sum, const SlotMonomial& m,
                           const typename F::Elem& c) {
        auto [it, inserted] = sum.try_emplace(m, c);
        if (!inserted) it->second = f.add(it->second, c);
    };
    for (int wa = 0; wa <= 10 && leib; ++wa)
        for (int wb = 0; wa + wb <= 10 && leib; ++wb) {
            const SlotBasis a_basis = SlotBasis::make(3, wa);
            const SlotBasis b_basis = SlotBasis::make(3, wb);
            for (const auto& [am, apos] : a_basis.index)
                for (const auto& [bm, bpos] : b_basis.index) {
                    auto [sab, ab] = line_product(f, am, bm);
                    std::map<SlotMonomial, typename F::Elem> lhs, rhs;
                    for (const auto& [c, m] : slot_delta_terms(f, ab))
                        accumulate(lhs, m, f.mul(sab, c));
                    for (const auto& [c, da] : slot_delta_terms(f, am)) {
                        auto [s, p] = line_product(f, da, bm);
                        accumulate(rhs, p, f.mul(c, s));
                    }
                    const auto tw = f.qpow(2L * am.k[1] + 4L * am.k[2]);
                    for (const auto& [c, db] : slot_delta_terms(f, bm)) {
                        auto [s, p] = line_product(f, am, db);
                        accumulate(rhs, p, f.mul(tw, f.mul(c, s)));
                    }
                    bool same = true;
                    for (const auto& [m, v] : lhs) {
                        auto it = rhs.find(m);
                        if (it == rhs.end() ? !f.is_zero(v) : !f.eq(v, it->second)) same = false;
                    }
                    for (const auto& [m, v] : rhs)
                        if (!lhs.count(m) && !f.is_zero(v)) same = false;
                    if (!same) {
                        leib = false;
                        witness = am.label() + " , " + bm.label();
                    }
                    (void)apos;
                    (void)bpos;
                }
        }
    rep.add("twisted Leibniz on B(1), total weight <= 10", leib, witness);
    return rep;
}

template <class F>
SuiteReport suite_troesch(const F& f, int dmax, int nmax, int jobs) {
    SuiteReport rep;
    for (int n = 1; n <= nmax; ++n) {
        const int top = (n == 1) ? dmax : std::min(dmax, 9);
        for (int d = 0; d <= top; ++d) {
            auto table = troesch_homology(f, d, n, TroeschSpec::Model::Tensor, jobs);
            std::ostringstream name;
            name << "B_" << d << "(" << n << ")";
            if (d % 3 == 0) {
                const long expect = binomial(n + d / 3 - 1, d / 3);
                const bool ok =
                    table.cls == HomologyTable::Class::Coresolution && table.h0 == expect;
                rep.add(name.str() + " coresolution of dim " + std::to_string(expect), ok);
            } else {
                rep.add(name.str() + " acyclic", table.cls == HomologyTable::Class::Acyclic);
            }
        }
    }
    return rep;
}

template <class F>
SuiteReport suite_ladder(const F& f, int dmax) {
    SuiteReport rep;
    for (int d = 2; d <= dmax; ++d) {
        try {
            auto steps = proof_ladder(f, d);
            const int r = d % 3;
            if (r == 2 || r == 0) {
                const auto& q = steps[2];
                bool dims_ok = q.dims.size() == static_cast<std::size_t>(d + 1);
                for (int k = 0; k <= d && dims_ok; ++k)
                    dims_ok = q.dims.count(k) && q.dims.at(k) == 1;
                const bool cls_ok =
                    r == 2 ? q.table.cls == HomologyTable::Class::Acyclic
                           : (q.table.cls == HomologyTable::Class::Coresolution &&
                              q.table.h0 == 1);
                rep.add("d=" + std::to_string(d) + " staircase quotient", dims_ok && cls_ok);
            } else {
                const auto& q0 = steps[2];
                const auto& q2 = steps[4];
                const auto& q3 = steps[5];
                bool q0_ok = q0.dims.at(0) == 1 && q0.dims.at(1) == 1 && q0.dims.at(d + 1) == 1;
                for (int k = 2; k <= d && q0_ok; ++k) q0_ok = q0.dims.at(k) == 2;
                bool q2_ok = q2.dims.at(0) == 1 && q2.dims.at(1) == 1 && q2.dims.at(2) == 2;
                for (int k = 3; k <= d && q2_ok; ++k) q2_ok = q2.dims.at(k) == 1;
                bool q3_ok = q3.table.cls == HomologyTable::Class::Acyclic &&
                             q3.dims.count(0) == 0 && q3.dims.count(1) == 0;
                for (int k = 2; k <= d && q3_ok; ++k) q3_ok = q3.dims.at(k) == 1;
                rep.add("d=" + std::to_string(d) + " four-step ladder", q0_ok && q2_ok && q3_ok);
            }
        } catch (const std::exception& e) {
            rep.add("d=" + std::to_string(d) + " ladder", false, e.what());
        }
    }
    return rep;
}

template <class F>
SuiteReport suite_kunneth(const F& f) {
    SuiteReport rep;
    for (int a = 1; a <= 3; ++a)
        for (int b = a; a + b <= 4; ++b) {
            auto t = tensor(build_B1(f, 3 * a), build_B1(f, 3 * b));
            auto table = classify(t);
            const bool ok = table.cls == HomologyTable::Class::Coresolution && table.h0 == 1;
            rep.add("B_" + std::to_string(3 * a) + "(1) (x) B_" + std::to_string(3 * b) +
                        "(1) is a coresolution of dim 1",
                    ok);
        }
    auto mixed = classify(tensor(build_B1(f, 3), build_B1(f, 2)));
    rep.add("B_3(1) (x) B_2(1) is acyclic", mixed.cls == HomologyTable::Class::Acyclic);
    return rep;
}

template <class F>
int verify_impl(const F& f, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    SuiteReport rep;
    if (cfg.suite == "qcombinatorics") {
        rep = suite_qcombinatorics();
    } else if (cfg.suite == "relations") {
        rep = suite_relations(f, cfg.n, cfg.dmax < 0 ? 3 : cfg.dmax);
    } else if (cfg.suite == "leibniz") {
        rep = suite_leibniz(f);
    } else if (cfg.suite == "troesch") {
        rep = suite_troesch(f, cfg.dmax < 0 ? 12 : cfg.dmax, cfg.n, cfg.jobs);
    } else if (cfg.suite == "ladder") {
        rep = suite_ladder(f, cfg.dmax < 0 ? 10 : cfg.dmax);
    } else if (cfg.suite == "kunneth") {
        rep = suite_kunneth(f);
    } else {
        throw ConfigError("verify: unknown suite '" + cfg.suite +
                          "' (relations, leibniz, troesch, ladder, kunneth, qcombinatorics)");
    }
    for (const auto& line : rep.lines) {
        out << (line.pass ? "[ok]   " : "[FAIL] ") << line.name;
        if (!line.pass && !line.detail.empty()) out << "\n       " << line.detail;
        out << "\n";
    }
    out << (rep.all_pass() ? "PASS" : "FAIL") << " suite " << cfg.suite << " (" << rep.lines.size()
        << " checks)\n";
    if (!cfg.out_path.empty()) {
        ojson artifact;
        artifact["command"] = "verify";
        artifact["version"] = kVersion;
        artifact["suite"] = cfg.suite;
        artifact["field"] = f.spec().str();
        artifact["convention"] = convention_descriptor_for(f);
        ojson checks = ojson::array();
        for (const auto& line : rep.lines) {
            ojson e;
            e["name"] = line.name;
            e["pass"] = line.pass;
            if (!line.detail.empty()) e["detail"] = line.detail;
            checks.push_back(e);
        }
        artifact["checks"] = checks;
        artifact["pass"] = rep.all_pass();
        write_file(cfg.out_path, artifact.dump(2) + "\n");
    }
    (void)err;
    return rep.all_pass() ? kExitOk : kExitIdentityFailure;
}

// ---- search ----

template <class F>
int search_impl(const F& f, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    SearchConfig sc;
    sc.ell = cfg.ell;
    sc.dmax = cfg.dmax < 0 ? 6 : cfg.dmax;
    sc.budget = cfg.budget;
    sc.jobs = cfg.jobs;
    sc.coeff_values.clear();
    for (int v = 0; v < cfg.ell; ++v) sc.coeff_values.push_back(v);
    if (cfg.bases == "q")
        sc.bases = {1};
    else if (cfg.bases == "q2")
        sc.bases = {2};
    else if (cfg.bases == "both")
        sc.bases = {1, 2};
    else
        throw ConfigError("search: --bases must be q, q2 or both");

    std::ofstream stream_file;
    std::ostream* stream = &out;
    if (!cfg.out_path.empty()) {
        stream_file.open(cfg.out_path, std::ios::binary);
        if (!stream_file) throw ConfigError("cannot open output path: " + cfg.out_path);
        stream = &stream_file;
    }
    auto outcome = search_differentials<F>(f, sc, [&](const SearchResult& r) {
        *stream << search_result_to_json(r).dump() << "\n";
    });

    ojson summary;
    summary["command"] = "search";
    summary["version"] = kVersion;
    summary["field"] = f.spec().str();
    summary["ell"] = sc.ell;
    summary["dmax"] = sc.dmax;
    summary["bases"] = cfg.bases;
    summary["space_size"] = outcome.space_size;
    summary["evaluated"] = outcome.evaluated;
    summary["incomplete"] = outcome.incomplete;
    summary["survivor_count"] = outcome.survivors.size();
    ojson survivors = ojson::array();
    std::map<std::string, std::vector<std::uint64_t>> gauges;
    for (const auto& s : outcome.survivors) {
        survivors.push_back(search_result_to_json(s));
        gauges[s.ansatz.gauge_signature()].push_back(s.index);
    }
    summary["survivors"] = survivors;
    ojson gauge_json;
    for (const auto& [sig, members] : gauges) gauge_json[sig] = members;
    summary["gauge_orbits"] = gauge_json;
    // whether surviving candidates admit compatible products is out of scope
    summary["note"] = "verdicts certify the differential only, up to dmax";

    const std::string content = summary.dump(2) + "\n";
    if (!cfg.out_path.empty()) {
        write_file(cfg.out_path + ".summary.json", content);
        err << "search: " << outcome.survivors.size() << " survivors of " << outcome.evaluated
            << " evaluated; summary at " << cfg.out_path << ".summary.json\n";
    } else {
        out << content;
    }
    return kExitOk;
}

// ---- calibrate ----

template <class F>
int calibrate_impl(const F& f, const RunConfig& cfg, std::ostream& out, std::ostream&) {
    const auto& outcome = calibrated_convention(f);
    ojson artifact;
    artifact["command"] = "calibrate";
    artifact["version"] = kVersion;
    artifact["field"] = f.spec().str();
    artifact["selected"] = outcome.selected.descriptor();
    artifact["passers"] = outcome.passers;
    const std::string content = artifact.dump(2) + "\n";
    emit_artifact(cfg, out, content);
    return kExitOk;
}

template <class F>
int dispatch(const F& f, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.command == "homology") return homology_impl(f, cfg, out, err);
    if (cfg.command == "dims") return dims_impl(f, cfg, out, err);
    if (cfg.command == "verify") return verify_impl(f, cfg, out, err);
    if (cfg.command == "search") return search_impl(f, cfg, out, err);
    if (cfg.command == "calibrate") return calibrate_impl(f, cfg, out, err);
    throw ConfigError("unknown command '" + cfg.command + "'");
}

}  // namespace

int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (cfg.ell < 3 || cfg.ell % 2 == 0)
            throw ConfigError("--ell must be odd and >= 3, got " + std::to_string(cfg.ell));
        if (cfg.d < 0) throw ConfigError("--d must be nonnegative");
        if (cfg.n < 0) throw ConfigError("--n must be nonnegative");
        if (cfg.jobs < 1) throw ConfigError("--jobs must be positive");
        const FieldSpec spec = FieldSpec::parse(cfg.field_text, cfg.ell);
        if (spec.kind == FieldSpec::Kind::Cyclotomic) {
            CycloField f(cfg.ell);
            return dispatch(f, cfg, out, err);
        }
        PrimeField f(spec.p, cfg.ell);
        return dispatch(f, cfg, out, err);
    } catch (const InvariantError& e) {
        err << "invariant breach: " << e.what() << "\n";
        return kExitInvariantBreach;
    } catch (const NotCalibratedError& e) {
        err << "invariant breach: " << e.what() << "\n";
        return kExitInvariantBreach;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace qtx
