#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qtx/cli_core.hpp"

using namespace qtx;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(RunConfig cfg) {
    std::ostringstream out, err;
    const int code = run_command(cfg, out, err);
    return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("qtx_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("homology command: coresolution at d=3, acyclic at d=4") {
    RunConfig cfg;
    cfg.command = "homology";
    cfg.d = 3;
    auto r = run(cfg);
    REQUIRE(r.code == kExitOk);
    auto artifact = json::parse(r.out);
    CHECK(artifact["classification"] == "coresolution");
    CHECK(artifact["homology"]["h0"] == 1);
    CHECK(artifact["spec"]["convention"] == "c1=1;c2=1;cross=hecke-hi");
    CHECK(artifact["spec"]["field"] == "cyclotomic");

    cfg.d = 4;
    auto r2 = run(cfg);
    REQUIRE(r2.code == kExitOk);
    CHECK(json::parse(r2.out)["classification"] == "acyclic");
}

TEST_CASE("homology command: multi-variable and verbose kernel dump") {
    RunConfig cfg;
    cfg.command = "homology";
    cfg.d = 6;
    cfg.n = 2;
    cfg.verbose = true;
    auto r = run(cfg);
    REQUIRE(r.code == kExitOk);
    auto artifact = json::parse(r.out);
    CHECK(artifact["homology"]["h0"] == 3);
    CHECK(artifact["h0_kernel"]["s1"].size() == 3);
    CHECK(artifact["h0_kernel"]["s2"].size() == 3);
}

TEST_CASE("usage errors exit 2 with a one-line diagnostic") {
    RunConfig cfg;
    cfg.command = "homology";
    cfg.d = -1;
    CHECK(run(cfg).code == kExitUsage);
    cfg.d = 2;
    cfg.ell = 4;
    CHECK(run(cfg).code == kExitUsage);
    cfg.ell = 5;  // no constructed differential away from 3
    CHECK(run(cfg).code == kExitUsage);
    cfg.ell = 3;
    cfg.model = "bogus";
    CHECK(run(cfg).code == kExitUsage);
    cfg.model = "tensor";
    cfg.field_text = "fp:6";
    auto r = run(cfg);
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("error:") == 0);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
    // a prime without an order-3 element
    cfg.field_text = "fp:5";
    CHECK(run(cfg).code == kExitUsage);
    // unknown command
    cfg.field_text = "cyclotomic";
    cfg.command = "explode";
    CHECK(run(cfg).code == kExitUsage);
}

TEST_CASE("artifacts are byte-identical across runs and backends honor fp") {
    RunConfig cfg;
    cfg.command = "homology";
    cfg.d = 3;
    cfg.n = 1;
    auto r1 = run(cfg);
    auto r2 = run(cfg);
    CHECK(r1.out == r2.out);
    cfg.field_text = "fp:7";
    auto r3 = run(cfg);
    REQUIRE(r3.code == kExitOk);
    auto artifact = json::parse(r3.out);
    CHECK(artifact["classification"] == "coresolution");
    CHECK(artifact["spec"]["field"] == "fp:7");
}

TEST_CASE("cache: hits are byte-identical and transparency holds") {
    auto dir = fresh_dir("cache");
    RunConfig cfg;
    cfg.command = "homology";
    cfg.d = 3;
    cfg.n = 2;
    auto uncached = run(cfg);
    cfg.cache_dir = dir.string();
    auto miss = run(cfg);   // computes and stores
    auto hit = run(cfg);    // loads
    CHECK(uncached.out == miss.out);
    CHECK(miss.out == hit.out);
    bool has_file = false;
    for (const auto& e : fs::directory_iterator(dir)) {
        (void)e;
        has_file = true;
    }
    CHECK(has_file);
    fs::remove_all(dir);
}

TEST_CASE("dims command covers all three targets") {
    RunConfig cfg;
    cfg.command = "dims";
    cfg.target = "SE";
    cfg.d = 2;
    auto r = run(cfg);
    REQUIRE(r.code == kExitOk);
    auto a = json::parse(r.out);
    REQUIRE(a["dims"].size() == 5);
    const long expect[] = {1, 1, 2, 1, 1};
    for (int k = 0; k < 5; ++k) {
        CHECK(a["dims"][k]["degree"] == 2 * k);
        CHECK(a["dims"][k]["dim"] == expect[k]);
    }
    cfg.target = "B";
    cfg.d = 3;
    cfg.n = 1;
    auto rb = run(cfg);
    REQUIRE(rb.code == kExitOk);
    auto ab = json::parse(rb.out);
    const long expect_b[] = {1, 1, 2, 2, 2, 1, 1};
    REQUIRE(ab["dims"].size() == 7);
    for (int g = 0; g < 7; ++g) CHECK(ab["dims"][g]["dim"] == expect_b[g]);
    cfg.target = "divisible";
    cfg.d = 6;
    auto rd = run(cfg);
    REQUIRE(rd.code == kExitOk);
    auto ad = json::parse(rd.out);
    const long expect_d[] = {1, 1, 2, 1, 1};
    REQUIRE(ad["dims"].size() == 5);
    for (int k = 0; k < 5; ++k) {
        CHECK(ad["dims"][k]["degree"] == 3 * k);
        CHECK(ad["dims"][k]["dim"] == expect_d[k]);
    }
    cfg.target = "SE";
    cfg.d = 0;
    auto r0 = run(cfg);
    auto a0 = json::parse(r0.out);
    REQUIRE(a0["dims"].size() == 1);
    CHECK(a0["dims"][0]["dim"] == 1);
    // invalid target and invalid divisible weight
    cfg.target = "nope";
    CHECK(run(cfg).code == kExitUsage);
    cfg.target = "divisible";
    cfg.d = 4;
    CHECK(run(cfg).code == kExitUsage);
}

TEST_CASE("verify command: passing suites exit 0, output is line-per-check") {
    RunConfig cfg;
    cfg.command = "verify";
    cfg.suite = "qcombinatorics";
    auto r = run(cfg);
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("[ok]") != std::string::npos);
    CHECK(r.out.find("PASS suite qcombinatorics") != std::string::npos);
    cfg.suite = "kunneth";
    CHECK(run(cfg).code == kExitOk);
    cfg.suite = "nonesuch";
    CHECK(run(cfg).code == kExitUsage);
}

TEST_CASE("search command: streams candidates, summary counts survivors") {
    auto dir = fresh_dir("search");
    RunConfig cfg;
    cfg.command = "search";
    cfg.ell = 3;
    cfg.dmax = 3;
    cfg.bases = "q2";
    cfg.budget = 200;
    cfg.out_path = (dir / "stream.jsonl").string();
    auto r = run(cfg);
    REQUIRE(r.code == kExitOk);
    std::ifstream stream(cfg.out_path);
    REQUIRE(stream.good());
    std::string line;
    std::size_t lines = 0;
    while (std::getline(stream, line)) {
        auto j = json::parse(line);
        CHECK(j.contains("index"));
        CHECK(j.contains("validation"));
        ++lines;
    }
    CHECK(lines == 200);
    std::ifstream summary_file(cfg.out_path + ".summary.json");
    REQUIRE(summary_file.good());
    auto summary = json::parse(summary_file);
    CHECK(summary["incomplete"] == true);
    CHECK(summary["evaluated"] == 200);
    fs::remove_all(dir);
}

TEST_CASE("search command rejects even ell with exit 2") {
    RunConfig cfg;
    cfg.command = "search";
    cfg.ell = 4;
    CHECK(run(cfg).code == kExitUsage);
}

TEST_CASE("calibrate command reports the selected convention and passers") {
    RunConfig cfg;
    cfg.command = "calibrate";
    auto r = run(cfg);
    REQUIRE(r.code == kExitOk);
    auto a = json::parse(r.out);
    CHECK(a["selected"] == "c1=1;c2=1;cross=hecke-hi");
    CHECK(a["passers"].size() == 4);
}

TEST_CASE("out path writes the artifact to disk") {
    auto dir = fresh_dir("out");
    RunConfig cfg;
    cfg.command = "homology";
    cfg.d = 3;
    cfg.out_path = (dir / "artifact.json").string();
    cfg.csv_path = (dir / "table.csv").string();
    auto r = run(cfg);
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.empty());
    std::ifstream f(cfg.out_path);
    REQUIRE(f.good());
    auto a = json::parse(f);
    CHECK(a["classification"] == "coresolution");
    std::ifstream csv(cfg.csv_path);
    REQUIRE(csv.good());
    std::string first;
    std::getline(csv, first);
    CHECK(first == "i,s,dim");
    fs::remove_all(dir);
}
