#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace qtx {

inline constexpr const char* kVersion = "qtx 0.1.0";

// Exit-code contract: 0 ok, 1 identity failure, 2 usage error, 3 internal
// invariant breach.
enum ExitCode : int {
    kExitOk = 0,
    kExitIdentityFailure = 1,
    kExitUsage = 2,
    kExitInvariantBreach = 3,
};

struct RunConfig {
    std::string command;  // homology | verify | search | dims | calibrate
    std::string field_text = "cyclotomic";
    int ell = 3;
    int d = 0;
    int n = 1;
    int dmax = -1;  // command-specific default when negative
    std::string model = "tensor";
    std::string suite;   // verify
    std::string target;  // dims: B | SE | divisible
    std::string out_path;
    std::string csv_path;
    std::string cache_dir;  // overrides QTX_CACHE_DIR
    std::uint64_t budget = 0;
    int jobs = 1;
    bool verbose = false;
    std::string bases = "both";  // search: q | q2 | both
};

// Validates, dispatches and writes artifacts. Human-readable progress goes to
// `err`; artifact payloads go to `out` when no output path is configured.
int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace qtx
