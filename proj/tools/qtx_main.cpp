#include <CLI11.hpp>

#include <iostream>

#include "qtx/cli_core.hpp"

int main(int argc, char** argv) {
    CLI::App app{"exact engine for quantum Troesch complexes at a cube root of unity"};
    app.require_subcommand(1);
    qtx::RunConfig cfg;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--field", cfg.field_text, "coefficient field: cyclotomic or fp:<p>")
            ->capture_default_str();
        sub->add_option("--ell", cfg.ell, "order of the root of unity (odd)")
            ->capture_default_str();
        sub->add_option("--out", cfg.out_path, "artifact output path (stdout when omitted)");
        sub->add_option("--cache", cfg.cache_dir,
                        "result cache directory (QTX_CACHE_DIR also honored)");
        sub->add_option("--jobs", cfg.jobs, "worker threads for independent jobs")
            ->capture_default_str();
        sub->add_flag("--verbose", cfg.verbose, "extra detail (kernel bases, progress notes)");
    };

    CLI::App* homology = app.add_subcommand("homology", "classify the slice homology of B_d(n)");
    homology->add_option("--d", cfg.d, "weight")->required();
    homology->add_option("--n", cfg.n, "number of variables")->capture_default_str();
    homology->add_option("--model", cfg.model, "tensor | direct")->capture_default_str();
    homology->add_option("--csv", cfg.csv_path, "also write the homology table as CSV");
    add_common(homology);

    CLI::App* verify = app.add_subcommand("verify", "run an identity suite, exit 1 on failure");
    verify
        ->add_option("suite", cfg.suite,
                     "relations | leibniz | troesch | ladder | kunneth | qcombinatorics")
        ->required();
    verify->add_option("--dmax", cfg.dmax, "suite-specific depth bound");
    verify->add_option("--n", cfg.n, "number of variables bound")->capture_default_str();
    add_common(verify);

    CLI::App* search = app.add_subcommand(
        "search", "certified search for candidate differentials at odd ell");
    search->add_option("--dmax", cfg.dmax, "certification horizon (default 6)");
    search->add_option("--budget", cfg.budget, "candidate evaluation cap (0: whole space)");
    search->add_option("--bases", cfg.bases, "quantum-integer base: q | q2 | both")
        ->capture_default_str();
    add_common(search);

    CLI::App* dims = app.add_subcommand("dims", "graded dimension tables");
    dims->add_option("--target", cfg.target, "B | SE | divisible")->required();
    dims->add_option("--d", cfg.d, "weight")->required();
    dims->add_option("--n", cfg.n, "number of variables")->capture_default_str();
    dims->add_option("--csv", cfg.csv_path, "also write the table as CSV");
    add_common(dims);

    CLI::App* calibrate =
        app.add_subcommand("calibrate", "run convention calibration and print the outcome");
    add_common(calibrate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : qtx::kExitUsage;
    }

    for (CLI::App* sub : {homology, verify, search, dims, calibrate})
        if (sub->parsed()) cfg.command = sub->get_name();
    return qtx::run_command(cfg, std::cout, std::cerr);
}
