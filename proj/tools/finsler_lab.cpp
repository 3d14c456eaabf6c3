// finsler_lab: spray/Finsler geometry workbench.
//   analyze   evaluate g, G, N, R, tau, S, chi at points
//   classify  run the Hamel/Funk classification of a candidate
//   verify    run a named verification suite
//   geodesic  integrate a geodesic and export CSV
#include "finsler/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace {

void add_common(CLI::App* cmd, finsler::cli::CommonOptions& o) {
    cmd->add_option("--dim", o.dim, "dimension for presets")->check(CLI::Range(2, 8));
    cmd->add_option("--seed", o.seed, "sample-set seed");
    cmd->add_option("--samples", o.samples, "sample-set size")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--tol-scale", o.tol_scale,
                    "multiplies every tolerance (default 1)");
    cmd->add_option("--out", o.out_path, "write the report to this path");
    cmd->add_option("--format", o.format, "report format")
        ->check(CLI::IsMember({"text", "json"}));
    cmd->add_flag("--timings", o.timings, "include wall-clock timings in JSON");
}

void add_fixture(CLI::App* cmd, finsler::cli::FixtureRef& ref) {
    cmd->add_option("--spec", ref.spec_path, "spec file (key = value lines)");
    cmd->add_option("--preset", ref.preset,
                    "euclidean | randers-constant | conformal | funk | berwald | "
                    "perturbed-randers");
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* threads = std::getenv("FINSLER_LAB_THREADS")) {
        char* end = nullptr;
        long cap = std::strtol(threads, &end, 10);
        if (end == threads || cap < 1) {
            std::cerr << "FINSLER_LAB_THREADS must be a positive integer\n";
            return 2;
        }
        // evaluation currently runs on one worker; any cap >= 1 is honored
    }

    CLI::App app{"spray and Finsler geometry workbench"};
    app.require_subcommand(1);

    finsler::cli::CommonOptions aopt;
    finsler::cli::FixtureRef aref;
    std::vector<std::string> at;
    int sample_count = 3;
    CLI::App* analyze = app.add_subcommand("analyze", "evaluate local quantities");
    add_common(analyze, aopt);
    add_fixture(analyze, aref);
    analyze->add_option("--at", at, "phase points 'x1,..;y1,..' (repeatable)");
    analyze->add_option("--sample-count", sample_count,
                        "number of sampled points when --at is absent")
        ->check(CLI::PositiveNumber);

    finsler::cli::CommonOptions copt;
    finsler::cli::FixtureRef cref;
    CLI::App* classify =
        app.add_subcommand("classify", "Hamel/Funk classification of f");
    add_common(classify, copt);
    add_fixture(classify, cref);

    finsler::cli::CommonOptions vopt;
    std::string suite;
    CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
    add_common(verify, vopt);
    verify->add_option("suite", suite, "projective | shf | schi | funk | all")
        ->required();

    finsler::cli::CommonOptions gopt;
    finsler::cli::FixtureRef gref;
    std::string init, csv;
    double h = 1e-3, T = 1.0;
    CLI::App* geodesic = app.add_subcommand("geodesic", "integrate a geodesic");
    add_common(geodesic, gopt);
    add_fixture(geodesic, gref);
    geodesic->add_option("--init", init, "start point 'x1,..;y1,..'")->required();
    geodesic->add_option("--step", h, "integration step size");
    geodesic->add_option("--horizon", T, "integration horizon");
    geodesic->add_option("--csv", csv, "trajectory CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (*analyze) return finsler::cli::cmd_analyze(aref, at, aopt, sample_count);
        if (*classify) return finsler::cli::cmd_classify(cref, copt);
        if (*verify) return finsler::cli::cmd_verify(suite, vopt);
        if (*geodesic) return finsler::cli::cmd_geodesic(gref, init, h, T, csv, gopt);
    } catch (const finsler::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
