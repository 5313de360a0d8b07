#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"foliation-lab: translation numbers, bounded mean motion and semiconjugacies "
                 "for foliation-preserving flows"};
    app.require_subcommand(1);

    folab::cli::Options opt;
    if (const char* env = std::getenv("FOLIATION_LAB_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) opt.threads = static_cast<std::size_t>(v);
    }

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* c = cmd->add_option("--config", opt.config_path, "experiment config (JSON)");
        if (needs_config) c->required();
        cmd->add_option("--out", opt.out_path, "output file (stdout if omitted)");
        cmd->add_option("--threads", opt.threads, "worker threads for scans");
    };

    int (*run)(const folab::cli::Options&) = nullptr;
    bool selftest = false;

    auto* rho = app.add_subcommand("rho", "translation / rotation number estimate");
    add_common(rho, true);
    rho->callback([&] { run = folab::cli::cmd_rho; });

    auto* deviation = app.add_subcommand("deviation", "bounded mean motion profile");
    add_common(deviation, true);
    deviation->callback([&] { run = folab::cli::cmd_deviation; });

    auto* gamma = app.add_subcommand("gamma", "coboundary estimates on a sample grid");
    add_common(gamma, true);
    gamma->callback([&] { run = folab::cli::cmd_gamma; });

    auto* semiconj = app.add_subcommand("semiconj", "semiconjugacy residuals");
    add_common(semiconj, true);
    semiconj->callback([&] { run = folab::cli::cmd_semiconj; });

    auto* scan = app.add_subcommand("scan-eps", "rho as a function of the epsilon perturbation");
    add_common(scan, true);
    scan->callback([&] { run = folab::cli::cmd_scan_eps; });

    auto* qc_build = app.add_subcommand("qc-build", "write substitution word and Delone files");
    add_common(qc_build, true);
    qc_build->callback([&] { run = folab::cli::cmd_qc_build; });

    auto* qc_freq = app.add_subcommand("qc-freq", "patch frequency report");
    add_common(qc_freq, true);
    qc_freq->callback([&] { run = folab::cli::cmd_qc_freq; });

    auto* self = app.add_subcommand("selftest", "run the built-in example and invariant checks");
    add_common(self, false);
    self->callback([&] { selftest = true; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 1; // bad usage is a config error
    }

    if (selftest) return folab::cli::cmd_selftest();
    return run ? run(opt) : 1;
}
