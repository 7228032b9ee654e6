#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "steinpair/acceptance.hpp"
#include "steinpair/experiment.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int workers = 0;
    bool workers_set = false;
    std::string out_dir;
    bool check = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "experiment config (JSON)")->required();
    cmd->add_option("--seed", flags.seed, "master seed override")
        ->each([&flags](const std::string&) { flags.seed_set = true; });
    cmd->add_option("--workers", flags.workers, "worker threads (default: all cores)")
        ->each([&flags](const std::string&) { flags.workers_set = true; });
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_flag("--check", flags.check, "exit 3 when the mode's checks fail");
}

int run_mode(const std::string& mode, const CommonFlags& flags) {
    std::ifstream in(flags.config_path);
    if (!in) {
        std::cerr << "error: cannot open config " << flags.config_path << "\n";
        return steinpair::kExitValidation;
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    // the subcommand pins the mode; a differing config "mode" field is overridden
    try {
        nlohmann::json j = nlohmann::json::parse(text);
        j["mode"] = mode;
        text = j.dump();
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: config parse error: " << e.what() << "\n";
        return steinpair::kExitValidation;
    }
    steinpair::RunOptions opts;
    if (flags.seed_set) opts.seed = flags.seed;
    if (flags.workers_set) opts.workers = flags.workers;
    if (!flags.out_dir.empty()) opts.out_dir = flags.out_dir;
    opts.check = flags.check;
    return steinpair::run_experiment_json(text, opts, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exchangeable-pair Berry-Esseen laboratory"};
    app.require_subcommand(1);

    CommonFlags rates_flags, bound_flags, diag_flags, table_flags, check_flags;
    auto* rates = app.add_subcommand("rates", "KS distance vs n and log-log rate fit");
    add_common(rates, rates_flags);
    auto* bound = app.add_subcommand("bound", "estimate the Berry-Esseen right-hand side");
    add_common(bound, bound_flags);
    auto* diag = app.add_subcommand("diagnose", "exchangeability and regression diagnostics");
    add_common(diag, diag_flags);
    auto* table = app.add_subcommand("target-table", "export a target law as CSV");
    add_common(table, table_flags);
    auto* check = app.add_subcommand("check", "run the acceptance suite");
    check->add_option("--seed", check_flags.seed, "master seed")
        ->each([&check_flags](const std::string&) { check_flags.seed_set = true; });
    check->add_option("--workers", check_flags.workers, "worker threads");

    CLI11_PARSE(app, argc, argv);

    if (check->parsed()) {
        steinpair::AcceptanceOptions opts;
        if (check_flags.seed_set) opts.seed = check_flags.seed;
        opts.workers = check_flags.workers;
        const int failures = steinpair::run_acceptance(opts, std::cout);
        return failures == 0 ? steinpair::kExitOk : steinpair::kExitCheckFailed;
    }
    if (rates->parsed()) return run_mode("rates", rates_flags);
    if (bound->parsed()) return run_mode("bound", bound_flags);
    if (diag->parsed()) return run_mode("diagnose", diag_flags);
    if (table->parsed()) return run_mode("target-table", table_flags);
    return steinpair::kExitValidation;
}
