#include <cstdio>
#include <exception>
#include <fstream>
#include <future>
#include <iostream>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nmsurf/harness/calibrate.hpp"
#include "nmsurf/harness/run.hpp"

using nmsurf::ExperimentConfig;
using ordered_json = nlohmann::ordered_json;

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out;
    std::string calibration;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int jobs = 1;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "experiment config (JSON)")->required();
    cmd->add_option("--out", flags.out, "output directory");
    cmd->add_option("--calibration", flags.calibration, "calibration file");
    cmd->add_option("--seed", flags.seed, "override the config seed")
        ->each([&flags](const std::string&) { flags.seed_set = true; });
    cmd->add_option("--jobs", flags.jobs, "concurrent experiments in a batch");
}

ExperimentConfig load_config(const CommonFlags& flags, const std::string& preset_kind,
                             const ordered_json& j) {
    ordered_json jj = j;
    if (!preset_kind.empty()) jj["experiment"] = preset_kind;
    ExperimentConfig cfg = ExperimentConfig::parse(jj);
    if (!flags.out.empty()) cfg.out = flags.out;
    if (!flags.calibration.empty()) cfg.calibration_path = flags.calibration;
    if (flags.seed_set) {
        cfg.seed = flags.seed;
        cfg.resolved["seed"] = flags.seed;
    }
    return cfg;
}

int run_command(const CommonFlags& flags, const std::string& preset_kind) {
    std::ifstream in(flags.config_path);
    if (!in) {
        std::cerr << "cannot read config: " << flags.config_path << "\n";
        return 2;
    }
    ordered_json j = ordered_json::parse(in);

    std::vector<ordered_json> items;
    if (j.contains("experiments")) {
        for (auto& e : j["experiments"]) items.push_back(e);
    } else {
        items.push_back(j);
    }

    std::vector<std::future<int>> futures;
    std::vector<int> codes;
    for (auto& item : items) {
        ExperimentConfig cfg = load_config(flags, preset_kind, item);
        auto task = [cfg]() {
            nmsurf::RunResult r = nmsurf::run_experiment(cfg);
            std::printf("%s: %s\n", cfg.experiment.c_str(),
                        r.exit_code == 0 ? "pass" : "FAIL");
            return r.exit_code;
        };
        if (flags.jobs > 1 && items.size() > 1)
            futures.push_back(std::async(std::launch::async, task));
        else
            codes.push_back(task());
    }
    for (auto& f : futures) codes.push_back(f.get());
    for (int c : codes)
        if (c != 0) return 1;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonlocal minimal surface toolkit"};
    app.require_subcommand(1);

    CommonFlags flags;
    struct Sub { const char* name; const char* kind; const char* help; };
    // clang-format off
    const Sub subs[] = {
        {"kernel",    "kernel_check",      "constant-metric kernel closed form vs quadrature"},
        {"heat",      "heat_check",        "heat solver convergence, mass and symmetry checks"},
        {"nmc",       "nmc_eval",          "principal-value NMC at boundary points"},
        {"perimeter", "perimeter_eval",    "relative fractional perimeter"},
        {"flatness",  "flatness_pipeline", "dyadic cylinder analysis of a boundary"},
        {"solve",     "solve_and_verify",  "damped NMC flow to an s-minimal graph"},
        {"verify",    "",                  "run the experiment named in the config"},
    };
    // clang-format on
    std::vector<std::pair<CLI::App*, std::string>> cmds;
    for (const Sub& s : subs) {
        CLI::App* cmd = app.add_subcommand(s.name, s.help);
        add_common(cmd, flags);
        cmds.push_back({cmd, s.kind});
    }

    CLI::App* cal_cmd = app.add_subcommand("calibrate", "fit and freeze estimate constants");
    std::string cal_config, cal_out = "calibration.json";
    bool cal_force = false;
    cal_cmd->add_option("--config", cal_config, "family config (JSON)")->required();
    cal_cmd->add_option("--out", cal_out, "calibration file to write");
    cal_cmd->add_flag("--force", cal_force, "overwrite an existing calibration file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cal_cmd->parsed()) {
            std::ifstream in(cal_config);
            if (!in) {
                std::cerr << "cannot read config: " << cal_config << "\n";
                return 2;
            }
            ordered_json j = ordered_json::parse(in);
            j["experiment"] = "estimate_sweep"; // schema carrier for the family fields
            ExperimentConfig cfg = ExperimentConfig::parse(j);
            nmsurf::Calibration cal =
                nmsurf::calibrate_family(cfg.metric, cfg.dim, cfg.s, cfg.alpha);
            cal.save(cal_out, cal_force);
            std::printf("calibration written to %s\n", cal_out.c_str());
            return 0;
        }
        for (auto& [cmd, kind] : cmds)
            if (cmd->parsed()) return run_command(flags, kind);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
