// egmrsi command-line front end: run, verify, fig3, sweep.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "egmrsi/egmrsi.hpp"

namespace {

using namespace egmrsi;

RunConfig config_or_default(const std::string& path) {
    if (path.empty()) {
        RunConfig cfg;
        cfg.validate();
        return cfg;
    }
    return load_config(path);
}

std::vector<std::string> split_names(const std::vector<std::string>& raw) {
    std::vector<std::string> out;
    for (const std::string& item : raw) {
        std::stringstream ss(item);
        std::string name;
        while (std::getline(ss, name, ',')) {
            if (!name.empty()) out.push_back(name);
        }
    }
    return out;
}

std::vector<std::string> resolve_selection(const std::vector<std::string>& raw, bool given) {
    if (!given) return checks_of_kind(CheckKind::trace);
    std::vector<std::string> names = split_names(raw);
    if (names.size() == 1 && names[0] == "all") return all_checks();
    if (names.size() == 1 && names[0] == "synthetic") return checks_of_kind(CheckKind::synthetic);
    return names;
}

int emit(const StatReport& rep) {
    std::cout << rep.to_report().str();
    return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Emotion-gradient metacognitive self-improvement simulator and verification harness"};
    app.require_subcommand(1);

    std::string run_config, run_out;
    std::uint64_t run_seed = 0;
    std::size_t run_steps = 0;
    auto* run_cmd = app.add_subcommand("run", "Run one simulation and write its trace and summary");
    run_cmd->add_option("--config", run_config, "Config file (defaults when omitted)");
    auto* run_seed_opt = run_cmd->add_option("--seed", run_seed, "Override run.seed");
    auto* run_steps_opt = run_cmd->add_option("--steps", run_steps, "Override run.steps");
    run_cmd->add_option("--out", run_out, "Trace CSV path; the summary goes to <out>.report")->required();

    std::vector<std::string> verify_traces, verify_checks;
    std::uint64_t verify_seed = VerifyOptions{}.seed;
    bool verify_list = false;
    auto* verify_cmd = app.add_subcommand("verify", "Run registry checks over recorded traces");
    verify_cmd->add_option("--trace", verify_traces, "Trace CSV paths")->expected(1, -1);
    auto* checks_opt = verify_cmd->add_option(
        "--checks", verify_checks,
        "Comma-separated check names, 'all' or 'synthetic' (default: every trace check)");
    checks_opt->expected(0, -1);
    checks_opt->allow_extra_args();
    verify_cmd->add_option("--seed", verify_seed, "Seed of the synthetic Monte-Carlo checks");
    verify_cmd->add_flag("--list", verify_list, "List the registry and exit");

    std::string fig_config, fig_out;
    auto* fig_cmd = app.add_subcommand("fig3", "Information-gain crossing over 150 steps, with an SVG plot");
    fig_cmd->add_option("--config", fig_config, "Config file (defaults when omitted)");
    fig_cmd->add_option("--out", fig_out, "SVG output path")->required();

    std::string sweep_config, sweep_dir = "sweep_out";
    std::size_t sweep_seeds = 5, sweep_steps = 0;
    unsigned sweep_jobs = std::max(1u, std::thread::hardware_concurrency());
    auto* sweep_cmd = app.add_subcommand("sweep", "Run consecutive seeds and verify them together");
    sweep_cmd->add_option("--config", sweep_config, "Config file (defaults when omitted)");
    sweep_cmd->add_option("--seeds", sweep_seeds, "Number of seeds, starting at run.seed")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--steps", sweep_steps, "Override run.steps");
    sweep_cmd->add_option("--out-dir", sweep_dir, "Directory for per-seed traces");
    sweep_cmd->add_option("--jobs", sweep_jobs, "Runs executed concurrently")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            RunConfig cfg = config_or_default(run_config);
            if (*run_seed_opt) cfg.seed = run_seed;
            if (*run_steps_opt) cfg.steps = run_steps;
            cfg.output_path = run_out;
            const RunResult r = run(cfg);
            write_run(r, run_out);
            for (const std::string& w : r.warnings) std::cerr << "warning: " << w << '\n';
            std::cout << "trace = " << run_out << "\nreport = " << report_path_for(run_out) << '\n';
            return 0;
        }
        if (*verify_cmd) {
            if (verify_list) {
                for (const CheckSpec& c : registry()) {
                    std::cout << c.name << " [" << (c.kind == CheckKind::trace ? "trace" : "synthetic") << "] "
                              << c.description << '\n';
                }
                return 0;
            }
            VerifyOptions opt;
            opt.seed = verify_seed;
            const std::vector<std::string> sel = resolve_selection(verify_checks, checks_opt->count() > 0);
            return emit(verify_files(verify_traces, sel, opt));
        }
        if (*fig_cmd) {
            RunConfig cfg = config_or_default(fig_config);
            cfg.steps = std::max(cfg.steps, kFig3Steps);
            const Fig3Result r = fig3(cfg);
            write_fig3_svg(fig_out, r);
            std::cout << fig3_report(r).str() << "plot = " << fig_out << '\n';
            return 0;
        }
        if (*sweep_cmd) {
            const RunConfig base = config_or_default(sweep_config);
            std::filesystem::create_directories(sweep_dir);
            std::vector<std::string> paths;
            std::vector<RunConfig> cfgs;
            for (std::size_t i = 0; i < sweep_seeds; ++i) {
                RunConfig cfg = base;
                cfg.seed = base.seed + i;
                if (sweep_steps) cfg.steps = sweep_steps;
                cfg.output_path = (std::filesystem::path(sweep_dir) / ("seed_" + std::to_string(cfg.seed) + ".csv")).string();
                paths.push_back(cfg.output_path);
                cfgs.push_back(cfg);
            }
            // Each run owns its state; results are written by their own task.
            for (std::size_t start = 0; start < cfgs.size(); start += sweep_jobs) {
                std::vector<std::future<void>> jobs;
                const std::size_t end = std::min(cfgs.size(), start + sweep_jobs);
                for (std::size_t i = start; i < end; ++i) {
                    jobs.push_back(std::async(std::launch::async, [&cfg = cfgs[i]] { write_run(run(cfg), cfg.output_path); }));
                }
                for (auto& j : jobs) j.get();
            }
            const StatReport rep = verify_files(paths, checks_of_kind(CheckKind::trace));
            KeyValueReport kv = rep.to_report();
            kv.set("seeds", sweep_seeds);
            std::cout << kv.str();
            return rep.all_pass() ? 0 : 1;
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 2;
    } catch (const RunError& e) {
        std::cerr << "run error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
