#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tiersim/config.hpp"
#include "tiersim/report.hpp"
#include "tiersim/simulation.hpp"

namespace {

void apply_seed_override(tiersim::SimParams& p) {
    const char* env = std::getenv("TIERSIM_SEED");
    if (!env || !*env) return;
    try {
        size_t pos = 0;
        const uint64_t seed = std::stoull(env, &pos);
        if (pos != std::string(env).size()) throw std::invalid_argument("junk");
        p.seed = seed;
    } catch (const std::exception&) {
        throw tiersim::ScenarioError(std::string("TIERSIM_SEED is not an unsigned integer: '") +
                                     env + "'");
    }
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw tiersim::ScenarioError("cannot write: " + path);
    return out;
}

int cmd_run(const std::string& config_path, const std::string& series_path,
            const std::string& events_path) {
    auto cfg = tiersim::ScenarioConfig::parse_file(config_path);
    tiersim::SimParams p = cfg.to_params();
    apply_seed_override(p);
    tiersim::Simulation sim(std::move(p));
    const tiersim::RunReport report = sim.run();
    if (!series_path.empty()) {
        auto out = open_out(series_path);
        tiersim::write_series_csv(out, report);
    } else {
        tiersim::write_series_csv(std::cout, report);
    }
    if (!events_path.empty()) {
        auto out = open_out(events_path);
        tiersim::write_events_csv(out, report);
    }
    tiersim::write_summary(std::cerr, report);
    return 0;
}

int cmd_compare(const std::vector<std::string>& config_paths, const std::string& baseline_path,
                const std::string& out_path) {
    auto base_cfg = tiersim::ScenarioConfig::parse_file(baseline_path);
    tiersim::SimParams base_params = base_cfg.to_params();
    apply_seed_override(base_params);
    const std::string base_fp = tiersim::workload_fingerprint(base_params);
    const std::string base_policy = tiersim::to_string(base_params.policy);

    tiersim::Simulation base_sim(base_params);
    const auto base_report = base_sim.run();
    const uint64_t base_cost = base_report.total_cost_ns();
    if (base_cost == 0) throw tiersim::ScenarioError("baseline run has zero total cost");

    std::vector<tiersim::CompareRow> rows;
    rows.push_back({baseline_path, base_policy, base_cost, 1.0});
    for (const std::string& path : config_paths) {
        auto cfg = tiersim::ScenarioConfig::parse_file(path);
        tiersim::SimParams p = cfg.to_params();
        apply_seed_override(p);
        if (tiersim::workload_fingerprint(p) != base_fp)
            throw tiersim::ScenarioError("config " + path +
                                         " drives a different workload than the baseline; "
                                         "comparison would be meaningless");
        const std::string policy = tiersim::to_string(p.policy);
        tiersim::Simulation sim(std::move(p));
        const auto report = sim.run();
        rows.push_back({path, policy, report.total_cost_ns(),
                        static_cast<double>(report.total_cost_ns()) /
                            static_cast<double>(base_cost)});
    }
    if (!out_path.empty()) {
        auto out = open_out(out_path);
        tiersim::write_compare_csv(out, rows);
    } else {
        tiersim::write_compare_csv(std::cout, rows);
    }
    return 0;
}

int cmd_trace_validate(const std::string& path) {
    const auto records = tiersim::replay_trace_file(path);
    std::cout << "ok: " << records.size() << " records\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tiersim: deterministic two-tier memory migration simulator"};
    app.require_subcommand(1);

    std::string run_config, run_series, run_events;
    auto* run = app.add_subcommand("run", "run one scenario, emit per-interval CSV");
    run->add_option("config", run_config, "scenario file")->required();
    run->add_option("--series", run_series, "write per-interval CSV here instead of stdout");
    run->add_option("--events", run_events, "write toggle events CSV here");

    std::vector<std::string> cmp_configs;
    std::string cmp_baseline, cmp_out;
    auto* cmp = app.add_subcommand("compare", "run scenarios and report cost vs a baseline");
    cmp->add_option("configs", cmp_configs, "scenario files")->required();
    cmp->add_option("--baseline", cmp_baseline, "baseline scenario file")->required();
    cmp->add_option("--out", cmp_out, "write comparison CSV here instead of stdout");

    std::string trace_path;
    auto* tv = app.add_subcommand("trace-validate", "check a trace file's grammar");
    tv->add_option("file", trace_path, "trace file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_config, run_series, run_events);
        if (cmp->parsed()) return cmd_compare(cmp_configs, cmp_baseline, cmp_out);
        if (tv->parsed()) return cmd_trace_validate(trace_path);
    } catch (const tiersim::ScenarioError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
    return 1;
}
