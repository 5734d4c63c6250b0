// Command-line front end: run, sweep, plot, train, plans, config, serve.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cmgym/config.hpp"
#include "cmgym/errors.hpp"
#include "cmgym/harness.hpp"
#include "cmgym/plot.hpp"
#include "cmgym/protocol.hpp"
#include "cmgym/qlearning.hpp"
#include "cmgym/scenario.hpp"

namespace fs = std::filesystem;
using namespace cmgym;

namespace {

Config load_config(const std::string& path, const std::vector<std::string>& overrides) {
    Config c;
    if (!path.empty()) c.load_file(path);
    for (const auto& o : overrides) c.apply_override(o);
    return c;
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void print_warnings(const Scenario& s) {
    for (const auto& w : s.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides, const fs::path& out_dir,
            bool transcript) {
    const Config c = load_config(config_path, overrides);
    const Scenario scenario = Scenario::from_config(c);
    print_warnings(scenario);
    RunOptions opts = run_options(c);
    opts.record_transcript = transcript;
    auto policy = make_policy(c, scenario, scenario.seed);
    const EpisodeResult r = run_episode(scenario, *policy, scenario.seed, opts);

    const VertiportNetwork network = build_network(scenario.network);
    {
        auto out = open_out(out_dir / "flights.csv");
        write_flights_csv(out, r.flights, network);
    }
    {
        auto out = open_out(out_dir / "rolling.csv");
        write_rolling_csv(out, r, opts.window);
    }
    {
        auto out = open_out(out_dir / "returns.csv");
        out << "agent_id,discounted_return\n";
        char buf[64];
        for (const auto& [id, g] : r.discounted_returns) {
            std::snprintf(buf, sizeof buf, "%u,%.17g\n", static_cast<unsigned>(id), g);
            out << buf;
        }
    }
    if (transcript) {
        auto out = open_out(out_dir / "transcript.csv");
        write_transcript(out, r.transcript);
    }
    {
        auto out = open_out(out_dir / "config.txt");
        out << c.to_text();
    }

    const OutcomeCounts oc = count_outcomes(r.flights);
    std::printf("steps %llu  departures %llu  completed %zu\n", static_cast<unsigned long long>(r.steps),
                static_cast<unsigned long long>(r.departures), r.flights.size());
    std::printf("reached %zu  landed_elsewhere %zu  energy_depleted %zu  nav_lost %zu\n", oc.reached,
                oc.landed_elsewhere, oc.energy_depleted, oc.nav_lost);
    std::printf("max_p_dest %.6g  mean_p_dest %.6g  mean_reward %.6g\n", r.max_p_dest(), r.mean_p_dest(),
                r.mean_reward());
    if (transcript)
        std::printf("transcript_hash %016llx\n", static_cast<unsigned long long>(transcript_hash(r.transcript)));
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::vector<std::string>& overrides,
              const std::vector<std::string>& axes, int seeds, int workers, const fs::path& out_path) {
    SweepSpec spec;
    spec.base = load_config(config_path, overrides);
    for (const auto& a : axes) spec.axes.push_back(parse_axis(a));
    spec.seeds = seeds;
    spec.workers = workers;
    spec.run = run_options(spec.base);
    // Fail fast on the base configuration before any cell runs.
    print_warnings(Scenario::from_config(spec.base));

    const SweepResult result = run_sweep(spec);
    {
        auto out = open_out(out_path);
        write_results_csv(out, result.rows);
    }
    fs::path summary = out_path;
    summary.replace_filename(out_path.stem().string() + "_cells.csv");
    {
        auto out = open_out(summary);
        write_cell_summary_csv(out, result);
    }
    write_results_csv(std::cout, result.rows);
    for (const auto& r : result.rows)
        if (!r.error.empty()) std::fprintf(stderr, "cell %zu replicate %d failed: %s\n", r.cell, r.replicate, r.error.c_str());
    return result.failures() ? 1 : 0;
}

int cmd_plot(const fs::path& in_path, const fs::path& out_dir) {
    std::ifstream in(in_path);
    if (!in) throw std::runtime_error("cannot read " + in_path.string());
    const auto rows = read_results_csv(in);
    auto out = open_out(out_dir / "max_p_dest.svg");
    out << line_chart_svg(max_p_dest_series(rows), "Max rolling destination fraction", "E_max (kWh)",
                          "max P_dest");
    std::printf("wrote %s\n", (out_dir / "max_p_dest.svg").string().c_str());
    return 0;
}

int cmd_train(const std::string& config_path, const std::vector<std::string>& overrides, const fs::path& out_path,
              const fs::path& curve_path) {
    const Config c = load_config(config_path, overrides);
    const Scenario scenario = Scenario::from_config(c);
    print_warnings(scenario);
    const QParams params = q_params(c, scenario);
    const TrainResult r = train_tabular_q(scenario, params, scenario.seed);
    {
        auto out = open_out(out_path);
        r.table.save(out);
    }
    auto out = open_out(curve_path);
    out << "episode,mean_return\n";
    for (std::size_t i = 0; i < r.learning_curve.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%zu,%.9g\n", i, r.learning_curve[i]);
        out << buf;
    }
    std::printf("trained %d episodes, %zu states\n", params.episodes, r.table.states());
    return 0;
}

int cmd_plans(const std::string& config_path, const std::vector<std::string>& overrides) {
    const Config c = load_config(config_path, overrides);
    const Scenario scenario = Scenario::from_config(c);
    const VertiportNetwork network = build_network(scenario.network);
    write_flight_plans(std::cout, network, generate_demand(network, scenario.demand, scenario.seed));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Contingency-management environment for advanced air mobility"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    auto add_config = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Configuration file")->check(CLI::ExistingFile);
        sub->add_option("overrides", overrides, "key=value overrides");
    };

    auto* run = app.add_subcommand("run", "Run one episode and write metrics");
    add_config(run);
    std::string run_out = "run_out";
    bool transcript = false;
    run->add_option("--out", run_out, "Output directory");
    run->add_flag("--transcript", transcript, "Also write the per-step transcript");

    auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
    add_config(sweep);
    std::vector<std::string> axes;
    int seeds = 1;
    int workers = 1;
    std::string sweep_out = "results.csv";
    sweep->add_option("--axis", axes, "key=v1,v2,... (repeatable)");
    sweep->add_option("--seeds", seeds, "Replicates per cell")->check(CLI::PositiveNumber);
    sweep->add_option("--workers", workers, "Parallel workers")->check(CLI::PositiveNumber);
    sweep->add_option("--out", sweep_out, "Results CSV path");

    auto* plot = app.add_subcommand("plot", "Plot a results table as SVG");
    std::string plot_in, plot_out = "figs";
    plot->add_option("--in", plot_in, "Results CSV")->required()->check(CLI::ExistingFile);
    plot->add_option("--out", plot_out, "Output directory");

    auto* train = app.add_subcommand("train", "Train the tabular Q baseline");
    add_config(train);
    std::string q_out = "q_table.txt", curve_out = "learning_curve.csv";
    train->add_option("--out", q_out, "Q-table path");
    train->add_option("--curve", curve_out, "Learning-curve CSV path");

    auto* plans = app.add_subcommand("plans", "Print the generated flight plans");
    add_config(plans);

    auto* show = app.add_subcommand("config", "Print the effective configuration");
    add_config(show);

    auto* serve_cmd = app.add_subcommand("serve", "Serve the environment protocol");
    bool stdio = false;
    serve_cmd->add_flag("--stdio", stdio, "Use standard input and output")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config_path, overrides, run_out, transcript);
        if (*sweep) return cmd_sweep(config_path, overrides, axes, seeds, workers, sweep_out);
        if (*plot) return cmd_plot(plot_in, plot_out);
        if (*train) return cmd_train(config_path, overrides, q_out, curve_out);
        if (*plans) return cmd_plans(config_path, overrides);
        if (*show) {
            std::cout << load_config(config_path, overrides).to_text();
            return 0;
        }
        if (*serve_cmd) {
            std::ios::sync_with_stdio(false);
            return serve(std::cin, std::cout);
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
