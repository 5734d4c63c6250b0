#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cmgym/config.hpp"
#include "cmgym/env.hpp"
#include "cmgym/qlearning.hpp"
#include "cmgym/scenario.hpp"

namespace cmgym {

// --- policies ---------------------------------------------------------------

enum class PolicyKind { Unequipped, Random, TabularQ };

const char* to_string(PolicyKind k);
/// Accepts `unequipped`, `random`, `tabular_q`; throws ConfigError otherwise.
PolicyKind parse_policy(const std::string& name);

class Policy {
public:
    virtual ~Policy() = default;
    /// Actions for the agents in `obs`. Agents left out take NO_ALERT.
    virtual std::map<AgentId, Action> act(const std::map<AgentId, Observation>& obs) = 0;
    virtual bool needs_observations() const { return true; }
};

/// Always NO_ALERT.
class UnequippedPolicy final : public Policy {
public:
    std::map<AgentId, Action> act(const std::map<AgentId, Observation>& obs) override;
    bool needs_observations() const override { return false; }
};

/// Uniform over the six actions, one draw per agent in ascending id order.
class RandomPolicy final : public Policy {
public:
    explicit RandomPolicy(std::uint64_t seed) : rng_(make_stream(seed, StreamTag::Policy)) {}
    std::map<AgentId, Action> act(const std::map<AgentId, Observation>& obs) override;
    bool needs_observations() const override { return false; }

private:
    Rng rng_;
};

/// Greedy with respect to a trained table.
class GreedyQPolicy final : public Policy {
public:
    GreedyQPolicy(QTable table, QDiscretizer discretizer)
        : table_(std::move(table)), discretizer_(discretizer) {}
    std::map<AgentId, Action> act(const std::map<AgentId, Observation>& obs) override;

private:
    QTable table_;
    QDiscretizer discretizer_;
};

/// Builds the policy named by `run.policy`. A tabular policy loads
/// `run.q_table`.
std::unique_ptr<Policy> make_policy(const Config& config, const Scenario& scenario, std::uint64_t seed);

// --- episodes -----------------------------------------------------------------

struct RunOptions {
    std::uint64_t steps = 1440;
    std::size_t window = 500;
    double gamma = 0.99;
    bool record_transcript = false;
};

RunOptions run_options(const Config& config);

struct EpisodeResult {
    std::vector<FlightSummary> flights;  ///< completion order
    std::vector<std::uint64_t> completion_step;         ///< decision step of each completion
    std::vector<std::uint64_t> completion_agent_steps;  ///< agent-steps taken up to it
    std::vector<double> rolling;          ///< rolling destination fraction
    std::map<AgentId, double> discounted_returns;
    EpisodeTranscript transcript;
    std::uint64_t steps = 0;
    std::uint64_t agent_steps = 0;
    std::uint64_t departures = 0;

    std::size_t arrivals() const;
    double max_p_dest() const;
    /// Mean of the rolling series; NaN when it is empty.
    double mean_p_dest() const;
    /// Mean total reward per completed flight.
    double mean_reward() const;
};

/// Runs `options.steps` decision steps (or until the schedule is exhausted).
EpisodeResult run_episode(const Scenario& scenario, Policy& policy, std::uint64_t seed, const RunOptions& options);

/// Flight-level outcome counts. Every completed flight falls in exactly one bucket.
struct OutcomeCounts {
    std::size_t reached = 0;
    std::size_t landed_elsewhere = 0;
    std::size_t energy_depleted = 0;
    std::size_t nav_lost = 0;

    std::size_t total() const { return reached + landed_elsewhere + energy_depleted + nav_lost; }
};

OutcomeCounts count_outcomes(const std::vector<FlightSummary>& flights);

/// Mean of `reached` over each trailing window of completed flights. Empty
/// when there are fewer completions than `window`. Throws on window 0.
std::vector<double> rolling_dest_fraction(const std::vector<bool>& reached, std::size_t window);
std::vector<double> rolling_dest_fraction(const std::vector<FlightSummary>& flights, std::size_t window);

/// Per-agent sum of gamma^k r_k over that agent's records, in transcript order.
std::map<AgentId, double> discounted_return(const EpisodeTranscript& transcript, double gamma);

void write_flights_csv(std::ostream& out, const std::vector<FlightSummary>& flights,
                       const VertiportNetwork& network);
/// Columns: completed flight index, decision step, cumulative agent-steps,
/// rolling fraction.
void write_rolling_csv(std::ostream& out, const EpisodeResult& result, std::size_t window);

// --- sweeps -------------------------------------------------------------------

struct SweepAxis {
    std::string key;
    std::vector<std::string> values;
};

struct SweepSpec {
    Config base;
    std::vector<SweepAxis> axes;
    int seeds = 1;
    RunOptions run;
    int workers = 1;
};

/// Parses `key=v1,v2,...`; throws ConfigError for unknown keys or empty lists.
SweepAxis parse_axis(const std::string& text);

struct SweepRow {
    double p_nav = 0.0;
    double e_max_kwh = 0.0;
    std::uint64_t seed = 0;
    double max_p_dest = 0.0;
    double mean_reward = 0.0;
    std::uint64_t arrivals = 0;
    std::uint64_t departures = 0;
    // Not part of the results table.
    std::size_t cell = 0;
    int replicate = 0;
    double mean_p_dest = 0.0;
    std::uint64_t completed = 0;
    std::vector<std::pair<std::string, std::string>> assignment;
    std::string error;
};

struct SweepResult {
    std::vector<SweepRow> rows;  ///< sorted by (e_max_kwh, p_nav, cell, replicate)
    std::size_t failures() const;
};

/// Seed for replicate `r`. It depends only on the base seed and `r`, so every
/// cell sees the same demand and battery draws for a given replicate.
std::uint64_t replicate_seed(std::uint64_t base_seed, int replicate);

SweepResult run_sweep(const SweepSpec& spec);

inline constexpr const char* kResultsHeader = "p_nav,e_max_kwh,seed,max_p_dest,mean_reward,arrivals,departures";

void write_results_csv(std::ostream& out, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_results_csv(std::istream& in);

/// Per-cell means over replicates, one line per axis assignment.
void write_cell_summary_csv(std::ostream& out, const SweepResult& result);

}  // namespace cmgym
