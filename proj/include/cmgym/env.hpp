#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cmgym/hazards.hpp"
#include "cmgym/kinematics.hpp"
#include "cmgym/reward.hpp"
#include "cmgym/rng.hpp"
#include "cmgym/scenario.hpp"
#include "cmgym/traffic.hpp"
#include "cmgym/transcript.hpp"

namespace cmgym {

using Observation = std::vector<double>;
using ActionCounts = std::array<std::uint32_t, kActionCount>;

/// Per-flight outcome, attached to an agent's final step.
struct FlightSummary {
    AgentId agent = 0;
    std::uint32_t aircraft = 0;
    std::size_t origin = 0;
    std::size_t destination = 0;
    TerminalKind terminal = TerminalKind::Touchdown;
    std::optional<std::size_t> landed_vertiport;
    bool reached_destination = false;
    double total_reward = 0.0;
    double final_energy_kwh = 0.0;
    double initial_energy_kwh = 0.0;
    double charge_cycles = 0.0;
    double max_corridor_deviation_m = 0.0;
    std::uint32_t steps = 0;
    std::uint32_t steps_following_route = 0;
    ActionCounts action_counts{};
    double mean_wind_mps = 0.0;
    double departure_s = 0.0;
    double end_s = 0.0;
};

struct AgentInfo {
    std::optional<TerminalKind> terminal;
    std::optional<std::size_t> landed_vertiport;
    std::vector<std::string> events;
    RewardBreakdown reward;
    ActionCounts action_counts{};
    std::optional<FlightSummary> summary;  ///< set on the final step only
};

struct AgentStep {
    AgentId agent = 0;
    Action action = Action::NoAlert;
    Observation observation;  ///< empty when observations are disabled
    double reward = 0.0;
    bool done = false;
    AgentInfo info;
};

struct StepResult {
    double time_s = 0.0;            ///< simulation time after the step
    std::vector<AgentStep> agents;  ///< agents that acted, ascending id
    /// Flights that departed at the end of this step, with first observations.
    std::map<AgentId, Observation> spawned;
};

struct EnvOptions {
    bool build_observations = true;
    bool record_transcript = false;
};

struct PadState {
    int total = 0;
    int occupied = 0;  ///< aircraft on the ground
    int reserved = 0;  ///< airborne aircraft bound for this vertiport
};

// --- pure MDP pieces --------------------------------------------------------

/// Action semantics. Heading actions latch HOLD_HEADING relative to the
/// current heading; LAND_NOW starts a descent in place; USE_ROUTE resumes the
/// route at the nearest waypoint; NO_ALERT changes nothing. A descending or
/// landed aircraft ignores mode changes and logs the fact in `events`.
AircraftState apply_action(const AircraftState& s, Action a, const Region& region, double heading_step_deg,
                           EventLog* events = nullptr);

/// Precedence: energy depletion, then navigation loss, then touchdown.
std::optional<TerminalKind> check_terminal(const AircraftState& s, bool nav_event);

/// Shortest distance from `p` to the route polyline.
double corridor_deviation_m(const AircraftState& s, const Region& region);

/// Multi-agent contingency-management environment. One agent per flight:
/// agents appear when a scheduled flight departs and leave after the step on
/// which they reach a terminal state.
class CmEnv {
public:
    explicit CmEnv(Scenario scenario, EnvOptions options = {});
    ~CmEnv();
    CmEnv(CmEnv&&) noexcept;
    CmEnv& operator=(CmEnv&&) noexcept;

    /// Rebuilds the world from the scenario and seed, spawns the departures
    /// due at t = 0 and returns their observations.
    std::map<AgentId, Observation> reset(std::uint64_t seed);
    /// Replaces the scenario first; on a configuration error the environment
    /// keeps its previous state.
    std::map<AgentId, Observation> reset(const Scenario& scenario, std::uint64_t seed);

    /// Advances one decision interval. Live agents missing from `actions`
    /// take NO_ALERT. Throws LifecycleError before reset and IdentifierError
    /// for ids that are not live.
    StepResult step(const std::map<AgentId, Action>& actions);

    bool is_reset() const { return world_ != nullptr; }
    double time_s() const;
    std::uint64_t step_count() const;
    /// True once the schedule is exhausted and nothing is airborne.
    bool finished() const;

    std::vector<AgentId> live_agents() const;
    const AircraftState& agent_state(AgentId id) const;
    Observation observe(AgentId id) const;
    std::size_t observation_size() const;

    const Scenario& scenario() const { return scenario_; }
    const VertiportNetwork& network() const;
    const std::vector<FlightPlan>& plans() const;
    std::vector<PadState> pads() const;
    std::size_t airborne() const;

    const EpisodeTranscript& transcript() const { return transcript_; }
    EpisodeTranscript take_transcript() { return std::move(transcript_); }
    void set_options(EnvOptions options) { options_ = options; }

private:
    struct World;
    struct Flight;

    Flight& live(AgentId id);
    const Flight& live(AgentId id) const;
    void dispatch();
    void integrate(Flight& f, std::vector<std::string>& events);
    Observation build_observation(const Flight& f) const;

    Scenario scenario_;
    EnvOptions options_;
    std::unique_ptr<World> world_;
    EpisodeTranscript transcript_;
};

}  // namespace cmgym
