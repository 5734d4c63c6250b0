#include "cmgym/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "cmgym/errors.hpp"

namespace cmgym {

namespace {

constexpr double kEnergyScaleKwh = 350.0;
constexpr double kTimeEps = 1e-9;

double ceil_to(double t, double step) { return std::ceil(t / step - kTimeEps) * step; }

double segment_distance(LocalXY p, LocalXY a, LocalXY b) {
    const LocalXY ab = b - a;
    const double len2 = ab.x * ab.x + ab.y * ab.y;
    if (len2 <= 0.0) return (p - a).norm();
    const double t = std::clamp(((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

void dedupe(std::vector<std::string>& events) {
    std::vector<std::string> out;
    for (auto& e : events)
        if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(std::move(e));
    events = std::move(out);
}

}  // namespace

AircraftState apply_action(const AircraftState& s, Action a, const Region& region, double heading_step_deg,
                           EventLog* events) {
    AircraftState out = s;
    if (a == Action::NoAlert) return out;
    if (s.nav_mode == NavMode::Descending || s.landed()) {
        if (events) events->emplace_back("action_ignored_descending");
        return out;
    }
    switch (a) {
        case Action::HeadingLeft:
        case Action::HeadingHold:
        case Action::HeadingRight: {
            const double delta =
                a == Action::HeadingLeft ? -heading_step_deg : a == Action::HeadingRight ? heading_step_deg : 0.0;
            out.nav_mode = NavMode::HoldHeading;
            out.commanded_heading_deg = normalize_heading(s.heading_deg + delta);
            break;
        }
        case Action::LandNow:
            out.nav_mode = NavMode::Descending;
            break;
        case Action::UseRoute:
            out.nav_mode = NavMode::FollowRoute;
            if (s.route && s.route->size() > 0) {
                const LocalXY here = region.project(s.position);
                std::size_t best = 0;
                double best_d = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < s.route->size(); ++i) {
                    const double d = (s.route->local[i] - here).norm();
                    if (d < best_d) {
                        best_d = d;
                        best = i;
                    }
                }
                out.active_waypoint = best;
                out.route_distance_remaining_m = route_distance_remaining(out, region);
            }
            break;
        case Action::NoAlert:
            break;
    }
    return out;
}

std::optional<TerminalKind> check_terminal(const AircraftState& s, bool nav_event) {
    if (s.energy_kwh <= 0.0) return TerminalKind::EnergyDepleted;
    if (nav_event) return TerminalKind::NavLost;
    if (s.landed()) return TerminalKind::Touchdown;
    return std::nullopt;
}

double corridor_deviation_m(const AircraftState& s, const Region& region) {
    if (!s.route || s.route->size() == 0) return 0.0;
    const auto& pts = s.route->local;
    const LocalXY here = region.project(s.position);
    if (pts.size() == 1) return (here - pts[0]).norm();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < pts.size(); ++i) best = std::min(best, segment_distance(here, pts[i - 1], pts[i]));
    return best;
}

// --- environment ------------------------------------------------------------

struct CmEnv::Flight {
    AircraftState state;
    Rng consumption_rng;
    Rng nav_rng;
    FlightSummary summary;
    double wind_sum = 0.0;
    bool done = false;
};

struct CmEnv::World {
    std::uint64_t seed = 0;
    VertiportNetwork network;
    std::vector<GeoPoint> vertiport_points;
    std::vector<FlightPlan> plans;
    std::vector<std::vector<std::size_t>> slot_plans;
    std::vector<std::size_t> slot_next;
    std::vector<double> slot_available;
    std::vector<bool> slot_airborne;
    std::vector<int> occupied;
    std::vector<int> reserved;
    std::map<AgentId, Flight> live;
    std::map<AgentId, Observation> spawned;
    std::unique_ptr<ConsumptionModel> consumption;
    double time_s = 0.0;
    std::uint64_t steps = 0;
};

CmEnv::CmEnv(Scenario scenario, EnvOptions options) : scenario_(std::move(scenario)), options_(options) {}
CmEnv::~CmEnv() = default;
CmEnv::CmEnv(CmEnv&&) noexcept = default;
CmEnv& CmEnv::operator=(CmEnv&&) noexcept = default;

std::map<AgentId, Observation> CmEnv::reset(const Scenario& scenario, std::uint64_t seed) {
    CmEnv fresh(scenario, options_);
    auto obs = fresh.reset(seed);
    *this = std::move(fresh);
    return obs;
}

std::map<AgentId, Observation> CmEnv::reset(std::uint64_t seed) {
    auto w = std::make_unique<World>();
    w->seed = seed;
    w->network = build_network(scenario_.network);
    for (const auto& v : w->network.vertiports) w->vertiport_points.push_back(v.location);
    w->plans = generate_demand(w->network, scenario_.demand, seed);

    const auto fleet = static_cast<std::size_t>(scenario_.demand.fleet_size);
    w->slot_plans.assign(fleet, {});
    for (std::size_t i = 0; i < w->plans.size(); ++i) w->slot_plans.at(w->plans[i].aircraft).push_back(i);
    w->slot_next.assign(fleet, 0);
    w->slot_available.assign(fleet, 0.0);
    w->slot_airborne.assign(fleet, false);
    for (const auto& v : w->network.vertiports) {
        w->occupied.push_back(v.occupied_pads);
        w->reserved.push_back(0);
    }
    w->consumption = std::make_unique<LinearConsumption>(scenario_.energy);

    world_ = std::move(w);
    transcript_.clear();
    dispatch();
    auto out = std::move(world_->spawned);
    world_->spawned.clear();
    return out;
}

void CmEnv::dispatch() {
    World& w = *world_;
    const Region& region = w.network.region;
    for (std::size_t slot = 0; slot < w.slot_plans.size(); ++slot) {
        if (w.slot_airborne[slot] || w.slot_next[slot] >= w.slot_plans[slot].size()) continue;
        if (w.slot_available[slot] > w.time_s + kTimeEps) continue;
        const FlightPlan& p = w.plans[w.slot_plans[slot][w.slot_next[slot]]];
        if (p.departure_s > w.time_s + kTimeEps) continue;
        const int total = w.network.vertiports[p.destination].total_pads;
        if (w.occupied[p.destination] + w.reserved[p.destination] >= total) continue;

        ++w.slot_next[slot];
        w.slot_airborne[slot] = true;
        --w.occupied[p.origin];
        ++w.reserved[p.destination];

        Flight f;
        auto battery = make_stream(w.seed, StreamTag::Battery, p.flight_id);
        f.consumption_rng = make_stream(w.seed, StreamTag::Consumption, p.flight_id);
        f.nav_rng = make_stream(w.seed, StreamTag::Navigation, p.flight_id);

        AircraftState& s = f.state;
        s.id = p.flight_id;
        s.vehicle = p.aircraft;
        s.position = p.waypoints.front();
        s.altitude_ft = p.lane_ft;
        s.speed_kn = p.cruise_speed_kn;
        s.cruise_speed_kn = p.cruise_speed_kn;
        s.accel_limit_g = scenario_.sim.accel_limit_g;
        s.charge_cycles = sample_initial_cycles(battery, scenario_.energy);
        s.energy_kwh = energy_capacity(s.charge_cycles, scenario_.energy);
        s.route = Route::make(p.waypoints, p.lane_ft, region);
        s.active_waypoint = 0;
        s.origin = p.origin;
        s.destination = p.destination;
        s.nav_mode = NavMode::FollowRoute;
        const auto g = advance_route(s, region, scenario_.sim.kinematics);
        s.active_waypoint = g.active_waypoint;
        s.heading_deg = g.heading_deg;
        s.commanded_heading_deg = g.heading_deg;
        s.route_distance_remaining_m = route_distance_remaining(s, region);

        auto& sum = f.summary;
        sum.agent = p.flight_id;
        sum.aircraft = p.aircraft;
        sum.origin = p.origin;
        sum.destination = p.destination;
        sum.initial_energy_kwh = s.energy_kwh;
        sum.charge_cycles = s.charge_cycles;
        sum.departure_s = w.time_s;

        const AgentId id = p.flight_id;
        w.live.emplace(id, std::move(f));
        w.spawned.emplace(id, Observation{});
    }
    for (auto& [id, obs] : w.spawned)
        if (options_.build_observations && obs.empty()) obs = build_observation(w.live.at(id));
}

void CmEnv::integrate(Flight& f, std::vector<std::string>& events) {
    const Region& region = world_->network.region;
    const auto& sim = scenario_.sim;
    AircraftState& s = f.state;
    double remaining = sim.decision_interval_s;
    while (remaining > kTimeEps && !s.landed()) {
        const double h = std::min(sim.dt_s, remaining);
        remaining -= h;
        if (s.nav_mode == NavMode::Descending) {
            s = descend(s, h, region, sim.kinematics);
            continue;
        }
        const WindVector wind = wind_at(scenario_.wind, s.position, &events);
        if (s.nav_mode == NavMode::FollowRoute) {
            const auto g = advance_route(s, region, sim.kinematics);
            s.active_waypoint = g.active_waypoint;
            if (g.exhausted) {
                s.nav_mode = NavMode::Descending;
                s = descend(s, h, region, sim.kinematics);
                continue;
            }
            s.commanded_heading_deg = g.heading_deg;
            s = step_kinematics(s, g.heading_deg, g.speed_kn, wind, h, region, sim.kinematics, &events);
        } else {
            s = step_kinematics(s, s.commanded_heading_deg, s.cruise_speed_kn, wind, h, region, sim.kinematics,
                                &events);
        }
    }
    s.route_distance_remaining_m = route_distance_remaining(s, region);
}

StepResult CmEnv::step(const std::map<AgentId, Action>& actions) {
    if (!world_) throw LifecycleError("step called before reset");
    World& w = *world_;
    for (const auto& [id, a] : actions) {
        if (!w.live.count(id)) throw IdentifierError("agent " + std::to_string(id) + " is not live");
        if (action_index(a) < 0 || action_index(a) >= kActionCount) throw IdentifierError("invalid action");
    }

    const Region& region = w.network.region;
    const auto& sim = scenario_.sim;
    const double t0 = w.time_s;
    StepResult result;
    result.agents.reserve(w.live.size());

    for (auto& [id, f] : w.live) {
        const auto it = actions.find(id);
        const Action a = it == actions.end() ? Action::NoAlert : it->second;
        AgentStep step;
        step.agent = id;
        step.action = a;
        auto& events = step.info.events;

        AircraftState& s = f.state;
        s = apply_action(s, a, region, sim.heading_step_deg, &events);
        const WindVector wind = wind_at(scenario_.wind, s.position, nullptr);
        f.wind_sum += std::hypot(wind.north, wind.east);
        integrate(f, events);
        if (s.nav_mode == NavMode::FollowRoute) ++f.summary.steps_following_route;

        const double used = w.consumption->consume(s, 1, f.consumption_rng);
        s.energy_kwh = std::max(0.0, s.energy_kwh - used);
        const bool nav_event = nav_loss_event(scenario_.nav, s.position, f.nav_rng);
        if (nav_event) s.nav_lost = true;
        const auto terminal = check_terminal(s, nav_event);

        std::optional<std::size_t> landed_at;
        if (terminal == TerminalKind::Touchdown) landed_at = w.network.vertiport_at(s.position, sim.vertiport_radius_m);
        const RewardContext ctx{s.position, s.route_distance_remaining_m, s.destination,
                                landed_at && *landed_at == s.destination};
        const RewardBreakdown rb = compute_reward(ctx, a, terminal, w.vertiport_points, scenario_.reward);

        auto& sum = f.summary;
        ++sum.steps;
        ++sum.action_counts[action_index(a)];
        sum.total_reward += rb.total;
        sum.max_corridor_deviation_m = std::max(sum.max_corridor_deviation_m, corridor_deviation_m(s, region));

        dedupe(events);
        step.reward = rb.total;
        step.done = terminal.has_value();
        step.info.terminal = terminal;
        step.info.landed_vertiport = landed_at;
        step.info.reward = rb;
        step.info.action_counts = sum.action_counts;
        if (terminal) {
            f.done = true;
            sum.terminal = *terminal;
            sum.landed_vertiport = landed_at;
            sum.reached_destination = ctx.at_destination;
            sum.final_energy_kwh = s.energy_kwh;
            sum.mean_wind_mps = f.wind_sum / sum.steps;
            sum.end_s = t0 + sim.decision_interval_s;
            step.info.summary = sum;
        }

        if (options_.record_transcript) {
            TranscriptRecord r;
            r.t_s = t0;
            r.agent = id;
            r.action = a;
            r.reward = rb.total;
            r.r_s = rb.r_state;
            r.r_h = rb.r_vertiport;
            r.r_a = rb.r_action;
            r.omega = rb.omega;
            r.lat = s.position.lat;
            r.lon = s.position.lon;
            r.alt_ft = s.altitude_ft;
            r.heading = s.heading_deg;
            r.speed_kn = s.speed_kn;
            r.energy_kwh = s.energy_kwh;
            r.nav_mode = s.nav_mode;
            r.terminal = terminal;
            transcript_.push_back(r);
        }
        result.agents.push_back(std::move(step));
    }

    w.time_s = t0 + sim.decision_interval_s;
    ++w.steps;

    // Every terminal aircraft is recovered to the pad reserved at its destination.
    for (const auto& st : result.agents) {
        if (!st.done) continue;
        const Flight& f = w.live.at(st.agent);
        const auto dest = f.state.destination;
        --w.reserved[dest];
        ++w.occupied[dest];
        w.slot_airborne[f.state.vehicle] = false;
        w.slot_available[f.state.vehicle] = ceil_to(w.time_s + scenario_.demand.turnaround_s, sim.decision_interval_s);
    }

    dispatch();
    if (options_.build_observations)
        for (auto& st : result.agents) st.observation = build_observation(w.live.at(st.agent));
    for (const auto& st : result.agents)
        if (st.done) w.live.erase(st.agent);
    result.spawned = std::move(w.spawned);
    w.spawned.clear();
    result.time_s = w.time_s;
    return result;
}

double CmEnv::time_s() const { return world_ ? world_->time_s : 0.0; }
std::uint64_t CmEnv::step_count() const { return world_ ? world_->steps : 0; }

bool CmEnv::finished() const {
    if (!world_) return false;
    if (!world_->live.empty()) return false;
    for (std::size_t slot = 0; slot < world_->slot_plans.size(); ++slot)
        if (world_->slot_next[slot] < world_->slot_plans[slot].size()) return false;
    return true;
}

std::vector<AgentId> CmEnv::live_agents() const {
    std::vector<AgentId> ids;
    if (!world_) return ids;
    for (const auto& [id, f] : world_->live)
        if (!f.done) ids.push_back(id);
    return ids;
}

CmEnv::Flight& CmEnv::live(AgentId id) {
    if (!world_) throw LifecycleError("environment has not been reset");
    const auto it = world_->live.find(id);
    if (it == world_->live.end() || it->second.done) throw IdentifierError("agent " + std::to_string(id) + " is not live");
    return it->second;
}

const CmEnv::Flight& CmEnv::live(AgentId id) const { return const_cast<CmEnv*>(this)->live(id); }

const AircraftState& CmEnv::agent_state(AgentId id) const { return live(id).state; }
Observation CmEnv::observe(AgentId id) const { return build_observation(live(id)); }

std::size_t CmEnv::observation_size() const {
    const auto& o = scenario_.obs;
    return 6 + 3 + 2 * o.waypoints + 2 + 2 * o.vertiports + 2 + 5 * o.intruders;
}

const VertiportNetwork& CmEnv::network() const {
    if (!world_) throw LifecycleError("environment has not been reset");
    return world_->network;
}

const std::vector<FlightPlan>& CmEnv::plans() const {
    if (!world_) throw LifecycleError("environment has not been reset");
    return world_->plans;
}

std::vector<PadState> CmEnv::pads() const {
    std::vector<PadState> out;
    if (!world_) return out;
    for (std::size_t i = 0; i < world_->network.size(); ++i)
        out.push_back({world_->network.vertiports[i].total_pads, world_->occupied[i], world_->reserved[i]});
    return out;
}

std::size_t CmEnv::airborne() const { return live_agents().size(); }

// Layout: own state (6), nav mode one-hot (3), waypoint window (2 per
// waypoint), wind (2), nearest vertiports (2 each), population density and
// P_nav (2), nearest intruders (5 each). Missing entries are zero.
Observation CmEnv::build_observation(const Flight& f) const {
    const World& w = *world_;
    const Region& region = w.network.region;
    const auto& o = scenario_.obs;
    const AircraftState& s = f.state;
    const double scale = o.distance_scale_m;
    const LocalXY here = region.project(s.position);

    Observation v;
    v.reserve(observation_size());
    v.push_back(s.heading_deg / 360.0);
    v.push_back(s.altitude_ft / kMaxAltitudeFt);
    v.push_back(s.speed_kn / kMaxSpeedKn);
    v.push_back(s.accel_limit_g / kMaxAccelG);
    v.push_back(s.route_distance_remaining_m / scale);
    v.push_back(s.energy_kwh / kEnergyScaleKwh);
    v.push_back(s.nav_mode == NavMode::FollowRoute ? 1.0 : 0.0);
    v.push_back(s.nav_mode == NavMode::HoldHeading ? 1.0 : 0.0);
    v.push_back(s.nav_mode == NavMode::Descending ? 1.0 : 0.0);

    for (int k = 0; k < o.waypoints; ++k) {
        const std::size_t idx = s.active_waypoint + static_cast<std::size_t>(k);
        if (s.route && idx < s.route->size()) {
            const LocalXY d = s.route->local[idx] - here;
            v.push_back(d.x / scale);
            v.push_back(d.y / scale);
        } else {
            v.push_back(0.0);
            v.push_back(0.0);
        }
    }

    const WindVector wind = wind_at(scenario_.wind, s.position, nullptr);
    v.push_back(wind.north / o.wind_scale_mps);
    v.push_back(wind.east / o.wind_scale_mps);

    std::vector<std::pair<double, LocalXY>> near;
    near.reserve(w.vertiport_points.size());
    for (const auto& p : w.vertiport_points) {
        const LocalXY d = region.project(p) - here;
        near.emplace_back(d.norm(), d);
    }
    const auto take_v = std::min<std::size_t>(near.size(), static_cast<std::size_t>(o.vertiports));
    std::partial_sort(near.begin(), near.begin() + static_cast<std::ptrdiff_t>(take_v), near.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
    for (int k = 0; k < o.vertiports; ++k) {
        if (static_cast<std::size_t>(k) < take_v) {
            v.push_back(near[k].second.x / scale);
            v.push_back(near[k].second.y / scale);
        } else {
            v.push_back(0.0);
            v.push_back(0.0);
        }
    }

    v.push_back(o.population_density);
    v.push_back(nav_loss_probability(scenario_.nav, s.position));

    if (o.intruders > 0) {
        std::vector<std::pair<double, const AircraftState*>> others;
        for (const auto& [id, g] : w.live) {
            if (id == s.id || g.done) continue;
            others.emplace_back((region.project(g.state.position) - here).norm(), &g.state);
        }
        const auto take_i = std::min<std::size_t>(others.size(), static_cast<std::size_t>(o.intruders));
        // Ties broken by id for determinism.
        std::partial_sort(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(take_i), others.end(),
                          [](const auto& a, const auto& b) {
                              return a.first != b.first ? a.first < b.first : a.second->id < b.second->id;
                          });
        for (int k = 0; k < o.intruders; ++k) {
            if (static_cast<std::size_t>(k) < take_i) {
                const AircraftState& g = *others[k].second;
                const LocalXY d = region.project(g.position) - here;
                v.push_back(d.x / scale);
                v.push_back(d.y / scale);
                v.push_back(g.heading_deg / 360.0);
                v.push_back(g.speed_kn / kMaxSpeedKn);
                v.push_back(g.altitude_ft / kMaxAltitudeFt);
            } else {
                for (int j = 0; j < 5; ++j) v.push_back(0.0);
            }
        }
    }
    return v;
}

}  // namespace cmgym
