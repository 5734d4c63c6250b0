#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "cmgym/env.hpp"
#include "cmgym/errors.hpp"
#include "helpers.hpp"

using namespace cmgym;
using testing_support::scenario;

namespace {

// Two vertiports about 5.6 km apart, one aircraft.
Scenario shuttle(std::initializer_list<std::string> extra = {}) {
    auto c = testing_support::config({"network.vertiports=A 40.70 -74.00; B 40.73 -73.96", "fleet_size=1",
                                      "hazard.e_max_kwh=250", "hazard.e_min_kwh=250", "hazard.beta=1e9"});
    for (const auto& o : extra) c.apply_override(o);
    return Scenario::from_config(c);
}

std::map<AgentId, Action> random_actions(const std::vector<AgentId>& ids, std::mt19937_64& rng) {
    std::map<AgentId, Action> out;
    std::uniform_int_distribution<int> pick(0, kActionCount - 1);
    for (AgentId id : ids) out[id] = action_from_index(pick(rng));
    return out;
}

AircraftState cruising(const Region& region) {
    std::vector<GeoPoint> wps;
    for (int i = 0; i < 5; ++i) wps.push_back(region.unproject({2000.0 * i, 0.0}));
    AircraftState s;
    s.route = Route::make(wps, 3000.0, region);
    s.position = wps[0];
    s.altitude_ft = 3000.0;
    s.speed_kn = 100.0;
    s.heading_deg = 90.0;
    s.energy_kwh = 100.0;
    s.active_waypoint = 1;
    s.nav_mode = NavMode::FollowRoute;
    return s;
}

}  // namespace

TEST(Actions, NoAlertKeepsMode) {
    const auto region = testing_support::region();
    for (NavMode m : {NavMode::FollowRoute, NavMode::HoldHeading, NavMode::Descending}) {
        AircraftState s = cruising(region);
        s.nav_mode = m;
        const auto out = apply_action(s, Action::NoAlert, region, 5.0);
        EXPECT_EQ(out.nav_mode, m);
        EXPECT_EQ(out.active_waypoint, s.active_waypoint);
    }
}

TEST(Actions, HeadingChangesWrap) {
    const auto region = testing_support::region();
    AircraftState s = cruising(region);
    s.heading_deg = 358.0;
    auto out = apply_action(s, Action::HeadingRight, region, 5.0);
    EXPECT_EQ(out.nav_mode, NavMode::HoldHeading);
    EXPECT_NEAR(out.commanded_heading_deg, 3.0, 1e-12);
    s.heading_deg = 2.0;
    out = apply_action(s, Action::HeadingLeft, region, 5.0);
    EXPECT_NEAR(out.commanded_heading_deg, 357.0, 1e-12);
    out = apply_action(s, Action::HeadingHold, region, 5.0);
    EXPECT_NEAR(out.commanded_heading_deg, 2.0, 1e-12);
    EXPECT_EQ(out.nav_mode, NavMode::HoldHeading);
}

TEST(Actions, LandNowStartsDescent) {
    const auto region = testing_support::region();
    const auto out = apply_action(cruising(region), Action::LandNow, region, 5.0);
    EXPECT_EQ(out.nav_mode, NavMode::Descending);
}

TEST(Actions, UseRouteTargetsNearestWaypoint) {
    const auto region = testing_support::region();
    AircraftState s = cruising(region);
    // After a 90 degree turn the aircraft sits 1.5 km north of x = 5.6 km.
    s.position = region.unproject({5600.0, 1500.0});
    s.heading_deg = 0.0;
    s.nav_mode = NavMode::HoldHeading;
    s.active_waypoint = 1;
    const auto out = apply_action(s, Action::UseRoute, region, 5.0);
    EXPECT_EQ(out.nav_mode, NavMode::FollowRoute);

    std::size_t oracle = 0;
    double best = 1e300;
    for (std::size_t i = 0; i < s.route->size(); ++i) {
        const double d = great_circle_m(s.position, s.route->waypoints[i]);
        if (d < best) best = d, oracle = i;
    }
    EXPECT_EQ(oracle, 3u);
    EXPECT_EQ(out.active_waypoint, oracle);
}

TEST(Actions, DescendingAircraftIgnoresModeChanges) {
    const auto region = testing_support::region();
    AircraftState s = cruising(region);
    s.nav_mode = NavMode::Descending;
    EventLog events;
    const auto out = apply_action(s, Action::HeadingLeft, region, 5.0, &events);
    EXPECT_EQ(out.nav_mode, NavMode::Descending);
    ASSERT_EQ(events.size(), 1u);
    EXPECT_EQ(events[0], "action_ignored_descending");
}

TEST(Terminal, Precedence) {
    AircraftState s;
    s.altitude_ft = 2000.0;
    s.energy_kwh = 0.0;
    EXPECT_EQ(check_terminal(s, false), TerminalKind::EnergyDepleted);
    EXPECT_EQ(check_terminal(s, true), TerminalKind::EnergyDepleted);
    s.altitude_ft = 0.0;
    EXPECT_EQ(check_terminal(s, true), TerminalKind::EnergyDepleted);
    s.energy_kwh = 10.0;
    EXPECT_EQ(check_terminal(s, true), TerminalKind::NavLost);
    EXPECT_EQ(check_terminal(s, false), TerminalKind::Touchdown);
    s.altitude_ft = 10.0;
    EXPECT_FALSE(check_terminal(s, false).has_value());
}

TEST(Env, LifecycleAndIdentifierErrors) {
    CmEnv env(shuttle());
    EXPECT_FALSE(env.is_reset());
    EXPECT_THROW(env.step({}), LifecycleError);
    EXPECT_THROW(env.network(), LifecycleError);
    env.reset(1);
    EXPECT_THROW(env.step({{999, Action::NoAlert}}), IdentifierError);
    EXPECT_THROW(env.agent_state(999), IdentifierError);
}

TEST(Env, ResetIsDeterministic) {
    const Scenario s = scenario({"fleet_size=20"});
    CmEnv a(s), b(s), c(s);
    const auto oa = a.reset(5), ob = b.reset(5), oc = c.reset(6);
    EXPECT_EQ(oa, ob);
    EXPECT_NE(oa, oc);
    EXPECT_EQ(oa.size(), 20u);
    for (const auto& [id, o] : oa) EXPECT_EQ(o.size(), a.observation_size());
    EXPECT_EQ(a.observation_size(), 40u);
}

TEST(Env, SameActionsGiveSameRewards) {
    const Scenario s = scenario({"fleet_size=15", "hazard.p_nav=0.01"});
    CmEnv a(s), b(s);
    a.reset(3);
    b.reset(3);
    std::mt19937_64 ra(42), rb(42);
    std::map<AgentId, double> sum_a, sum_b;
    for (int k = 0; k < 120; ++k) {
        const auto sa = a.step(random_actions(a.live_agents(), ra));
        const auto sb = b.step(random_actions(b.live_agents(), rb));
        for (const auto& st : sa.agents) sum_a[st.agent] += st.reward;
        for (const auto& st : sb.agents) sum_b[st.agent] += st.reward;
        ASSERT_EQ(sa.spawned, sb.spawned);
    }
    EXPECT_EQ(sum_a, sum_b);
}

TEST(Env, DegenerateCapacityGivesExactEnergy) {
    CmEnv env(scenario({"hazard.e_max_kwh=100", "hazard.e_min_kwh=100", "fleet_size=29"}));
    const auto obs = env.reset(9);
    ASSERT_EQ(obs.size(), 29u);
    for (const auto& [id, o] : obs) {
        EXPECT_EQ(env.agent_state(id).energy_kwh, 100.0);
        EXPECT_DOUBLE_EQ(o[5], 100.0 / 350.0);
    }
}

TEST(Env, FleetBoundsAirborneAndPadsAreConserved) {
    CmEnv env(scenario({"fleet_size=50"}), {false, false});
    env.reset(4);
    std::size_t peak = 0;
    std::map<std::uint32_t, double> landed_at;
    for (int k = 0; k < 400; ++k) {
        const auto r = env.step({});
        peak = std::max(peak, env.airborne());
        int on_ground = 0;
        for (const auto& p : env.pads()) {
            EXPECT_LE(p.occupied + p.reserved, p.total);
            on_ground += p.occupied;
        }
        EXPECT_EQ(on_ground + static_cast<int>(env.airborne()), 50);
        for (const auto& st : r.agents) {
            if (!st.info.summary) continue;
            const auto& sum = *st.info.summary;
            landed_at[sum.aircraft] = sum.end_s;
        }
        for (const auto& [id, o] : r.spawned) {
            const auto vehicle = env.agent_state(id).vehicle;
            if (auto it = landed_at.find(vehicle); it != landed_at.end()) EXPECT_GE(r.time_s - it->second, 60.0);
        }
    }
    EXPECT_LE(peak, 50u);
    EXPECT_GT(peak, 0u);
}

TEST(Env, NoAlertFlightReachesDestination) {
    const Scenario s = shuttle();
    CmEnv env(s, {true, true});
    const auto obs = env.reset(1);
    ASSERT_EQ(obs.size(), 1u);
    const AgentId id = obs.begin()->first;
    const FlightPlan plan = env.plans().front();
    const double e0 = env.agent_state(id).energy_kwh;
    EXPECT_EQ(e0, 250.0);

    std::optional<AgentStep> last;
    int steps = 0;
    while (steps < 100) {
        auto r = env.step({});
        ++steps;
        ASSERT_EQ(r.agents.size(), 1u);
        if (r.agents[0].done) {
            last = r.agents[0];
            break;
        }
    }
    ASSERT_TRUE(last.has_value());
    EXPECT_EQ(last->info.terminal, TerminalKind::Touchdown);
    ASSERT_TRUE(last->info.landed_vertiport.has_value());
    EXPECT_EQ(*last->info.landed_vertiport, plan.destination);
    ASSERT_TRUE(last->info.summary.has_value());
    EXPECT_TRUE(last->info.summary->reached_destination);
    EXPECT_EQ(last->info.summary->final_energy_kwh, e0 - 5.0 * steps);

    // Cruise plus descent from the lane, in whole decision steps.
    const double length = great_circle_m(plan.waypoints.front(), plan.waypoints.back());
    const double cruise_s = length / (110.0 * testing_support::kKnotOracle);
    const double descent_s = plan.lane_ft / 500.0 * 60.0;
    EXPECT_GE(steps, static_cast<int>(std::floor((cruise_s + descent_s) / 60.0)));
    EXPECT_LE(steps * 60.0, plan.nominal_duration_s);
    EXPECT_EQ(last->info.reward.r_action, 0.0);
    EXPECT_GT(last->info.reward.r_vertiport, 0.0);
    EXPECT_NEAR(last->reward, last->info.reward.r_vertiport + last->info.reward.r_state - s.reward.omega, 1e-12);
}

TEST(Env, LowEnergyDepletesRegardlessOfAction) {
    // 12 kWh with 5 kWh per step: the third step empties the battery.
    CmEnv env(shuttle({"hazard.e_max_kwh=12", "hazard.e_min_kwh=12"}));
    const AgentId id = env.reset(1).begin()->first;
    EXPECT_FALSE(env.step({{id, Action::HeadingLeft}}).agents[0].done);
    EXPECT_FALSE(env.step({{id, Action::UseRoute}}).agents[0].done);
    EXPECT_LT(env.agent_state(id).energy_kwh, 5.0);
    const auto r = env.step({{id, Action::LandNow}});
    EXPECT_TRUE(r.agents[0].done);
    EXPECT_EQ(r.agents[0].info.terminal, TerminalKind::EnergyDepleted);
    EXPECT_EQ(r.agents[0].reward, -1.0 - 0.1 - 0.01 - 0.001);
}

TEST(Env, LandNowTouchesDownAwayFromVertiports) {
    CmEnv env(shuttle({"network.lanes.count=1"}));
    const AgentId id = env.reset(1).begin()->first;
    env.step({});
    // 1000 ft at 500 ft/min takes two decision steps.
    auto r = env.step({{id, Action::LandNow}});
    EXPECT_FALSE(r.agents[0].done);
    EXPECT_EQ(env.agent_state(id).nav_mode, NavMode::Descending);
    r = env.step({{id, Action::HeadingLeft}});
    ASSERT_TRUE(r.agents[0].done);
    EXPECT_EQ(r.agents[0].info.terminal, TerminalKind::Touchdown);
    EXPECT_FALSE(r.agents[0].info.landed_vertiport.has_value());
    EXPECT_FALSE(r.agents[0].info.summary->reached_destination);
    EXPECT_LT(r.agents[0].info.reward.r_state, 0.0);
    const auto& ev = r.agents[0].info.events;
    EXPECT_NE(std::find(ev.begin(), ev.end(), "action_ignored_descending"), ev.end());
}

TEST(Env, CertainNavLossEndsFirstStep) {
    CmEnv env(shuttle({"hazard.p_nav=1"}));
    env.reset(1);
    const auto r = env.step({});
    ASSERT_EQ(r.agents.size(), 1u);
    EXPECT_EQ(r.agents[0].info.terminal, TerminalKind::NavLost);
    EXPECT_EQ(r.agents[0].reward, -1.0 - 0.001);
}

TEST(Env, TranscriptInvariants) {
    CmEnv env(scenario({"fleet_size=20", "hazard.e_max_kwh=50", "hazard.p_nav=0.002"}), {true, true});
    env.reset(12);
    std::mt19937_64 rng(1);
    for (int k = 0; k < 300; ++k) env.step(random_actions(env.live_agents(), rng));

    std::map<AgentId, double> energy;
    std::map<AgentId, bool> ended;
    ASSERT_FALSE(env.transcript().empty());
    for (const auto& rec : env.transcript()) {
        EXPECT_NEAR(rec.reward, rec.r_s + rec.r_h + rec.r_a - rec.omega, 1e-12);
        EXPECT_FALSE(ended[rec.agent]) << "record after terminal for agent " << rec.agent;
        if (rec.terminal) ended[rec.agent] = true;
        if (auto it = energy.find(rec.agent); it != energy.end()) EXPECT_LE(rec.energy_kwh, it->second);
        energy[rec.agent] = rec.energy_kwh;
        EXPECT_GE(rec.energy_kwh, 0.0);
    }
}

TEST(Env, AbundantEnergyAllTouchDownAtDestination) {
    CmEnv env(scenario({"fleet_size=30", "hazard.e_max_kwh=250", "hazard.e_min_kwh=250"}), {false, false});
    env.reset(2);
    int done = 0;
    for (int k = 0; k < 240; ++k)
        for (const auto& st : env.step({}).agents) {
            if (!st.done) continue;
            ++done;
            EXPECT_EQ(st.info.terminal, TerminalKind::Touchdown);
            EXPECT_TRUE(st.info.summary->reached_destination);
        }
    EXPECT_GT(done, 100);
}

TEST(Env, ObservationLayout) {
    CmEnv env(scenario({"fleet_size=5", "obs.population_density=0.25", "hazard.p_nav=0.001",
                        "hazard.wind_north=3", "hazard.wind_east=-6"}));
    const auto obs = env.reset(1);
    for (const auto& [id, o] : obs) {
        ASSERT_EQ(o.size(), 40u);
        for (double v : o) EXPECT_TRUE(std::isfinite(v));
        const auto& s = env.agent_state(id);
        EXPECT_DOUBLE_EQ(o[0], s.heading_deg / 360.0);
        EXPECT_DOUBLE_EQ(o[1], s.altitude_ft / 5000.0);
        EXPECT_DOUBLE_EQ(o[2], s.speed_kn / 120.0);
        EXPECT_EQ(o[6], 1.0);
        EXPECT_EQ(o[7] + o[8], 0.0);
        EXPECT_DOUBLE_EQ(o[15], 3.0 / 30.0);
        EXPECT_DOUBLE_EQ(o[16], -6.0 / 30.0);
        // Nearest vertiport is the origin, right under the aircraft.
        EXPECT_NEAR(o[17], 0.0, 1e-9);
        EXPECT_NEAR(o[18], 0.0, 1e-9);
        EXPECT_EQ(o[23], 0.25);
        EXPECT_EQ(o[24], 0.001);
    }
}

TEST(Env, FailedResetKeepsState) {
    CmEnv env(shuttle());
    env.reset(1);
    env.step({});
    Scenario bad = shuttle();
    bad.network.corridors = {{"A", "B"}};
    EXPECT_THROW(env.reset(bad, 1), ConfigError);
    EXPECT_TRUE(env.is_reset());
    EXPECT_EQ(env.step_count(), 1u);
    EXPECT_EQ(env.time_s(), 60.0);
}

TEST(Env, FinishesWhenScheduleIsExhausted) {
    CmEnv env(shuttle({"duration_s=0"}), {false, false});
    env.reset(1);
    int k = 0;
    while (!env.finished() && k < 100) env.step({}), ++k;
    EXPECT_TRUE(env.finished());
    EXPECT_TRUE(env.step({}).agents.empty());
}
