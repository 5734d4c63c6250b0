#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "cmgym/errors.hpp"
#include "cmgym/traffic.hpp"
#include "helpers.hpp"

using namespace cmgym;

namespace {

NetworkConfig square_network(int fleet) {
    NetworkConfig c;
    c.layout = NetworkLayout::Explicit;
    c.vertiports = {{"A", {40.70, -74.00}}, {"B", {40.70, -73.95}}, {"C", {40.75, -73.95}}, {"D", {40.75, -74.00}}};
    c.fleet_size = fleet;
    return c;
}

DemandConfig demand(int fleet, double duration_s) {
    DemandConfig d;
    d.fleet_size = fleet;
    d.duration_s = duration_s;
    return d;
}

}  // namespace

TEST(Network, RingOf29IsStronglyConnected) {
    NetworkConfig c;
    c.fleet_size = 100;
    const auto net = build_network(c);
    EXPECT_EQ(net.size(), 29u);
    EXPECT_TRUE(net.strongly_connected());
    EXPECT_EQ(net.corridors.size(), 58u);
}

TEST(Network, LaneSpacing) {
    const auto lanes = lane_altitudes(1000, 5000, 8);
    ASSERT_EQ(lanes.size(), 8u);
    const double spacing = 4000.0 / 7.0;
    EXPECT_NEAR(spacing, 571.4286, 1e-4);
    const double expected[] = {1000, 1571.43, 2142.86, 2714.29, 3285.71, 3857.14, 4428.57, 5000};
    for (std::size_t i = 0; i < lanes.size(); ++i) {
        EXPECT_NEAR(lanes[i], expected[i], 0.005);
        if (i) EXPECT_NEAR(lanes[i] - lanes[i - 1], spacing, 1e-9);
    }
    EXPECT_THROW(lane_altitudes(1000, 5000, 0), ConfigError);
}

TEST(Network, TwoVertiportsGiveTwoCorridors) {
    NetworkConfig c;
    c.layout = NetworkLayout::Explicit;
    c.vertiports = {{"A", {40.70, -74.00}}, {"B", {40.75, -73.95}}};
    const auto net = build_network(c);
    ASSERT_EQ(net.corridors.size(), 2u);
    EXPECT_NE(net.corridors[0].from, net.corridors[1].from);
}

TEST(Network, DisconnectedExplicitNetworkRejected) {
    NetworkConfig c = square_network(1);
    c.corridors = {{"A", "B"}, {"B", "A"}, {"C", "D"}, {"D", "C"}};
    EXPECT_THROW(build_network(c), ConfigError);
    c.corridors = {{"A", "B"}, {"B", "C"}, {"C", "D"}};  // no way back to A
    EXPECT_THROW(build_network(c), ConfigError);
    c.corridors = {{"A", "Z"}};
    EXPECT_THROW(build_network(c), ConfigError);
    c.corridors = {{"A", "B"}, {"B", "C"}, {"C", "D"}, {"D", "A"}};
    EXPECT_NO_THROW(build_network(c));
}

TEST(Network, DuplicateOrTooFewVertiportsRejected) {
    NetworkConfig c;
    c.layout = NetworkLayout::Explicit;
    c.vertiports = {{"A", {40.70, -74.00}}};
    EXPECT_THROW(build_network(c), ConfigError);
    c.vertiports.push_back({"A", {40.75, -74.00}});
    EXPECT_THROW(build_network(c), ConfigError);
}

TEST(Network, GridLayout) {
    NetworkConfig c;
    c.layout = NetworkLayout::Grid;
    c.grid_rows = 2;
    c.grid_cols = 3;
    const auto net = build_network(c);
    EXPECT_EQ(net.size(), 6u);
    EXPECT_EQ(net.corridors.size(), 14u);  // 7 undirected edges
    EXPECT_TRUE(net.strongly_connected());
}

TEST(Network, ShortestPathOnRingGoesTheShortWay) {
    NetworkConfig c;
    c.ring_count = 8;
    const auto net = build_network(c);
    EXPECT_EQ(net.shortest_path(0, 2), (std::vector<std::size_t>{0, 1, 2}));
    EXPECT_EQ(net.shortest_path(0, 6), (std::vector<std::size_t>{0, 7, 6}));
    EXPECT_EQ(net.shortest_path(3, 3), (std::vector<std::size_t>{3}));
    EXPECT_THROW(net.shortest_path(0, 99), IdentifierError);
}

TEST(Network, VertiportAtPicksNearestWithinRadius) {
    const auto net = build_network(square_network(1));
    const GeoPoint a = net.vertiports[0].location;
    EXPECT_EQ(net.vertiport_at(a, 200.0), std::optional<std::size_t>(0));
    const GeoPoint off = net.region.unproject(net.region.project(a) + LocalXY{150.0, 0.0});
    EXPECT_EQ(net.vertiport_at(off, 200.0), std::optional<std::size_t>(0));
    EXPECT_FALSE(net.vertiport_at(off, 100.0).has_value());
}

TEST(Pads, Formula) {
    EXPECT_EQ(allocate_pads(500, 29), 18);
    EXPECT_EQ(allocate_pads(29, 29), 2);
    EXPECT_EQ(allocate_pads(50, 29), 2);
    EXPECT_EQ(allocate_pads(1, 29), 1);
    EXPECT_THROW(allocate_pads(0, 29), ConfigError);
    EXPECT_THROW(allocate_pads(10, 0), ConfigError);
}

TEST(Pads, InitialDistributionIsEvenAndWithinCapacity) {
    for (int fleet : {1, 29, 50, 100, 500}) {
        NetworkConfig c;
        c.fleet_size = fleet;
        const auto net = build_network(c);
        int total = 0, lo = fleet, hi = 0;
        for (const auto& v : net.vertiports) {
            EXPECT_EQ(v.total_pads, allocate_pads(fleet, 29));
            EXPECT_LE(v.occupied_pads, v.total_pads);
            total += v.occupied_pads;
            lo = std::min(lo, v.occupied_pads);
            hi = std::max(hi, v.occupied_pads);
        }
        EXPECT_EQ(total, fleet);
        EXPECT_LE(hi - lo, 1);
    }
}

TEST(Demand, SingleAircraftZeroDuration) {
    const auto net = build_network(square_network(1));
    const auto plans = generate_demand(net, demand(1, 0.0), 7);
    ASSERT_EQ(plans.size(), 1u);
    EXPECT_EQ(plans[0].departure_s, 0.0);
    EXPECT_EQ(plans[0].flight_id, 0u);
    EXPECT_EQ(plans[0].origin, 0u);
    EXPECT_NE(plans[0].destination, 0u);
}

TEST(Demand, FleetOf500StartsOnPads) {
    NetworkConfig c;
    c.fleet_size = 500;
    const auto net = build_network(c);
    const auto plans = generate_demand(net, demand(500, 0.0), 3);
    // Every aircraft is on a pad and may depart at t = 0.
    std::vector<int> departing(net.size(), 0);
    for (const auto& p : plans) {
        EXPECT_EQ(p.departure_s, 0.0);
        ++departing[p.origin];
    }
    for (std::size_t v = 0; v < net.size(); ++v) {
        EXPECT_LE(net.vertiports[v].occupied_pads, 18);
        EXPECT_LE(departing[v], net.vertiports[v].occupied_pads);
    }
}

TEST(Demand, PlansAreFeasible) {
    NetworkConfig c;
    c.fleet_size = 100;
    const auto net = build_network(c);
    const auto d = demand(100, 20000.0);
    const auto plans = generate_demand(net, d, 11);
    ASSERT_GT(plans.size(), 500u);

    const int pads = allocate_pads(100, 29);
    std::vector<int> holdings = distribute_fleet(100, 29);
    std::map<std::uint32_t, const FlightPlan*> last;
    double prev_departure = 0.0;
    for (std::size_t i = 0; i < plans.size(); ++i) {
        const auto& p = plans[i];
        EXPECT_EQ(p.flight_id, i);
        EXPECT_GE(p.departure_s, prev_departure);
        prev_departure = p.departure_s;
        EXPECT_NE(p.origin, p.destination);
        EXPECT_LE(p.departure_s, d.duration_s);

        // Routes start and end at the vertiports, on network corridors.
        ASSERT_GE(p.waypoints.size(), 2u);
        EXPECT_EQ(p.waypoints.front(), net.vertiports[p.origin].location);
        EXPECT_EQ(p.waypoints.back(), net.vertiports[p.destination].location);
        for (std::size_t k = 1; k < p.waypoints.size(); ++k) {
            const auto from = net.vertiport_at(p.waypoints[k - 1], 1.0);
            const auto to = net.vertiport_at(p.waypoints[k], 1.0);
            ASSERT_TRUE(from && to);
            EXPECT_TRUE(std::any_of(net.corridors.begin(), net.corridors.end(),
                                    [&](const Corridor& e) { return e.from == *from && e.to == *to; }));
        }
        EXPECT_NE(std::find(net.lanes_ft.begin(), net.lanes_ft.end(), p.lane_ft), net.lanes_ft.end());

        // Each aircraft continues from where it landed, after its turnaround.
        if (auto it = last.find(p.aircraft); it != last.end()) {
            const FlightPlan& q = *it->second;
            EXPECT_EQ(p.origin, q.destination);
            EXPECT_GE(p.departure_s, q.departure_s + q.nominal_duration_s + d.turnaround_s - 1e-9);
        }
        last[p.aircraft] = &p;

        // A destination pad must be free to reserve at departure.
        --holdings[p.origin];
        ++holdings[p.destination];
        EXPECT_LE(holdings[p.destination], pads);
    }
}

TEST(Demand, LaneParityFollowsCourse) {
    const auto net = build_network(square_network(1));
    const auto plans = generate_demand(net, demand(1, 50000.0), 5);
    for (const auto& p : plans) {
        const LocalXY a = net.region.project(net.vertiports[p.origin].location);
        const LocalXY b = net.region.project(net.vertiports[p.destination].location);
        const double course = bearing_deg(b - a);
        const auto lane = std::find(net.lanes_ft.begin(), net.lanes_ft.end(), p.lane_ft) - net.lanes_ft.begin();
        EXPECT_EQ(lane % 2, course < 180.0 ? 0 : 1);
    }
}

TEST(Demand, UniformDestinationsWithinMultinomialBounds) {
    // One aircraft on a complete 4-node graph always has every other pad free,
    // so each origin's destinations are a fair three-way draw.
    const auto net = build_network(square_network(1));
    auto plans = generate_demand(net, demand(1, 1e8), 2024);
    ASSERT_GE(plans.size(), 10000u);
    plans.resize(10000);

    std::map<std::pair<std::size_t, std::size_t>, int> pair_count;
    std::map<std::size_t, int> origin_count;
    for (const auto& p : plans) {
        ++pair_count[{p.origin, p.destination}];
        ++origin_count[p.origin];
    }
    ASSERT_EQ(pair_count.size(), 12u);

    const double n = 10000.0, q = 1.0 / 12.0;
    const double sd = std::sqrt(n * q * (1.0 - q));
    for (const auto& [od, k] : pair_count) {
        EXPECT_LE(std::abs(k - n * q), 3.0 * sd) << od.first << "->" << od.second;
        const double m = origin_count[od.first];
        EXPECT_LE(std::abs(k - m / 3.0), 3.0 * std::sqrt(m * (1.0 / 3.0) * (2.0 / 3.0)));
    }
}

TEST(Demand, OdWeightsSteerDestinations) {
    const auto net = build_network(square_network(1));
    auto d = demand(1, 1e6);
    // A only flies to B, B only to C, C only to D, D only to A.
    d.od_weights = {0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 1, 0, 0, 0};
    const auto plans = generate_demand(net, d, 1);
    ASSERT_GT(plans.size(), 10u);
    for (const auto& p : plans) EXPECT_EQ(p.destination, (p.origin + 1) % 4);

    d.od_weights = {0, 1, 0};
    EXPECT_THROW(generate_demand(net, d, 1), ConfigError);
    d.od_weights.assign(16, 0.0);
    EXPECT_THROW(generate_demand(net, d, 1), ConfigError);
}

TEST(Demand, DeterministicPerSeed) {
    NetworkConfig c;
    c.fleet_size = 50;
    const auto net = build_network(c);
    const auto a = generate_demand(net, demand(50, 10000.0), 9);
    const auto b = generate_demand(net, demand(50, 10000.0), 9);
    const auto other = generate_demand(net, demand(50, 10000.0), 10);
    std::ostringstream sa, sb, so;
    write_flight_plans(sa, net, a);
    write_flight_plans(sb, net, b);
    write_flight_plans(so, net, other);
    EXPECT_EQ(sa.str(), sb.str());
    EXPECT_NE(sa.str(), so.str());
}

TEST(Demand, InvalidInputsRejected) {
    const auto net = build_network(square_network(1));
    EXPECT_THROW(generate_demand(net, demand(0, 0.0), 1), ConfigError);
    auto d = demand(1, 0.0);
    d.decision_interval_s = 0.0;
    EXPECT_THROW(generate_demand(net, d, 1), ConfigError);
    d = demand(1, 0.0);
    d.turnaround_s = -1.0;
    EXPECT_THROW(generate_demand(net, d, 1), ConfigError);
}

TEST(Demand, NominalDurationCoversCruiseAndDescent) {
    const auto r = testing_support::region();
    const GeoPoint a = r.unproject({0.0, 0.0});
    const GeoPoint b = r.unproject({10000.0, 0.0});
    DemandConfig d;
    const double t = nominal_flight_duration({a, b}, 1000.0, d, r);
    const double v = 110.0 * testing_support::kKnotOracle;
    const double lower = 10000.0 / v + 1000.0 / 500.0 * 60.0;
    EXPECT_GE(t, lower);
    EXPECT_EQ(std::fmod(t, 60.0), 0.0);
}

TEST(Demand, PlanExport) {
    const auto net = build_network(square_network(1));
    const auto plans = generate_demand(net, demand(1, 0.0), 7);
    std::ostringstream out;
    write_flight_plans(out, net, plans);
    std::istringstream in(out.str());
    std::string aircraft, from, to;
    double depart = -1, lane = -1;
    in >> aircraft >> from >> to >> depart >> lane;
    EXPECT_EQ(aircraft, "0");
    EXPECT_EQ(from, "A");
    EXPECT_EQ(to, net.vertiports[plans[0].destination].id);
    EXPECT_EQ(depart, 0.0);
    EXPECT_NEAR(lane, plans[0].lane_ft, 1e-5);
}
