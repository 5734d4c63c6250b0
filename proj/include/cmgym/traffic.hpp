#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cmgym/geo.hpp"
#include "cmgym/kinematics.hpp"

namespace cmgym {

struct Vertiport {
    std::string id;
    GeoPoint location;
    int total_pads = 1;
    int occupied_pads = 0;
};

/// Directed corridor between two vertiports.
struct Corridor {
    std::size_t from = 0;
    std::size_t to = 0;
    std::vector<GeoPoint> polyline;  ///< from location ... to location
    double length_m = 0.0;
};

struct VertiportNetwork {
    std::vector<Vertiport> vertiports;
    std::vector<Corridor> corridors;
    std::vector<double> lanes_ft;
    Region region;

    std::size_t size() const { return vertiports.size(); }
    std::optional<std::size_t> index_of(const std::string& id) const;
    bool strongly_connected() const;

    /// Vertiport indices along the shortest corridor path, inclusive of both
    /// ends. Throws IdentifierError when `to` is unreachable.
    std::vector<std::size_t> shortest_path(std::size_t from, std::size_t to) const;

    /// Waypoints along the corridor path, starting at `path.front()`.
    std::vector<GeoPoint> route_waypoints(const std::vector<std::size_t>& path) const;

    /// Index of the vertiport within `radius_m` of `p`, nearest first.
    std::optional<std::size_t> vertiport_at(const GeoPoint& p, double radius_m) const;
};

struct VertiportSpec {
    std::string id;
    GeoPoint location;
};

enum class NetworkLayout { Explicit, Ring, Grid };

struct NetworkConfig {
    NetworkLayout layout = NetworkLayout::Ring;
    std::vector<VertiportSpec> vertiports;  ///< explicit layout only
    /// Directed (from, to) id pairs; an empty list connects every pair both ways.
    std::vector<std::pair<std::string, std::string>> corridors;
    int ring_count = 29;
    int grid_rows = 0;
    int grid_cols = 0;
    GeoPoint center{40.73, -73.95};
    double ring_radius_m = 26000.0;
    double grid_spacing_m = 8000.0;
    int lane_count = 8;
    double lane_min_ft = 1000.0;
    double lane_max_ft = 5000.0;
    double region_margin_deg = 0.5;
    int fleet_size = 1;
};

/// `count` altitudes evenly spaced over [lo, hi], endpoints included.
std::vector<double> lane_altitudes(double lo_ft, double hi_ft, int count);

/// Pads per vertiport: every aircraft gets a pad at start plus one spare.
int allocate_pads(int fleet, int vertiport_count);

/// Even initial distribution; the first `fleet % V` vertiports get one extra.
std::vector<int> distribute_fleet(int fleet, int vertiport_count);

/// Builds the network and fills initial pad occupancy. Throws ConfigError on
/// unknown ids, fewer than two vertiports, or a corridor graph that is not
/// strongly connected.
VertiportNetwork build_network(const NetworkConfig& config);

struct FlightPlan {
    std::uint32_t flight_id = 0;
    std::uint32_t aircraft = 0;  ///< fleet slot
    std::size_t origin = 0;
    std::size_t destination = 0;
    double departure_s = 0.0;
    double lane_ft = 0.0;
    std::vector<GeoPoint> waypoints;
    double cruise_speed_kn = 0.0;
    /// Planned block time used for pad and vehicle scheduling.
    double nominal_duration_s = 0.0;
};

struct DemandConfig {
    int fleet_size = 1;
    double duration_s = 0.0;
    double turnaround_s = 60.0;
    double decision_interval_s = 60.0;
    double cruise_speed_kn = 110.0;
    /// Row-major V x V origin-destination weights; empty means uniform.
    std::vector<double> od_weights;
    KinematicsParams kinematics;
    double accel_limit_g = 0.2;
};

/// Upper estimate of the unequipped block time along `waypoints`: cruise,
/// final braking, and vertical descent from the lane, rounded up to whole
/// decision intervals with one interval of slack.
double nominal_flight_duration(const std::vector<GeoPoint>& waypoints, double lane_ft,
                               const DemandConfig& config, const Region& region);

/// Availability-driven schedule. Each aircraft departs as soon as its
/// turnaround has elapsed, to a destination drawn from the origin's weights
/// among vertiports with a pad free to reserve. Plans are returned in
/// departure order with sequential flight ids.
std::vector<FlightPlan> generate_demand(const VertiportNetwork& network, const DemandConfig& config,
                                        std::uint64_t seed);

/// `aircraft_id origin dest depart_s lane_ft lat,lon ...`, one plan per line.
void write_flight_plans(std::ostream& out, const VertiportNetwork& network,
                        const std::vector<FlightPlan>& plans);

}  // namespace cmgym
