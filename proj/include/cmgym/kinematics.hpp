#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cmgym/geo.hpp"

namespace cmgym {

inline constexpr double kMaxSpeedKn = 120.0;
inline constexpr double kMaxAltitudeFt = 5000.0;
inline constexpr double kMinAccelG = 0.1;
inline constexpr double kMaxAccelG = 0.5;

/// Wind as (north, east) components in m/s.
struct WindVector {
    double north = 0.0;
    double east = 0.0;
};

enum class NavMode : std::uint8_t { FollowRoute, HoldHeading, Descending };

const char* to_string(NavMode m);

/// Immutable flight route: waypoints at a single lane altitude.
///
/// `remaining_after[i]` is the along-route length from waypoint i to the last
/// waypoint, measured in the region's local plane.
struct Route {
    std::vector<GeoPoint> waypoints;
    std::vector<LocalXY> local;
    std::vector<double> remaining_after;
    double lane_altitude_ft = 0.0;

    static std::shared_ptr<const Route> make(std::vector<GeoPoint> waypoints, double lane_altitude_ft,
                                             const Region& region);
    std::size_t size() const { return waypoints.size(); }
    double total_length_m() const { return remaining_after.empty() ? 0.0 : remaining_after.front(); }
};

/// Tunable motion constants. None of these are fixed by the source model;
/// the defaults are the documented choices.
struct KinematicsParams {
    double turn_rate_dps = 6.0;
    double capture_radius_m = 100.0;
    double descent_rate_fpm = 500.0;
    /// Fraction of the accel limit used when planning the final approach.
    double approach_decel_fraction = 0.9;
};

struct AircraftState {
    std::uint32_t id = 0;
    std::uint32_t vehicle = 0;
    GeoPoint position{};
    double altitude_ft = 0.0;
    double heading_deg = 0.0;
    double speed_kn = 0.0;  ///< horizontal airspeed
    double accel_limit_g = 0.2;
    double energy_kwh = 0.0;
    double charge_cycles = 0.0;
    std::shared_ptr<const Route> route;
    std::size_t active_waypoint = 0;
    double route_distance_remaining_m = 0.0;
    NavMode nav_mode = NavMode::FollowRoute;
    bool nav_lost = false;
    std::size_t origin = 0;
    std::size_t destination = 0;
    double commanded_heading_deg = 0.0;
    double cruise_speed_kn = 0.0;

    bool landed() const { return altitude_ft <= 0.0; }
};

using EventLog = std::vector<std::string>;

/// Distance from the aircraft to the end of its route through the active waypoint.
double route_distance_remaining(const AircraftState& s, const Region& region);

/// One kinematic sub-step toward the commanded heading and speed.
///
/// Heading slews at the turn rate without overshoot, speed is rate limited by
/// the accel limit, and ground displacement is air velocity plus wind. Illegal
/// inputs are clamped and reported through `events`.
AircraftState step_kinematics(const AircraftState& s, double commanded_heading_deg,
                              double commanded_speed_kn, WindVector wind, double dt_s,
                              const Region& region, const KinematicsParams& params,
                              EventLog* events = nullptr);

struct RouteGuidance {
    std::size_t active_waypoint = 0;
    double heading_deg = 0.0;
    double speed_kn = 0.0;
    bool exhausted = false;  ///< caller should switch to descent
};

/// Route-following target selection with waypoint capture. Near the end of the
/// route the commanded speed follows a braking profile so the subsequent
/// descent stops over the destination.
RouteGuidance advance_route(const AircraftState& s, const Region& region,
                            const KinematicsParams& params);

/// Vertical descent sub-step. Horizontal speed bleeds off at the accel limit
/// and the aircraft holds station against the wind.
AircraftState descend(const AircraftState& s, double dt_s, const Region& region,
                      const KinematicsParams& params);

}  // namespace cmgym
