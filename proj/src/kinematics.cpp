#include "cmgym/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cmgym {

const char* to_string(NavMode m) {
    switch (m) {
        case NavMode::FollowRoute: return "FOLLOW_ROUTE";
        case NavMode::HoldHeading: return "HOLD_HEADING";
        case NavMode::Descending: return "DESCENDING";
    }
    return "?";
}

std::shared_ptr<const Route> Route::make(std::vector<GeoPoint> waypoints, double lane_altitude_ft,
                                         const Region& region) {
    auto r = std::make_shared<Route>();
    r->lane_altitude_ft = lane_altitude_ft;
    r->local.reserve(waypoints.size());
    for (const auto& w : waypoints) r->local.push_back(region.project(w));
    r->remaining_after.assign(waypoints.size(), 0.0);
    for (std::size_t i = waypoints.size(); i-- > 1;) {
        r->remaining_after[i - 1] = r->remaining_after[i] + (r->local[i] - r->local[i - 1]).norm();
    }
    r->waypoints = std::move(waypoints);
    return r;
}

double route_distance_remaining(const AircraftState& s, const Region& region) {
    if (!s.route || s.route->size() == 0) return 0.0;
    const Route& r = *s.route;
    const LocalXY here = region.project(s.position);
    if (s.active_waypoint >= r.size()) return (r.local.back() - here).norm();
    return (r.local[s.active_waypoint] - here).norm() + r.remaining_after[s.active_waypoint];
}

namespace {

double clamp_logged(double v, double lo, double hi, const char* what, EventLog* events) {
    if (v < lo || v > hi) {
        if (events) events->emplace_back(std::string("clamped_") + what);
        return std::clamp(v, lo, hi);
    }
    return v;
}

GeoPoint move(const GeoPoint& from, LocalXY displacement, const Region& region, EventLog* events) {
    GeoPoint p = region.unproject(region.project(from) + displacement);
    if (!region.contains(p)) {
        if (events) events->emplace_back("region_boundary");
        p = region.bounds().clamp(p);
    }
    return p;
}

}  // namespace

AircraftState step_kinematics(const AircraftState& s, double commanded_heading_deg,
                              double commanded_speed_kn, WindVector wind, double dt_s,
                              const Region& region, const KinematicsParams& params,
                              EventLog* events) {
    AircraftState out = s;
    if (!(dt_s > 0.0)) {
        if (events) events->emplace_back("ignored_nonpositive_dt");
        return out;
    }
    if (!std::isfinite(commanded_heading_deg)) {
        if (events) events->emplace_back("clamped_heading");
        commanded_heading_deg = s.heading_deg;
    }
    if (!std::isfinite(commanded_speed_kn)) {
        if (events) events->emplace_back("clamped_speed");
        commanded_speed_kn = s.speed_kn;
    }
    const double accel_g = clamp_logged(s.accel_limit_g, kMinAccelG, kMaxAccelG, "accel", events);
    const double target_kn = clamp_logged(commanded_speed_kn, 0.0, kMaxSpeedKn, "speed", events);
    const double target_heading = normalize_heading(commanded_heading_deg);

    const double max_turn = params.turn_rate_dps * dt_s;
    const double turn = heading_difference(s.heading_deg, target_heading);
    out.heading_deg =
        std::abs(turn) <= max_turn ? target_heading
                                   : normalize_heading(s.heading_deg + std::copysign(max_turn, turn));

    const double v0 = std::clamp(s.speed_kn, 0.0, kMaxSpeedKn) * kMpsPerKnot;
    const double max_dv = accel_g * kStandardGravity * dt_s;
    const double v1 = v0 + std::clamp(target_kn * kMpsPerKnot - v0, -max_dv, max_dv);
    const double v_avg = 0.5 * (v0 + v1);
    out.speed_kn = std::clamp(v1 / kMpsPerKnot, 0.0, kMaxSpeedKn);

    const double h = out.heading_deg * kDegToRad;
    const LocalXY ground{(v_avg * std::sin(h) + wind.east) * dt_s, (v_avg * std::cos(h) + wind.north) * dt_s};
    out.position = move(s.position, ground, region, events);
    out.route_distance_remaining_m = route_distance_remaining(out, region);
    return out;
}

RouteGuidance advance_route(const AircraftState& s, const Region& region,
                            const KinematicsParams& params) {
    RouteGuidance g;
    g.heading_deg = s.heading_deg;
    if (!s.route || s.route->size() == 0) {
        g.exhausted = true;
        return g;
    }
    const Route& r = *s.route;
    const LocalXY here = region.project(s.position);
    std::size_t idx = s.active_waypoint;
    while (idx < r.size() && (r.local[idx] - here).norm() < params.capture_radius_m) ++idx;
    g.active_waypoint = idx;
    if (idx >= r.size()) {
        g.exhausted = true;
        return g;
    }
    const LocalXY to_wp = r.local[idx] - here;
    g.heading_deg = bearing_deg(to_wp);
    const double remaining = to_wp.norm() + r.remaining_after[idx];
    const double decel =
        params.approach_decel_fraction * std::clamp(s.accel_limit_g, kMinAccelG, kMaxAccelG) * kStandardGravity;
    const double braking_kn = std::sqrt(2.0 * decel * remaining) / kMpsPerKnot;
    g.speed_kn = std::min(s.cruise_speed_kn, braking_kn);
    return g;
}

AircraftState descend(const AircraftState& s, double dt_s, const Region& region,
                      const KinematicsParams& params) {
    AircraftState out = s;
    if (!(dt_s > 0.0)) return out;
    out.altitude_ft = std::max(0.0, s.altitude_ft - params.descent_rate_fpm * dt_s / 60.0);
    const double a = std::clamp(s.accel_limit_g, kMinAccelG, kMaxAccelG) * kStandardGravity;
    const double v0 = std::max(0.0, s.speed_kn) * kMpsPerKnot;
    const double v1 = std::max(0.0, v0 - a * dt_s);
    // Distance covered while braking within the step, exact for constant deceleration.
    const double travelled = v0 > a * dt_s ? 0.5 * (v0 + v1) * dt_s : v0 * v0 / (2.0 * a);
    out.speed_kn = v1 / kMpsPerKnot;
    if (travelled > 0.0) {
        const double h = s.heading_deg * kDegToRad;
        out.position = move(s.position, {travelled * std::sin(h), travelled * std::cos(h)}, region, nullptr);
    }
    out.route_distance_remaining_m = route_distance_remaining(out, region);
    return out;
}

}  // namespace cmgym
