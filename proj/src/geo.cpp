#include "cmgym/geo.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace cmgym {

GeoPoint BoundingBox::clamp(const GeoPoint& p) const {
    return {std::clamp(p.lat, min_lat, max_lat), std::clamp(p.lon, min_lon, max_lon)};
}

Region::Region(GeoPoint origin, BoundingBox bounds) : origin_(origin), bounds_(bounds) {
    if (!origin.valid()) throw std::out_of_range("region origin is not a valid coordinate");
    if (!(bounds.min_lat < bounds.max_lat && bounds.min_lon < bounds.max_lon))
        throw std::out_of_range("region bounding box is empty");
    meters_per_deg_lat_ = kEarthRadiusM * kDegToRad;
    meters_per_deg_lon_ = kEarthRadiusM * std::cos(origin.lat * kDegToRad) * kDegToRad;
}

LocalXY Region::project(const GeoPoint& p) const {
    if (!p.valid() || !bounds_.contains(p)) {
        throw std::out_of_range("point (" + std::to_string(p.lat) + ", " + std::to_string(p.lon) +
                                ") is outside the region");
    }
    return {(p.lon - origin_.lon) * meters_per_deg_lon_, (p.lat - origin_.lat) * meters_per_deg_lat_};
}

GeoPoint Region::unproject(const LocalXY& xy) const {
    return {origin_.lat + xy.y / meters_per_deg_lat_, origin_.lon + xy.x / meters_per_deg_lon_};
}

double Region::distance_m(const GeoPoint& a, const GeoPoint& b) const {
    return (project(a) - project(b)).norm();
}

double bearing_deg(const LocalXY& d) {
    return normalize_heading(std::atan2(d.x, d.y) * kRadToDeg);
}

double normalize_heading(double deg) {
    double h = std::fmod(deg, 360.0);
    if (h < 0.0) h += 360.0;
    // fmod of a tiny negative value can round up to exactly 360
    if (h >= 360.0) h -= 360.0;
    return h;
}

double heading_difference(double from, double to) {
    double d = normalize_heading(to - from);
    return d > 180.0 ? d - 360.0 : d;
}

double great_circle_m(const GeoPoint& a, const GeoPoint& b) {
    const double phi1 = a.lat * kDegToRad;
    const double phi2 = b.lat * kDegToRad;
    const double dphi = phi2 - phi1;
    const double dlambda = (b.lon - a.lon) * kDegToRad;
    const double h = std::sin(dphi / 2) * std::sin(dphi / 2) +
                     std::cos(phi1) * std::cos(phi2) * std::sin(dlambda / 2) * std::sin(dlambda / 2);
    return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

}  // namespace cmgym
