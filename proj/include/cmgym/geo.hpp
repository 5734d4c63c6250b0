#pragma once

#include <cmath>

namespace cmgym {

inline constexpr double kEarthRadiusM = 6'371'000.0;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kRadToDeg = 180.0 / kPi;
inline constexpr double kMpsPerKnot = 1852.0 / 3600.0;
inline constexpr double kMetersPerFoot = 0.3048;
inline constexpr double kStandardGravity = 9.80665;

struct GeoPoint {
    double lat = 0.0;  ///< degrees, [-90, 90]
    double lon = 0.0;  ///< degrees, [-180, 180]

    bool valid() const {
        return std::isfinite(lat) && std::isfinite(lon) && lat >= -90.0 && lat <= 90.0 &&
               lon >= -180.0 && lon <= 180.0;
    }
    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

/// Meters east (x) and north (y) of a region origin.
struct LocalXY {
    double x = 0.0;
    double y = 0.0;

    double norm() const { return std::hypot(x, y); }
    friend LocalXY operator-(LocalXY a, LocalXY b) { return {a.x - b.x, a.y - b.y}; }
    friend LocalXY operator+(LocalXY a, LocalXY b) { return {a.x + b.x, a.y + b.y}; }
    friend LocalXY operator*(double k, LocalXY a) { return {k * a.x, k * a.y}; }
};

struct BoundingBox {
    double min_lat = -90.0;
    double max_lat = 90.0;
    double min_lon = -180.0;
    double max_lon = 180.0;

    bool contains(const GeoPoint& p) const {
        return p.lat >= min_lat && p.lat <= max_lat && p.lon >= min_lon && p.lon <= max_lon;
    }
    GeoPoint clamp(const GeoPoint& p) const;
};

/// Equirectangular projection workspace for one metro-scale region.
///
/// x = R cos(lat0) dlon, y = R dlat (radians). The map is affine, so the
/// inverse is exact up to floating point rounding.
class Region {
public:
    Region() = default;
    Region(GeoPoint origin, BoundingBox bounds);

    /// Throws std::out_of_range when `p` lies outside the bounding box.
    LocalXY project(const GeoPoint& p) const;
    GeoPoint unproject(const LocalXY& xy) const;

    const GeoPoint& origin() const { return origin_; }
    const BoundingBox& bounds() const { return bounds_; }
    bool contains(const GeoPoint& p) const { return bounds_.contains(p); }

    /// Planar distance in meters between two in-region points.
    double distance_m(const GeoPoint& a, const GeoPoint& b) const;

private:
    GeoPoint origin_{};
    BoundingBox bounds_{};
    double meters_per_deg_lat_ = kEarthRadiusM * kDegToRad;
    double meters_per_deg_lon_ = kEarthRadiusM * kDegToRad;
};

/// Compass bearing (degrees clockwise from north, [0, 360)) of the vector `d`.
double bearing_deg(const LocalXY& d);

/// Wraps any finite angle into [0, 360).
double normalize_heading(double deg);

/// Signed shortest rotation from `from` to `to`, in (-180, 180].
double heading_difference(double from, double to);

/// Great-circle (haversine) distance in meters.
double great_circle_m(const GeoPoint& a, const GeoPoint& b);

}  // namespace cmgym
