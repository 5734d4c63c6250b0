#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "cmgym/geo.hpp"

namespace cmgym {

/// Rectilinear lat/lon lattice carrying a fixed number of components per node,
/// sampled by bilinear interpolation.
class LatLonGrid {
public:
    LatLonGrid() = default;
    /// `values` is row-major over (lat, lon) with `components` values per node.
    LatLonGrid(std::vector<double> lats, std::vector<double> lons, std::size_t components,
               std::vector<double> values);

    /// Parses the whitespace-separated text layout: a header line equal to
    /// `header`, then one `lat lon v0 v1 ...` row per node in any order.
    static LatLonGrid parse(std::istream& in, std::string_view header, std::size_t components);
    static LatLonGrid load(const std::string& path, std::string_view header, std::size_t components);

    /// Writes `out.size() == components()` interpolated values. Points outside
    /// the hull are clamped to the nearest edge; returns false in that case.
    bool sample(const GeoPoint& p, std::span<double> out) const;

    std::size_t components() const { return components_; }
    const std::vector<double>& lats() const { return lats_; }
    const std::vector<double>& lons() const { return lons_; }
    std::span<const double> node(std::size_t lat_index, std::size_t lon_index) const;

private:
    std::vector<double> lats_;
    std::vector<double> lons_;
    std::size_t components_ = 0;
    std::vector<double> values_;
};

}  // namespace cmgym
