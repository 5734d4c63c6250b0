#include "cmgym/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <utility>

#include "cmgym/errors.hpp"

namespace cmgym {

namespace {

bool strictly_increasing(const std::vector<double>& v) {
    return std::adjacent_find(v.begin(), v.end(), [](double a, double b) { return !(a < b); }) == v.end();
}

// Cell index and fractional offset along one axis, clamped to the hull.
std::pair<std::size_t, double> locate(const std::vector<double>& axis, double x, bool& clamped) {
    if (axis.size() == 1) {
        clamped = clamped || x != axis.front();
        return {0, 0.0};
    }
    if (x <= axis.front()) {
        clamped = clamped || x < axis.front();
        return {0, 0.0};
    }
    if (x >= axis.back()) {
        clamped = clamped || x > axis.back();
        return {axis.size() - 2, 1.0};
    }
    const auto hi = std::upper_bound(axis.begin(), axis.end(), x);
    const std::size_t i = static_cast<std::size_t>(hi - axis.begin()) - 1;
    return {i, (x - axis[i]) / (axis[i + 1] - axis[i])};
}

}  // namespace

LatLonGrid::LatLonGrid(std::vector<double> lats, std::vector<double> lons, std::size_t components,
                       std::vector<double> values)
    : lats_(std::move(lats)), lons_(std::move(lons)), components_(components), values_(std::move(values)) {
    if (lats_.empty() || lons_.empty() || components_ == 0)
        throw ConfigError("grid needs at least one node and one component");
    if (!strictly_increasing(lats_) || !strictly_increasing(lons_))
        throw ConfigError("grid axes must be strictly increasing");
    if (values_.size() != lats_.size() * lons_.size() * components_)
        throw ConfigError("grid value count does not match lattice size");
    if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); }))
        throw ConfigError("grid values must be finite");
}

LatLonGrid LatLonGrid::parse(std::istream& in, std::string_view header, std::size_t components) {
    std::string line;
    bool saw_header = false;
    std::map<std::pair<double, double>, std::vector<double>> nodes;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (!saw_header) {
            std::string h = line.substr(first);
            while (!h.empty() && (h.back() == '\r' || h.back() == ' ' || h.back() == '\t')) h.pop_back();
            if (h != header)
                throw ConfigError("expected header '" + std::string(header) + "', got '" + h + "'");
            saw_header = true;
            continue;
        }
        if (line[first] == '#') continue;
        std::istringstream row(line);
        double lat = 0.0;
        double lon = 0.0;
        std::vector<double> v(components);
        row >> lat >> lon;
        for (auto& x : v) row >> x;
        std::string extra;
        if (row.fail() || (row >> extra))
            throw ConfigError("malformed grid row at line " + std::to_string(line_no));
        if (!nodes.emplace(std::make_pair(lat, lon), std::move(v)).second)
            throw ConfigError("duplicate grid node at line " + std::to_string(line_no));
    }
    if (!saw_header) throw ConfigError("grid file is missing its header");

    std::vector<double> lats;
    std::vector<double> lons;
    for (const auto& [key, _] : nodes) {
        lats.push_back(key.first);
        lons.push_back(key.second);
    }
    std::sort(lats.begin(), lats.end());
    lats.erase(std::unique(lats.begin(), lats.end()), lats.end());
    std::sort(lons.begin(), lons.end());
    lons.erase(std::unique(lons.begin(), lons.end()), lons.end());
    if (nodes.size() != lats.size() * lons.size())
        throw ConfigError("grid file does not describe a complete lat/lon lattice");

    std::vector<double> values;
    values.reserve(nodes.size() * components);
    for (double lat : lats)
        for (double lon : lons) {
            const auto& v = nodes.at({lat, lon});
            values.insert(values.end(), v.begin(), v.end());
        }
    return LatLonGrid(std::move(lats), std::move(lons), components, std::move(values));
}

LatLonGrid LatLonGrid::load(const std::string& path, std::string_view header, std::size_t components) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open grid file " + path);
    return parse(in, header, components);
}

std::span<const double> LatLonGrid::node(std::size_t lat_index, std::size_t lon_index) const {
    return {values_.data() + (lat_index * lons_.size() + lon_index) * components_, components_};
}

bool LatLonGrid::sample(const GeoPoint& p, std::span<double> out) const {
    bool clamped = false;
    const auto [i, t] = locate(lats_, p.lat, clamped);
    const auto [j, u] = locate(lons_, p.lon, clamped);
    const std::size_t i1 = std::min(i + 1, lats_.size() - 1);
    const std::size_t j1 = std::min(j + 1, lons_.size() - 1);
    const auto v00 = node(i, j);
    const auto v01 = node(i, j1);
    const auto v10 = node(i1, j);
    const auto v11 = node(i1, j1);
    for (std::size_t c = 0; c < components_ && c < out.size(); ++c) {
        out[c] = (1 - t) * ((1 - u) * v00[c] + u * v01[c]) + t * ((1 - u) * v10[c] + u * v11[c]);
    }
    return !clamped;
}

}  // namespace cmgym
