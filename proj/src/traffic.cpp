#include "cmgym/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <queue>
#include <random>
#include <tuple>

#include "cmgym/errors.hpp"
#include "cmgym/rng.hpp"

namespace cmgym {

std::optional<std::size_t> VertiportNetwork::index_of(const std::string& id) const {
    for (std::size_t i = 0; i < vertiports.size(); ++i)
        if (vertiports[i].id == id) return i;
    return std::nullopt;
}

bool VertiportNetwork::strongly_connected() const {
    const std::size_t n = vertiports.size();
    if (n == 0) return false;
    auto reaches_all = [&](bool reversed) {
        std::vector<bool> seen(n, false);
        std::vector<std::size_t> stack{0};
        seen[0] = true;
        while (!stack.empty()) {
            const std::size_t v = stack.back();
            stack.pop_back();
            for (const auto& c : corridors) {
                const std::size_t a = reversed ? c.to : c.from;
                const std::size_t b = reversed ? c.from : c.to;
                if (a == v && !seen[b]) {
                    seen[b] = true;
                    stack.push_back(b);
                }
            }
        }
        return std::all_of(seen.begin(), seen.end(), [](bool s) { return s; });
    };
    return reaches_all(false) && reaches_all(true);
}

std::vector<std::size_t> VertiportNetwork::shortest_path(std::size_t from, std::size_t to) const {
    const std::size_t n = vertiports.size();
    if (from >= n || to >= n) throw IdentifierError("vertiport index out of range");
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(n, inf);
    std::vector<std::size_t> prev(n, n);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    dist[from] = 0.0;
    open.emplace(0.0, from);
    while (!open.empty()) {
        const auto [d, v] = open.top();
        open.pop();
        if (d > dist[v]) continue;
        for (const auto& c : corridors) {
            if (c.from != v) continue;
            const double nd = d + c.length_m;
            // Ties go to the lower predecessor index so paths are reproducible.
            if (nd < dist[c.to] || (nd == dist[c.to] && v < prev[c.to])) {
                dist[c.to] = nd;
                prev[c.to] = v;
                open.emplace(nd, c.to);
            }
        }
    }
    if (dist[to] == inf) throw IdentifierError("no corridor path between vertiports");
    std::vector<std::size_t> path{to};
    while (path.back() != from) path.push_back(prev[path.back()]);
    std::reverse(path.begin(), path.end());
    return path;
}

std::vector<GeoPoint> VertiportNetwork::route_waypoints(const std::vector<std::size_t>& path) const {
    std::vector<GeoPoint> out;
    if (path.empty()) return out;
    out.push_back(vertiports[path.front()].location);
    for (std::size_t k = 1; k < path.size(); ++k) {
        const auto it = std::find_if(corridors.begin(), corridors.end(), [&](const Corridor& c) {
            return c.from == path[k - 1] && c.to == path[k];
        });
        if (it == corridors.end()) throw IdentifierError("path uses a missing corridor");
        out.insert(out.end(), it->polyline.begin() + 1, it->polyline.end());
    }
    return out;
}

std::optional<std::size_t> VertiportNetwork::vertiport_at(const GeoPoint& p, double radius_m) const {
    std::optional<std::size_t> best;
    double best_d = radius_m;
    for (std::size_t i = 0; i < vertiports.size(); ++i) {
        const double d = region.distance_m(p, vertiports[i].location);
        if (d <= best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

std::vector<double> lane_altitudes(double lo_ft, double hi_ft, int count) {
    if (count < 1) throw ConfigError("network.lanes.count must be >= 1");
    if (count == 1) return {lo_ft};
    std::vector<double> lanes(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) lanes[static_cast<std::size_t>(i)] = lo_ft + (hi_ft - lo_ft) * i / (count - 1);
    return lanes;
}

int allocate_pads(int fleet, int vertiport_count) {
    if (fleet < 1 || vertiport_count < 1) throw ConfigError("fleet and vertiport count must be >= 1");
    return fleet / vertiport_count + 1;
}

std::vector<int> distribute_fleet(int fleet, int vertiport_count) {
    if (vertiport_count < 1) throw ConfigError("vertiport count must be >= 1");
    std::vector<int> at(static_cast<std::size_t>(vertiport_count), fleet / vertiport_count);
    for (int i = 0; i < fleet % vertiport_count; ++i) ++at[static_cast<std::size_t>(i)];
    return at;
}

namespace {

BoundingBox hull(const std::vector<VertiportSpec>& specs, double margin) {
    BoundingBox b{90.0, -90.0, 180.0, -180.0};
    for (const auto& s : specs) {
        b.min_lat = std::min(b.min_lat, s.location.lat);
        b.max_lat = std::max(b.max_lat, s.location.lat);
        b.min_lon = std::min(b.min_lon, s.location.lon);
        b.max_lon = std::max(b.max_lon, s.location.lon);
    }
    return {std::max(-90.0, b.min_lat - margin), std::min(90.0, b.max_lat + margin),
            std::max(-180.0, b.min_lon - margin), std::min(180.0, b.max_lon + margin)};
}

void add_corridor(VertiportNetwork& net, std::size_t a, std::size_t b) {
    for (const auto& c : net.corridors)
        if (c.from == a && c.to == b) return;
    Corridor c{a, b, {net.vertiports[a].location, net.vertiports[b].location}, 0.0};
    c.length_m = net.region.distance_m(c.polyline.front(), c.polyline.back());
    net.corridors.push_back(std::move(c));
}

}  // namespace

VertiportNetwork build_network(const NetworkConfig& config) {
    std::vector<VertiportSpec> specs;
    const Region workspace(config.center, {-90.0, 90.0, -180.0, 180.0});
    char id[32];
    switch (config.layout) {
        case NetworkLayout::Explicit: specs = config.vertiports; break;
        case NetworkLayout::Ring:
            for (int k = 0; k < config.ring_count; ++k) {
                const double theta = 2.0 * kPi * k / config.ring_count;
                std::snprintf(id, sizeof id, "V%02d", k);
                specs.push_back({id, workspace.unproject({config.ring_radius_m * std::sin(theta),
                                                          config.ring_radius_m * std::cos(theta)})});
            }
            break;
        case NetworkLayout::Grid:
            for (int r = 0; r < config.grid_rows; ++r)
                for (int c = 0; c < config.grid_cols; ++c) {
                    std::snprintf(id, sizeof id, "V%02d_%02d", r, c);
                    const double x = (c - (config.grid_cols - 1) / 2.0) * config.grid_spacing_m;
                    const double y = (r - (config.grid_rows - 1) / 2.0) * config.grid_spacing_m;
                    specs.push_back({id, workspace.unproject({x, y})});
                }
            break;
    }
    if (specs.size() < 2) throw ConfigError("network needs at least two vertiports");
    for (const auto& s : specs)
        if (!s.location.valid()) throw ConfigError("vertiport " + s.id + " has invalid coordinates");

    VertiportNetwork net;
    const BoundingBox box = hull(specs, config.region_margin_deg);
    const GeoPoint origin = config.layout == NetworkLayout::Explicit
                                ? GeoPoint{(box.min_lat + box.max_lat) / 2, (box.min_lon + box.max_lon) / 2}
                                : config.center;
    net.region = Region(origin, box);
    net.lanes_ft = lane_altitudes(config.lane_min_ft, config.lane_max_ft, config.lane_count);
    for (const auto& s : specs) {
        if (net.index_of(s.id)) throw ConfigError("duplicate vertiport id " + s.id);
        if (!net.region.contains(s.location)) throw ConfigError("vertiport " + s.id + " outside region");
        net.vertiports.push_back({s.id, s.location, 1, 0});
    }

    const std::size_t n = net.vertiports.size();
    switch (config.layout) {
        case NetworkLayout::Explicit:
            if (config.corridors.empty()) {
                for (std::size_t a = 0; a < n; ++a)
                    for (std::size_t b = 0; b < n; ++b)
                        if (a != b) add_corridor(net, a, b);
            } else {
                for (const auto& [from, to] : config.corridors) {
                    const auto a = net.index_of(from);
                    const auto b = net.index_of(to);
                    if (!a || !b) throw ConfigError("corridor references unknown vertiport " + from + ">" + to);
                    if (*a == *b) throw ConfigError("corridor " + from + ">" + to + " is a self loop");
                    add_corridor(net, *a, *b);
                }
            }
            break;
        case NetworkLayout::Ring:
            for (std::size_t k = 0; k < n; ++k) {
                add_corridor(net, k, (k + 1) % n);
                add_corridor(net, (k + 1) % n, k);
            }
            break;
        case NetworkLayout::Grid: {
            const auto cols = static_cast<std::size_t>(config.grid_cols);
            for (std::size_t k = 0; k < n; ++k) {
                if ((k + 1) % cols != 0) {
                    add_corridor(net, k, k + 1);
                    add_corridor(net, k + 1, k);
                }
                if (k + cols < n) {
                    add_corridor(net, k, k + cols);
                    add_corridor(net, k + cols, k);
                }
            }
            break;
        }
    }
    if (!net.strongly_connected()) throw ConfigError("corridor network is not strongly connected");

    const int fleet = std::max(config.fleet_size, 0);
    const int pads = fleet > 0 ? allocate_pads(fleet, static_cast<int>(n)) : 1;
    const auto initial = distribute_fleet(fleet, static_cast<int>(n));
    for (std::size_t i = 0; i < n; ++i) {
        net.vertiports[i].total_pads = pads;
        net.vertiports[i].occupied_pads = initial[i];
    }
    return net;
}

double nominal_flight_duration(const std::vector<GeoPoint>& waypoints, double lane_ft,
                               const DemandConfig& config, const Region& region) {
    double length = 0.0;
    for (std::size_t i = 1; i < waypoints.size(); ++i) length += region.distance_m(waypoints[i - 1], waypoints[i]);
    const double v = config.cruise_speed_kn * kMpsPerKnot;
    const double decel = config.kinematics.approach_decel_fraction *
                         std::clamp(config.accel_limit_g, kMinAccelG, kMaxAccelG) * kStandardGravity;
    double t = 0.0;
    if (v > 0.0) t = length / v + v / (2.0 * decel);
    for (std::size_t i = 1; i + 1 < waypoints.size(); ++i) {
        const double in = bearing_deg(region.project(waypoints[i]) - region.project(waypoints[i - 1]));
        const double out = bearing_deg(region.project(waypoints[i + 1]) - region.project(waypoints[i]));
        t += std::abs(heading_difference(in, out)) / config.kinematics.turn_rate_dps;
    }
    t += lane_ft / config.kinematics.descent_rate_fpm * 60.0;
    const double dt = config.decision_interval_s;
    return (std::ceil(t / dt) + 1.0) * dt;
}

namespace {

double ceil_to(double t, double step) { return std::ceil(t / step - 1e-9) * step; }

}  // namespace

std::vector<FlightPlan> generate_demand(const VertiportNetwork& network, const DemandConfig& config,
                                        std::uint64_t seed) {
    const std::size_t n = network.size();
    if (config.fleet_size < 1) throw ConfigError("fleet_size must be >= 1");
    if (!(config.decision_interval_s > 0.0)) throw ConfigError("decision interval must be > 0");
    if (config.turnaround_s < 0.0) throw ConfigError("turnaround_s must be >= 0");
    if (n < 2) throw ConfigError("network needs at least two vertiports");
    const int pads = allocate_pads(config.fleet_size, static_cast<int>(n));
    if (config.fleet_size > pads * static_cast<int>(n)) throw ConfigError("fleet exceeds pad capacity");

    std::vector<double> weights = config.od_weights;
    if (weights.empty()) weights.assign(n * n, 1.0);
    if (weights.size() != n * n) throw ConfigError("od_weights must be a V x V matrix");
    for (std::size_t o = 0; o < n; ++o) {
        weights[o * n + o] = 0.0;
        double row = 0.0;
        for (std::size_t d = 0; d < n; ++d) {
            const double w = weights[o * n + d];
            if (!std::isfinite(w) || w < 0.0) throw ConfigError("od_weights must be finite and >= 0");
            row += w;
        }
        if (row <= 0.0) throw ConfigError("od_weights row " + network.vertiports[o].id + " has no destinations");
    }

    // Shortest paths are shared by every flight on the same pair.
    std::map<std::pair<std::size_t, std::size_t>, std::vector<GeoPoint>> route_cache;
    auto route_for = [&](std::size_t o, std::size_t d) -> const std::vector<GeoPoint>& {
        auto it = route_cache.find({o, d});
        if (it == route_cache.end())
            it = route_cache.emplace(std::make_pair(o, d), network.route_waypoints(network.shortest_path(o, d))).first;
        return it->second;
    };

    const auto initial = distribute_fleet(config.fleet_size, static_cast<int>(n));
    std::vector<int> holdings(initial.begin(), initial.end());
    struct Slot {
        std::size_t at = 0;
        Rng rng;
    };
    std::vector<Slot> slots;
    {
        std::size_t s = 0;
        for (std::size_t v = 0; v < n; ++v)
            for (int k = 0; k < initial[v]; ++k, ++s) slots.push_back({v, make_stream(seed, StreamTag::Demand, s)});
    }

    using Ready = std::tuple<double, std::uint32_t>;
    std::priority_queue<Ready, std::vector<Ready>, std::greater<>> ready;
    for (std::uint32_t s = 0; s < slots.size(); ++s) ready.emplace(0.0, s);

    const double dt = config.decision_interval_s;
    std::vector<FlightPlan> plans;
    while (!ready.empty()) {
        const auto [t, s] = ready.top();
        ready.pop();
        if (t > config.duration_s) continue;
        Slot& slot = slots[s];
        // Destinations without a free pad are excluded from the draw; when
        // every weighted destination is full the aircraft waits one interval.
        std::vector<double> row(weights.begin() + static_cast<std::ptrdiff_t>(slot.at * n),
                                weights.begin() + static_cast<std::ptrdiff_t>((slot.at + 1) * n));
        double open = 0.0;
        for (std::size_t d = 0; d < n; ++d) {
            if (holdings[d] >= pads) row[d] = 0.0;
            open += row[d];
        }
        if (open <= 0.0) {
            ready.emplace(t + dt, s);
            continue;
        }
        const std::size_t dest = std::discrete_distribution<std::size_t>(row.begin(), row.end())(slot.rng);

        FlightPlan plan;
        plan.flight_id = static_cast<std::uint32_t>(plans.size());
        plan.aircraft = s;
        plan.origin = slot.at;
        plan.destination = dest;
        plan.departure_s = t;
        plan.waypoints = route_for(slot.at, dest);
        // Eastbound flights take even lanes, westbound odd.
        const double course = bearing_deg(network.region.project(network.vertiports[dest].location) -
                                          network.region.project(network.vertiports[slot.at].location));
        const std::size_t parity = course < 180.0 ? 0 : 1;
        std::vector<std::size_t> lanes;
        for (std::size_t i = parity; i < network.lanes_ft.size(); i += 2) lanes.push_back(i);
        if (lanes.empty()) lanes.push_back(0);
        plan.lane_ft = network.lanes_ft[lanes[std::uniform_int_distribution<std::size_t>(0, lanes.size() - 1)(slot.rng)]];
        plan.cruise_speed_kn = config.cruise_speed_kn;
        plan.nominal_duration_s = nominal_flight_duration(plan.waypoints, plan.lane_ft, config, network.region);

        ++holdings[dest];
        --holdings[slot.at];
        slot.at = dest;
        ready.emplace(ceil_to(t + plan.nominal_duration_s + config.turnaround_s, dt), s);
        plans.push_back(std::move(plan));
    }
    return plans;
}

void write_flight_plans(std::ostream& out, const VertiportNetwork& network,
                        const std::vector<FlightPlan>& plans) {
    char buf[64];
    for (const auto& p : plans) {
        out << p.aircraft << ' ' << network.vertiports[p.origin].id << ' ' << network.vertiports[p.destination].id;
        std::snprintf(buf, sizeof buf, " %.9g %.9g", p.departure_s, p.lane_ft);
        out << buf;
        for (const auto& w : p.waypoints) {
            std::snprintf(buf, sizeof buf, " %.9g,%.9g", w.lat, w.lon);
            out << buf;
        }
        out << '\n';
    }
}

}  // namespace cmgym
