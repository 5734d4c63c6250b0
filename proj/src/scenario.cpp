#include "cmgym/scenario.hpp"

#include <cmath>
#include <sstream>

#include "cmgym/errors.hpp"

namespace cmgym {

namespace {

std::vector<VertiportSpec> parse_vertiports(const std::string& text) {
    std::vector<VertiportSpec> out;
    for (const auto& item : split_list(text, ';')) {
        std::istringstream in(item);
        VertiportSpec v;
        std::string extra;
        if (!(in >> v.id >> v.location.lat >> v.location.lon) || (in >> extra))
            throw ConfigError("network.vertiports entry '" + item + "' is not 'id lat lon'");
        out.push_back(v);
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> parse_corridors(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& item : split_list(text, ';')) {
        if (const auto both = item.find("<>"); both != std::string::npos) {
            const std::string a = trim(item.substr(0, both));
            const std::string b = trim(item.substr(both + 2));
            out.emplace_back(a, b);
            out.emplace_back(b, a);
        } else if (const auto one = item.find('>'); one != std::string::npos) {
            out.emplace_back(trim(item.substr(0, one)), trim(item.substr(one + 1)));
        } else {
            throw ConfigError("network.corridors entry '" + item + "' is not 'A>B' or 'A<>B'");
        }
    }
    return out;
}

std::vector<double> parse_matrix(const std::string& text) {
    std::vector<double> out;
    for (const auto& row : split_list(text, ';')) {
        std::istringstream in(row);
        double v = 0.0;
        while (in >> v) out.push_back(v);
        if (!in.eof()) throw ConfigError("od_weights row '" + row + "' is not numeric");
    }
    return out;
}

int positive_int(const Config& c, const std::string& key, long long min_value) {
    const long long v = c.get_int(key);
    if (v < min_value || v > 10'000'000) throw ConfigError(key + " out of range");
    return static_cast<int>(v);
}

double positive(const Config& c, const std::string& key) {
    const double v = c.get_double(key);
    if (!(v > 0.0)) throw ConfigError(key + " must be > 0");
    return v;
}

}  // namespace

Scenario Scenario::from_config(const Config& c) {
    Scenario s;
    s.seed = c.get_u64("seed");

    auto& net = s.network;
    net.vertiports = parse_vertiports(c.get("network.vertiports"));
    net.corridors = parse_corridors(c.get("network.corridors"));
    net.grid_rows = positive_int(c, "network.synthetic.grid.rows", 0);
    net.grid_cols = positive_int(c, "network.synthetic.grid.cols", 0);
    if (!net.vertiports.empty()) {
        net.layout = NetworkLayout::Explicit;
    } else if (net.grid_rows > 0 || net.grid_cols > 0) {
        net.layout = NetworkLayout::Grid;
        if (net.grid_rows < 1 || net.grid_cols < 1) throw ConfigError("grid layout needs rows and cols >= 1");
    } else {
        net.layout = NetworkLayout::Ring;
    }
    if (net.layout != NetworkLayout::Explicit && !net.corridors.empty())
        throw ConfigError("network.corridors requires explicit network.vertiports");
    net.ring_count = positive_int(c, "network.synthetic.ring.count", 2);
    net.ring_radius_m = positive(c, "network.synthetic.ring.radius_m");
    net.grid_spacing_m = positive(c, "network.synthetic.grid.spacing_m");
    net.center = {c.get_double("network.synthetic.center_lat"), c.get_double("network.synthetic.center_lon")};
    if (!net.center.valid()) throw ConfigError("synthetic center is not a valid coordinate");
    net.lane_count = positive_int(c, "network.lanes.count", 1);
    net.lane_min_ft = c.get_double("network.lanes.min_ft");
    net.lane_max_ft = c.get_double("network.lanes.max_ft");
    if (net.lane_min_ft < 0.0 || net.lane_max_ft > kMaxAltitudeFt || net.lane_min_ft > net.lane_max_ft)
        throw ConfigError("lane altitudes must satisfy 0 <= min <= max <= 5000 ft");
    net.region_margin_deg = c.get_double("network.region_margin_deg");
    if (net.region_margin_deg < 0.0) throw ConfigError("network.region_margin_deg must be >= 0");
    net.fleet_size = positive_int(c, "fleet_size", 1);

    auto& sim = s.sim;
    sim.decision_interval_s = positive(c, "sim.decision_interval_s");
    sim.dt_s = positive(c, "sim.dt_s");
    if (sim.dt_s > sim.decision_interval_s) throw ConfigError("sim.dt_s must not exceed the decision interval");
    sim.kinematics.turn_rate_dps = positive(c, "sim.turn_rate_dps");
    sim.kinematics.capture_radius_m = positive(c, "sim.capture_radius_m");
    sim.kinematics.descent_rate_fpm = positive(c, "sim.descent_rate_fpm");
    sim.accel_limit_g = c.get_double("sim.accel_limit_g");
    if (sim.accel_limit_g < kMinAccelG || sim.accel_limit_g > kMaxAccelG)
        throw ConfigError("sim.accel_limit_g must be in [0.1, 0.5]");
    sim.heading_step_deg = c.get_double("sim.heading_step_deg");
    sim.vertiport_radius_m = positive(c, "sim.vertiport_radius_m");

    auto& d = s.demand;
    d.fleet_size = net.fleet_size;
    d.duration_s = c.get_double("duration_s");
    if (d.duration_s < 0.0) throw ConfigError("duration_s must be >= 0");
    d.turnaround_s = c.get_double("turnaround_s");
    if (d.turnaround_s < 0.0) throw ConfigError("turnaround_s must be >= 0");
    d.decision_interval_s = sim.decision_interval_s;
    d.cruise_speed_kn = c.get_double("cruise_speed_kn");
    if (!(d.cruise_speed_kn > 0.0 && d.cruise_speed_kn <= kMaxSpeedKn))
        throw ConfigError("cruise_speed_kn must be in (0, 120]");
    d.od_weights = parse_matrix(c.get("od_weights"));
    d.kinematics = sim.kinematics;
    d.accel_limit_g = sim.accel_limit_g;

    auto& e = s.energy;
    e.alpha_kwh = c.get_double("hazard.alpha_kwh");
    e.beta = c.get_double("hazard.beta");
    e.phi = c.get_double("hazard.phi");
    e.e_min_kwh = c.get_double("hazard.e_min_kwh");
    e.e_max_kwh = c.get_double("hazard.e_max_kwh");
    e.c_min = c.get_double("hazard.c_min");
    e.c_max = c.get_double("hazard.c_max");
    e.noise_mean = c.get_double("hazard.noise_mean");
    e.noise_sd = c.get_double("hazard.noise_sd");
    for (auto& w : e.validate()) s.warnings.push_back(std::move(w));

    if (const auto path = c.resolve_path(c.get("hazard.wind_grid")); !path.empty()) {
        s.wind = GridWind::load(path);
    } else {
        s.wind = ConstantWind{{c.get_double("hazard.wind_north"), c.get_double("hazard.wind_east")}};
    }
    if (const auto path = c.resolve_path(c.get("hazard.nav_grid")); !path.empty()) {
        s.nav = FieldNavLoss::load(path);
    } else {
        s.nav = ConstantNavLoss{c.get_double("hazard.p_nav")};
    }
    validate(s.nav);

    auto& r = s.reward;
    r.omega = c.get_double("reward.omega");
    r.delta_energy = c.get_double("reward.delta_energy");
    r.delta_navigation = c.get_double("reward.delta_navigation");
    r.delta_range_to_destination = c.get_double("reward.delta_range_to_destination");
    const std::string mode = c.get("reward.range_mode");
    if (mode == "per_meter") r.range_mode = RangeMode::PerMeter;
    else if (mode == "indicator") r.range_mode = RangeMode::Indicator;
    else throw ConfigError("reward.range_mode must be per_meter or indicator");
    r.delta_land = c.get_double("reward.delta_land");
    r.delta_action_penalty = c.get_double("reward.delta_action_penalty");
    r.delta_vertiport_destination = c.get_double("reward.delta_vertiport_destination");
    r.delta_vertiport_other = c.get_double("reward.delta_vertiport_other");
    r.sigma_deg = c.get_double("reward.sigma_deg");
    r.h_every_step = c.get_bool("reward.h_every_step");
    r.validate();

    auto& o = s.obs;
    o.waypoints = positive_int(c, "obs.waypoints", 0);
    o.vertiports = positive_int(c, "obs.vertiports", 0);
    o.intruders = positive_int(c, "obs.intruders", 0);
    o.distance_scale_m = positive(c, "obs.distance_scale_m");
    o.wind_scale_mps = positive(c, "obs.wind_scale_mps");
    o.population_density = c.get_double("obs.population_density");
    return s;
}

}  // namespace cmgym
