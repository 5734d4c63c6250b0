#include "cmgym/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cmgym/errors.hpp"

namespace cmgym {

namespace {

struct KeySpec {
    const char* key;
    const char* default_value;
    const char* description;
};

// clang-format off
constexpr KeySpec kSchema[] = {
    {"seed", "1", "base random seed"},
    {"fleet_size", "100", "number of aircraft in the fleet"},
    {"duration_s", "172800", "length of the generated departure schedule"},
    {"turnaround_s", "60", "minimum ground time between an arrival and the next departure"},
    {"cruise_speed_kn", "110", "planned cruise speed"},
    {"od_weights", "", "origin-destination weights, rows separated by ';' (empty = uniform)"},

    {"network.vertiports", "", "explicit vertiports 'id lat lon; ...' (empty = synthetic layout)"},
    {"network.corridors", "", "explicit directed corridors 'A>B; B<>C' (empty = all pairs)"},
    {"network.synthetic.ring.count", "29", "vertiports on the synthetic ring"},
    {"network.synthetic.ring.radius_m", "26000", "synthetic ring radius"},
    {"network.synthetic.grid.rows", "0", "rows of a synthetic grid layout (0 = use the ring)"},
    {"network.synthetic.grid.cols", "0", "columns of a synthetic grid layout"},
    {"network.synthetic.grid.spacing_m", "8000", "synthetic grid spacing"},
    {"network.synthetic.center_lat", "40.73", "synthetic layout center latitude"},
    {"network.synthetic.center_lon", "-73.95", "synthetic layout center longitude"},
    {"network.lanes.count", "8", "number of altitude lanes"},
    {"network.lanes.min_ft", "1000", "lowest lane altitude"},
    {"network.lanes.max_ft", "5000", "highest lane altitude"},
    {"network.region_margin_deg", "0.5", "region bounding box margin around the vertiports"},

    {"hazard.alpha_kwh", "5", "energy used per decision step"},
    {"hazard.beta", "3000", "charge cycles after which consumption becomes uncertain"},
    {"hazard.phi", "0.5", "gate on the truncated Gaussian consumption noise"},
    {"hazard.e_min_kwh", "100", "capacity at c_max cycles"},
    {"hazard.e_max_kwh", "250", "capacity at c_min cycles"},
    {"hazard.c_min", "0", "minimum charge cycles"},
    {"hazard.c_max", "10000", "maximum charge cycles"},
    {"hazard.noise_mean", "0.5", "mean of the consumption noise before truncation"},
    {"hazard.noise_sd", "0.25", "standard deviation of the consumption noise before truncation"},
    {"hazard.p_nav", "0", "navigation-loss probability per aircraft per decision step"},
    {"hazard.nav_grid", "", "navigation-loss probability grid file (overrides p_nav)"},
    {"hazard.wind_north", "0", "constant wind, north component, m/s"},
    {"hazard.wind_east", "0", "constant wind, east component, m/s"},
    {"hazard.wind_grid", "", "wind grid file (overrides the constant wind)"},

    {"reward.omega", "0.001", "step penalty"},
    {"reward.delta_energy", "-1", "energy-depletion terminal reward"},
    {"reward.delta_navigation", "-1", "navigation-loss terminal reward"},
    {"reward.delta_range_to_destination", "-1e-05", "touchdown reward per meter of route left"},
    {"reward.range_mode", "per_meter", "per_meter | indicator (1 when touching down away from the destination)"},
    {"reward.delta_land", "-0.1", "penalty for choosing land-now"},
    {"reward.delta_action_penalty", "-0.01", "penalty for any action other than no-alert"},
    {"reward.delta_vertiport_destination", "1", "peak touchdown reward at the destination"},
    {"reward.delta_vertiport_other", "0.25", "peak touchdown reward at other vertiports"},
    {"reward.sigma_deg", "0.0005", "width of the touchdown reward, degrees"},
    {"reward.h_every_step", "false", "evaluate the vertiport proximity term on every step"},

    {"sim.decision_interval_s", "60", "time between agent decisions"},
    {"sim.dt_s", "1", "kinematic integration step"},
    {"sim.turn_rate_dps", "6", "turn rate"},
    {"sim.capture_radius_m", "100", "waypoint capture radius"},
    {"sim.descent_rate_fpm", "500", "vertical descent rate"},
    {"sim.accel_limit_g", "0.2", "horizontal acceleration limit"},
    {"sim.heading_step_deg", "5", "magnitude of heading-change actions"},
    {"sim.vertiport_radius_m", "200", "touchdown within this distance counts as landing at a vertiport"},

    {"obs.waypoints", "3", "upcoming waypoints in the observation"},
    {"obs.vertiports", "3", "nearest vertiports in the observation"},
    {"obs.intruders", "3", "nearest other aircraft in the observation"},
    {"obs.distance_scale_m", "100000", "normalization for distances"},
    {"obs.wind_scale_mps", "30", "normalization for wind components"},
    {"obs.population_density", "0", "population density reported at every position"},

    {"run.steps", "1440", "decision steps per run"},
    {"run.policy", "unequipped", "unequipped | random | tabular_q"},
    {"run.window", "500", "rolling window for the destination fraction, in completed flights"},
    {"run.gamma", "0.99", "discount factor for reported returns"},
    {"run.workers", "1", "parallel workers for sweeps"},
    {"run.q_table", "", "Q-table file for the tabular_q policy"},

    {"q.episodes", "20", "training runs for the tabular learner"},
    {"q.steps", "720", "decision steps per training run"},
    {"q.learning_rate", "0.1", "Q-learning step size"},
    {"q.gamma", "0.99", "Q-learning discount"},
    {"q.epsilon", "0.1", "exploration rate"},
    {"q.energy_bins", "10", "bins over normalized energy"},
    {"q.distance_bins", "10", "bins over normalized route distance"},
    {"q.initial_value", "0", "initial Q value"},
};
// clang-format on

const KeySpec* find_spec(const std::string& key) {
    for (const auto& s : kSchema)
        if (key == s.key) return &s;
    return nullptr;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* kind) {
    throw ConfigError("config key '" + key + "': '" + value + "' is not " + kind);
}

}  // namespace

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find(sep, start);
        std::string item = trim(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
        if (!item.empty()) out.push_back(std::move(item));
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return out;
}

Config::Config() {
    for (const auto& s : kSchema) values_[s.key] = s.default_value;
}

bool Config::known_key(const std::string& key) { return find_spec(key) != nullptr; }

const std::string& Config::describe(const std::string& key) {
    static const std::map<std::string, std::string> text = [] {
        std::map<std::string, std::string> m;
        for (const auto& s : kSchema) m[s.key] = s.description;
        return m;
    }();
    const auto it = text.find(key);
    if (it == text.end()) throw ConfigError("unknown config key '" + key + "'");
    return it->second;
}

std::vector<std::string> Config::schema_keys() {
    std::vector<std::string> keys;
    for (const auto& s : kSchema) keys.emplace_back(s.key);
    return keys;
}

void Config::set(const std::string& key, const std::string& value) {
    if (!known_key(key)) throw ConfigError("unknown config key '" + key + "'");
    values_[key] = value;
}

void Config::apply_override(std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void Config::load_text(std::string_view text, const std::string& origin) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        // A '#' starts a comment when it begins the line or follows whitespace.
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '#' && (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t')) {
                line.resize(i);
                break;
            }
        }
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw ConfigError(origin + ":" + std::to_string(line_no) + ": bad section header");
            section = trim(std::string_view(t).substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(std::string_view(t).substr(0, eq));
        if (!section.empty()) key = section + "." + key;
        try {
            set(key, trim(std::string_view(t).substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

void Config::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    load_text(buf.str(), path);
    base_dir_ = std::filesystem::absolute(path).parent_path().string();
}

std::string Config::resolve_path(const std::string& path) const {
    if (path.empty() || base_dir_.empty() || std::filesystem::path(path).is_absolute()) return path;
    return (std::filesystem::path(base_dir_) / path).string();
}

const std::string& Config::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
    return it->second;
}

double Config::get_double(const std::string& key) const {
    const std::string& v = get(key);
    char* end = nullptr;
    errno = 0;
    const double d = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(d)) bad_value(key, v, "a finite number");
    return d;
}

long long Config::get_int(const std::string& key) const {
    const std::string& v = get(key);
    char* end = nullptr;
    errno = 0;
    const long long i = std::strtoll(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) bad_value(key, v, "an integer");
    return i;
}

std::uint64_t Config::get_u64(const std::string& key) const {
    const std::string& v = get(key);
    char* end = nullptr;
    errno = 0;
    const unsigned long long u = std::strtoull(v.c_str(), &end, 10);
    if (v.empty() || v.front() == '-' || end != v.c_str() + v.size() || errno == ERANGE) bad_value(key, v, "an unsigned integer");
    return u;
}

bool Config::get_bool(const std::string& key) const {
    std::string v = get(key);
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    bad_value(key, v, "a boolean");
}

std::string Config::to_text() const {
    std::string out;
    for (const auto& s : kSchema) {
        out += s.key;
        out += " = ";
        out += values_.at(s.key);
        out += '\n';
    }
    return out;
}

}  // namespace cmgym
