#include "cmgym/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cmgym/errors.hpp"

namespace cmgym {

// --- policies ---------------------------------------------------------------

const char* to_string(PolicyKind k) {
    switch (k) {
        case PolicyKind::Unequipped: return "unequipped";
        case PolicyKind::Random: return "random";
        case PolicyKind::TabularQ: return "tabular_q";
    }
    return "?";
}

PolicyKind parse_policy(const std::string& name) {
    for (auto k : {PolicyKind::Unequipped, PolicyKind::Random, PolicyKind::TabularQ})
        if (name == to_string(k)) return k;
    throw ConfigError("run.policy must be unequipped, random or tabular_q (got '" + name + "')");
}

std::map<AgentId, Action> UnequippedPolicy::act(const std::map<AgentId, Observation>& obs) {
    std::map<AgentId, Action> out;
    for (const auto& [id, o] : obs) out.emplace_hint(out.end(), id, Action::NoAlert);
    return out;
}

std::map<AgentId, Action> RandomPolicy::act(const std::map<AgentId, Observation>& obs) {
    std::uniform_int_distribution<int> pick(0, kActionCount - 1);
    std::map<AgentId, Action> out;
    for (const auto& [id, o] : obs) out.emplace_hint(out.end(), id, static_cast<Action>(pick(rng_)));
    return out;
}

std::map<AgentId, Action> GreedyQPolicy::act(const std::map<AgentId, Observation>& obs) {
    std::map<AgentId, Action> out;
    for (const auto& [id, o] : obs)
        out.emplace_hint(out.end(), id, static_cast<Action>(table_.greedy(discretizer_.state(o))));
    return out;
}

std::unique_ptr<Policy> make_policy(const Config& config, const Scenario& scenario, std::uint64_t seed) {
    switch (parse_policy(config.get("run.policy"))) {
        case PolicyKind::Unequipped: return std::make_unique<UnequippedPolicy>();
        case PolicyKind::Random: return std::make_unique<RandomPolicy>(seed);
        case PolicyKind::TabularQ: {
            const std::string path = config.resolve_path(config.get("run.q_table"));
            if (path.empty()) throw ConfigError("run.policy = tabular_q needs run.q_table");
            std::ifstream in(path);
            if (!in) throw ConfigError("cannot open q-table '" + path + "'");
            QTable table = QTable::load(in);
            const QDiscretizer d = q_params(config, scenario).discretizer;
            if (table.states() != d.states()) throw ConfigError("q-table does not match the q.* discretization");
            return std::make_unique<GreedyQPolicy>(std::move(table), d);
        }
    }
    throw ConfigError("unknown policy");
}

// --- episodes -----------------------------------------------------------------

RunOptions run_options(const Config& config) {
    RunOptions o;
    o.steps = config.get_u64("run.steps");
    const long long window = config.get_int("run.window");
    if (window < 1) throw ConfigError("run.window must be >= 1");
    o.window = static_cast<std::size_t>(window);
    o.gamma = config.get_double("run.gamma");
    if (!(o.gamma >= 0.0 && o.gamma <= 1.0)) throw ConfigError("run.gamma must be in [0, 1]");
    return o;
}

std::size_t EpisodeResult::arrivals() const {
    return static_cast<std::size_t>(
        std::count_if(flights.begin(), flights.end(), [](const FlightSummary& f) { return f.reached_destination; }));
}

double EpisodeResult::max_p_dest() const {
    if (rolling.empty()) return std::numeric_limits<double>::quiet_NaN();
    return *std::max_element(rolling.begin(), rolling.end());
}

double EpisodeResult::mean_p_dest() const {
    if (rolling.empty()) return std::numeric_limits<double>::quiet_NaN();
    double sum = 0.0;
    for (double v : rolling) sum += v;
    return sum / static_cast<double>(rolling.size());
}

double EpisodeResult::mean_reward() const {
    if (flights.empty()) return std::numeric_limits<double>::quiet_NaN();
    double sum = 0.0;
    for (const auto& f : flights) sum += f.total_reward;
    return sum / static_cast<double>(flights.size());
}

EpisodeResult run_episode(const Scenario& scenario, Policy& policy, std::uint64_t seed, const RunOptions& options) {
    EpisodeResult res;
    CmEnv env(scenario, EnvOptions{policy.needs_observations(), options.record_transcript});
    std::map<AgentId, Observation> obs = env.reset(seed);
    res.departures = obs.size();

    struct Return {
        double sum = 0.0;
        double weight = 1.0;
    };
    std::map<AgentId, Return> returns;

    while (res.steps < options.steps && !env.finished()) {
        const auto actions = policy.act(obs);
        StepResult r = env.step(actions);
        ++res.steps;
        res.agent_steps += r.agents.size();

        std::map<AgentId, Observation> next;
        for (auto& st : r.agents) {
            Return& ret = returns[st.agent];
            ret.sum += ret.weight * st.reward;
            ret.weight *= options.gamma;
            if (st.done) {
                res.flights.push_back(*st.info.summary);
                res.completion_step.push_back(res.steps);
                res.completion_agent_steps.push_back(res.agent_steps);
                res.discounted_returns[st.agent] = ret.sum;
                returns.erase(st.agent);
            } else {
                next.emplace_hint(next.end(), st.agent, std::move(st.observation));
            }
        }
        res.departures += r.spawned.size();
        for (auto& [id, o] : r.spawned) next.emplace(id, std::move(o));
        obs = std::move(next);
    }
    // Flights still airborne when the budget runs out keep their partial return.
    for (const auto& [id, ret] : returns) res.discounted_returns[id] = ret.sum;
    res.rolling = rolling_dest_fraction(res.flights, options.window);
    if (options.record_transcript) res.transcript = env.take_transcript();
    return res;
}

OutcomeCounts count_outcomes(const std::vector<FlightSummary>& flights) {
    OutcomeCounts c;
    for (const auto& f : flights) {
        switch (f.terminal) {
            case TerminalKind::EnergyDepleted: ++c.energy_depleted; break;
            case TerminalKind::NavLost: ++c.nav_lost; break;
            case TerminalKind::Touchdown: ++(f.reached_destination ? c.reached : c.landed_elsewhere); break;
        }
    }
    return c;
}

std::vector<double> rolling_dest_fraction(const std::vector<bool>& reached, std::size_t window) {
    if (window == 0) throw std::invalid_argument("rolling window must be >= 1");
    std::vector<double> out;
    if (reached.size() < window) return out;
    out.reserve(reached.size() - window + 1);
    long long hits = 0;
    for (std::size_t k = 0; k < reached.size(); ++k) {
        hits += reached[k];
        if (k >= window) hits -= reached[k - window];
        if (k + 1 >= window) out.push_back(static_cast<double>(hits) / static_cast<double>(window));
    }
    return out;
}

std::vector<double> rolling_dest_fraction(const std::vector<FlightSummary>& flights, std::size_t window) {
    std::vector<bool> reached;
    reached.reserve(flights.size());
    for (const auto& f : flights) reached.push_back(f.reached_destination);
    return rolling_dest_fraction(reached, window);
}

std::map<AgentId, double> discounted_return(const EpisodeTranscript& transcript, double gamma) {
    std::map<AgentId, std::pair<double, double>> acc;
    for (const auto& r : transcript) {
        auto [it, fresh] = acc.try_emplace(r.agent, 0.0, 1.0);
        it->second.first += it->second.second * r.reward;
        it->second.second *= gamma;
    }
    std::map<AgentId, double> out;
    for (const auto& [id, a] : acc) out.emplace_hint(out.end(), id, a.first);
    return out;
}

void write_flights_csv(std::ostream& out, const std::vector<FlightSummary>& flights,
                       const VertiportNetwork& network) {
    out << "agent_id,aircraft,origin,destination,departure_s,end_s,terminal,landed_vertiport,reached_destination,"
           "total_reward,initial_energy_kwh,final_energy_kwh,charge_cycles,max_corridor_deviation_m,steps,"
           "follow_route_fraction,mean_wind_mps";
    for (int a = 0; a < kActionCount; ++a) out << ",n_" << to_string(static_cast<Action>(a));
    out << '\n';
    char buf[512];
    for (const auto& f : flights) {
        const std::string landed = f.landed_vertiport ? network.vertiports.at(*f.landed_vertiport).id : "NONE";
        const double follow = f.steps ? static_cast<double>(f.steps_following_route) / f.steps : 0.0;
        std::snprintf(buf, sizeof buf, "%u,%u,%s,%s,%.9g,%.9g,%s,%s,%d,%.9g,%.9g,%.9g,%.9g,%.9g,%u,%.9g,%.9g",
                      static_cast<unsigned>(f.agent), static_cast<unsigned>(f.aircraft),
                      network.vertiports.at(f.origin).id.c_str(), network.vertiports.at(f.destination).id.c_str(),
                      f.departure_s, f.end_s, to_string(f.terminal), landed.c_str(), f.reached_destination ? 1 : 0,
                      f.total_reward, f.initial_energy_kwh, f.final_energy_kwh, f.charge_cycles,
                      f.max_corridor_deviation_m, static_cast<unsigned>(f.steps), follow, f.mean_wind_mps);
        out << buf;
        for (auto n : f.action_counts) out << ',' << n;
        out << '\n';
    }
}

void write_rolling_csv(std::ostream& out, const EpisodeResult& result, std::size_t window) {
    out << "flight_index,step,agent_steps,p_dest\n";
    char buf[128];
    for (std::size_t i = 0; i < result.rolling.size(); ++i) {
        const std::size_t k = i + window - 1;
        std::snprintf(buf, sizeof buf, "%zu,%llu,%llu,%.9g\n", k + 1,
                      static_cast<unsigned long long>(result.completion_step.at(k)),
                      static_cast<unsigned long long>(result.completion_agent_steps.at(k)), result.rolling[i]);
        out << buf;
    }
}

// --- sweeps -------------------------------------------------------------------

SweepAxis parse_axis(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("axis '" + text + "' is not key=v1,v2,...");
    SweepAxis axis{trim(text.substr(0, eq)), split_list(text.substr(eq + 1), ',')};
    if (!Config::known_key(axis.key)) throw ConfigError("unknown axis key '" + axis.key + "'");
    if (axis.values.empty()) throw ConfigError("axis '" + axis.key + "' has no values");
    return axis;
}

std::size_t SweepResult::failures() const {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.error.empty(); }));
}

std::uint64_t replicate_seed(std::uint64_t base_seed, int replicate) {
    return derive_seed(base_seed, StreamTag::Sweep, static_cast<std::uint64_t>(replicate));
}

namespace {

struct SweepTask {
    std::size_t cell = 0;
    int replicate = 0;
    std::vector<std::pair<std::string, std::string>> assignment;
};

SweepRow run_task(const SweepSpec& spec, const SweepTask& task) {
    SweepRow row;
    row.cell = task.cell;
    row.replicate = task.replicate;
    row.assignment = task.assignment;
    row.seed = replicate_seed(spec.base.get_u64("seed"), task.replicate);
    try {
        Config c = spec.base;
        for (const auto& [k, v] : task.assignment) c.set(k, v);
        row.p_nav = c.get_double("hazard.p_nav");
        row.e_max_kwh = c.get_double("hazard.e_max_kwh");
        const Scenario scenario = Scenario::from_config(c);
        auto policy = make_policy(c, scenario, row.seed);
        RunOptions opts = spec.run;
        opts.record_transcript = false;
        const EpisodeResult r = run_episode(scenario, *policy, row.seed, opts);
        row.max_p_dest = r.max_p_dest();
        row.mean_p_dest = r.mean_p_dest();
        row.mean_reward = r.mean_reward();
        row.arrivals = r.arrivals();
        row.departures = r.departures;
        row.completed = r.flights.size();
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec) {
    if (spec.seeds < 1) throw ConfigError("sweep needs at least one seed");
    for (const auto& axis : spec.axes) {
        if (!Config::known_key(axis.key)) throw ConfigError("unknown axis key '" + axis.key + "'");
        if (axis.values.empty()) throw ConfigError("axis '" + axis.key + "' has no values");
    }

    // Cartesian product, last axis varying fastest.
    std::vector<std::vector<std::pair<std::string, std::string>>> cells(1);
    for (const auto& axis : spec.axes) {
        std::vector<std::vector<std::pair<std::string, std::string>>> grown;
        for (const auto& partial : cells)
            for (const auto& v : axis.values) {
                auto next = partial;
                next.emplace_back(axis.key, v);
                grown.push_back(std::move(next));
            }
        cells = std::move(grown);
    }

    std::vector<SweepTask> tasks;
    for (std::size_t c = 0; c < cells.size(); ++c)
        for (int r = 0; r < spec.seeds; ++r) tasks.push_back({c, r, cells[c]});

    SweepResult result;
    result.rows.resize(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) result.rows[i] = run_task(spec, tasks[i]);
    };
    const auto workers = static_cast<std::size_t>(std::clamp(spec.workers, 1, static_cast<int>(tasks.size())));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::stable_sort(result.rows.begin(), result.rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.e_max_kwh != b.e_max_kwh) return a.e_max_kwh < b.e_max_kwh;
        if (a.p_nav != b.p_nav) return a.p_nav < b.p_nav;
        if (a.cell != b.cell) return a.cell < b.cell;
        return a.replicate < b.replicate;
    });
    return result;
}

void write_results_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << kResultsHeader << '\n';
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.9g,%.9g,%llu,%.9g,%.9g,%llu,%llu\n", r.p_nav, r.e_max_kwh,
                      static_cast<unsigned long long>(r.seed), r.max_p_dest, r.mean_reward,
                      static_cast<unsigned long long>(r.arrivals), static_cast<unsigned long long>(r.departures));
        out << buf;
    }
}

namespace {

double csv_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw std::invalid_argument("bad number '" + s + "' in results");
    return v;
}

std::uint64_t csv_u64(const std::string& s) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size()) throw std::invalid_argument("bad integer '" + s + "' in results");
    return v;
}

}  // namespace

std::vector<SweepRow> read_results_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != kResultsHeader)
        throw std::invalid_argument("results table must start with '" + std::string(kResultsHeader) + "'");
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string item;
        while (std::getline(ss, item, ',')) f.push_back(trim(item));
        if (f.size() != 7) throw std::invalid_argument("results row needs 7 fields: " + line);
        SweepRow r;
        r.p_nav = csv_double(f[0]);
        r.e_max_kwh = csv_double(f[1]);
        r.seed = csv_u64(f[2]);
        r.max_p_dest = csv_double(f[3]);
        r.mean_reward = csv_double(f[4]);
        r.arrivals = csv_u64(f[5]);
        r.departures = csv_u64(f[6]);
        rows.push_back(r);
    }
    return rows;
}

void write_cell_summary_csv(std::ostream& out, const SweepResult& result) {
    std::map<std::size_t, std::vector<const SweepRow*>> by_cell;
    for (const auto& r : result.rows) by_cell[r.cell].push_back(&r);

    bool header = false;
    char buf[512];
    for (const auto& [cell, rows] : by_cell) {
        const SweepRow& first = *rows.front();
        if (!header) {
            for (const auto& [k, v] : first.assignment) out << k << ',';
            out << "p_nav,e_max_kwh,replicates,failures,mean_max_p_dest,mean_p_dest,mean_reward,arrivals,"
                   "departures,completed\n";
            header = true;
        }
        double max_p = 0.0, mean_p = 0.0, reward = 0.0;
        std::uint64_t arrivals = 0, departures = 0, completed = 0;
        int ok = 0, failed = 0;
        for (const SweepRow* r : rows) {
            if (!r->error.empty()) {
                ++failed;
                continue;
            }
            ++ok;
            max_p += r->max_p_dest;
            mean_p += r->mean_p_dest;
            reward += r->mean_reward;
            arrivals += r->arrivals;
            departures += r->departures;
            completed += r->completed;
        }
        const double n = ok ? ok : std::numeric_limits<double>::quiet_NaN();
        for (const auto& [k, v] : first.assignment) out << v << ',';
        std::snprintf(buf, sizeof buf, "%.9g,%.9g,%d,%d,%.9g,%.9g,%.9g,%llu,%llu,%llu\n", first.p_nav,
                      first.e_max_kwh, ok + failed, failed, max_p / n, mean_p / n, reward / n,
                      static_cast<unsigned long long>(arrivals), static_cast<unsigned long long>(departures),
                      static_cast<unsigned long long>(completed));
        out << buf;
    }
}

}  // namespace cmgym
