#include "cmgym/qlearning.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <string>

#include "cmgym/errors.hpp"

namespace cmgym {

QTable::QTable(std::size_t states, std::size_t actions, double initial)
    : states_(states), actions_(actions), q_(states * actions, initial) {}

std::size_t QTable::greedy(std::size_t s) const {
    std::size_t best = 0;
    for (std::size_t a = 1; a < actions_; ++a)
        if (at(s, a) > at(s, best)) best = a;
    return best;
}

double QTable::max_value(std::size_t s) const { return at(s, greedy(s)); }

double QTable::update(std::size_t s, std::size_t a, double r, std::size_t s_next, bool terminal, double eta,
                      double gamma) {
    const double target = r + (terminal ? 0.0 : gamma * max_value(s_next));
    const double td = target - at(s, a);
    at(s, a) += eta * td;
    return td;
}

void QTable::save(std::ostream& out) const {
    out << "#qtable v1 " << states_ << ' ' << actions_ << '\n' << std::setprecision(17);
    for (std::size_t s = 0; s < states_; ++s) {
        for (std::size_t a = 0; a < actions_; ++a) out << (a ? " " : "") << at(s, a);
        out << '\n';
    }
}

QTable QTable::load(std::istream& in) {
    std::string magic, version;
    std::size_t states = 0, actions = 0;
    if (!(in >> magic >> version >> states >> actions) || magic != "#qtable" || version != "v1")
        throw ConfigError("not a q-table file");
    if (actions != kActionCount || states == 0 || states > kMaxQStates) throw ConfigError("q-table has a bad shape");
    QTable t(states, actions);
    for (auto& v : t.q_)
        if (!(in >> v)) throw ConfigError("q-table is truncated");
    return t;
}

std::size_t QDiscretizer::states() const {
    if (energy_bins < 1 || distance_bins < 1) throw ConfigError("q bins must be >= 1");
    if (!(distance_max_m > 0.0) || !(distance_scale_m > 0.0)) throw ConfigError("q distance range must be > 0");
    const double n = 3.0 * energy_bins * static_cast<double>(distance_bins);
    if (n > static_cast<double>(kMaxQStates))
        throw ConfigError("discretization has " + std::to_string(static_cast<long long>(n)) + " states, limit is 1e7");
    return static_cast<std::size_t>(n);
}

namespace {

std::size_t bucket(double x, int bins) {
    const double b = std::floor(std::clamp(x, 0.0, 1.0) * bins);
    return static_cast<std::size_t>(std::min(b, static_cast<double>(bins - 1)));
}

}  // namespace

std::size_t QDiscretizer::state(const Observation& obs) const {
    // Observation layout: [4] route distance / scale, [5] energy / 350, [6..8] mode.
    if (obs.size() < 9) throw std::invalid_argument("observation too short to discretize");
    const std::size_t e = bucket(obs[5], energy_bins);
    const std::size_t d = bucket(obs[4] * distance_scale_m / distance_max_m, distance_bins);
    const std::size_t mode = obs[6] > 0.5 ? 0 : obs[7] > 0.5 ? 1 : 2;
    return (mode * energy_bins + e) * distance_bins + d;
}

QParams q_params(const Config& c, const Scenario& scenario) {
    QParams p;
    p.episodes = static_cast<int>(c.get_int("q.episodes"));
    p.steps = c.get_u64("q.steps");
    p.learning_rate = c.get_double("q.learning_rate");
    p.gamma = c.get_double("q.gamma");
    p.epsilon = c.get_double("q.epsilon");
    p.initial_value = c.get_double("q.initial_value");
    p.discretizer.energy_bins = static_cast<int>(c.get_int("q.energy_bins"));
    p.discretizer.distance_bins = static_cast<int>(c.get_int("q.distance_bins"));
    p.discretizer.distance_scale_m = scenario.obs.distance_scale_m;
    p.discretizer.distance_max_m = kPi * scenario.network.ring_radius_m;
    if (p.episodes < 0) throw ConfigError("q.episodes must be >= 0");
    if (p.learning_rate < 0.0 || p.learning_rate > 1.0) throw ConfigError("q.learning_rate must be in [0, 1]");
    if (p.gamma < 0.0 || p.gamma > 1.0) throw ConfigError("q.gamma must be in [0, 1]");
    if (p.epsilon < 0.0 || p.epsilon > 1.0) throw ConfigError("q.epsilon must be in [0, 1]");
    p.discretizer.states();
    return p;
}

TrainResult train_tabular_q(const Scenario& scenario, const QParams& params, std::uint64_t seed) {
    TrainResult out;
    out.table = QTable(params.discretizer.states(), kActionCount, params.initial_value);
    QTable& q = out.table;
    Rng explore = make_stream(seed, StreamTag::Policy, 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> any_action(0, kActionCount - 1);

    CmEnv env(scenario, EnvOptions{true, false});
    for (int ep = 0; ep < params.episodes; ++ep) {
        std::map<AgentId, Observation> obs = env.reset(derive_seed(seed, StreamTag::Sweep, static_cast<std::uint64_t>(ep)));
        double return_sum = 0.0;
        std::size_t completed = 0;
        for (std::uint64_t t = 0; t < params.steps && !env.finished(); ++t) {
            std::map<AgentId, Action> actions;
            std::map<AgentId, std::size_t> states;
            for (const auto& [id, o] : obs) {
                const std::size_t s = params.discretizer.state(o);
                states[id] = s;
                const int a = unit(explore) < params.epsilon ? any_action(explore) : static_cast<int>(q.greedy(s));
                actions[id] = static_cast<Action>(a);
            }
            StepResult r = env.step(actions);
            std::map<AgentId, Observation> next;
            for (auto& st : r.agents) {
                const std::size_t s = states.at(st.agent);
                const std::size_t s_next = params.discretizer.state(st.observation);
                q.update(s, static_cast<std::size_t>(action_index(st.action)), st.reward, s_next, st.done,
                         params.learning_rate, params.gamma);
                if (st.done) {
                    return_sum += st.info.summary->total_reward;
                    ++completed;
                } else {
                    next.emplace(st.agent, std::move(st.observation));
                }
            }
            for (auto& [id, o] : r.spawned) next.emplace(id, std::move(o));
            obs = std::move(next);
        }
        out.learning_curve.push_back(completed ? return_sum / static_cast<double>(completed)
                                               : std::numeric_limits<double>::quiet_NaN());
    }
    return out;
}

}  // namespace cmgym
