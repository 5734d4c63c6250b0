#include "cmgym/protocol.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "cmgym/errors.hpp"
#include "cmgym/scenario.hpp"

namespace cmgym {

using nlohmann::json;

namespace {

struct ProtocolError : std::runtime_error {
    ProtocolError(std::string code, const std::string& message)
        : std::runtime_error(message), code(std::move(code)) {}
    std::string code;
};

json error_reply(const json& id, const std::string& code, const std::string& message) {
    return {{"id", id}, {"kind", "ERROR"}, {"code", code}, {"message", message}};
}

json observation_map(const std::map<AgentId, Observation>& obs) {
    json out = json::object();
    for (const auto& [id, o] : obs) out[std::to_string(id)] = o;
    return out;
}

AgentId parse_agent(const std::string& key) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(key, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != key.size() || v > 0xFFFFFFFFull)
        throw IdentifierError("agent id '" + key + "' is not a non-negative integer");
    return static_cast<AgentId>(v);
}

std::string handle_reset(std::unique_ptr<CmEnv>& env, const json& request, std::int64_t id) {
    Config config;
    const std::string path = request.value("scenario", "");
    if (!path.empty()) config.load_file(path);
    if (request.contains("overrides")) {
        for (const auto& o : request["overrides"]) config.apply_override(o.get<std::string>());
    }
    std::uint64_t seed = config.get_u64("seed");
    if (request.contains("seed")) {
        if (!request["seed"].is_number_unsigned()) throw ProtocolError("PROTOCOL", "seed must be a non-negative integer");
        seed = request["seed"].get<std::uint64_t>();
    }
    // Build the new environment fully before replacing the old one.
    auto fresh = std::make_unique<CmEnv>(Scenario::from_config(config), EnvOptions{true, false});
    auto obs = fresh->reset(seed);
    env = std::move(fresh);
    return json{{"id", id},
                {"kind", "OBS"},
                {"obs", observation_map(obs)},
                {"observation_size", env->observation_size()},
                {"time_s", env->time_s()}}
        .dump();
}

std::string handle_step(std::unique_ptr<CmEnv>& env, const json& request, std::int64_t id) {
    if (!env) throw LifecycleError("STEP before RESET");
    std::map<AgentId, Action> actions;
    if (request.contains("actions")) {
        const json& a = request["actions"];
        if (!a.is_object()) throw ProtocolError("PROTOCOL", "actions must be an object");
        for (auto it = a.begin(); it != a.end(); ++it) {
            if (!it.value().is_number_integer()) throw IdentifierError("action index must be an integer");
            actions[parse_agent(it.key())] = action_from_index(it.value().get<int>());
        }
    }
    const StepResult r = env->step(actions);

    json obs = json::object(), rewards = json::object(), dones = json::object(), infos = json::object();
    for (const auto& st : r.agents) {
        const std::string key = std::to_string(st.agent);
        obs[key] = st.observation;
        rewards[key] = st.reward;
        dones[key] = st.done;
        json landed = nullptr;
        if (st.info.landed_vertiport) landed = env->network().vertiports.at(*st.info.landed_vertiport).id;
        infos[key] = {{"terminal", to_string(st.info.terminal)},
                      {"landed_vertiport", landed},
                      {"events", st.info.events},
                      {"action_counts", st.info.action_counts},
                      {"r_s", st.info.reward.r_state},
                      {"r_h", st.info.reward.r_vertiport},
                      {"r_a", st.info.reward.r_action},
                      {"omega", st.info.reward.omega}};
    }
    json spawned = json::array();
    for (const auto& [agent, o] : r.spawned) {
        obs[std::to_string(agent)] = o;
        spawned.push_back(agent);
    }
    return json{{"id", id},       {"kind", "STEP_RESULT"}, {"obs", obs},         {"rewards", rewards},
                {"dones", dones}, {"infos", infos},        {"spawned", spawned}, {"time_s", r.time_s}}
        .dump();
}

}  // namespace

ProtocolSession::ProtocolSession() = default;
ProtocolSession::~ProtocolSession() = default;

std::string ProtocolSession::banner() const {
    json actions = json::array();
    for (int a = 0; a < kActionCount; ++a) actions.push_back(to_string(static_cast<Action>(a)));
    return json{{"kind", "HELLO"}, {"protocol", kProtocolVersion}, {"actions", actions}}.dump();
}

std::string ProtocolSession::handle(const std::string& line) {
    json id = nullptr;
    try {
        json request;
        try {
            request = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ProtocolError("PARSE", e.what());
        }
        if (!request.is_object()) throw ProtocolError("PROTOCOL", "request must be a JSON object");
        if (request.contains("id")) id = request["id"];
        if (!id.is_number_integer()) throw ProtocolError("PROTOCOL", "request needs an integer id");
        const auto n = id.get<std::int64_t>();
        if (last_id_ && n <= *last_id_) throw ProtocolError("BAD_ID", "message ids must be strictly increasing");
        last_id_ = n;
        if (closed_) throw ProtocolError("LIFECYCLE", "session is closed");
        if (!request.contains("kind") || !request["kind"].is_string())
            throw ProtocolError("PROTOCOL", "request needs a string kind");
        const std::string kind = request["kind"];

        if (kind == "HELLO") {
            const std::string version = request.value("protocol", "");
            if (version != kProtocolVersion)
                throw ProtocolError("VERSION", "protocol '" + version + "' is not supported, expected " +
                                                   kProtocolVersion);
            return json{{"id", id}, {"kind", "HELLO"}, {"protocol", kProtocolVersion}}.dump();
        }
        if (kind == "RESET") return handle_reset(env_, request, n);
        if (kind == "STEP") return handle_step(env_, request, n);
        if (kind == "CLOSE") {
            closed_ = true;
            env_.reset();
            return json{{"id", id}, {"kind", "CLOSED"}}.dump();
        }
        throw ProtocolError("PROTOCOL", "unknown request kind '" + kind + "'");
    } catch (const ProtocolError& e) {
        return error_reply(id, e.code, e.what()).dump();
    } catch (const ConfigError& e) {
        return error_reply(id, "CONFIG", e.what()).dump();
    } catch (const LifecycleError& e) {
        return error_reply(id, "LIFECYCLE", e.what()).dump();
    } catch (const IdentifierError& e) {
        return error_reply(id, "IDENTIFIER", e.what()).dump();
    } catch (const json::exception& e) {
        return error_reply(id, "PROTOCOL", e.what()).dump();
    } catch (const std::exception& e) {
        return error_reply(id, "INTERNAL", e.what()).dump();
    }
}

int serve(std::istream& in, std::ostream& out) {
    ProtocolSession session;
    out << session.banner() << '\n' << std::flush;
    std::string line;
    while (!session.closed() && std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        out << session.handle(line) << '\n' << std::flush;
    }
    return 0;
}

}  // namespace cmgym
