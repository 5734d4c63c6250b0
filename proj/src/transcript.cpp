#include "cmgym/transcript.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cmgym/config.hpp"

namespace cmgym {

namespace {

Action parse_action(const std::string& s) {
    for (int i = 0; i < kActionCount; ++i)
        if (s == to_string(static_cast<Action>(i))) return static_cast<Action>(i);
    throw std::invalid_argument("unknown action '" + s + "'");
}

NavMode parse_mode(const std::string& s) {
    for (auto m : {NavMode::FollowRoute, NavMode::HoldHeading, NavMode::Descending})
        if (s == to_string(m)) return m;
    throw std::invalid_argument("unknown nav mode '" + s + "'");
}

std::optional<TerminalKind> parse_terminal(const std::string& s) {
    if (s == "NONE") return std::nullopt;
    for (auto t : {TerminalKind::EnergyDepleted, TerminalKind::NavLost, TerminalKind::Touchdown})
        if (s == to_string(t)) return t;
    throw std::invalid_argument("unknown terminal '" + s + "'");
}

double number(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw std::invalid_argument("bad number '" + s + "'");
    return v;
}

}  // namespace

std::string format_record(const TranscriptRecord& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "%.9g,%u,%s,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%s,%s", r.t_s,
                  static_cast<unsigned>(r.agent), to_string(r.action), r.reward, r.r_s, r.r_h, r.r_a, r.omega,
                  r.lat, r.lon, r.alt_ft, r.heading, r.speed_kn, r.energy_kwh, to_string(r.nav_mode),
                  to_string(r.terminal));
    return buf;
}

TranscriptRecord parse_record(const std::string& line) {
    std::vector<std::string> f;
    std::stringstream in(line);
    std::string item;
    while (std::getline(in, item, ',')) f.push_back(trim(item));
    if (f.size() != 16) throw std::invalid_argument("transcript record needs 16 fields: " + line);
    TranscriptRecord r;
    r.t_s = number(f[0]);
    r.agent = static_cast<AgentId>(number(f[1]));
    r.action = parse_action(f[2]);
    r.reward = number(f[3]);
    r.r_s = number(f[4]);
    r.r_h = number(f[5]);
    r.r_a = number(f[6]);
    r.omega = number(f[7]);
    r.lat = number(f[8]);
    r.lon = number(f[9]);
    r.alt_ft = number(f[10]);
    r.heading = number(f[11]);
    r.speed_kn = number(f[12]);
    r.energy_kwh = number(f[13]);
    r.nav_mode = parse_mode(f[14]);
    r.terminal = parse_terminal(f[15]);
    return r;
}

void write_transcript(std::ostream& out, const EpisodeTranscript& transcript) {
    out << kTranscriptHeader << '\n';
    for (const auto& r : transcript) out << format_record(r) << '\n';
}

EpisodeTranscript read_transcript(std::istream& in) {
    EpisodeTranscript t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first && line == kTranscriptHeader) {
            first = false;
            continue;
        }
        first = false;
        t.push_back(parse_record(line));
    }
    return t;
}

std::uint64_t transcript_hash(const EpisodeTranscript& transcript) {
    std::uint64_t h = 1469598103934665603ull;
    auto feed = [&](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= '\n';
        h *= 1099511628211ull;
    };
    feed(kTranscriptHeader);
    for (const auto& r : transcript) feed(format_record(r));
    return h;
}

}  // namespace cmgym
