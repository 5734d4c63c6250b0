#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cmgym/kinematics.hpp"
#include "cmgym/reward.hpp"

namespace cmgym {

using AgentId = std::uint32_t;

/// One agent-step. `t_s` is the simulation time at which the action was taken.
struct TranscriptRecord {
    double t_s = 0.0;
    AgentId agent = 0;
    Action action = Action::NoAlert;
    double reward = 0.0;
    double r_s = 0.0;
    double r_h = 0.0;
    double r_a = 0.0;
    double omega = 0.0;
    double lat = 0.0;
    double lon = 0.0;
    double alt_ft = 0.0;
    double heading = 0.0;
    double speed_kn = 0.0;
    double energy_kwh = 0.0;
    NavMode nav_mode = NavMode::FollowRoute;
    std::optional<TerminalKind> terminal;
};

using EpisodeTranscript = std::vector<TranscriptRecord>;

inline constexpr const char* kTranscriptHeader =
    "t,agent_id,action,reward,r_s,r_h,r_a,omega,lat,lon,alt_ft,heading,speed_kn,energy_kwh,nav_mode,terminal";

/// Comma-separated line, fixed field order, floats at 9 significant digits.
std::string format_record(const TranscriptRecord& r);
TranscriptRecord parse_record(const std::string& line);

void write_transcript(std::ostream& out, const EpisodeTranscript& transcript);
EpisodeTranscript read_transcript(std::istream& in);

/// FNV-1a over the serialized transcript.
std::uint64_t transcript_hash(const EpisodeTranscript& transcript);

}  // namespace cmgym
