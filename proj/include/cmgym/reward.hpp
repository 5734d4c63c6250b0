#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "cmgym/geo.hpp"

namespace cmgym {

/// The six discrete contingency actions, in wire-protocol index order.
enum class Action : std::uint8_t {
    HeadingLeft = 0,
    HeadingHold = 1,
    HeadingRight = 2,
    LandNow = 3,
    NoAlert = 4,
    UseRoute = 5,
};

inline constexpr int kActionCount = 6;

const char* to_string(Action a);
/// Throws IdentifierError for indices outside [0, 6).
Action action_from_index(int index);
inline int action_index(Action a) { return static_cast<int>(a); }

enum class TerminalKind : std::uint8_t { EnergyDepleted, NavLost, Touchdown };

const char* to_string(TerminalKind t);
const char* to_string(std::optional<TerminalKind> t);

enum class RangeMode : std::uint8_t {
    PerMeter,   ///< coefficient times route distance left at touchdown
    Indicator,  ///< coefficient once, when touching down away from the destination
};

struct RewardParams {
    double omega = 0.001;
    double delta_energy = -1.0;
    double delta_navigation = -1.0;
    double delta_range_to_destination = -1e-5;
    RangeMode range_mode = RangeMode::PerMeter;
    double delta_land = -0.1;
    double delta_action_penalty = -0.01;
    double delta_vertiport_destination = 1.0;
    double delta_vertiport_other = 0.25;
    double sigma_deg = 0.0005;
    bool h_every_step = false;

    void validate() const;
};

/// What the reward needs to know about the aircraft on this step.
struct RewardContext {
    GeoPoint position;
    double route_distance_remaining_m = 0.0;
    std::size_t destination = 0;
    /// Set when the touchdown happened at the destination vertiport (only
    /// consulted by RangeMode::Indicator).
    bool at_destination = false;
};

struct RewardBreakdown {
    double r_state = 0.0;
    double r_vertiport = 0.0;
    double r_action = 0.0;
    double omega = 0.0;
    double total = 0.0;
};

/// State term: terminal penalties, plus the range term on touchdown.
double state_reward(const RewardContext& ctx, std::optional<TerminalKind> terminal, const RewardParams& p);

/// Sum of Gaussian bumps centered on every vertiport, measured in raw degrees.
double vertiport_reward(const GeoPoint& position, std::span<const GeoPoint> vertiports,
                        std::size_t destination, const RewardParams& p);

double action_reward(Action a, const RewardParams& p);

/// total = r_state + r_vertiport + r_action - omega. The vertiport term is
/// only evaluated on touchdown unless `h_every_step` is set.
RewardBreakdown compute_reward(const RewardContext& ctx, Action a, std::optional<TerminalKind> terminal,
                               std::span<const GeoPoint> vertiports, const RewardParams& p);

}  // namespace cmgym
