#include "cmgym/reward.hpp"

#include <cmath>
#include <string>

#include "cmgym/errors.hpp"

namespace cmgym {

const char* to_string(Action a) {
    switch (a) {
        case Action::HeadingLeft: return "HEADING_LEFT";
        case Action::HeadingHold: return "HEADING_HOLD";
        case Action::HeadingRight: return "HEADING_RIGHT";
        case Action::LandNow: return "LAND_NOW";
        case Action::NoAlert: return "NO_ALERT";
        case Action::UseRoute: return "USE_ROUTE";
    }
    return "?";
}

Action action_from_index(int index) {
    if (index < 0 || index >= kActionCount) throw IdentifierError("action index " + std::to_string(index) + " out of range");
    return static_cast<Action>(index);
}

const char* to_string(TerminalKind t) {
    switch (t) {
        case TerminalKind::EnergyDepleted: return "ENERGY_DEPLETED";
        case TerminalKind::NavLost: return "NAV_LOST";
        case TerminalKind::Touchdown: return "TOUCHDOWN";
    }
    return "?";
}

const char* to_string(std::optional<TerminalKind> t) { return t ? to_string(*t) : "NONE"; }

void RewardParams::validate() const {
    const double all[] = {omega, delta_energy, delta_navigation, delta_range_to_destination, delta_land,
                          delta_action_penalty, delta_vertiport_destination, delta_vertiport_other, sigma_deg};
    for (double v : all)
        if (!std::isfinite(v)) throw ConfigError("reward parameters must be finite");
    if (!(sigma_deg > 0.0)) throw ConfigError("reward.sigma_deg must be > 0");
}

double state_reward(const RewardContext& ctx, std::optional<TerminalKind> terminal, const RewardParams& p) {
    if (!terminal) return 0.0;
    switch (*terminal) {
        case TerminalKind::EnergyDepleted: return p.delta_energy;
        case TerminalKind::NavLost: return p.delta_navigation;
        case TerminalKind::Touchdown:
            if (p.range_mode == RangeMode::Indicator) return ctx.at_destination ? 0.0 : p.delta_range_to_destination;
            return p.delta_range_to_destination * ctx.route_distance_remaining_m;
    }
    return 0.0;
}

double vertiport_reward(const GeoPoint& position, std::span<const GeoPoint> vertiports,
                        std::size_t destination, const RewardParams& p) {
    const double two_sigma_sq = 2.0 * p.sigma_deg * p.sigma_deg;
    double sum = 0.0;
    for (std::size_t i = 0; i < vertiports.size(); ++i) {
        const double dx = position.lat - vertiports[i].lat;
        const double dy = position.lon - vertiports[i].lon;
        const double weight = i == destination ? p.delta_vertiport_destination : p.delta_vertiport_other;
        sum += weight * std::exp(-(dx * dx + dy * dy) / two_sigma_sq);
    }
    return sum;
}

double action_reward(Action a, const RewardParams& p) {
    switch (a) {
        case Action::NoAlert: return 0.0;
        case Action::LandNow: return p.delta_land + p.delta_action_penalty;
        default: return p.delta_action_penalty;
    }
}

RewardBreakdown compute_reward(const RewardContext& ctx, Action a, std::optional<TerminalKind> terminal,
                               std::span<const GeoPoint> vertiports, const RewardParams& p) {
    RewardBreakdown r;
    r.r_state = state_reward(ctx, terminal, p);
    if (p.h_every_step || terminal == TerminalKind::Touchdown)
        r.r_vertiport = vertiport_reward(ctx.position, vertiports, ctx.destination, p);
    r.r_action = action_reward(a, p);
    r.omega = p.omega;
    r.total = r.r_state + r.r_vertiport + r.r_action - r.omega;
    return r;
}

}  // namespace cmgym
