#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cmgym/config.hpp"
#include "cmgym/hazards.hpp"
#include "cmgym/kinematics.hpp"
#include "cmgym/reward.hpp"
#include "cmgym/traffic.hpp"

namespace cmgym {

struct SimParams {
    double decision_interval_s = 60.0;
    double dt_s = 1.0;
    KinematicsParams kinematics;
    double accel_limit_g = 0.2;
    double heading_step_deg = 5.0;
    double vertiport_radius_m = 200.0;
};

struct ObservationParams {
    int waypoints = 3;
    int vertiports = 3;
    int intruders = 3;
    double distance_scale_m = 100000.0;
    double wind_scale_mps = 30.0;
    double population_density = 0.0;
};

/// Fully typed and validated environment settings.
struct Scenario {
    std::uint64_t seed = 1;
    NetworkConfig network;
    DemandConfig demand;
    EnergyModelParams energy;
    WindField wind = ConstantWind{};
    NavLossModel nav = ConstantNavLoss{};
    RewardParams reward;
    SimParams sim;
    ObservationParams obs;
    /// Non-fatal configuration findings.
    std::vector<std::string> warnings;

    /// Throws ConfigError for anything invalid; nothing is built partially.
    static Scenario from_config(const Config& config);
};

}  // namespace cmgym
