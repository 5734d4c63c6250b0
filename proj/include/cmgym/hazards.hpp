#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "cmgym/geo.hpp"
#include "cmgym/grid.hpp"
#include "cmgym/kinematics.hpp"
#include "cmgym/rng.hpp"

namespace cmgym {

/// Battery and consumption parameters.
///
/// `alpha_kwh` is charged once per decision step. Capacity degrades linearly
/// from `e_max_kwh` at `c_min` cycles to `e_min_kwh` at `c_max` cycles.
struct EnergyModelParams {
    double alpha_kwh = 5.0;
    double beta = 3000.0;
    double phi = 0.5;
    double e_min_kwh = 100.0;
    double e_max_kwh = 250.0;
    double c_min = 0.0;
    double c_max = 10000.0;
    double noise_mean = 0.5;
    double noise_sd = 0.25;

    /// Throws ConfigError on violated invariants; returns non-fatal warnings.
    std::vector<std::string> validate() const;
};

/// Capacity for a battery with `cycles` charge cycles. Throws std::out_of_range
/// outside [c_min, c_max].
double energy_capacity(double cycles, const EnergyModelParams& p);

/// Uniform integer cycle count on [c_min, c_max].
double sample_initial_cycles(Rng& rng, const EnergyModelParams& p);

/// Extra consumption for one decision step past the cycle threshold: a
/// Gaussian draw truncated to [0, 1] by rejection, kept only when it exceeds
/// phi. Always in [0, 1].
double consumption_noise(const EnergyModelParams& p, Rng& rng);

/// Energy used over `dt_steps` decision steps. Deterministic (alpha * steps)
/// at or below the cycle threshold; above it, one noise draw per step is added.
double consume_energy(double cycles, const EnergyModelParams& p, int dt_steps, Rng& rng);

/// Pluggable per-step consumption. The linear model is the only built-in.
class ConsumptionModel {
public:
    virtual ~ConsumptionModel() = default;
    virtual double consume(const AircraftState& s, int dt_steps, Rng& rng) const = 0;
};

class LinearConsumption final : public ConsumptionModel {
public:
    explicit LinearConsumption(EnergyModelParams p) : params_(p) {}
    double consume(const AircraftState& s, int dt_steps, Rng& rng) const override {
        return consume_energy(s.charge_cycles, params_, dt_steps, rng);
    }
    const EnergyModelParams& params() const { return params_; }

private:
    EnergyModelParams params_;
};

// --- wind -----------------------------------------------------------------

struct ConstantWind {
    WindVector value;
};

/// Two-component (north, east) grid, header `#windgrid v1`.
struct GridWind {
    LatLonGrid grid;
    static GridWind load(const std::string& path);
};

using WindField = std::variant<ConstantWind, GridWind>;

inline constexpr const char* kWindGridHeader = "#windgrid v1";
inline constexpr const char* kNavGridHeader = "#navgrid v1";

/// Wind at `p`. Grid queries outside the hull are clamped to the nearest edge
/// and reported as a `wind_clamped` event.
WindVector wind_at(const WindField& f, const GeoPoint& p, EventLog* events = nullptr);

// --- navigation loss ------------------------------------------------------

struct ConstantNavLoss {
    double probability = 0.0;
};

/// One-component probability grid, header `#navgrid v1`.
struct FieldNavLoss {
    LatLonGrid grid;
    static FieldNavLoss load(const std::string& path);
};

using NavLossModel = std::variant<ConstantNavLoss, FieldNavLoss>;

void validate(const NavLossModel& m);

/// Per-step loss probability at `p`, clamped into [0, 1].
double nav_loss_probability(const NavLossModel& m, const GeoPoint& p);

/// Bernoulli draw; consumes exactly one uniform from `rng` regardless of the
/// probability, so runs that differ only in the probability stay aligned.
bool nav_loss_event(const NavLossModel& m, const GeoPoint& p, Rng& rng);

}  // namespace cmgym
