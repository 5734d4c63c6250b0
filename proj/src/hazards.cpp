#include "cmgym/hazards.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cmgym/errors.hpp"

namespace cmgym {

std::vector<std::string> EnergyModelParams::validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(alpha_kwh) || alpha_kwh < 0.0) throw ConfigError("hazard.alpha_kwh must be >= 0");
    if (!finite(beta)) throw ConfigError("hazard.beta must be finite");
    if (!finite(phi) || phi < 0.0 || phi > 1.0) throw ConfigError("hazard.phi must be in [0, 1]");
    if (!finite(c_min) || !finite(c_max) || c_min < 0.0 || c_min > c_max)
        throw ConfigError("hazard.c_min must be in [0, c_max]");
    if (!finite(e_min_kwh) || !finite(e_max_kwh) || e_min_kwh < 0.0 || e_max_kwh < 0.0)
        throw ConfigError("hazard energy bounds must be finite and non-negative");
    if (!finite(noise_mean) || !finite(noise_sd) || noise_sd <= 0.0)
        throw ConfigError("hazard.noise_sd must be > 0");
    // The rejection sampler needs a usable share of the mass inside [0, 1].
    if (std::abs(noise_mean - 0.5) > 0.5 + 6.0 * noise_sd)
        throw ConfigError("hazard.noise_mean puts almost no mass inside [0, 1]");

    std::vector<std::string> warnings;
    if (e_max_kwh < e_min_kwh)
        warnings.emplace_back("e_max_kwh < e_min_kwh: capacity increases with charge cycles");
    return warnings;
}

double energy_capacity(double cycles, const EnergyModelParams& p) {
    if (!(cycles >= p.c_min && cycles <= p.c_max))
        throw std::out_of_range("charge cycles outside [c_min, c_max]");
    if (p.c_max == p.c_min) return p.e_max_kwh;
    return p.e_max_kwh + (p.e_min_kwh - p.e_max_kwh) * (cycles - p.c_min) / (p.c_max - p.c_min);
}

double sample_initial_cycles(Rng& rng, const EnergyModelParams& p) {
    const auto lo = static_cast<long long>(std::ceil(p.c_min));
    const auto hi = static_cast<long long>(std::floor(p.c_max));
    if (hi <= lo) return p.c_min;
    return static_cast<double>(std::uniform_int_distribution<long long>(lo, hi)(rng));
}

double consumption_noise(const EnergyModelParams& p, Rng& rng) {
    std::normal_distribution<double> gauss(p.noise_mean, p.noise_sd);
    double g = gauss(rng);
    while (g < 0.0 || g > 1.0) g = gauss(rng);
    return g > p.phi ? g : 0.0;
}

double consume_energy(double cycles, const EnergyModelParams& p, int dt_steps, Rng& rng) {
    const int steps = std::max(dt_steps, 0);
    double used = p.alpha_kwh * steps;
    if (cycles > p.beta) {
        for (int k = 0; k < steps; ++k) used += consumption_noise(p, rng);
    }
    return used;
}

// --- wind -----------------------------------------------------------------

GridWind GridWind::load(const std::string& path) {
    return {LatLonGrid::load(path, kWindGridHeader, 2)};
}

WindVector wind_at(const WindField& f, const GeoPoint& p, EventLog* events) {
    if (const auto* c = std::get_if<ConstantWind>(&f)) return c->value;
    const auto& g = std::get<GridWind>(f).grid;
    double v[2] = {0.0, 0.0};
    if (!g.sample(p, v) && events) events->emplace_back("wind_clamped");
    return {v[0], v[1]};
}

// --- navigation loss ------------------------------------------------------

FieldNavLoss FieldNavLoss::load(const std::string& path) {
    FieldNavLoss f{LatLonGrid::load(path, kNavGridHeader, 1)};
    validate(NavLossModel{f});
    return f;
}

void validate(const NavLossModel& m) {
    auto ok = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
    if (const auto* c = std::get_if<ConstantNavLoss>(&m)) {
        if (!ok(c->probability)) throw ConfigError("hazard.p_nav must be in [0, 1]");
        return;
    }
    const auto& g = std::get<FieldNavLoss>(m).grid;
    for (std::size_t i = 0; i < g.lats().size(); ++i)
        for (std::size_t j = 0; j < g.lons().size(); ++j)
            if (!ok(g.node(i, j)[0])) throw ConfigError("nav-loss grid probabilities must be in [0, 1]");
}

double nav_loss_probability(const NavLossModel& m, const GeoPoint& p) {
    if (const auto* c = std::get_if<ConstantNavLoss>(&m)) return std::clamp(c->probability, 0.0, 1.0);
    double v = 0.0;
    std::get<FieldNavLoss>(m).grid.sample(p, {&v, 1});
    return std::clamp(v, 0.0, 1.0);
}

bool nav_loss_event(const NavLossModel& m, const GeoPoint& p, Rng& rng) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    return u < nav_loss_probability(m, p);
}

}  // namespace cmgym
