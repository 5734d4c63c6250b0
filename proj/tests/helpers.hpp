#pragma once

#include <initializer_list>
#include <numbers>
#include <string>

#include "cmgym/config.hpp"
#include "cmgym/geo.hpp"
#include "cmgym/scenario.hpp"

namespace testing_support {

inline constexpr double kPiOracle = std::numbers::pi;
inline constexpr double kKnotOracle = 1852.0 / 3600.0;

inline cmgym::GeoPoint origin() { return {40.0, -74.0}; }

inline cmgym::Region region() { return cmgym::Region(origin(), {39.0, 41.0, -75.0, -73.0}); }

inline cmgym::Config config(std::initializer_list<std::string> overrides) {
    cmgym::Config c;
    for (const auto& o : overrides) c.apply_override(o);
    return c;
}

inline cmgym::Scenario scenario(std::initializer_list<std::string> overrides) {
    return cmgym::Scenario::from_config(config(overrides));
}

}  // namespace testing_support
