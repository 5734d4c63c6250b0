#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cmgym/env.hpp"
#include "cmgym/scenario.hpp"

namespace cmgym {

/// Dense Q(s, a) table over the six actions.
class QTable {
public:
    QTable() = default;
    QTable(std::size_t states, std::size_t actions, double initial = 0.0);

    std::size_t states() const { return states_; }
    std::size_t actions() const { return actions_; }

    double& at(std::size_t s, std::size_t a) { return q_[s * actions_ + a]; }
    double at(std::size_t s, std::size_t a) const { return q_[s * actions_ + a]; }
    /// Lowest index among the maxima.
    std::size_t greedy(std::size_t s) const;
    double max_value(std::size_t s) const;

    /// Q(s,a) += eta * (r + gamma * max Q(s',.) - Q(s,a)); the bootstrap term
    /// is dropped when `terminal`. Returns the TD error.
    double update(std::size_t s, std::size_t a, double r, std::size_t s_next, bool terminal, double eta,
                  double gamma);

    const std::vector<double>& values() const { return q_; }

    void save(std::ostream& out) const;
    static QTable load(std::istream& in);

private:
    std::size_t states_ = 0;
    std::size_t actions_ = 0;
    std::vector<double> q_;
};

inline constexpr std::size_t kMaxQStates = 10'000'000;

/// Buckets energy, route distance and navigation mode from an observation.
struct QDiscretizer {
    int energy_bins = 10;
    int distance_bins = 10;
    double distance_max_m = 100000.0;
    double distance_scale_m = 100000.0;  ///< must match the observation scaling

    /// Throws ConfigError for non-positive bins or more than kMaxQStates states.
    std::size_t states() const;
    std::size_t state(const Observation& obs) const;
};

struct QParams {
    int episodes = 20;
    std::uint64_t steps = 720;
    double learning_rate = 0.1;
    double gamma = 0.99;
    double epsilon = 0.1;
    double initial_value = 0.0;
    QDiscretizer discretizer;
};

QParams q_params(const Config& config, const Scenario& scenario);

struct TrainResult {
    QTable table;
    /// Mean undiscounted return per completed flight, one point per episode.
    std::vector<double> learning_curve;
};

/// Independent learners sharing one table. Episode `k` uses seed
/// derive(seed, k); exploration draws come from the policy stream.
TrainResult train_tabular_q(const Scenario& scenario, const QParams& params, std::uint64_t seed);

}  // namespace cmgym
