#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "cmgym/errors.hpp"
#include "cmgym/harness.hpp"
#include "cmgym/plot.hpp"
#include "helpers.hpp"

using namespace cmgym;
using testing_support::config;
using testing_support::scenario;

namespace {

RunOptions short_run(std::uint64_t steps, bool transcript = false) {
    RunOptions o;
    o.steps = steps;
    o.window = 20;
    o.record_transcript = transcript;
    return o;
}

SweepSpec small_sweep() {
    SweepSpec spec;
    spec.base = config({"fleet_size=10", "run.steps=60"});
    spec.run = run_options(spec.base);
    spec.run.window = 5;
    return spec;
}

}  // namespace

TEST(Policies, Parse) {
    EXPECT_EQ(parse_policy("unequipped"), PolicyKind::Unequipped);
    EXPECT_EQ(parse_policy("random"), PolicyKind::Random);
    EXPECT_EQ(parse_policy("tabular_q"), PolicyKind::TabularQ);
    EXPECT_THROW(parse_policy("ppo"), ConfigError);
    const Config c = config({"run.policy=tabular_q"});
    EXPECT_THROW(make_policy(c, Scenario::from_config(c), 1), ConfigError);
}

TEST(Episode, UnequippedLogsOnlyNoAlert) {
    UnequippedPolicy p;
    const auto r = run_episode(scenario({"fleet_size=20"}), p, 1, short_run(120, true));
    ASSERT_FALSE(r.transcript.empty());
    for (const auto& rec : r.transcript) EXPECT_EQ(rec.action, Action::NoAlert);
    for (const auto& f : r.flights) {
        EXPECT_EQ(f.action_counts[action_index(Action::NoAlert)], f.steps);
    }
}

TEST(Episode, RandomPolicyIsDeterministic) {
    const Scenario s = scenario({"fleet_size=15", "hazard.p_nav=0.001"});
    RandomPolicy a(7), b(7), c(8);
    const auto ra = run_episode(s, a, 3, short_run(150, true));
    const auto rb = run_episode(s, b, 3, short_run(150, true));
    const auto rc = run_episode(s, c, 3, short_run(150, true));
    EXPECT_EQ(transcript_hash(ra.transcript), transcript_hash(rb.transcript));
    EXPECT_NE(transcript_hash(ra.transcript), transcript_hash(rc.transcript));
    std::ostringstream sa, sb;
    write_transcript(sa, ra.transcript);
    write_transcript(sb, rb.transcript);
    EXPECT_EQ(sa.str(), sb.str());
}

TEST(Episode, ShortRoutesWithAbundantEnergyAlwaysArrive) {
    // A 12-vertiport ring of radius 5 km: the longest route is under 16 km,
    // about 9 minutes at cruise, far inside a 250 kWh / 5 kWh-per-minute budget.
    UnequippedPolicy p;
    const Scenario s = scenario({"network.synthetic.ring.count=12", "network.synthetic.ring.radius_m=5000",
                                 "fleet_size=12", "hazard.e_max_kwh=250", "hazard.e_min_kwh=250"});
    const auto r = run_episode(s, p, 1, short_run(300));
    ASSERT_GE(r.flights.size(), 20u);
    ASSERT_FALSE(r.rolling.empty());
    EXPECT_EQ(r.max_p_dest(), 1.0);
    EXPECT_EQ(r.mean_p_dest(), 1.0);
    EXPECT_EQ(r.arrivals(), r.flights.size());
}

TEST(Episode, OutcomesPartitionCompletedFlights) {
    UnequippedPolicy p;
    const auto r = run_episode(scenario({"fleet_size=30", "hazard.e_max_kwh=50", "hazard.p_nav=0.005"}), p, 2,
                               short_run(300));
    const auto oc = count_outcomes(r.flights);
    EXPECT_EQ(oc.total(), r.flights.size());
    EXPECT_EQ(oc.reached, r.arrivals());
    EXPECT_GT(oc.energy_depleted, 0u);
    EXPECT_GT(oc.nav_lost, 0u);
    EXPECT_GT(oc.reached, 0u);
    EXPECT_LE(r.flights.size(), r.departures);
    EXPECT_EQ(r.completion_step.size(), r.flights.size());
    EXPECT_TRUE(std::is_sorted(r.completion_step.begin(), r.completion_step.end()));
}

TEST(Rolling, ConstantSeries) {
    EXPECT_EQ(rolling_dest_fraction(std::vector<bool>(10, true), 4), std::vector<double>(7, 1.0));
    std::vector<bool> alt;
    for (int i = 0; i < 11; ++i) alt.push_back(i % 2 == 0);
    EXPECT_EQ(rolling_dest_fraction(alt, 2), std::vector<double>(10, 0.5));
}

TEST(Rolling, WindowEdges) {
    EXPECT_TRUE(rolling_dest_fraction(std::vector<bool>(3, true), 4).empty());
    EXPECT_EQ(rolling_dest_fraction(std::vector<bool>(4, true), 4).size(), 1u);
    EXPECT_THROW(rolling_dest_fraction(std::vector<bool>(4, true), 0), std::invalid_argument);
    // Windowed mean against a direct recomputation.
    std::vector<bool> v{true, false, false, true, true, true, false, true};
    const auto s = rolling_dest_fraction(v, 3);
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double direct = (v[k] + v[k + 1] + v[k + 2]) / 3.0;
        EXPECT_DOUBLE_EQ(s[k], direct);
    }
}

TEST(Returns, HandOracles) {
    auto rec = [](AgentId id, double r) {
        TranscriptRecord t;
        t.agent = id;
        t.reward = r;
        return t;
    };
    EpisodeTranscript tr{rec(1, 1.0), rec(2, -0.001), rec(1, 1.0), rec(2, -0.001), rec(1, 1.0), rec(2, -0.001)};
    EXPECT_NEAR(discounted_return(tr, 0.99).at(1), 1.0 + 0.99 + 0.99 * 0.99, 1e-12);
    EXPECT_NEAR(discounted_return(tr, 0.99).at(1), 2.9701, 1e-12);
    EXPECT_EQ(discounted_return(tr, 0.0).at(1), 1.0);
    EXPECT_EQ(discounted_return(tr, 0.0).at(2), -0.001);
    EXPECT_NEAR(discounted_return(tr, 1.0).at(2), -0.001 * 3, 1e-15);
}

TEST(Returns, HarnessMatchesTranscript) {
    const Scenario s = scenario({"fleet_size=15", "hazard.p_nav=0.002", "hazard.e_max_kwh=50"});
    for (double gamma : {0.0, 0.99, 1.0}) {
        RandomPolicy p(11);
        auto opts = short_run(200, true);
        opts.gamma = gamma;
        const auto r = run_episode(s, p, 5, opts);
        const auto from_transcript = discounted_return(r.transcript, gamma);
        ASSERT_EQ(from_transcript.size(), r.discounted_returns.size());
        for (const auto& [id, g] : from_transcript) EXPECT_NEAR(r.discounted_returns.at(id), g, 1e-9) << id;
    }
}

TEST(Sweep, SixCellsOneSeed) {
    SweepSpec spec = small_sweep();
    spec.axes = {parse_axis("hazard.e_max_kwh=250,50,150"), parse_axis("hazard.p_nav=1e-5,0")};
    const auto r = run_sweep(spec);
    ASSERT_EQ(r.rows.size(), 6u);
    EXPECT_EQ(r.failures(), 0u);
    const double e[] = {50, 50, 150, 150, 250, 250};
    const double p[] = {0, 1e-5, 0, 1e-5, 0, 1e-5};
    for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_EQ(r.rows[i].e_max_kwh, e[i]);
        EXPECT_EQ(r.rows[i].p_nav, p[i]);
    }
}

TEST(Sweep, EmptyAxesRunsBaseOnce) {
    const auto r = run_sweep(small_sweep());
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_EQ(r.rows[0].e_max_kwh, 250.0);
    EXPECT_GT(r.rows[0].departures, 0u);
}

TEST(Sweep, IndependentOfWorkerCount) {
    SweepSpec spec = small_sweep();
    spec.axes = {parse_axis("hazard.e_max_kwh=50,250")};
    spec.seeds = 3;
    const auto serial = run_sweep(spec);
    spec.workers = 4;
    const auto parallel = run_sweep(spec);
    std::ostringstream a, b;
    write_results_csv(a, serial.rows);
    write_results_csv(b, parallel.rows);
    EXPECT_EQ(a.str(), b.str());
    // Replicates share seeds across cells.
    EXPECT_EQ(serial.rows[0].seed, serial.rows[3].seed);
    EXPECT_NE(serial.rows[0].seed, serial.rows[1].seed);
}

TEST(Sweep, CellFailureIsIsolated) {
    SweepSpec spec = small_sweep();
    spec.axes = {parse_axis("hazard.phi=0.5,2")};
    const auto r = run_sweep(spec);
    ASSERT_EQ(r.rows.size(), 2u);
    EXPECT_EQ(r.failures(), 1u);
    EXPECT_TRUE(r.rows[0].error.empty() != r.rows[1].error.empty());
}

TEST(Sweep, AxisValidation) {
    EXPECT_THROW(parse_axis("hazard.nope=1,2"), ConfigError);
    EXPECT_THROW(parse_axis("hazard.p_nav="), ConfigError);
    EXPECT_THROW(parse_axis("hazard.p_nav"), ConfigError);
    const auto a = parse_axis("hazard.p_nav = 0, 1e-5");
    EXPECT_EQ(a.key, "hazard.p_nav");
    EXPECT_EQ(a.values, (std::vector<std::string>{"0", "1e-5"}));
}

TEST(ResultsCsv, RoundTrip) {
    std::vector<SweepRow> rows(3);
    rows[0] = {0.0, 50.0, 123456789012345ull, 0.3617283945, -0.987654321, 12, 40};
    rows[1] = {1e-5, 150.0, 7, 0.781, -0.25, 3000, 3100};
    rows[2] = {1e-5, 250.0, 8, 1.0, 0.123456789, 0, 0};
    std::stringstream s;
    write_results_csv(s, rows);
    EXPECT_EQ(s.str().substr(0, s.str().find('\n')), "p_nav,e_max_kwh,seed,max_p_dest,mean_reward,arrivals,departures");
    const auto back = read_results_csv(s);
    ASSERT_EQ(back.size(), rows.size());
    std::stringstream again;
    write_results_csv(again, back);
    std::stringstream first;
    write_results_csv(first, rows);
    EXPECT_EQ(first.str(), again.str());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(back[i].seed, rows[i].seed);
        EXPECT_EQ(back[i].arrivals, rows[i].arrivals);
        EXPECT_NEAR(back[i].max_p_dest, rows[i].max_p_dest, 1e-9);
    }

    std::istringstream bad("p_nav,e_max\n1,2\n");
    EXPECT_THROW(read_results_csv(bad), std::invalid_argument);
}

TEST(Plot, SeriesAveragesSeeds) {
    std::vector<SweepRow> rows(4);
    rows[0] = {0.0, 50.0, 1, 0.2};
    rows[1] = {0.0, 50.0, 2, 0.4};
    rows[2] = {0.0, 250.0, 1, 0.9};
    rows[3] = {1e-5, 250.0, 1, 0.8};
    const auto series = max_p_dest_series(rows);
    ASSERT_EQ(series.size(), 2u);
    EXPECT_EQ(series[0].x, (std::vector<double>{50.0, 250.0}));
    EXPECT_NEAR(series[0].y[0], 0.3, 1e-12);
    const std::string svg = line_chart_svg(series, "t", "x", "y");
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
}
