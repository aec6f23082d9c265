#include <gtest/gtest.h>

#include "camab/camab.hpp"

using namespace camab;

namespace {

// Two arms with Bernoulli rewards of the given success probabilities.
BanditEnv two_arm(double p0, double p1) {
    Scm s({models::var("A", 2), models::var("Y", 2)},
          {models::mech("A", {}, {{.5}, {.5}}), models::mech("Y", {"A"}, {{1 - p0, 1 - p1}, {p0, p1}})}, "Y");
    return BanditEnv(s, {models::act("A", 0), models::act("A", 1)});
}

ArmStats stats_with(std::vector<std::size_t> pulls, std::vector<double> means) {
    ArmStats s(pulls.size());
    for (std::size_t a = 0; a < pulls.size(); ++a) {
        s.pulls[a] = pulls[a];
        s.reward_sum[a] = means[a] * static_cast<double>(pulls[a]);
    }
    return s;
}

}  // namespace

TEST(BanditEnv, TrueMeansMatchInference) {
    const auto c = models::counterexample1();
    BanditEnv env(c.base, c.base_actions);
    for (std::size_t a = 0; a < env.size(); ++a)
        EXPECT_NEAR(env.true_means()[a], expected_reward(c.base, c.base_actions[a]), 1e-12);
    EXPECT_EQ(env.best_action(), 0u);
    EXPECT_THROW(BanditEnv(c.base, {}), Error);
    EXPECT_THROW(BanditEnv(c.base, {models::act("T", 0), models::act("T", 0)}), Error);
}

TEST(UcbSelect, ForcedInitialisation) {
    EXPECT_EQ(ucb_select(ArmStats(3), 1, 2.0), 0u);
    EXPECT_EQ(ucb_select(stats_with({1, 0, 0}, {1, 0, 0}), 2, 2.0), 1u);
}

TEST(UcbSelect, LargerBonusAtSmallerCount) { EXPECT_EQ(ucb_select(stats_with({10, 2}, {.5, .5}), 20, 2.0), 1u); }

TEST(UcbSelect, DominantMean) { EXPECT_EQ(ucb_select(stats_with({50, 50}, {.9, .1}), 100, 2.0), 0u); }

TEST(UcbSelect, TiesGoToLowestIndex) { EXPECT_EQ(ucb_select(stats_with({5, 5, 5}, {.3, .3, .3}), 15, 2.0), 0u); }

TEST(UcbSelect, PseudoCountsCountAsPulls) {
    ArmStats s(2);
    s.warm_start(0, 0.9, 100);
    s.warm_start(1, 0.1, 100);
    EXPECT_EQ(ucb_select(s, 1, 2.0), 0u);
    EXPECT_NEAR(s.mean(0), 0.9, 1e-15);
}

TEST(UcbSelect, RespectsActiveMask) { EXPECT_EQ(ucb_select(stats_with({5, 5}, {.9, .1}), 10, 2.0, {false, true}), 1u); }

TEST(RoundRobin, Schedule) {
    ArmStats three(3), one(1), two(2);
    std::vector<std::size_t> got;
    for (std::size_t t = 1; t <= 4; ++t) got.push_back(round_robin_select(three, t));
    EXPECT_EQ(got, (std::vector<std::size_t>{0, 1, 2, 0}));
    EXPECT_EQ(round_robin_select(one, 9), 0u);
    EXPECT_EQ(round_robin_select(two, 7), 0u);
}

TEST(RunDirect, PointMassRewardsFindTheBestArm) {
    const BanditEnv env = two_arm(1.0, 0.0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed, Stream::Test);
        EXPECT_EQ(run_direct(env, 200, Selector::ucb(), rng).trace.recommended, 0u);
    }
}

TEST(RunDirect, RoundRobinCoversEveryArmOnce) {
    const auto c = models::scenario5_alpha1();
    BanditEnv env(c.base, c.base_actions);
    Rng rng(1, Stream::Test);
    const auto run = run_direct(env, env.size(), Selector::round_robin(), rng);
    for (auto n : run.stats.pulls) EXPECT_EQ(n, 1u);
}

TEST(RunDirect, ChainBaseConverges) {
    const auto c = models::counterexample1();
    BanditEnv env(c.base, c.base_actions);
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed, Stream::Test);
        total += run_direct(env, 500, Selector::ucb(2.0), rng).trace.simple_regret.back();
    }
    EXPECT_LE(total / 20, 0.02);
}

TEST(RunDirect, MeanEstimatesMatchLoggedRewards) {
    const BanditEnv env = two_arm(0.6, 0.4);
    Rng rng(4, Stream::Test);
    const auto run = run_direct(env, 300, Selector::ucb(), rng);
    std::vector<double> sum(2, 0.0), n(2, 0.0);
    for (const auto& s : run.trajectory) {
        sum[s.action] += s.reward;
        n[s.action] += 1;
    }
    for (std::size_t a = 0; a < 2; ++a) EXPECT_NEAR(run.stats.mean(a), sum[a] / n[a], 1e-12);
}

TEST(RunDirect, SameSeedIdenticalTrace) {
    const BanditEnv env = two_arm(0.6, 0.4);
    Rng a(9, Stream::Test), b(9, Stream::Test);
    const auto x = run_direct(env, 200, Selector::ucb(), a).trace;
    const auto y = run_direct(env, 200, Selector::ucb(), b).trace;
    EXPECT_EQ(x.actions, y.actions);
    EXPECT_EQ(x.rewards, y.rewards);
    EXPECT_EQ(x.cum_regret, y.cum_regret);
}

TEST(RunDirect, SuboptimalPullsStayLogarithmic) {
    const BanditEnv env = two_arm(0.8, 0.5);
    const double c = 2.0, gap = 0.3;
    const std::size_t T = 5000;
    const double bound = 4 * c / (gap * gap) * std::log(static_cast<double>(T)) + 8;
    int within = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed, Stream::Test);
        within += static_cast<double>(run_direct(env, T, Selector::ucb(c), rng).stats.pulls[1]) <= bound;
    }
    EXPECT_GE(within, 95);
}

TEST(Regret, SimpleRegret) {
    const auto c = models::counterexample1();
    BanditEnv base(c.base, c.base_actions);
    EXPECT_EQ(simple_regret(base, 0), 0.0);
    EXPECT_NEAR(simple_regret(base, 1), 0.24, 1e-12);
    const auto c2 = models::counterexample2();
    BanditEnv abs(c2.abstract, c2.abstract_actions);
    EXPECT_NEAR(simple_regret(abs, 0), 0.05, 1e-12);
    EXPECT_THROW(simple_regret(abs, 2), Error);
}

TEST(Regret, CumulativeRegret) {
    const auto c = models::counterexample1();
    BanditEnv env(c.base, c.base_actions);
    EXPECT_TRUE(cumulative_regret(env, {}).empty());
    const Trajectory best(5, Step{0, 1.0, 1});
    for (double r : cumulative_regret(env, best)) EXPECT_EQ(r, 0.0);
    const Trajectory worst(10, Step{1, 0.0, 0});
    EXPECT_NEAR(cumulative_regret(env, worst).back(), 2.4, 1e-12);
    EXPECT_THROW(cumulative_regret(env, Trajectory{Step{7, 0.0, 0}}), Error);
}

TEST(Regret, TraceIsMonotone) {
    const BanditEnv env = two_arm(0.6, 0.4);
    Rng rng(2, Stream::Test);
    const auto tr = run_direct(env, 100, Selector::ucb(), rng).trace;
    ASSERT_EQ(tr.size(), 100u);
    for (std::size_t t = 1; t < tr.size(); ++t) EXPECT_GE(tr.cum_regret[t], tr.cum_regret[t - 1]);
}
