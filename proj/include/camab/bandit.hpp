#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "camab/error.hpp"
#include "camab/metrics.hpp"
#include "camab/model.hpp"
#include "camab/rng.hpp"

namespace camab {

class BanditEnv {
public:
    BanditEnv(Scm scm, std::vector<Intervention> actions) : scm_(std::move(scm)), actions_(std::move(actions)) {
        if (actions_.empty()) throw Error(Errc::EmptyInput, "bandit has no actions");
        for (std::size_t i = 0; i < actions_.size(); ++i)
            for (std::size_t j = 0; j < i; ++j)
                if (actions_[i] == actions_[j])
                    throw Error(Errc::InvalidArgument, "duplicate action " + describe(scm_, actions_[i]));
        for (const auto& a : actions_) {
            dists_.push_back(reward_distribution(scm_, a));
            means_.push_back(dists_.back().mean());
        }
        best_ = argmax_index(means_);
    }

    std::size_t size() const noexcept { return actions_.size(); }
    const Scm& scm() const noexcept { return scm_; }
    const std::vector<Intervention>& actions() const noexcept { return actions_; }
    const std::vector<double>& true_means() const noexcept { return means_; }
    const DiscreteDistribution& reward_dist(std::size_t a) const { return dists_.at(a); }
    std::size_t best_action() const noexcept { return best_; }
    double best_mean() const noexcept { return means_[best_]; }

    double gap(std::size_t a) const {
        if (a >= means_.size()) throw Error(Errc::UnknownAction, "action index " + std::to_string(a) + " out of range");
        return means_[best_] - means_[a];
    }

    // index into the reward domain
    std::size_t sample_reward_index(std::size_t a, Rng& rng) const { return dists_[a].sample_index(rng.uniform()); }
    double sample_reward(std::size_t a, Rng& rng) const { return dists_[a].support[sample_reward_index(a, rng)]; }

private:
    Scm scm_;
    std::vector<Intervention> actions_;
    std::vector<DiscreteDistribution> dists_;
    std::vector<double> means_;
    std::size_t best_ = 0;
};

// Per-arm counts and sums, plus prior slots used by warm starts.
struct ArmStats {
    std::vector<std::size_t> pulls;
    std::vector<double> reward_sum;
    std::vector<double> pseudo;
    std::vector<double> prior;

    ArmStats() = default;
    explicit ArmStats(std::size_t n) : pulls(n, 0), reward_sum(n, 0.0), pseudo(n, 0.0), prior(n, 0.0) {}

    std::size_t size() const noexcept { return pulls.size(); }

    double weight(std::size_t a) const { return static_cast<double>(pulls[a]) + pseudo[a]; }

    double mean(std::size_t a) const {
        const double w = weight(a);
        if (w <= 0.0) return std::numeric_limits<double>::quiet_NaN();
        return (pseudo[a] * prior[a] + reward_sum[a]) / w;
    }

    void record(std::size_t a, double reward) {
        ++pulls[a];
        reward_sum[a] += reward;
    }

    void warm_start(std::size_t a, double prior_mean, double pseudo_count) {
        prior[a] = prior_mean;
        pseudo[a] = pseudo_count;
    }

    // argmax of the estimate over arms with data; lowest index on ties, 0 if nothing observed
    std::size_t greedy(const std::vector<bool>& active = {}) const {
        std::size_t best = size();
        double best_mean = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < size(); ++a) {
            if (!active.empty() && !active[a]) continue;
            if (weight(a) <= 0.0) continue;
            const double m = mean(a);
            if (m > best_mean) {
                best_mean = m;
                best = a;
            }
        }
        if (best == size()) {
            for (std::size_t a = 0; a < size(); ++a)
                if (active.empty() || active[a]) return a;
            return 0;
        }
        return best;
    }
};

struct Selector {
    enum class Kind { Ucb, RoundRobin };
    Kind kind = Kind::Ucb;
    double c = 2.0;

    static Selector ucb(double c = 2.0) { return {Kind::Ucb, c}; }
    static Selector round_robin() { return {Kind::RoundRobin, 0.0}; }
};

inline std::size_t ucb_select(const ArmStats& stats, std::size_t t, double c, const std::vector<bool>& active = {}) {
    auto on = [&](std::size_t a) { return active.empty() || active[a]; };
    for (std::size_t a = 0; a < stats.size(); ++a)
        if (on(a) && stats.pulls[a] == 0 && stats.pseudo[a] == 0.0) return a;
    const double log_t = std::log(static_cast<double>(std::max<std::size_t>(t, 1)));
    std::size_t best = stats.size();
    double best_index = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < stats.size(); ++a) {
        if (!on(a)) continue;
        const double idx = stats.mean(a) + std::sqrt(c * log_t / stats.weight(a));
        if (idx > best_index) {
            best_index = idx;
            best = a;
        }
    }
    return best;
}

inline std::size_t round_robin_select(const ArmStats& stats, std::size_t t) {
    return (t - 1) % stats.size();
}

struct Step {
    std::size_t action = 0;
    double reward = 0.0;
    std::size_t reward_index = 0;
};

using Trajectory = std::vector<Step>;

struct RegretTrace {
    std::vector<std::size_t> actions;
    std::vector<double> rewards;
    std::vector<double> gaps;
    std::vector<double> cum_regret;
    std::vector<std::size_t> recommendations;
    std::vector<double> simple_regret;
    std::size_t recommended = 0;

    std::size_t size() const noexcept { return actions.size(); }

    // `rec` is the action recommended after this step, `simple` its gap
    void push(std::size_t action, double reward, double gap, std::size_t rec, double simple) {
        actions.push_back(action);
        rewards.push_back(reward);
        gaps.push_back(gap);
        cum_regret.push_back((cum_regret.empty() ? 0.0 : cum_regret.back()) + gap);
        recommendations.push_back(rec);
        simple_regret.push_back(simple);
    }
};

struct DirectRun {
    ArmStats stats;
    Trajectory trajectory;
    RegretTrace trace;
};

inline double simple_regret(const BanditEnv& env, std::size_t recommended) { return env.gap(recommended); }

inline std::vector<double> cumulative_regret(const BanditEnv& env, const Trajectory& traj) {
    std::vector<double> out;
    out.reserve(traj.size());
    double acc = 0.0;
    for (const auto& s : traj) out.push_back(acc += env.gap(s.action));
    return out;
}

// Select, sample, update for T rounds starting from the given stats; only
// arms flagged in `active` are eligible (empty = all).
inline DirectRun run_from(const BanditEnv& env, std::size_t T, Selector sel, Rng& rng, ArmStats stats,
                          const std::vector<bool>& active = {}) {
    if (stats.size() != env.size()) throw Error(Errc::LengthMismatch, "stats size does not match the action set");
    DirectRun run;
    run.trajectory.reserve(T);
    for (std::size_t t = 1; t <= T; ++t) {
        const std::size_t a =
            sel.kind == Selector::Kind::Ucb ? ucb_select(stats, t, sel.c, active) : round_robin_select(stats, t);
        const std::size_t yi = env.sample_reward_index(a, rng);
        const double y = env.reward_dist(a).support[yi];
        stats.record(a, y);
        run.trajectory.push_back({a, y, yi});
        const std::size_t rec = stats.greedy(active);
        run.trace.push(a, y, env.gap(a), rec, env.gap(rec));
    }
    run.trace.recommended = stats.greedy(active);
    run.stats = std::move(stats);
    return run;
}

inline DirectRun run_direct(const BanditEnv& env, std::size_t T, Selector sel, Rng& rng) {
    return run_from(env, T, sel, rng, ArmStats(env.size()));
}

}  // namespace camab
