#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "camab/abstraction.hpp"
#include "camab/bandit.hpp"
#include "camab/error.hpp"
#include "camab/metrics.hpp"

namespace camab {

// A validated CAMAB with both bandit environments and the action map precomputed.
struct CamabEnv {
    Camab camab;
    BanditEnv base;
    BanditEnv abstract;
    std::vector<std::size_t> amap;

    explicit CamabEnv(Camab c)
        : camab((validate_camab(c), std::move(c))),
          base(camab.base, camab.base_actions),
          abstract(camab.abstract, camab.abstract_actions),
          amap(action_map(camab)) {}

    std::vector<std::size_t> preimage(std::size_t abstract_action) const {
        if (abstract_action >= abstract.size())
            throw Error(Errc::UnknownAction, "abstract action index " + std::to_string(abstract_action) + " out of range");
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < amap.size(); ++i)
            if (amap[i] == abstract_action) out.push_back(i);
        return out;
    }
};

// ---- TOpt ----

struct FixedPolicy {
    std::size_t action = 0;
};

inline FixedPolicy topt(const CamabEnv& env, std::size_t base_optimal) {
    if (base_optimal >= env.amap.size())
        throw Error(Errc::UnknownAction, "base action index " + std::to_string(base_optimal) + " out of range");
    return {env.amap[base_optimal]};
}

inline RegretTrace play_fixed(const BanditEnv& env, FixedPolicy policy, std::size_t T, Rng& rng) {
    RegretTrace trace;
    const double g = env.gap(policy.action);
    for (std::size_t t = 0; t < T; ++t)
        trace.push(policy.action, env.sample_reward(policy.action, rng), g, policy.action, g);
    trace.recommended = policy.action;
    return trace;
}

// ---- IMIT ----

struct ImitResult {
    ArmStats stats;
    RegretTrace trace;
    std::size_t policy = 0;
};

inline ImitResult imit(const CamabEnv& env, const Trajectory& base_trajectory, Rng& rng) {
    ImitResult r{ArmStats(env.abstract.size()), {}, 0};
    for (const auto& step : base_trajectory) {
        if (step.action >= env.amap.size())
            throw Error(Errc::UnknownAction, "trajectory action " + std::to_string(step.action) + " not in I");
        const std::size_t a = env.amap[step.action];
        const double y = env.abstract.sample_reward(a, rng);
        r.stats.record(a, y);
        const std::size_t rec = r.stats.greedy();
        r.trace.push(a, y, env.abstract.gap(a), rec, env.abstract.gap(rec));
    }
    r.policy = r.stats.greedy();
    r.trace.recommended = r.policy;
    return r;
}

inline double inv_sq_gap(double d) { return d > 0.0 ? 1.0 / (d * d) : 0.0; }

// N (K - 1) + (sum over the preimage of 1/gap^2 - 1/gap'^2) >= 0; zero gaps
// drop out of their reciprocal term.
inline bool imit_confidence_check(const CamabEnv& env, std::size_t abstract_action, double N = 1.0) {
    const auto pre = env.preimage(abstract_action);
    double lhs = N * (static_cast<double>(pre.size()) - 1.0);
    for (std::size_t a : pre) lhs += inv_sq_gap(env.base.gap(a));
    lhs -= inv_sq_gap(env.abstract.gap(abstract_action));
    return lhs >= 0.0;
}

inline double imit_regret_bound_value(const CamabEnv& env, std::size_t T) {
    if (T < 2) throw Error(Errc::InvalidArgument, "horizon must be at least 2");
    double first = 0.0, second = 0.0;
    for (std::size_t j = 0; j < env.abstract.size(); ++j) {
        const auto pre = env.preimage(j);
        const double dj = env.abstract.gap(j);
        first += dj * (1.0 - static_cast<double>(pre.size()));
        if (dj <= 0.0) continue;
        double term = 1.0 / dj;
        for (std::size_t a : pre) {
            const double da = env.base.gap(a);
            // an optimal base arm is pulled linearly often, so its term is unbounded
            if (da <= 0.0) return -std::numeric_limits<double>::infinity();
            term -= dj / (da * da);
        }
        second += term;
    }
    return 3.0 * first + 16.0 * std::log(static_cast<double>(T)) * second;
}

inline bool imit_regret_bound_check(const CamabEnv& env, std::size_t T) { return imit_regret_bound_value(env, T) >= 0.0; }

inline std::vector<double> regret_difference_estimate(const std::vector<RegretTrace>& ucb_runs,
                                                      const std::vector<RegretTrace>& imit_runs) {
    if (ucb_runs.size() != imit_runs.size()) throw Error(Errc::LengthMismatch, "run counts differ");
    if (ucb_runs.empty()) return {};
    const std::size_t T = ucb_runs.front().size();
    for (std::size_t r = 0; r < ucb_runs.size(); ++r)
        if (ucb_runs[r].size() != T || imit_runs[r].size() != T) throw Error(Errc::LengthMismatch, "horizons differ");
    std::vector<double> out(T, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        double acc = 0.0;
        for (std::size_t r = 0; r < ucb_runs.size(); ++r) acc += ucb_runs[r].cum_regret[t] - imit_runs[r].cum_regret[t];
        out[t] = acc / static_cast<double>(ucb_runs.size());
    }
    return out;
}

// ---- expected-value transfer ----

struct LinearRewardMap {
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<double> residuals;  // one per base reward label

    double operator()(double y) const { return slope * y + intercept; }

    double mean_residual(const DiscreteDistribution& d) const {
        if (d.probs.size() != residuals.size()) throw Error(Errc::LengthMismatch, "residuals do not match the support");
        double m = 0.0;
        for (std::size_t j = 0; j < residuals.size(); ++j) m += d.probs[j] * residuals[j];
        return m;
    }
};

// Least-squares line through (y, alpha_Y'(y)) over D[Y].
inline LinearRewardMap fit_alpha_E(const Abstraction& alpha) {
    const FiniteDomain& ys = alpha.base_domain(alpha.base_reward());
    const FiniteDomain& yt = alpha.abstract_domain(alpha.abstract_reward());
    const auto idx = alpha.reward_index_map();
    const std::size_t n = ys.size();
    std::vector<double> target(n);
    double mx = 0.0, my = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        target[j] = yt[idx[j]];
        mx += ys[j];
        my += target[j];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        sxy += (ys[j] - mx) * (target[j] - my);
        sxx += (ys[j] - mx) * (ys[j] - mx);
    }
    LinearRewardMap m;
    m.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    m.intercept = my - m.slope * mx;
    m.residuals.resize(n);
    for (std::size_t j = 0; j < n; ++j) m.residuals[j] = target[j] - m(ys[j]);
    return m;
}

struct TransferredMean {
    double mu_hat = 0.0;
    std::size_t source = 0;
};

inline std::vector<TransferredMean> transfer_expected_values(const CamabEnv& env, const ArmStats& base_stats,
                                                             const LinearRewardMap& map) {
    std::vector<TransferredMean> out;
    for (std::size_t j = 0; j < env.abstract.size(); ++j) {
        std::size_t src = env.base.size();
        for (std::size_t a : env.preimage(j))
            if (base_stats.pulls[a] > 0 && (src == env.base.size() || base_stats.pulls[a] > base_stats.pulls[src])) src = a;
        if (src == env.base.size())
            throw Error(Errc::UncoveredAbstractAction,
                        describe(env.camab.abstract, env.camab.abstract_actions[j]) + " has no pulled preimage");
        out.push_back({map(base_stats.mean(src)), src});
    }
    return out;
}

inline double kappa(std::size_t N, double mean_residual, double e_alpha, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw Error(Errc::InvalidDelta, "delta must lie in (0,1)");
    if (N == 0) throw Error(Errc::ZeroCount, "confidence radius needs at least one sample");
    return std::sqrt(2.0 * std::log(2.0 / delta) / static_cast<double>(N)) + std::abs(mean_residual) + e_alpha;
}

inline std::vector<double> kappa_bounds(const std::vector<std::size_t>& counts, const LinearRewardMap& map,
                                        const std::vector<DiscreteDistribution>& base_dists, double e_alpha,
                                        double delta) {
    if (counts.size() != base_dists.size()) throw Error(Errc::LengthMismatch, "counts and distributions differ in length");
    std::vector<double> out;
    for (std::size_t i = 0; i < counts.size(); ++i)
        out.push_back(kappa(counts[i], map.mean_residual(base_dists[i]), e_alpha, delta));
    return out;
}

inline std::vector<std::size_t> eliminate_actions(const std::vector<double>& mu, const std::vector<double>& radius) {
    if (mu.empty()) throw Error(Errc::EmptyInput, "no estimates");
    if (mu.size() != radius.size()) throw Error(Errc::LengthMismatch, "estimates and radii differ in length");
    const std::size_t top = argmax_index(mu);
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < mu.size() && !dominated; ++j)
            dominated = j != i && mu[i] + radius[i] <= mu[j] - radius[j];
        if (i == top || !dominated) keep.push_back(i);
    }
    return keep;
}

struct TransferEntry {
    std::string action;
    double mu_hat = 0.0;
    double kappa = 0.0;
    double pseudo_count = 0.0;
    bool eliminated = false;
};

struct TransferReport {
    std::string algorithm;
    std::vector<TransferEntry> per_action;
    std::vector<std::size_t> survivors;
    bool adaptive_base = true;
};

struct TransferRun {
    ArmStats stats;
    RegretTrace trace;
    TransferReport report;
};

enum class ResidualMode { Exact, Empirical };

namespace detail {

inline DiscreteDistribution empirical_rewards(const BanditEnv& env, const Trajectory& traj, std::size_t action) {
    const FiniteDomain& d = env.reward_dist(action).support;
    std::vector<double> counts(d.size(), 0.0);
    double n = 0.0;
    for (const auto& s : traj)
        if (s.action == action) {
            counts[s.reward_index] += 1.0;
            n += 1.0;
        }
    if (n == 0.0) throw Error(Errc::ZeroCount, "no samples for the source action");
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < counts.size(); ++k) total += counts[k] /= n;
    counts.back() = std::max(0.0, 1.0 - total);
    return DiscreteDistribution(d, std::move(counts));
}

// Warm start survivors and run UCB over them.
inline TransferRun warm_ucb(const CamabEnv& env, TransferReport report, const std::vector<double>& mu,
                            const std::vector<double>& pseudo, std::size_t T, double c_ucb, Rng& rng) {
    ArmStats stats(env.abstract.size());
    std::vector<bool> active(env.abstract.size(), false);
    for (std::size_t j : report.survivors) {
        active[j] = true;
        stats.warm_start(j, mu[j], pseudo[j]);
    }
    DirectRun run = run_from(env.abstract, T, Selector::ucb(c_ucb), rng, std::move(stats), active);
    return {std::move(run.stats), std::move(run.trace), std::move(report)};
}

}  // namespace detail

struct TExpOptions {
    double delta = 0.05;
    double c_ucb = 2.0;
    ResidualMode residuals = ResidualMode::Exact;
    bool adaptive_base = true;
};

inline TransferRun texp(const CamabEnv& env, const DirectRun& base_run, std::size_t T, const TExpOptions& opt, Rng& rng) {
    const LinearRewardMap map = fit_alpha_E(env.camab.alpha);
    const auto transferred = transfer_expected_values(env, base_run.stats, map);
    const double e = ic_error(env.camab, MetricKind::Wasserstein2);

    const std::size_t n = env.abstract.size();
    std::vector<double> mu(n), radius(n), pseudo(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = transferred[j].source;
        const DiscreteDistribution dist = opt.residuals == ResidualMode::Exact
                                              ? env.base.reward_dist(src)
                                              : detail::empirical_rewards(env.base, base_run.trajectory, src);
        mu[j] = transferred[j].mu_hat;
        pseudo[j] = static_cast<double>(base_run.stats.pulls[src]);
        radius[j] = kappa(base_run.stats.pulls[src], map.mean_residual(dist), e, opt.delta);
    }

    TransferReport report{"texp", {}, eliminate_actions(mu, radius), opt.adaptive_base};
    std::vector<bool> keep(n, false);
    for (std::size_t j : report.survivors) keep[j] = true;
    for (std::size_t j = 0; j < n; ++j)
        report.per_action.push_back({describe(env.camab.abstract, env.camab.abstract_actions[j]), mu[j], radius[j],
                                     keep[j] ? pseudo[j] : 0.0, !keep[j]});
    return detail::warm_ucb(env, std::move(report), mu, pseudo, T, opt.c_ucb, rng);
}

// ---- reward transfer ----

struct RewardTransfer {
    ArmStats stats;  // transported samples held as pseudo-counts with their mean as prior
    std::vector<double> kappa;
};

inline RewardTransfer reward_transfer(const CamabEnv& env, const Trajectory& base_trajectory, double delta) {
    const auto ymap = env.camab.alpha.reward_index_map();
    const FiniteDomain& yt = env.abstract.reward_dist(0).support;
    const std::size_t n = env.abstract.size();
    std::vector<double> count(n, 0.0), sum(n, 0.0);
    for (const auto& s : base_trajectory) {
        if (s.action >= env.amap.size())
            throw Error(Errc::UnknownAction, "trajectory action " + std::to_string(s.action) + " not in I");
        const std::size_t j = env.amap[s.action];
        count[j] += 1.0;
        sum[j] += yt[ymap[s.reward_index]];
    }
    const double e = ic_error(env.camab, MetricKind::Wasserstein2);
    RewardTransfer r{ArmStats(n), std::vector<double>(n, std::numeric_limits<double>::infinity())};
    for (std::size_t j = 0; j < n; ++j) {
        if (count[j] == 0.0) continue;
        r.stats.warm_start(j, sum[j] / count[j], count[j]);
        r.kappa[j] = kappa(static_cast<std::size_t>(count[j]), 0.0, e, delta);
    }
    return r;
}

inline TransferRun run_reward_transfer(const CamabEnv& env, const DirectRun& base_run, std::size_t T,
                                       const TExpOptions& opt, Rng& rng) {
    RewardTransfer rt = reward_transfer(env, base_run.trajectory, opt.delta);
    const std::size_t n = env.abstract.size();
    std::vector<double> mu(n), pseudo(n);
    for (std::size_t j = 0; j < n; ++j) {
        pseudo[j] = rt.stats.pseudo[j];
        // uncovered arms get an infinite radius and always survive
        mu[j] = pseudo[j] > 0.0 ? rt.stats.prior[j] : 0.0;
    }
    TransferReport report{"rtrans", {}, eliminate_actions(mu, rt.kappa), opt.adaptive_base};
    std::vector<bool> keep(n, false);
    for (std::size_t j : report.survivors) keep[j] = true;
    for (std::size_t j = 0; j < n; ++j)
        report.per_action.push_back({describe(env.camab.abstract, env.camab.abstract_actions[j]), mu[j], rt.kappa[j],
                                     keep[j] ? pseudo[j] : 0.0, !keep[j]});
    return detail::warm_ucb(env, std::move(report), mu, pseudo, T, opt.c_ucb, rng);
}

}  // namespace camab
