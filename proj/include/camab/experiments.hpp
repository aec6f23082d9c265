#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "camab/bandit.hpp"
#include "camab/error.hpp"
#include "camab/models.hpp"
#include "camab/rng.hpp"
#include "camab/transfer.hpp"

namespace camab {

enum class Algorithm { Ucb, TOpt, Imit, TExp, RewardTransfer };

inline const char* to_string(Algorithm a) {
    switch (a) {
        case Algorithm::Ucb: return "ucb";
        case Algorithm::TOpt: return "topt";
        case Algorithm::Imit: return "imit";
        case Algorithm::TExp: return "texp";
        case Algorithm::RewardTransfer: return "rtrans";
    }
    return "?";
}

inline Algorithm parse_algorithm(const std::string& s) {
    for (auto a : {Algorithm::Ucb, Algorithm::TOpt, Algorithm::Imit, Algorithm::TExp, Algorithm::RewardTransfer})
        if (s == to_string(a)) return a;
    throw Error(Errc::InvalidArgument, "unknown algorithm '" + s + "'");
}

inline Stream stream_of(Algorithm a) {
    switch (a) {
        case Algorithm::Ucb: return Stream::Ucb;
        case Algorithm::TOpt: return Stream::TOpt;
        case Algorithm::Imit: return Stream::Imit;
        case Algorithm::TExp: return Stream::TExp;
        case Algorithm::RewardTransfer: return Stream::RewardTransfer;
    }
    return Stream::Test;
}

inline const std::vector<Algorithm> kAllAlgorithms = {Algorithm::Ucb, Algorithm::TOpt, Algorithm::Imit, Algorithm::TExp,
                                                       Algorithm::RewardTransfer};

// A CAMAB under a label; labels distinguish several abstractions of one base model.
struct Variant {
    std::string label;
    Camab camab;
};

struct ScenarioSpec {
    std::string id;
    std::string title;
    std::vector<Variant> variants;
    std::size_t horizon = 500;
    std::size_t repeats = 20;
    std::vector<Algorithm> algorithms;
    std::vector<std::size_t> n_steps;  // non-empty: TOpt transfers after each base prefix length
    double delta = 0.05;
    double c_ucb = 2.0;
};

inline const std::vector<std::string>& scenario_ids() {
    static const std::vector<std::string> ids = {"1", "2", "3", "4", "5", "6", "7", "task1", "task2", "advertising"};
    return ids;
}

inline ScenarioSpec load_scenario(const std::string& id) {
    using namespace models;
    using A = Algorithm;
    const std::vector<std::size_t> grid = {10, 25, 50, 100, 250, 500};
    const std::vector<A> all = {A::Ucb, A::TOpt, A::Imit, A::TExp, A::RewardTransfer};
    ScenarioSpec s;
    s.id = id;
    if (id == "1") {
        s.title = "binary chain, identity maps";
        s.variants = {{"", counterexample1()}};
        s.algorithms = {A::Ucb, A::TOpt};
        s.n_steps = grid;
    } else if (id == "2") {
        s.title = "binary chain, anti-diagonal maps";
        s.variants = {{"", counterexample1_swap()}};
        s.algorithms = {A::Ucb, A::TOpt};
        s.n_steps = grid;
    } else if (id == "3") {
        s.title = "binary chain, inexact abstract reward";
        s.variants = {{"", scenario3()}};
        s.algorithms = {A::Ucb, A::Imit};
    } else if (id == "4") {
        s.title = "binary chain, exact abstraction";
        s.variants = {{"", counterexample1()}};
        s.algorithms = {A::Ucb, A::Imit};
    } else if (id == "5") {
        s.title = "ternary treatment, two abstractions";
        s.variants = {{"alpha1", scenario5_alpha1()}, {"alpha2", scenario5_alpha2()}};
        s.algorithms = {A::Ucb, A::Imit};
    } else if (id == "6") {
        s.title = "ternary reward {0,1,2}";
        s.variants = {{"", scenario6()}};
        s.algorithms = {A::Ucb, A::TExp, A::RewardTransfer};
    } else if (id == "7") {
        s.title = "ternary reward relabelled {0.4,0.5,10}";
        s.variants = {{"", scenario7()}};
        s.algorithms = {A::Ucb, A::TExp, A::RewardTransfer};
    } else if (id == "task1") {
        s.title = "confounded treatment, X copies U";
        s.variants = {{"", task1()}};
        s.algorithms = all;
    } else if (id == "task2") {
        s.title = "confounded treatment, X = U xor Z";
        s.variants = {{"", task2()}};
        s.algorithms = all;
    } else if (id == "advertising") {
        s.title = "email campaign";
        s.variants = {{"", advertising()}};
        s.algorithms = all;
        s.horizon = 1000;
    } else {
        throw Error(Errc::UnknownScenario, "unknown scenario '" + id + "'");
    }
    for (const auto& v : s.variants) validate_camab(v.camab);
    return s;
}

inline std::string variant_label(Algorithm a, const Variant& v) {
    return v.label.empty() ? to_string(a) : std::string(to_string(a)) + "-" + v.label;
}

struct RunRecord {
    std::string algorithm;
    std::uint64_t seed = 0;
    RegretTrace trace;
};

struct AggregateRow {
    std::string algorithm;
    std::size_t t = 0;
    double mean_cum = 0.0, std_cum = 0.0, mean_simple = 0.0, std_simple = 0.0;
};

struct ScenarioResult {
    std::string scenario;
    std::vector<RunRecord> runs;  // ordered by seed, then algorithm
    std::vector<AggregateRow> aggregate;
};

struct RunOptions {
    std::vector<Algorithm> algorithms;  // empty: the scenario's own list
    std::size_t horizon = 0;            // 0: the scenario's own horizon
    std::size_t repeats = 0;
    unsigned threads = 0;               // 0: hardware concurrency
};

// All algorithm traces for one seed.
inline std::vector<RunRecord> run_repeat(const ScenarioSpec& spec, const std::vector<CamabEnv>& envs,
                                         const std::vector<Algorithm>& algs, std::size_t T, std::uint64_t seed) {
    std::vector<RunRecord> out;
    const TExpOptions opt{spec.delta, spec.c_ucb, ResidualMode::Exact, true};
    // abstract models are shared by all variants of a scenario, so UCB runs once
    bool ucb_done = false;
    for (std::size_t v = 0; v < envs.size(); ++v) {
        const CamabEnv& env = envs[v];
        Rng base_rng(seed, Stream::Base);
        const DirectRun base = run_direct(env.base, T, Selector::ucb(spec.c_ucb), base_rng);
        for (Algorithm a : algs) {
            Rng rng(seed, stream_of(a), v);
            switch (a) {
                case Algorithm::Ucb: {
                    if (ucb_done) continue;
                    ucb_done = true;
                    Rng urng(seed, Stream::Ucb);
                    out.push_back({to_string(a), seed, run_direct(env.abstract, T, Selector::ucb(spec.c_ucb), urng).trace});
                    continue;
                }
                case Algorithm::TOpt: {
                    RegretTrace tr;
                    if (spec.n_steps.empty()) {
                        tr = play_fixed(env.abstract, topt(env, base.trace.recommended), T, rng);
                    } else {
                        // policy after each base prefix; identical to a fresh base run of that length
                        for (std::size_t t = 0; t < T; ++t) {
                            const std::size_t a2 = topt(env, base.trace.recommendations[t]).action;
                            const double g = env.abstract.gap(a2);
                            tr.push(a2, env.abstract.sample_reward(a2, rng), g, a2, g);
                        }
                        tr.recommended = tr.actions.empty() ? 0 : tr.actions.back();
                    }
                    out.push_back({variant_label(a, spec.variants[v]), seed, std::move(tr)});
                    break;
                }
                case Algorithm::Imit:
                    out.push_back({variant_label(a, spec.variants[v]), seed, imit(env, base.trajectory, rng).trace});
                    break;
                case Algorithm::TExp:
                    out.push_back({variant_label(a, spec.variants[v]), seed, texp(env, base, T, opt, rng).trace});
                    break;
                case Algorithm::RewardTransfer:
                    out.push_back(
                        {variant_label(a, spec.variants[v]), seed, run_reward_transfer(env, base, T, opt, rng).trace});
                    break;
            }
        }
    }
    return out;
}

inline std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& runs) {
    std::vector<std::string> labels;
    for (const auto& r : runs)
        if (std::find(labels.begin(), labels.end(), r.algorithm) == labels.end()) labels.push_back(r.algorithm);
    std::vector<AggregateRow> rows;
    for (const auto& label : labels) {
        std::vector<const RegretTrace*> group;
        for (const auto& r : runs)
            if (r.algorithm == label) group.push_back(&r.trace);
        std::size_t T = group.front()->size();
        for (const auto* g : group) T = std::min(T, g->size());
        const double n = static_cast<double>(group.size());
        for (std::size_t t = 0; t < T; ++t) {
            double sc = 0, ss = 0;
            for (const auto* g : group) {
                sc += g->cum_regret[t];
                ss += g->simple_regret[t];
            }
            const double mc = sc / n, ms = ss / n;
            double vc = 0, vs = 0;
            for (const auto* g : group) {
                vc += (g->cum_regret[t] - mc) * (g->cum_regret[t] - mc);
                vs += (g->simple_regret[t] - ms) * (g->simple_regret[t] - ms);
            }
            const double denom = n > 1 ? n - 1 : 1;
            rows.push_back({label, t + 1, mc, std::sqrt(vc / denom), ms, std::sqrt(vs / denom)});
        }
    }
    return rows;
}

inline ScenarioResult run_scenario(const ScenarioSpec& spec, std::uint64_t base_seed, const RunOptions& opt = {}) {
    const std::size_t repeats = opt.repeats ? opt.repeats : spec.repeats;
    const std::size_t T = opt.horizon ? opt.horizon : spec.horizon;
    if (repeats == 0) throw Error(Errc::InvalidArgument, "repeat count must be at least 1");
    const auto& algs = opt.algorithms.empty() ? spec.algorithms : opt.algorithms;

    std::vector<CamabEnv> envs;
    for (const auto& v : spec.variants) envs.emplace_back(v.camab);

    std::vector<std::vector<RunRecord>> per_repeat(repeats);
    std::atomic<std::size_t> next{0};
    std::vector<std::string> failures(repeats);
    auto worker = [&] {
        for (std::size_t r; (r = next.fetch_add(1)) < repeats;) {
            try {
                per_repeat[r] = run_repeat(spec, envs, algs, T, base_seed + r);
            } catch (const std::exception& e) {
                failures[r] = e.what();
            }
        }
    };
    unsigned n_threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, repeats));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    for (const auto& f : failures)
        if (!f.empty()) throw std::runtime_error(f);

    ScenarioResult res;
    res.scenario = spec.id;
    for (auto& rs : per_repeat)
        for (auto& r : rs) res.runs.push_back(std::move(r));
    res.aggregate = aggregate(res.runs);
    return res;
}

// ---- CSV output ----

inline std::string fmt12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline constexpr const char* kRawHeader = "scenario,algorithm,seed,t,action,reward,cum_regret,simple_regret";
inline constexpr const char* kAggregateHeader = "scenario,algorithm,t,mean_cum,std_cum,mean_simple,std_simple";

inline void write_raw_csv(const ScenarioResult& res, std::ostream& os) {
    os << kRawHeader << '\n';
    for (const auto& r : res.runs)
        for (std::size_t t = 0; t < r.trace.size(); ++t)
            os << res.scenario << ',' << r.algorithm << ',' << r.seed << ',' << (t + 1) << ',' << r.trace.actions[t]
               << ',' << fmt12(r.trace.rewards[t]) << ',' << fmt12(r.trace.cum_regret[t]) << ','
               << fmt12(r.trace.simple_regret[t]) << '\n';
}

inline void write_aggregate_csv(const ScenarioResult& res, std::ostream& os) {
    os << kAggregateHeader << '\n';
    for (const auto& a : res.aggregate)
        os << res.scenario << ',' << a.algorithm << ',' << a.t << ',' << fmt12(a.mean_cum) << ',' << fmt12(a.std_cum)
           << ',' << fmt12(a.mean_simple) << ',' << fmt12(a.std_simple) << '\n';
}

struct EmittedFiles {
    std::filesystem::path raw, aggregate;
};

inline EmittedFiles emit_results(const ScenarioResult& res, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(Errc::IoError, "cannot create '" + dir.string() + "': " + ec.message());
    const std::string stem = res.scenario.empty() ? "results" : res.scenario;
    EmittedFiles f{dir / (stem + "_raw.csv"), dir / (stem + "_aggregate.csv")};
    auto write = [](const std::filesystem::path& p, auto&& body) {
        std::ofstream os(p, std::ios::binary | std::ios::trunc);
        if (!os) throw Error(Errc::IoError, "cannot open '" + p.string() + "' for writing");
        body(os);
        os.flush();
        if (!os) throw Error(Errc::IoError, "write to '" + p.string() + "' failed");
    };
    write(f.raw, [&](std::ostream& os) { write_raw_csv(res, os); });
    write(f.aggregate, [&](std::ostream& os) { write_aggregate_csv(res, os); });
    return f;
}

}  // namespace camab
