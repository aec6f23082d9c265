// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "camab/camab.hpp"
#include "oracles.hpp"

using namespace camab;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

void note(Outcome& o, bool ok, const std::string& what) {
    o.pass = o.pass && ok;
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += what + (ok ? "" : " [miss]");
}

std::string f(double x, int prec = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, x);
    return buf;
}

double final_cum(const ScenarioResult& r, const std::string& alg) {
    double v = NAN;
    std::size_t best_t = 0;
    for (const auto& row : r.aggregate)
        if (row.algorithm == alg && row.t >= best_t) best_t = row.t, v = row.mean_cum;
    return v;
}

std::vector<double> mean_cum_curve(const ScenarioResult& r, const std::string& alg) {
    std::vector<double> out;
    for (const auto& row : r.aggregate)
        if (row.algorithm == alg) out.push_back(row.mean_cum);
    return out;
}

bool close_all(const std::vector<double>& got, const std::vector<double>& want, double tol) {
    if (got.size() != want.size()) return false;
    for (std::size_t i = 0; i < got.size(); ++i)
        if (std::abs(got[i] - want[i]) > tol) return false;
    return true;
}

std::string join(const std::vector<double>& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt12(v[i]);
    return s + ")";
}

// ---------------------------------------------------------------------------

Outcome exact_means() {
    Outcome o;
    auto check = [&](const std::string& name, const Scm& scm, const std::vector<Intervention>& acts,
                     const std::vector<double>& want) {
        const auto got = action_means(scm, acts);
        note(o, close_all(got, want, 1e-12), name + " " + join(got) + " want " + join(want));
    };
    const auto ce1 = models::counterexample1();
    check("ce1", ce1.base, ce1.base_actions, {0.62, 0.38});
    const auto ce2 = models::counterexample2();
    check("ce2 base", ce2.base, ce2.base_actions, {1.115, 1.10});
    check("ce2 abstract", ce2.abstract, ce2.abstract_actions, {0.40, 0.45});
    const auto s5 = models::scenario5_alpha1();
    check("s5 base", s5.base, s5.base_actions, {0.56, 0.62, 0.38, 0.42});
    check("s5 abstract", s5.abstract, s5.abstract_actions, {0.47, 0.45, 0.55});
    return o;
}

Outcome ic_errors() {
    Outcome o;
    for (const char* name : {"counterexample1", "counterexample1-swap", "counterexample2", "scenario6"}) {
        const auto c = models::load_fixture(name);
        const double w = ic_error(c, MetricKind::Wasserstein2), j = ic_error(c, MetricKind::JensenShannon);
        note(o, w <= 1e-12 && j <= 1e-12, std::string(name) + " w2=" + fmt12(w) + " jsd=" + fmt12(j));
    }
    const double s3 = ic_error(models::scenario3(), MetricKind::JensenShannon);
    note(o, std::abs(s3 - 0.229) <= 0.001, "scenario3 jsd=" + f(s3, 6));
    return o;
}

Outcome oracle_equivalence() {
    Outcome o;
    double worst_inf = 0;
    std::size_t checked = 0;
    for (const auto& fx : models::fixtures()) {
        const Camab c = fx.make();
        for (const auto* side : {&c.base, &c.abstract}) {
            const auto& acts = side == &c.base ? c.base_actions : c.abstract_actions;
            for (const auto& a : acts)
                for (const auto& v : side->variables()) {
                    const auto got = interventional_distribution(*side, a, v.id);
                    const auto want = oracle::joint_marginal(*side, a, v.id);
                    for (std::size_t k = 0; k < want.size(); ++k)
                        worst_inf = std::max(worst_inf, std::abs(got.probs[k] - want[k]));
                    ++checked;
                }
        }
    }
    note(o, worst_inf <= 1e-12, std::to_string(checked) + " marginals, max diff " + fmt12(worst_inf));
    Rng rng(3, Stream::Test);
    double worst_w2 = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t a = 1 + rng.below(5), b = 1 + rng.below(5);
        const auto xs = oracle::random_labels(rng, a), ys = oracle::random_labels(rng, b);
        const auto p = oracle::random_simplex(rng, a), q = oracle::random_simplex(rng, b);
        const DiscreteDistribution P(FiniteDomain(xs), p), Q(FiniteDomain(ys), q);
        worst_w2 = std::max(worst_w2, std::abs(w2_distance(P, Q) - oracle::transport_w2(xs, p, ys, q)));
    }
    note(o, worst_w2 <= 1e-9, "100 W2 vs LP, max diff " + fmt12(worst_w2));
    return o;
}

Outcome gap_bound_and_lemma1() {
    Outcome o;
    Rng rng(4, Stream::Test);
    int bound_ok = 0, lemma_applies = 0, lemma_ok = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const Camab c = oracle::random_camab(rng);
        const double bound = expected_reward_gap_bound(c, MetricKind::Wasserstein2);
        const auto map = action_map(c);
        const auto mu = action_means(c.base, c.base_actions);
        const auto mu_abs = action_means(c.abstract, c.abstract_actions);
        bool all = true;
        for (std::size_t i = 0; i < mu.size(); ++i) all = all && std::abs(mu[i] - mu_abs[map[i]]) <= bound + 1e-12;
        bound_ok += all;
        bool sufficient = false;
        try {
            sufficient = max_preservation_sufficient(c);
        } catch (const Error&) {
        }
        if (sufficient) {
            ++lemma_applies;
            const double top = *std::max_element(mu_abs.begin(), mu_abs.end());
            lemma_ok += mu_abs[map[argmax_index(mu)]] >= top - 1e-12;
        }
    }
    note(o, bound_ok == 200, "gap bound " + std::to_string(bound_ok) + "/200");
    note(o, lemma_ok == lemma_applies,
         "argmax preserved " + std::to_string(lemma_ok) + "/" + std::to_string(lemma_applies) + " where sufficient");
    note(o, lemma_applies > 0, "condition exercised");
    return o;
}

Outcome topt_dichotomy() {
    Outcome o;
    for (const auto& [id, ok] : std::vector<std::pair<std::string, std::function<bool(double)>>>{
             {"1", [](double s) { return s <= 0.02; }}, {"2", [](double s) { return s >= 0.20; }}}) {
        const auto r = run_scenario(load_scenario(id), 0, {{Algorithm::TOpt}, 500, 20, 0});
        double s = NAN;
        for (const auto& row : r.aggregate)
            if (row.algorithm == "topt" && row.t == 500) s = row.mean_simple;
        note(o, ok(s), "scenario " + id + " simple regret " + f(s));
    }
    return o;
}

Outcome imit_unbiased_and_slope() {
    Outcome o;
    const CamabEnv env(models::scenario3());
    const auto& mu = env.abstract.true_means();
    int good = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng br(seed, Stream::Base), ir(seed, Stream::Imit);
        const auto base = run_direct(env.base, 500, Selector::ucb(2.0), br);
        const auto r = imit(env, base.trajectory, ir);
        bool all = true;
        for (std::size_t j = 0; j < mu.size(); ++j) {
            const double n = static_cast<double>(r.stats.pulls[j]);
            all = all && n > 0 && std::abs(r.stats.mean(j) - mu[j]) <= 3 * std::sqrt(mu[j] * (1 - mu[j]) / n);
        }
        good += all;
    }
    note(o, good >= 18, "scenario3 within 3 SE " + std::to_string(good) + "/20");

    const std::size_t T = 5000, q = T / 4;
    const auto spec = load_scenario("5");
    const auto res = run_scenario(spec, 0, {{}, T, 20, 0});
    for (const auto& v : spec.variants) {
        const CamabEnv e(v.camab);
        const bool preserved = e.abstract.gap(action_map(v.camab)[e.base.best_action()]) <= 0.0;
        const auto curve = mean_cum_curve(res, "imit-" + v.label);
        const double first = curve[q - 1] / static_cast<double>(q);
        const double last = (curve[T - 1] - curve[T - q - 1]) / static_cast<double>(q);
        const double ratio = last / first;
        const bool sublinear = ratio < 0.1;
        note(o, sublinear == preserved,
             v.label + " argmax " + (preserved ? "preserved" : "lost") + ", quarter slopes " + f(first) + " -> " +
                 f(last) + " ratio " + f(ratio, 3));
    }
    return o;
}

Outcome prop4_prop5_signs() {
    Outcome o;
    const auto spec = load_scenario("5");
    const auto res = run_scenario(spec, 0);
    const double ucb = final_cum(res, "ucb");
    std::vector<double> diffs;
    for (const auto& v : spec.variants) {
        const CamabEnv env(v.camab);
        const double bound = imit_regret_bound_value(env, spec.horizon);
        const bool confident = imit_confidence_check(env, action_map(v.camab)[env.base.best_action()]);
        const double diff = ucb - final_cum(res, "imit-" + v.label);
        diffs.push_back(diff);
        const bool imit_better = diff > 0;
        note(o, (bound >= 0) == imit_better && confident == imit_better,
             v.label + " bound " + fmt12(bound) + " confidence " + (confident ? "true" : "false") +
                 " observed ucb-imit " + f(diff, 2));
    }
    note(o, diffs.size() == 2 && diffs[0] * diffs[1] < 0, "opposite observed signs");
    return o;
}

Outcome lemma4_coverage() {
    Outcome o;
    // Hoeffding radius assumes rewards in [0,1]
    for (const auto& fx : models::fixtures()) {
        const Camab c = fx.make();
        const auto in_unit = [](const Scm& s) {
            for (double y : s.reward_domain().labels())
                if (y < 0 || y > 1) return false;
            return true;
        };
        if (!in_unit(c.base) || !in_unit(c.abstract)) continue;
        const CamabEnv env(c);
        const auto m = fit_alpha_E(c.alpha);
        const double e = ic_error(c, MetricKind::Wasserstein2);
        const auto& mu = env.abstract.true_means();
        std::vector<int> covered(mu.size(), 0);
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            Rng rng(seed, Stream::Base);
            const auto base = run_direct(env.base, 50 * env.base.size(), Selector::round_robin(), rng);
            const auto t = transfer_expected_values(env, base.stats, m);
            for (std::size_t j = 0; j < mu.size(); ++j) {
                const double k =
                    kappa(base.stats.pulls[t[j].source], m.mean_residual(env.base.reward_dist(t[j].source)), e, 0.1);
                covered[j] += std::abs(mu[j] - t[j].mu_hat) <= k;
            }
        }
        const int worst = *std::min_element(covered.begin(), covered.end());
        note(o, worst >= 176, fx.name + " min " + std::to_string(worst) + "/200");
    }
    return o;
}

Outcome texp_ordering() {
    Outcome o;
    const auto s6 = run_scenario(load_scenario("6"), 0, {{Algorithm::Ucb, Algorithm::TExp}, 0, 20, 0});
    note(o, final_cum(s6, "texp") <= final_cum(s6, "ucb"),
         "s6 texp " + f(final_cum(s6, "texp"), 2) + " <= ucb " + f(final_cum(s6, "ucb"), 2));
    const auto s7 = run_scenario(load_scenario("7"), 0, {{Algorithm::Ucb, Algorithm::TExp}, 0, 20, 0});
    note(o, final_cum(s7, "texp") >= final_cum(s7, "ucb"),
         "s7 texp " + f(final_cum(s7, "texp"), 2) + " >= ucb " + f(final_cum(s7, "ucb"), 2));
    const auto t0 = std::chrono::steady_clock::now();
    const auto adv = run_scenario(load_scenario("advertising"), 0,
                                  {{Algorithm::Ucb, Algorithm::TOpt, Algorithm::Imit, Algorithm::TExp}, 1000, 20, 0});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double ucb = final_cum(adv, "ucb");
    bool worst = true;
    std::string parts;
    for (const char* a : {"ucb", "topt", "imit", "texp"}) {
        worst = worst && ucb >= final_cum(adv, a);
        parts += std::string(" ") + a + "=" + f(final_cum(adv, a), 1);
    }
    note(o, secs < 300, "advertising " + f(secs, 1) + "s");
    note(o, worst, "advertising ucb worst:" + parts);
    return o;
}

Outcome determinism() {
    Outcome o;
    int same = 0;
    for (const auto& id : scenario_ids()) {
        const auto spec = load_scenario(id);
        std::ostringstream a, b;
        write_raw_csv(run_scenario(spec, 17, {{}, 0, 3, 1}), a);
        write_raw_csv(run_scenario(spec, 17, {{}, 0, 3, 0}), b);
        same += a.str() == b.str() && !a.str().empty();
    }
    note(o, same == static_cast<int>(scenario_ids().size()),
         std::to_string(same) + "/" + std::to_string(scenario_ids().size()) + " scenarios byte-identical");
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
        {"exact means", exact_means},
        {"IC errors", ic_errors},
        {"oracle equivalence", oracle_equivalence},
        {"gap bound and max preservation", gap_bound_and_lemma1},
        {"TOpt dichotomy", topt_dichotomy},
        {"IMIT unbiasedness and sub-linearity", imit_unbiased_and_slope},
        {"IMIT bound signs", prop4_prop5_signs},
        {"transfer coverage", lemma4_coverage},
        {"TExp ordering", texp_ordering},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = criteria[i].second();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += !out.pass;
        std::printf("Criterion %zu: %s %s (%.2fs) %s\n", i + 1, out.pass ? "PASS" : "FAIL", criteria[i].first, secs,
                    out.detail.c_str());
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
