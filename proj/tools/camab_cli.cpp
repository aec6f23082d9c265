#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "camab/camab.hpp"

namespace {

using namespace camab;

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<Algorithm> parse_algorithms(const std::string& arg, const ScenarioSpec& spec) {
    if (arg.empty() || arg == "all") return spec.algorithms;
    std::vector<Algorithm> out;
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_algorithm(item));
    return out;
}

Camab load_model_args(const std::vector<std::string>& files, const std::string& builtin) {
    if (!builtin.empty()) return models::load_fixture(builtin);
    if (files.size() != 3) throw ConfigError("expected three files: base.json abstract.json alpha.json");
    return io::load_camab(files[0], files[1], files[2]);
}

void print_warnings(const Camab& c) {
    for (const auto* scm : {&c.base, &c.abstract})
        for (const auto& w : scm_warnings(*scm)) std::cerr << "warning: " << w << "\n";
}

int cmd_list(bool as_json) {
    io::json out = io::json::array();
    for (const auto& id : scenario_ids()) {
        const ScenarioSpec s = load_scenario(id);
        const Camab& c = s.variants.front().camab;
        std::vector<std::string> algs;
        for (auto a : s.algorithms) algs.push_back(to_string(a));
        out.push_back({{"id", s.id},
                       {"title", s.title},
                       {"base_variables", c.base.variables().size()},
                       {"abstract_variables", c.abstract.variables().size()},
                       {"base_actions", c.base_actions.size()},
                       {"abstract_actions", c.abstract_actions.size()},
                       {"abstractions", s.variants.size()},
                       {"algorithms", algs},
                       {"horizon", s.horizon},
                       {"repeats", s.repeats},
                       {"n_steps", s.n_steps}});
    }
    if (as_json) {
        std::cout << out.dump(2) << "\n";
        return 0;
    }
    std::printf("%-12s %-6s %-6s %-8s %-24s %s\n", "id", "|V|", "|V'|", "|I|/|I'|", "algorithms", "horizon x repeats");
    for (const auto& s : out) {
        std::string algs;
        for (const auto& a : s["algorithms"]) algs += (algs.empty() ? "" : ",") + a.get<std::string>();
        const std::string acts =
            std::to_string(s["base_actions"].get<int>()) + "/" + std::to_string(s["abstract_actions"].get<int>());
        std::printf("%-12s %-6d %-6d %-8s %-24s %d x %d\n", s["id"].get<std::string>().c_str(),
                    s["base_variables"].get<int>(), s["abstract_variables"].get<int>(), acts.c_str(), algs.c_str(),
                    s["horizon"].get<int>(), s["repeats"].get<int>());
    }
    return 0;
}

int cmd_audit(const Camab& c, MetricKind metric, bool as_json) {
    print_warnings(c);
    const AbstractionReport rep = abstraction_report(c, metric);
    io::json j = io::report_to_json(rep);
    j["bound_w2"] = expected_reward_gap_bound(c, MetricKind::Wasserstein2);
    try {
        j["lemma1"] = max_preservation_sufficient(c);
    } catch (const Error& e) {
        if (e.code() != Errc::AllGapsZero) throw;
        j["lemma1"] = nullptr;
        j["lemma1_note"] = e.what();
    }
    try {
        j["algebraic_condition"] = algebraic_max_condition(c);
    } catch (const Error& e) {
        if (e.code() != Errc::NonZeroICError) throw;
        j["algebraic_condition"] = nullptr;
        j["algebraic_note"] = e.what();
    }
    io::json clusters = io::json::array();
    for (std::size_t k = 0; k < c.abstract_actions.size(); ++k)
        clusters.push_back({{"action", describe(c.abstract, c.abstract_actions[k])}, {"K", preimage_actions(c, k).size()}});
    j["clusters"] = clusters;
    if (as_json) {
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::printf("metric              %s\n", to_string(metric));
    std::printf("ic_error            %.12g\n", rep.ic_error);
    std::printf("reward_discrepancy  %.12g\n", rep.reward_discrepancy);
    std::printf("bound e+s (w2)      %.12g\n", j["bound_w2"].get<double>());
    std::printf("lemma1 sufficient   %s\n",
                j["lemma1"].is_null() ? "n/a (all gaps zero)" : (j["lemma1"].get<bool>() ? "true" : "false"));
    std::printf("algebraic condition %s\n", j["algebraic_condition"].is_null()
                                                 ? "n/a (NonZeroICError: IC error is not zero)"
                                                 : (j["algebraic_condition"].get<bool>() ? "true" : "false"));
    std::printf("per action:\n");
    for (const auto& a : rep.per_action)
        std::printf("  %-16s ic %.12g  discrepancy %.12g\n", a.action.c_str(), a.ic, a.discrepancy);
    std::printf("cluster sizes:\n");
    for (const auto& k : clusters)
        std::printf("  %-16s K=%d\n", k["action"].get<std::string>().c_str(), k["K"].get<int>());
    return 0;
}

struct RunArgs {
    std::string scenario;
    std::vector<std::string> model;
    std::string builtin;
    std::string alg;
    std::size_t T = 0;
    std::size_t repeats = 20;
    bool repeats_set = false;
    std::uint64_t seed = 0;
    std::string out = "results";
    double delta = 0.05;
    double c = 2.0;
    unsigned threads = 0;
};

int cmd_run(const RunArgs& a) {
    ScenarioSpec spec;
    if (!a.scenario.empty()) {
        spec = load_scenario(a.scenario);
    } else {
        Camab c = load_model_args(a.model, a.builtin);
        print_warnings(c);
        spec.id = a.builtin.empty() ? "custom" : a.builtin;
        spec.variants = {{"", std::move(c)}};
        spec.algorithms = kAllAlgorithms;
    }
    spec.delta = a.delta;
    spec.c_ucb = a.c;
    RunOptions opt;
    opt.algorithms = parse_algorithms(a.alg, spec);
    opt.horizon = a.T;
    opt.repeats = a.repeats_set ? a.repeats : spec.repeats;
    opt.threads = a.threads;

    std::string out = a.out;
    if (const char* env = std::getenv("CAMAB_OUT_DIR"); env && *env) out = env;

    const ScenarioResult res = run_scenario(spec, a.seed, opt);
    const EmittedFiles files = emit_results(res, out);

    const std::size_t T = opt.horizon ? opt.horizon : spec.horizon;
    std::printf("scenario %s  T=%zu  repeats=%zu  seed=%llu\n", spec.id.c_str(), T, opt.repeats,
                static_cast<unsigned long long>(a.seed));
    if (!spec.n_steps.empty()) {
        std::printf("mean simple regret by n_steps\n%-10s", "algorithm");
        for (auto n : spec.n_steps)
            if (n <= T) std::printf(" %10zu", n);
        std::printf("\n");
        std::vector<std::string> seen;
        for (const auto& row : res.aggregate) {
            if (std::find(seen.begin(), seen.end(), row.algorithm) != seen.end()) continue;
            seen.push_back(row.algorithm);
            std::printf("%-10s", row.algorithm.c_str());
            for (auto n : spec.n_steps)
                for (const auto& r2 : res.aggregate)
                    if (n <= T && r2.algorithm == row.algorithm && r2.t == n) std::printf(" %10.4f", r2.mean_simple);
            std::printf("\n");
        }
    }
    std::printf("%-14s %14s %14s %14s\n", "algorithm", "mean_cum", "std_cum", "mean_simple");
    for (std::size_t i = 0; i < res.aggregate.size(); ++i) {
        const auto& r = res.aggregate[i];
        const bool last = i + 1 == res.aggregate.size() || res.aggregate[i + 1].algorithm != r.algorithm;
        if (last) std::printf("%-14s %14.6g %14.6g %14.6g\n", r.algorithm.c_str(), r.mean_cum, r.std_cum, r.mean_simple);
    }
    std::printf("wrote %s\nwrote %s\n", files.raw.string().c_str(), files.aggregate.string().c_str());
    return 0;
}

int cmd_export(const std::string& scenario, const std::string& builtin, const std::string& out) {
    if (!scenario.empty()) {
        const ScenarioSpec s = load_scenario(scenario);
        for (const auto& v : s.variants) {
            const auto dir = std::filesystem::path(out) / (v.label.empty() ? s.id : s.id + "-" + v.label);
            io::save_camab(v.camab, dir);
            std::printf("wrote %s\n", dir.string().c_str());
        }
        return 0;
    }
    if (builtin.empty()) throw ConfigError("export needs --scenario or --builtin");
    const auto dir = std::filesystem::path(out) / builtin;
    io::save_camab(models::load_fixture(builtin), dir);
    std::printf("wrote %s\n", dir.string().c_str());
    return 0;
}

bool is_config_error(Errc e) {
    switch (e) {
        case Errc::IoError:
        case Errc::NonZeroICError:
        case Errc::AllGapsZero:
        case Errc::UncoveredAbstractAction:
        case Errc::ZeroCount:
            return false;
        default:
            return true;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Causally abstracted multi-armed bandits"};
    app.require_subcommand(1);

    auto* list = app.add_subcommand("list", "List registered scenarios");
    bool list_json = false;
    list->add_flag("--json", list_json, "Machine-readable output");

    auto* audit = app.add_subcommand("audit", "Abstraction quality report for base.json abstract.json alpha.json");
    std::vector<std::string> audit_files;
    std::string audit_builtin, metric_name = "jsd";
    bool audit_json = false;
    audit->add_option("files", audit_files, "base.json abstract.json alpha.json")->expected(0, 3);
    audit->add_option("--builtin", audit_builtin, "Audit a built-in model instead of files");
    audit->add_option("--metric", metric_name, "jsd or w2")->check(CLI::IsMember({"jsd", "w2"}));
    audit->add_flag("--json", audit_json, "Machine-readable output");

    auto* run = app.add_subcommand("run", "Run a scenario or model and write CSV results");
    RunArgs ra;
    auto* opt_scn = run->add_option("--scenario", ra.scenario, "Registry scenario id");
    auto* opt_model = run->add_option("--model", ra.model, "base.json abstract.json alpha.json")->expected(3);
    run->add_option("--builtin", ra.builtin, "Run a built-in model");
    opt_scn->excludes(opt_model);
    run->add_option("--alg", ra.alg, "ucb|topt|imit|texp|rtrans|all, comma separated");
    run->add_option("--T", ra.T, "Horizon (default: scenario horizon)");
    auto* rep = run->add_option("--repeats", ra.repeats, "Number of seeds");
    run->add_option("--seed", ra.seed, "Base seed");
    run->add_option("--out", ra.out, "Output directory (CAMAB_OUT_DIR overrides)");
    run->add_option("--delta", ra.delta, "Confidence level for elimination");
    run->add_option("--c", ra.c, "UCB exploration constant");
    run->add_option("--threads", ra.threads, "Worker threads (0: all cores)");

    auto* exp = app.add_subcommand("export", "Write registry models as JSON");
    std::string exp_scenario, exp_builtin, exp_out = "models";
    exp->add_option("--scenario", exp_scenario, "Registry scenario id");
    exp->add_option("--builtin", exp_builtin, "Built-in model name");
    exp->add_option("--out", exp_out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    }

    try {
        if (*list) return cmd_list(list_json);
        if (*audit) return cmd_audit(load_model_args(audit_files, audit_builtin), parse_metric(metric_name), audit_json);
        if (*run) {
            ra.repeats_set = rep->count() > 0;
            if (ra.repeats_set && ra.repeats == 0) throw ConfigError("--repeats must be at least 1");
            if (!(ra.delta > 0.0 && ra.delta < 1.0)) throw ConfigError("--delta must lie in (0,1)");
            if (!(ra.c > 0.0)) throw ConfigError("--c must be positive");
            if (ra.scenario.empty() && ra.model.empty() && ra.builtin.empty())
                throw ConfigError("run needs --scenario, --model or --builtin");
            if (!ra.scenario.empty()) load_scenario(ra.scenario);
            if (!ra.alg.empty() && ra.alg != "all") {
                ScenarioSpec dummy;
                parse_algorithms(ra.alg, dummy);
            }
            if (ra.model.size() == 3 || !ra.builtin.empty()) load_model_args(ra.model, ra.builtin);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return is_config_error(e.code()) ? kConfigError : kRuntimeError;
    }

    try {
        if (*run) return cmd_run(ra);
        if (*exp) return cmd_export(exp_scenario, exp_builtin, exp_out);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return 0;
}
