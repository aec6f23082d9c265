#pragma once

#include <string>
#include <vector>

#include "camab/abstraction.hpp"
#include "camab/error.hpp"
#include "camab/model.hpp"

// Every model used by the experiment registry, with matrices copied verbatim.
namespace camab::models {

inline Mechanism mech(VarId child, std::vector<VarId> parents, Cpt cpt) {
    return {std::move(child), std::move(parents), std::move(cpt)};
}

inline Variable var(VarId id, std::size_t n) { return {std::move(id), FiniteDomain::range(n)}; }

inline ValueMap identity_map(std::size_t n) {
    ValueMap m(n, std::vector<int>(n, 0));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

inline ValueMap swap_map() { return {{0, 1}, {1, 0}}; }

inline Intervention act(const VarId& v, std::size_t value) { return {{v, value}}; }

// ---- T -> M -> Y chain with binary T and M ----

inline const Cpt kChainFT = {{.8}, {.2}};
inline const Cpt kChainFM = {{.2, .8}, {.8, .2}};
inline const Cpt kChainFY = {{.7, .3}, {.3, .7}};
inline const Cpt kChainFYAbs = {{.38, .62}, {.62, .38}};  // f_Y f_M

inline Scm chain_base(FiniteDomain ydom = FiniteDomain::range(2), Cpt fy = kChainFY) {
    return Scm({var("T", 2), var("M", 2), {"Y", std::move(ydom)}},
               {mech("T", {}, kChainFT), mech("M", {"T"}, kChainFM), mech("Y", {"M"}, std::move(fy))}, "Y");
}

inline Scm chain_abstract(Cpt fy, FiniteDomain ydom = FiniteDomain::range(2)) {
    return Scm({var("T'", 2), {"Y'", std::move(ydom)}}, {mech("T'", {}, kChainFT), mech("Y'", {"T'"}, std::move(fy))},
               "Y'");
}

inline Camab chain_camab(Scm base, Scm abs, ValueMap t_map, ValueMap y_map) {
    AbstractionData d{{"T", "Y"}, {{"T", "T'"}, {"Y", "Y'"}}, {{"T'", std::move(t_map)}, {"Y'", std::move(y_map)}}};
    Abstraction alpha(std::move(d), base, abs);
    return {base, {act("T", 0), act("T", 1)}, abs, {act("T'", 0), act("T'", 1)}, std::move(alpha)};
}

// Binary chain, identity maps (Scenarios 1 and 4).
inline Camab counterexample1() {
    return chain_camab(chain_base(), chain_abstract(kChainFYAbs), identity_map(2), identity_map(2));
}

// Same models, anti-diagonal maps on T' and Y' (Scenario 2).
inline Camab counterexample1_swap() {
    return chain_camab(chain_base(), chain_abstract(kChainFYAbs), swap_map(), swap_map());
}

// Identity maps but f_Y' = f_Y, which breaks exactness.
inline Camab scenario3() {
    return chain_camab(chain_base(), chain_abstract(kChainFY), identity_map(2), identity_map(2));
}

// T -> Y with D[Y] = {1, 1.1, 1.2} merged onto {0, 1}.
inline Camab counterexample2() {
    Scm base({var("T", 2), {"Y", FiniteDomain({1.0, 1.1, 1.2})}},
             {mech("T", {}, kChainFT), mech("Y", {"T"}, {{.25, .45}, {.35, .1}, {.4, .45}})}, "Y");
    Scm abs = chain_abstract({{.6, .55}, {.4, .45}});
    AbstractionData d{{"T", "Y"}, {{"T", "T'"}, {"Y", "Y'"}}, {{"T'", identity_map(2)}, {"Y'", {{1, 1, 0}, {0, 0, 1}}}}};
    Abstraction alpha(std::move(d), base, abs);
    return {base, {act("T", 0), act("T", 1)}, abs, {act("T'", 0), act("T'", 1)}, std::move(alpha)};
}

// Ternary T in the base chain, binary T' in the abstraction.
inline Scm ternary_base() {
    return Scm({var("T", 3), var("M", 2), var("Y", 2)},
               {mech("T", {}, {{.7}, {.2}, {.1}}), mech("M", {"T"}, {{.2, .8, .7}, {.8, .2, .3}}),
                mech("Y", {"M"}, kChainFY)},
               "Y");
}

inline Scm ternary_abstract() { return chain_abstract({{.55, .45}, {.45, .55}}); }

inline const ValueMap kAlpha1T = {{1, 0, 0}, {0, 1, 1}};
inline const ValueMap kAlpha2T = {{0, 1, 0}, {1, 0, 1}};

inline Camab ternary_camab(const ValueMap& t_map, bool with_observational) {
    Scm base = ternary_base();
    Scm abs = ternary_abstract();
    AbstractionData d{{"T", "Y"}, {{"T", "T'"}, {"Y", "Y'"}}, {{"T'", t_map}, {"Y'", identity_map(2)}}};
    Abstraction alpha(std::move(d), base, abs);
    std::vector<Intervention> ia = {act("T", 0), act("T", 1), act("T", 2)};
    std::vector<Intervention> ib = {act("T'", 0), act("T'", 1)};
    if (with_observational) {
        ia.insert(ia.begin(), Intervention{});
        ib.insert(ib.begin(), Intervention{});
    }
    return {base, ia, abs, ib, std::move(alpha)};
}

// The three-to-two running example.
inline Camab example1() { return ternary_camab(kAlpha1T, false); }
inline Camab scenario5_alpha1() { return ternary_camab(kAlpha1T, true); }
inline Camab scenario5_alpha2() { return ternary_camab(kAlpha2T, true); }

// Ternary reward {0,1,2} on the binary chain; abstract reward labels configurable.
inline Camab ternary_reward(FiniteDomain abstract_ydom) {
    const Cpt fy = {{.6, .3}, {.3, .4}, {.1, .3}};
    // f_Y' = f_Y f_M
    Cpt fya(3, std::vector<double>(2, 0.0));
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 2; ++c)
            for (std::size_t k = 0; k < 2; ++k) fya[r][c] += fy[r][k] * kChainFM[k][c];
    return chain_camab(chain_base(FiniteDomain::range(3), fy), chain_abstract(fya, std::move(abstract_ydom)),
                       identity_map(2), identity_map(3));
}

inline Camab scenario6() { return ternary_reward(FiniteDomain::range(3)); }
inline Camab scenario7() { return ternary_reward(FiniteDomain({0.4, 0.5, 10.0})); }

inline Camab confounded_task(Scm base) {
    const Cpt fy = base.mechanism_of("Y")->cpt;
    const Cpt fu = base.mechanism_of("U")->cpt;
    Scm abs({var("U'", 2), var("X'", 2), var("Y'", 2)},
            {mech("U'", {}, fu), mech("X'", {}, {{.5}, {.5}}), mech("Y'", {"U'", "X'"}, fy)}, "Y'");
    AbstractionData d{{"U", "X", "Y"},
                      {{"U", "U'"}, {"X", "X'"}, {"Y", "Y'"}},
                      {{"U'", identity_map(2)}, {"X'", identity_map(2)}, {"Y'", identity_map(2)}}};
    Abstraction alpha(std::move(d), base, abs);
    return {base, {act("X", 0), act("X", 1)}, abs, {act("X'", 0), act("X'", 1)}, std::move(alpha)};
}

inline Camab task1() {
    Scm base({var("U", 2), var("X", 2), var("Y", 2)},
             {mech("U", {}, {{.3}, {.7}}), mech("X", {"U"}, {{1, 0}, {0, 1}}),
              mech("Y", {"U", "X"}, {{.9, .5, .1, .7}, {.1, .5, .9, .3}})},
             "Y");
    return confounded_task(std::move(base));
}

inline Camab task2() {
    Scm base({var("U", 2), var("Z", 2), var("X", 2), var("Y", 2)},
             {mech("U", {}, {{.2}, {.8}}), mech("Z", {}, {{.1}, {.9}}),
              mech("X", {"U", "Z"}, {{1, 0, 0, 1}, {0, 1, 1, 0}}),
              mech("Y", {"U", "X"}, {{.1, .9, .5, .1}, {.9, .1, .5, .9}})},
             "Y");
    return confounded_task(std::move(base));
}

// Email campaign: product Pr, purpose Pu, subject length SL, body template BT,
// send time ST, click CK.
inline Camab advertising() {
    const std::vector<double> bt0 = {.2, .1, .5, .8, .2, .1, .5, .8, .4, .3, .4, .5};
    const std::vector<double> bt1 = {.8, .9, .5, .2, .8, .9, .5, .2, .6, .7, .6, .5};
    const std::vector<double> ck0 = {3, 4, 5, 4, 5, 6, 4, 5, 6, 5, 6, 7};
    std::vector<double> c0, c1;
    for (double x : ck0) {
        c0.push_back(x / 9.0);
        c1.push_back((9.0 - x) / 9.0);
    }
    Scm base({var("Pr", 3), var("Pu", 4), var("SL", 2), var("BT", 2), var("ST", 3), var("CK", 2)},
             {mech("Pr", {}, {{.2}, {.2}, {.6}}), mech("Pu", {}, {{.05}, {.6}, {.3}, {.05}}),
              mech("SL", {"Pu"}, {{.3, .3, .7, .7}, {.7, .7, .3, .3}}), mech("BT", {"Pr", "Pu"}, {bt0, bt1}),
              mech("ST", {}, {{.5}, {.2}, {.3}}), mech("CK", {"SL", "BT", "ST"}, {c0, c1})},
             "CK");

    Scm abs({var("Pr'", 2), var("Pu'", 2), var("SL'", 2), var("BT'", 2), var("CK'", 2)},
            {mech("Pr'", {}, {{.8}, {.2}}), mech("Pu'", {}, {{.65}, {.35}}),
             mech("SL'", {"Pu'"}, {{.3, .7}, {.7, .3}}),
             mech("BT'", {"Pr'", "Pu'"}, {{.3, .5, .15, .65}, {.7, .5, .85, .35}}),
             mech("CK'", {"SL'", "BT'"}, {{5 / 9.0, 4 / 9.0, 4 / 9.0, 3 / 9.0}, {4 / 9.0, 5 / 9.0, 5 / 9.0, 6 / 9.0}})},
            "CK'");

    AbstractionData d{{"Pr", "Pu", "SL", "BT", "CK"},
                      {{"Pr", "Pr'"}, {"Pu", "Pu'"}, {"SL", "SL'"}, {"BT", "BT'"}, {"CK", "CK'"}},
                      {{"Pr'", {{1, 0, 1}, {0, 1, 0}}},
                       {"Pu'", {{1, 1, 0, 0}, {0, 0, 1, 1}}},
                       {"SL'", identity_map(2)},
                       {"BT'", identity_map(2)},
                       {"CK'", identity_map(2)}}};
    Abstraction alpha(std::move(d), base, abs);
    std::vector<Intervention> ia = {act("Pu", 0), act("Pu", 1), act("Pu", 2), act("Pu", 3), act("Pr", 0), act("Pr", 1)};
    std::vector<Intervention> ib = {act("Pu'", 0), act("Pu'", 1), act("Pr'", 0), act("Pr'", 1)};
    return {base, ia, abs, ib, std::move(alpha)};
}

struct Fixture {
    std::string name;
    Camab (*make)();
};

inline const std::vector<Fixture>& fixtures() {
    static const std::vector<Fixture> all = {
        {"counterexample1", counterexample1},   {"counterexample1-swap", counterexample1_swap},
        {"counterexample2", counterexample2},   {"example1", example1},
        {"scenario3", scenario3},               {"scenario5-alpha1", scenario5_alpha1},
        {"scenario5-alpha2", scenario5_alpha2}, {"scenario6", scenario6},
        {"scenario7", scenario7},               {"task1", task1},
        {"task2", task2},                       {"advertising", advertising},
    };
    return all;
}

inline Camab load_fixture(const std::string& name) {
    for (const auto& f : fixtures())
        if (f.name == name) return f.make();
    throw Error(Errc::UnknownScenario, "unknown model '" + name + "'");
}

}  // namespace camab::models
