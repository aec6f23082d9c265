#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "camab/abstraction.hpp"
#include "camab/error.hpp"
#include "camab/metrics.hpp"
#include "camab/model.hpp"
#include "camab/transfer.hpp"

namespace camab::io {

using nlohmann::json;

struct ModelFile {
    Scm scm;
    std::vector<Intervention> actions;  // from the optional "actions" array
};

inline json read_json(const std::filesystem::path& p) {
    std::ifstream is(p);
    if (!is) throw Error(Errc::IoError, "cannot open '" + p.string() + "'");
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        throw Error(Errc::ParseError, p.string() + ": " + e.what());
    }
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(Errc::IoError, "cannot open '" + p.string() + "' for writing");
    os << text;
    if (!os) throw Error(Errc::IoError, "write to '" + p.string() + "' failed");
}

// Actions are objects {variable: label}; labels are matched exactly against the domain.
inline json actions_to_json(const Scm& scm, const std::vector<Intervention>& actions) {
    json out = json::array();
    for (const auto& a : actions) {
        json o = json::object();
        for (const auto& [v, i] : a) o[v] = scm.domain(v)[i];
        out.push_back(o);
    }
    return out;
}

inline std::vector<Intervention> actions_from_json(const Scm& scm, const json& j) {
    std::vector<Intervention> out;
    for (const auto& o : j) {
        Intervention iv;
        for (const auto& [v, label] : o.items()) {
            const double x = label.get<double>();
            auto idx = scm.domain(v).index_of(x);
            if (!idx) throw Error(Errc::ValueOutOfDomain, detail::fmt_label(x) + " not in D[" + v + "]");
            iv.emplace(v, *idx);
        }
        out.push_back(std::move(iv));
    }
    return out;
}

inline json model_to_json(const Scm& scm, const std::vector<Intervention>& actions = {}) {
    json j;
    j["variables"] = json::array();
    for (const auto& v : scm.variables()) j["variables"].push_back({{"id", v.id}, {"domain", v.domain.labels()}});
    j["mechanisms"] = json::array();
    for (const auto& m : scm.mechanisms())
        j["mechanisms"].push_back({{"child", m.child}, {"parents", m.parents}, {"cpt", m.cpt}});
    j["reward"] = scm.reward();
    if (!actions.empty()) j["actions"] = actions_to_json(scm, actions);
    return j;
}

inline ModelFile model_from_json(const json& j) {
    try {
        std::vector<Variable> vars;
        for (const auto& v : j.at("variables"))
            vars.push_back({v.at("id").get<std::string>(), FiniteDomain(v.at("domain").get<std::vector<double>>())});
        std::vector<Mechanism> mechs;
        for (const auto& m : j.at("mechanisms"))
            mechs.push_back({m.at("child").get<std::string>(), m.value("parents", std::vector<std::string>{}),
                             m.at("cpt").get<Cpt>()});
        ModelFile f{Scm(std::move(vars), std::move(mechs), j.at("reward").get<std::string>()), {}};
        if (j.contains("actions")) f.actions = actions_from_json(f.scm, j.at("actions"));
        return f;
    } catch (const json::exception& e) {
        throw Error(Errc::ParseError, std::string("model: ") + e.what());
    }
}

inline json abstraction_to_json(const AbstractionData& d) {
    return {{"relevant", d.relevant}, {"var_map", d.var_map}, {"value_maps", d.value_maps}};
}

inline AbstractionData abstraction_from_json(const json& j) {
    try {
        return {j.at("relevant").get<std::vector<VarId>>(), j.at("var_map").get<std::map<VarId, VarId>>(),
                j.at("value_maps").get<std::map<VarId, ValueMap>>()};
    } catch (const json::exception& e) {
        throw Error(Errc::ParseError, std::string("abstraction: ") + e.what());
    }
}

inline Camab load_camab(const std::filesystem::path& base, const std::filesystem::path& abstract,
                        const std::filesystem::path& alpha) {
    ModelFile b = model_from_json(read_json(base));
    ModelFile a = model_from_json(read_json(abstract));
    validate_scm(b.scm);
    validate_scm(a.scm);
    if (b.actions.empty()) throw Error(Errc::EmptyInput, base.string() + " lists no actions");
    if (a.actions.empty()) throw Error(Errc::EmptyInput, abstract.string() + " lists no actions");
    Abstraction al(abstraction_from_json(read_json(alpha)), b.scm, a.scm);
    Camab c{std::move(b.scm), std::move(b.actions), std::move(a.scm), std::move(a.actions), std::move(al)};
    validate_camab(c);
    return c;
}

inline void save_camab(const Camab& c, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(Errc::IoError, "cannot create '" + dir.string() + "'");
    write_text(dir / "base.json", model_to_json(c.base, c.base_actions).dump(2) + "\n");
    write_text(dir / "abstract.json", model_to_json(c.abstract, c.abstract_actions).dump(2) + "\n");
    write_text(dir / "alpha.json", abstraction_to_json(c.alpha.data()).dump(2) + "\n");
}

inline json report_to_json(const AbstractionReport& r) {
    json j{{"metric", to_string(r.metric)}, {"ic_error", r.ic_error}, {"reward_discrepancy", r.reward_discrepancy}};
    j["per_action"] = json::array();
    for (const auto& a : r.per_action)
        j["per_action"].push_back({{"action", a.action}, {"ic", a.ic}, {"discrepancy", a.discrepancy}});
    return j;
}

inline json transfer_report_to_json(const TransferReport& r) {
    json j{{"algorithm", r.algorithm}, {"survivors", r.survivors}, {"adaptive_base", r.adaptive_base}};
    j["per_action"] = json::array();
    for (const auto& a : r.per_action)
        j["per_action"].push_back({{"action", a.action},
                                   {"mu_hat", a.mu_hat},
                                   {"kappa", std::isfinite(a.kappa) ? json(a.kappa) : json(nullptr)},
                                   {"pseudo_count", a.pseudo_count},
                                   {"eliminated", a.eliminated}});
    return j;
}

// Minimal reader for the CSV files written by emit_results (no quoting needed).
inline std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    if (!is) throw Error(Errc::IoError, "cannot open '" + p.string() + "'");
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(is, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

}  // namespace camab::io
