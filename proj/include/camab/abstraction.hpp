#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "camab/error.hpp"
#include "camab/model.hpp"

namespace camab {

// |D[X']| x |prod D[preimage]| 0/1 matrix
using ValueMap = std::vector<std::vector<int>>;

struct AbstractionData {
    std::vector<VarId> relevant;
    std::map<VarId, VarId> var_map;
    std::map<VarId, ValueMap> value_maps;
};

// An alpha-abstraction bound to the domains of its base and abstract models.
class Abstraction {
public:
    Abstraction() = default;
    Abstraction(AbstractionData data, const Scm& base, const Scm& abstract) : data_(std::move(data)) {
        for (const auto& v : data_.relevant) {
            base_domains_.emplace(v, base.domain(v));
            base_order_.emplace(v, base.require_index(v));
        }
        for (const auto& v : abstract.variables()) abstract_domains_.emplace(v.id, v.domain);
        for (const auto& [b, a] : data_.var_map) {
            if (!base_domains_.count(b)) throw Error(Errc::VariableNotRelevant, "var_map key '" + b + "' is not in V");
            if (!abstract_domains_.count(a)) throw Error(Errc::UnknownVariable, "var_map image '" + a + "' not in abstract model");
            preimage_[a].push_back(b);
        }
        for (const auto& v : data_.relevant)
            if (!data_.var_map.count(v)) throw Error(Errc::ShapeMismatch, "relevant variable '" + v + "' has no image");
        for (auto& [a, pre] : preimage_)
            std::sort(pre.begin(), pre.end(),
                      [&](const VarId& x, const VarId& y) { return base_order_.at(x) < base_order_.at(y); });
        for (const auto& [a, pre] : preimage_) {
            auto it = data_.value_maps.find(a);
            if (it == data_.value_maps.end()) throw Error(Errc::ShapeMismatch, "no value map for '" + a + "'");
            std::size_t cols = 1;
            for (const auto& b : pre) cols *= base_domains_.at(b).size();
            const ValueMap& m = it->second;
            if (m.size() != abstract_domains_.at(a).size())
                throw Error(Errc::ShapeMismatch, "value map of '" + a + "' has " + std::to_string(m.size()) +
                                                     " rows, expected " + std::to_string(abstract_domains_.at(a).size()));
            for (const auto& row : m)
                if (row.size() != cols)
                    throw Error(Errc::ShapeMismatch, "value map of '" + a + "' has a row of length " +
                                                         std::to_string(row.size()) + ", expected " + std::to_string(cols));
        }
        for (const auto& [a, m] : data_.value_maps)
            if (!preimage_.count(a)) throw Error(Errc::InvalidValueMap, "value map for '" + a + "' which has no preimage");
        base_reward_ = base.reward();
        abstract_reward_ = abstract.reward();
    }

    const AbstractionData& data() const noexcept { return data_; }
    const VarId& base_reward() const noexcept { return base_reward_; }
    const VarId& abstract_reward() const noexcept { return abstract_reward_; }

    bool is_relevant(const VarId& v) const { return base_domains_.count(v) > 0; }

    const std::vector<VarId>& preimage(const VarId& abstract_var) const {
        auto it = preimage_.find(abstract_var);
        if (it == preimage_.end()) throw Error(Errc::UnknownVariable, "abstract variable '" + abstract_var + "' has no preimage");
        return it->second;
    }

    const VarId& image(const VarId& base_var) const {
        auto it = data_.var_map.find(base_var);
        if (it == data_.var_map.end()) throw Error(Errc::VariableNotRelevant, "'" + base_var + "' is not in V");
        return it->second;
    }

    // Row holding the 1 in the given column; throws if the column is not one-hot.
    std::size_t map_column(const VarId& abstract_var, std::size_t column) const {
        const ValueMap& m = data_.value_maps.at(abstract_var);
        std::size_t hit = m.size();
        for (std::size_t r = 0; r < m.size(); ++r) {
            const int x = m[r].at(column);
            if (x == 1) {
                if (hit != m.size()) throw Error(Errc::InvalidValueMap, "column " + std::to_string(column) + " of '" + abstract_var + "' has several 1s");
                hit = r;
            } else if (x != 0) {
                throw Error(Errc::InvalidValueMap, "value map of '" + abstract_var + "' has a non 0/1 entry");
            }
        }
        if (hit == m.size()) throw Error(Errc::InvalidValueMap, "column " + std::to_string(column) + " of '" + abstract_var + "' has no 1");
        return hit;
    }

    double abstract_value(const VarId& base_var, double value) const {
        auto it = base_domains_.find(base_var);
        if (it == base_domains_.end()) throw Error(Errc::VariableNotRelevant, "'" + base_var + "' is not in V");
        auto idx = it->second.index_of(value);
        if (!idx) throw Error(Errc::ValueOutOfDomain, detail::fmt_label(value) + " not in D[" + base_var + "]");
        const VarId& a = image(base_var);
        if (preimage(a).size() != 1)
            throw Error(Errc::InvalidArgument, "'" + a + "' clusters several base variables; map a full tuple instead");
        return abstract_domains_.at(a)[map_column(a, *idx)];
    }

    Intervention abstract_intervention(const Intervention& iv) const {
        std::map<VarId, std::size_t> out;
        std::set<VarId> done;
        for (const auto& [b, value] : iv) {
            if (!is_relevant(b)) throw Error(Errc::VariableNotRelevant, "intervention on '" + b + "' which is not in V");
            const VarId& a = image(b);
            if (!done.insert(a).second) continue;
            std::size_t col = 0;
            for (const auto& p : preimage(a)) {
                auto hit = iv.find(p);
                if (hit == iv.end())
                    throw Error(Errc::UnmappedAction, "intervention sets '" + b + "' but not '" + p + "', both mapped to '" + a + "'");
                const std::size_t card = base_domains_.at(p).size();
                if (hit->second >= card) throw Error(Errc::ValueOutOfDomain, "value index outside D[" + p + "]");
                col = col * card + hit->second;
            }
            out.emplace(a, map_column(a, col));
        }
        return out;
    }

    // base reward value index -> abstract reward value index
    std::vector<std::size_t> reward_index_map() const {
        const auto& d = base_domains_.at(base_reward_);
        std::vector<std::size_t> out(d.size());
        for (std::size_t j = 0; j < d.size(); ++j) out[j] = map_column(abstract_reward_, j);
        return out;
    }

    DiscreteDistribution pushforward(const DiscreteDistribution& d) const {
        if (!(d.support == base_domains_.at(base_reward_)))
            throw Error(Errc::SupportMismatch, "distribution support is not D[" + base_reward_ + "]");
        const auto idx = reward_index_map();
        const FiniteDomain& target = abstract_domains_.at(abstract_reward_);
        std::vector<double> probs(target.size(), 0.0);
        for (std::size_t j = 0; j < idx.size(); ++j) probs[idx[j]] += d.probs[j];
        return DiscreteDistribution(target, std::move(probs));
    }

    const FiniteDomain& base_domain(const VarId& v) const { return base_domains_.at(v); }
    const FiniteDomain& abstract_domain(const VarId& v) const { return abstract_domains_.at(v); }

    // One-hot columns, surjective maps, target agreement.
    void validate_maps(bool check_rows) const {
        for (const auto& [a, d] : abstract_domains_)
            if (!preimage_.count(a)) throw Error(Errc::InvalidValueMap, "abstract variable '" + a + "' has no preimage in V");
        for (const auto& [a, m] : data_.value_maps) {
            std::vector<bool> hit(m.size(), false);
            for (std::size_t c = 0; c < (m.empty() ? 0 : m[0].size()); ++c) hit[map_column(a, c)] = true;
            if (!check_rows) continue;
            for (std::size_t r = 0; r < hit.size(); ++r)
                if (!hit[r]) throw Error(Errc::InvalidValueMap, "value " + std::to_string(r) + " of '" + a + "' has no preimage");
        }
    }

    void validate_target() const {
        auto it = data_.var_map.find(base_reward_);
        if (it == data_.var_map.end())
            throw Error(Errc::TargetMismatch, "base reward '" + base_reward_ + "' is not a relevant variable");
        if (it->second != abstract_reward_)
            throw Error(Errc::TargetMismatch, "m(" + base_reward_ + ") = " + it->second + ", expected " + abstract_reward_);
        if (preimage(abstract_reward_).size() != 1)
            throw Error(Errc::TargetMismatch, "abstract reward '" + abstract_reward_ + "' clusters several base variables");
    }

private:
    AbstractionData data_;
    std::map<VarId, FiniteDomain> base_domains_;
    std::map<VarId, std::size_t> base_order_;
    std::map<VarId, FiniteDomain> abstract_domains_;
    std::map<VarId, std::vector<VarId>> preimage_;
    VarId base_reward_;
    VarId abstract_reward_;
};

struct Camab {
    Scm base;
    std::vector<Intervention> base_actions;
    Scm abstract;
    std::vector<Intervention> abstract_actions;
    Abstraction alpha;
};

inline std::size_t find_action(const std::vector<Intervention>& actions, const Intervention& iv) {
    auto it = std::find(actions.begin(), actions.end(), iv);
    if (it == actions.end()) throw Error(Errc::UnknownAction, "action not in the action set");
    return static_cast<std::size_t>(it - actions.begin());
}

// Index in I' of alpha(a) for every a in I.
inline std::vector<std::size_t> action_map(const Camab& c) {
    std::vector<std::size_t> out;
    out.reserve(c.base_actions.size());
    for (const auto& a : c.base_actions) {
        const Intervention img = c.alpha.abstract_intervention(a);
        auto it = std::find(c.abstract_actions.begin(), c.abstract_actions.end(), img);
        if (it == c.abstract_actions.end())
            throw Error(Errc::UnmappedAction, "image of " + describe(c.base, a) + " is not in I'");
        out.push_back(static_cast<std::size_t>(it - c.abstract_actions.begin()));
    }
    return out;
}

inline std::vector<std::size_t> preimage_actions(const Camab& c, std::size_t abstract_action) {
    if (abstract_action >= c.abstract_actions.size())
        throw Error(Errc::UnknownAction, "abstract action index " + std::to_string(abstract_action) + " out of range");
    const auto map = action_map(c);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < map.size(); ++i)
        if (map[i] == abstract_action) out.push_back(i);
    return out;
}

inline void validate_camab(const Camab& c) {
    validate_scm(c.base);
    validate_scm(c.abstract);
    if (c.base_actions.empty() || c.abstract_actions.empty()) throw Error(Errc::EmptyInput, "empty action set");
    c.alpha.validate_maps(false);
    c.alpha.validate_target();
    for (const auto& a : c.base_actions)
        for (const auto& [v, value] : a) {
            if (!c.alpha.is_relevant(v))
                throw Error(Errc::ActionOutsideRelevantVars, describe(c.base, a) + " targets '" + v + "' outside V");
            if (value >= c.base.domain(v).size()) throw Error(Errc::ValueOutOfDomain, "action value outside D[" + v + "]");
        }
    const auto map = action_map(c);
    std::vector<bool> covered(c.abstract_actions.size(), false);
    for (std::size_t m : map) covered[m] = true;
    for (std::size_t j = 0; j < covered.size(); ++j)
        if (!covered[j])
            throw Error(Errc::OrphanAbstractAction, describe(c.abstract, c.abstract_actions[j]) + " has no preimage in I");
    c.alpha.validate_maps(true);
}

}  // namespace camab
