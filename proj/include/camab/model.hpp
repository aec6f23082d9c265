#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "camab/error.hpp"
#include "camab/rng.hpp"

namespace camab {

using VarId = std::string;

inline constexpr double kStochasticTol = 1e-12;

// Ordered, strictly increasing set of real labels.
class FiniteDomain {
public:
    FiniteDomain() = default;
    explicit FiniteDomain(std::vector<double> labels) : labels_(std::move(labels)) {
        if (labels_.empty()) throw Error(Errc::InvalidDomain, "domain is empty");
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            if (!std::isfinite(labels_[i]))
                throw Error(Errc::InvalidDomain, "domain label is not finite");
            if (i > 0 && !(labels_[i - 1] < labels_[i]))
                throw Error(Errc::InvalidDomain, "domain labels must be strictly increasing");
        }
    }

    // {0, 1, ..., n-1}
    static FiniteDomain range(std::size_t n) {
        std::vector<double> l(n);
        for (std::size_t i = 0; i < n; ++i) l[i] = static_cast<double>(i);
        return FiniteDomain(std::move(l));
    }

    std::size_t size() const noexcept { return labels_.size(); }
    double operator[](std::size_t i) const { return labels_.at(i); }
    const std::vector<double>& labels() const noexcept { return labels_; }

    std::optional<std::size_t> index_of(double label) const {
        auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
        if (it == labels_.end() || *it != label) return std::nullopt;
        return static_cast<std::size_t>(it - labels_.begin());
    }

    bool operator==(const FiniteDomain& o) const { return labels_ == o.labels_; }

private:
    std::vector<double> labels_;
};

struct Variable {
    VarId id;
    FiniteDomain domain;
};

// rows = child values, columns = parent assignments (first parent slowest)
using Cpt = std::vector<std::vector<double>>;

struct Mechanism {
    VarId child;
    std::vector<VarId> parents;
    Cpt cpt;
};

// variable id -> value index; the empty map is the observational action
using Intervention = std::map<VarId, std::size_t>;

struct DiscreteDistribution {
    FiniteDomain support;
    std::vector<double> probs;

    DiscreteDistribution() = default;
    DiscreteDistribution(FiniteDomain s, std::vector<double> p) : support(std::move(s)), probs(std::move(p)) {
        if (probs.size() != support.size())
            throw Error(Errc::ShapeMismatch, "distribution length does not match its support");
        double total = 0.0;
        for (double q : probs) {
            if (!(q >= 0.0)) throw Error(Errc::InvalidArgument, "negative probability");
            total += q;
        }
        if (std::abs(total - 1.0) > kStochasticTol)
            throw Error(Errc::InvalidArgument, "probabilities do not sum to one");
    }

    double mean() const {
        double m = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) m += support[i] * probs[i];
        return m;
    }

    // inverse-CDF draw from a single uniform variate
    std::size_t sample_index(double u) const {
        double acc = 0.0;
        std::size_t last = 0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            if (probs[i] <= 0.0) continue;
            acc += probs[i];
            last = i;
            if (u < acc) return i;
        }
        return last;
    }
};

class Scm {
public:
    Scm() = default;
    Scm(std::vector<Variable> variables, std::vector<Mechanism> mechanisms, VarId reward)
        : variables_(std::move(variables)), mechanisms_(std::move(mechanisms)), reward_(std::move(reward)) {
        for (std::size_t i = 0; i < variables_.size(); ++i) index_.emplace(variables_[i].id, i);
    }

    const std::vector<Variable>& variables() const noexcept { return variables_; }
    const std::vector<Mechanism>& mechanisms() const noexcept { return mechanisms_; }
    const VarId& reward() const noexcept { return reward_; }

    std::optional<std::size_t> index_of(const VarId& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t require_index(const VarId& id) const {
        auto i = index_of(id);
        if (!i) throw Error(Errc::UnknownVariable, "unknown variable '" + id + "'");
        return *i;
    }

    const FiniteDomain& domain(const VarId& id) const { return variables_[require_index(id)].domain; }
    const FiniteDomain& reward_domain() const { return domain(reward_); }

    const Mechanism* mechanism_of(const VarId& id) const {
        for (const auto& m : mechanisms_)
            if (m.child == id) return &m;
        return nullptr;
    }

    Mechanism& mutable_mechanism(const VarId& id) {
        for (auto& m : mechanisms_)
            if (m.child == id) return m;
        throw Error(Errc::MissingMechanism, "no mechanism for '" + id + "'");
    }

private:
    std::vector<Variable> variables_;
    std::vector<Mechanism> mechanisms_;
    VarId reward_;
    std::unordered_map<VarId, std::size_t> index_;
};

namespace detail {

inline std::string fmt_label(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

// Index-based view of a validated model: parent indices, strides, topological order.
struct Compiled {
    struct Node {
        std::size_t card = 0;
        std::vector<std::size_t> parents;
        std::vector<std::size_t> strides;
        const Cpt* cpt = nullptr;
        std::optional<std::size_t> forced;
    };
    std::vector<Node> nodes;
    std::vector<std::size_t> order;

    std::size_t column(const Node& n, const std::vector<std::size_t>& assign) const {
        std::size_t col = 0;
        for (std::size_t k = 0; k < n.parents.size(); ++k) col += assign[n.parents[k]] * n.strides[k];
        return col;
    }

    double prob(std::size_t v, std::size_t value, const std::vector<std::size_t>& assign) const {
        const Node& n = nodes[v];
        if (n.forced) return value == *n.forced ? 1.0 : 0.0;
        return (*n.cpt)[value][column(n, assign)];
    }
};

inline std::vector<std::size_t> topo_order(const Scm& scm) {
    const std::size_t n = scm.variables().size();
    std::vector<std::vector<std::size_t>> children(n);
    std::vector<std::size_t> indeg(n, 0);
    for (const auto& m : scm.mechanisms()) {
        const std::size_t c = scm.require_index(m.child);
        for (const auto& p : m.parents) {
            children[scm.require_index(p)].push_back(c);
            ++indeg[c];
        }
    }
    std::vector<std::size_t> order;
    std::vector<std::size_t> ready;
    for (std::size_t i = n; i-- > 0;)
        if (indeg[i] == 0) ready.push_back(i);
    while (!ready.empty()) {
        // pop the lowest declared index first for a stable order
        auto it = std::min_element(ready.begin(), ready.end());
        const std::size_t v = *it;
        ready.erase(it);
        order.push_back(v);
        for (std::size_t c : children[v])
            if (--indeg[c] == 0) ready.push_back(c);
    }
    if (order.size() != n) throw Error(Errc::CyclicGraph, "parent graph contains a cycle");
    return order;
}

inline Compiled compile(const Scm& scm, const Intervention& iv) {
    Compiled c;
    const auto& vars = scm.variables();
    c.nodes.resize(vars.size());
    for (std::size_t i = 0; i < vars.size(); ++i) {
        const Mechanism* m = scm.mechanism_of(vars[i].id);
        if (!m) throw Error(Errc::MissingMechanism, "no mechanism for '" + vars[i].id + "'");
        auto& node = c.nodes[i];
        node.card = vars[i].domain.size();
        node.cpt = &m->cpt;
        for (const auto& p : m->parents) node.parents.push_back(scm.require_index(p));
        node.strides.assign(node.parents.size(), 1);
        for (std::size_t k = node.parents.size(); k-- > 1;)
            node.strides[k - 1] = node.strides[k] * vars[node.parents[k]].domain.size();
    }
    for (const auto& [id, value] : iv) {
        const std::size_t i = scm.require_index(id);
        if (value >= c.nodes[i].card)
            throw Error(Errc::ValueOutOfDomain, "value index " + std::to_string(value) + " outside D[" + id + "]");
        c.nodes[i].forced = value;
        c.nodes[i].parents.clear();
        c.nodes[i].strides.clear();
    }
    c.order = topo_order(scm);
    return c;
}

}  // namespace detail

inline std::string describe(const Scm& scm, const Intervention& iv) {
    if (iv.empty()) return "∅";
    std::string s = "do(";
    bool first = true;
    for (const auto& [id, v] : iv) {
        if (!first) s += ";";
        first = false;
        s += id + "=" + detail::fmt_label(scm.domain(id)[v]);
    }
    return s + ")";
}

inline void validate_scm(const Scm& scm) {
    const auto& vars = scm.variables();
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (vars[i].domain.size() == 0) throw Error(Errc::InvalidDomain, "empty domain for '" + vars[i].id + "'");
        if (scm.index_of(vars[i].id) != i) throw Error(Errc::InvalidArgument, "duplicate variable '" + vars[i].id + "'");
    }
    if (!scm.index_of(scm.reward())) throw Error(Errc::UnknownVariable, "reward variable '" + scm.reward() + "' not declared");

    std::vector<int> seen(vars.size(), 0);
    for (const auto& m : scm.mechanisms()) {
        auto ci = scm.index_of(m.child);
        if (!ci) throw Error(Errc::UnknownVariable, "mechanism for undeclared variable '" + m.child + "'");
        if (++seen[*ci] > 1) throw Error(Errc::MissingMechanism, "variable '" + m.child + "' has more than one mechanism");
        std::size_t cols = 1;
        for (const auto& p : m.parents) {
            auto pi = scm.index_of(p);
            if (!pi) throw Error(Errc::UnknownVariable, "parent '" + p + "' of '" + m.child + "' not declared");
            cols *= vars[*pi].domain.size();
        }
        const std::size_t rows = vars[*ci].domain.size();
        if (m.cpt.size() != rows)
            throw Error(Errc::ShapeMismatch, "CPT of '" + m.child + "' has " + std::to_string(m.cpt.size()) +
                                                 " rows, expected " + std::to_string(rows));
        for (const auto& row : m.cpt)
            if (row.size() != cols)
                throw Error(Errc::ShapeMismatch, "CPT of '" + m.child + "' has a row of length " +
                                                     std::to_string(row.size()) + ", expected " + std::to_string(cols));
        for (std::size_t c = 0; c < cols; ++c) {
            double total = 0.0;
            for (std::size_t r = 0; r < rows; ++r) {
                const double q = m.cpt[r][c];
                if (!(q >= 0.0 && q <= 1.0))
                    throw Error(Errc::NonStochasticColumn, "variable '" + m.child + "' column " + std::to_string(c) +
                                                               " has entry " + detail::fmt_label(q) + " outside [0,1]");
                total += q;
            }
            if (std::abs(total - 1.0) > kStochasticTol)
                throw Error(Errc::NonStochasticColumn, "variable '" + m.child + "' column " + std::to_string(c) +
                                                           " sums to " + detail::fmt_label(total));
        }
    }
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (seen[i] == 0) throw Error(Errc::MissingMechanism, "no mechanism for '" + vars[i].id + "'");
    detail::topo_order(scm);
}

// Non-fatal findings; currently only reward labels outside [0,1].
inline std::vector<std::string> scm_warnings(const Scm& scm) {
    std::vector<std::string> out;
    if (auto i = scm.index_of(scm.reward())) {
        const auto& d = scm.variables()[*i].domain.labels();
        if (!d.empty() && (d.front() < 0.0 || d.back() > 1.0))
            out.push_back("reward '" + scm.reward() + "' takes values outside [0,1]");
    }
    return out;
}

inline Scm intervene(const Scm& scm, const Intervention& iv) {
    Scm out = scm;
    for (const auto& [id, value] : iv) {
        const auto& dom = scm.domain(id);
        if (value >= dom.size())
            throw Error(Errc::ValueOutOfDomain, "value index " + std::to_string(value) + " outside D[" + id + "]");
        Mechanism& m = out.mutable_mechanism(id);
        m.parents.clear();
        m.cpt.assign(dom.size(), std::vector<double>{0.0});
        m.cpt[value][0] = 1.0;
    }
    return out;
}

inline DiscreteDistribution interventional_distribution(const Scm& scm, const Intervention& iv, const VarId& target) {
    const std::size_t t = scm.require_index(target);
    const detail::Compiled c = detail::compile(scm, iv);
    const std::size_t n = c.nodes.size();
    std::vector<double> out(c.nodes[t].card, 0.0);
    std::vector<std::size_t> assign(n, 0);

    std::function<void(std::size_t, double)> visit = [&](std::size_t k, double p) {
        if (k == n) {
            out[assign[t]] += p;
            return;
        }
        const std::size_t v = c.order[k];
        for (std::size_t val = 0; val < c.nodes[v].card; ++val) {
            const double q = c.prob(v, val, assign);
            if (q == 0.0) continue;
            assign[v] = val;
            visit(k + 1, p * q);
        }
    };
    visit(0, 1.0);
    return DiscreteDistribution(scm.variables()[t].domain, std::move(out));
}

inline DiscreteDistribution reward_distribution(const Scm& scm, const Intervention& iv) {
    return interventional_distribution(scm, iv, scm.reward());
}

inline double expected_reward(const Scm& scm, const Intervention& iv) { return reward_distribution(scm, iv).mean(); }

// One ancestral sample; entry i is the value index of variable i.
inline std::vector<std::size_t> sample(const Scm& scm, const Intervention& iv, Rng& rng) {
    const detail::Compiled c = detail::compile(scm, iv);
    std::vector<std::size_t> assign(c.nodes.size(), 0);
    for (std::size_t v : c.order) {
        const auto& node = c.nodes[v];
        const double u = rng.uniform();
        if (node.forced) {
            assign[v] = *node.forced;
            continue;
        }
        const std::size_t col = c.column(node, assign);
        double acc = 0.0;
        std::size_t pick = node.card - 1;
        for (std::size_t val = 0; val < node.card; ++val) {
            const double q = (*node.cpt)[val][col];
            if (q <= 0.0) continue;
            acc += q;
            pick = val;
            if (u < acc) break;
        }
        assign[v] = pick;
    }
    return assign;
}

}  // namespace camab
