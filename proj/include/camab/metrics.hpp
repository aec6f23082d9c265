#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "camab/abstraction.hpp"
#include "camab/error.hpp"
#include "camab/model.hpp"

namespace camab {

enum class MetricKind { Wasserstein2, JensenShannon };

inline const char* to_string(MetricKind m) { return m == MetricKind::Wasserstein2 ? "w2" : "jsd"; }

inline MetricKind parse_metric(const std::string& s) {
    if (s == "w2" || s == "W2" || s == "wasserstein2") return MetricKind::Wasserstein2;
    if (s == "jsd" || s == "JSD" || s == "jensen-shannon") return MetricKind::JensenShannon;
    throw Error(Errc::UnsupportedMetric, "unknown metric '" + s + "'");
}

// 1-D W2 via quantile functions, integrated exactly between merged CDF breakpoints.
// Breakpoints closer than the stochastic tolerance are merged: the square root
// would otherwise turn 1e-16 rounding residue into 1e-8 distances.
inline double w2_distance(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    const std::size_t np = p.probs.size(), nq = q.probs.size();
    std::vector<double> cp(np), cq(nq);
    double acc = 0.0;
    for (std::size_t i = 0; i < np; ++i) cp[i] = acc += p.probs[i];
    acc = 0.0;
    for (std::size_t j = 0; j < nq; ++j) cq[j] = acc += q.probs[j];
    cp.back() = 1.0;
    cq.back() = 1.0;

    double total = 0.0, prev = 0.0;
    std::size_t i = 0, j = 0;
    while (i < np && j < nq) {
        const double next = std::min(cp[i], cq[j]);
        const double d = p.support[i] - q.support[j];
        if (next > prev) total += (next - prev) * d * d;
        prev = std::max(prev, next);
        if (cp[i] <= next + kStochasticTol) ++i;
        if (cq[j] <= next + kStochasticTol) ++j;
    }
    return std::sqrt(total);
}

namespace detail {

// Embed both distributions in the sorted union of their labels.
inline void union_embed(const DiscreteDistribution& p, const DiscreteDistribution& q, std::vector<double>& pu,
                        std::vector<double>& qu) {
    std::vector<double> labels = p.support.labels();
    labels.insert(labels.end(), q.support.labels().begin(), q.support.labels().end());
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    pu.assign(labels.size(), 0.0);
    qu.assign(labels.size(), 0.0);
    auto pos = [&](double x) {
        return static_cast<std::size_t>(std::lower_bound(labels.begin(), labels.end(), x) - labels.begin());
    };
    for (std::size_t i = 0; i < p.probs.size(); ++i) pu[pos(p.support[i])] += p.probs[i];
    for (std::size_t j = 0; j < q.probs.size(); ++j) qu[pos(q.support[j])] += q.probs[j];
}

}  // namespace detail

// Jensen-Shannon distance, natural log, 0 log 0 = 0.
inline double jsd_distance(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    std::vector<double> pu, qu;
    detail::union_embed(p, q, pu, qu);
    double js = 0.0;
    // log(p/m) = log1p((p - q)/(p + q)); the log1p form keeps equal atoms exactly at zero
    for (std::size_t k = 0; k < pu.size(); ++k) {
        const double s = pu[k] + qu[k];
        if (s <= 0.0) continue;
        const double r = (pu[k] - qu[k]) / s;
        if (pu[k] > 0.0) js += 0.5 * pu[k] * std::log1p(r);
        if (qu[k] > 0.0) js += 0.5 * qu[k] * std::log1p(-r);
    }
    return std::sqrt(std::max(0.0, js));
}

inline double distance(MetricKind m, const DiscreteDistribution& p, const DiscreteDistribution& q) {
    return m == MetricKind::Wasserstein2 ? w2_distance(p, q) : jsd_distance(p, q);
}

struct ActionDistance {
    std::string action;
    double ic = 0.0;
    double discrepancy = 0.0;
};

struct AbstractionReport {
    MetricKind metric = MetricKind::Wasserstein2;
    double ic_error = 0.0;
    double reward_discrepancy = 0.0;
    std::vector<ActionDistance> per_action;
};

inline AbstractionReport abstraction_report(const Camab& c, MetricKind metric) {
    AbstractionReport r;
    r.metric = metric;
    const auto map = action_map(c);
    for (std::size_t i = 0; i < c.base_actions.size(); ++i) {
        const auto base = reward_distribution(c.base, c.base_actions[i]);
        const auto pushed = c.alpha.pushforward(base);
        const auto abs = reward_distribution(c.abstract, c.abstract_actions[map[i]]);
        ActionDistance d{describe(c.base, c.base_actions[i]), distance(metric, pushed, abs), distance(metric, base, pushed)};
        r.ic_error = std::max(r.ic_error, d.ic);
        r.reward_discrepancy = std::max(r.reward_discrepancy, d.discrepancy);
        r.per_action.push_back(std::move(d));
    }
    return r;
}

inline double ic_error(const Camab& c, MetricKind metric) { return abstraction_report(c, metric).ic_error; }

inline double reward_discrepancy(const Camab& c, MetricKind metric) {
    return abstraction_report(c, metric).reward_discrepancy;
}

inline double expected_reward_gap_bound(const Camab& c, MetricKind metric) {
    if (metric != MetricKind::Wasserstein2)
        throw Error(Errc::UnsupportedMetric, "the e + s bound holds for the W2 metric only");
    const auto r = abstraction_report(c, metric);
    return r.ic_error + r.reward_discrepancy;
}

inline std::vector<double> action_means(const Scm& scm, const std::vector<Intervention>& actions) {
    std::vector<double> mu;
    mu.reserve(actions.size());
    for (const auto& a : actions) mu.push_back(expected_reward(scm, a));
    return mu;
}

inline std::size_t argmax_index(const std::vector<double>& v) {
    if (v.empty()) throw Error(Errc::EmptyInput, "argmax of an empty vector");
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

inline std::vector<double> gaps(const std::vector<double>& mu) {
    const double best = mu[argmax_index(mu)];
    std::vector<double> d(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) d[i] = best - mu[i];
    return d;
}

inline bool max_preservation_sufficient(const Camab& c) {
    const auto delta = gaps(action_means(c.base, c.base_actions));
    double min_gap = std::numeric_limits<double>::infinity();
    for (double d : delta)
        if (d > 0.0) min_gap = std::min(min_gap, d);
    if (!std::isfinite(min_gap)) throw Error(Errc::AllGapsZero, "all base actions have the same expected reward");
    return expected_reward_gap_bound(c, MetricKind::Wasserstein2) <= 0.5 * min_gap;
}

// Moore-Penrose pseudoinverse; singular values below tol * sigma_max are dropped.
inline Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& a, double tol = 1e-10) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const double cutoff = s.size() > 0 ? tol * s(0) : 0.0;
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > cutoff) inv(i) = 1.0 / s(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

inline Eigen::MatrixXd to_matrix(const ValueMap& m) {
    const Eigen::Index rows = static_cast<Eigen::Index>(m.size());
    const Eigen::Index cols = rows ? static_cast<Eigen::Index>(m[0].size()) : 0;
    Eigen::MatrixXd out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index k = 0; k < cols; ++k) out(r, k) = m[r][k];
    return out;
}

inline constexpr double kExactTol = 1e-9;

// Sufficient condition for argmax preservation of an exact (e = 0) abstraction.
// For each competitor b with a different image, the scalar y' A_Y' (a* - b) scales
// the pseudoinverse of the intervened variable's value map; b violates the condition
// when every entry of that product is <= 0.
inline bool algebraic_max_condition(const Camab& c) {
    const double e = ic_error(c, MetricKind::Wasserstein2);
    if (e > kExactTol) throw Error(Errc::NonZeroICError, "IC error " + detail::fmt_label(e) + " is not zero");

    const auto mu = action_means(c.base, c.base_actions);
    const std::size_t best = argmax_index(mu);
    const auto map = action_map(c);

    const FiniteDomain& ylab = c.abstract.reward_domain();
    Eigen::RowVectorXd y(static_cast<Eigen::Index>(ylab.size()));
    for (std::size_t k = 0; k < ylab.size(); ++k) y(static_cast<Eigen::Index>(k)) = ylab[k];
    const Eigen::MatrixXd ay = to_matrix(c.alpha.data().value_maps.at(c.alpha.abstract_reward()));

    auto as_vec = [&](std::size_t a) {
        const auto d = reward_distribution(c.base, c.base_actions[a]);
        return Eigen::Map<const Eigen::VectorXd>(d.probs.data(), static_cast<Eigen::Index>(d.probs.size())).eval();
    };
    const Eigen::VectorXd astar = as_vec(best);

    std::vector<Eigen::MatrixXd> pinvs;
    for (const auto& [var, value] : c.abstract_actions[map[best]])
        pinvs.push_back(pseudoinverse(to_matrix(c.alpha.data().value_maps.at(var))));
    if (pinvs.empty()) pinvs.push_back(Eigen::MatrixXd::Identity(1, 1));

    for (std::size_t b = 0; b < c.base_actions.size(); ++b) {
        if (map[b] == map[best]) continue;
        const double s = y * ay * (astar - as_vec(b));
        bool violates = true;
        for (const auto& p : pinvs)
            if (((s * p).array() > 0.0).any()) violates = false;
        if (violates) return false;
    }
    return true;
}

}  // namespace camab
