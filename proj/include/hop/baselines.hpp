#pragma once

#include <array>
#include <cmath>
#include <unordered_set>
#include <vector>

#include "hop/hypergraph.hpp"
#include "hop/nn.hpp"
#include "hop/patterns.hpp"

namespace hop {

// Clique-expansion neighborhoods of the hyperedges strictly before a cutoff
// time. No self-neighbors; adjacency is symmetric by construction.
struct StaticProjection {
    std::vector<std::unordered_set<NodeId>> neighbors;

    std::size_t degree(NodeId a) const { return neighbors[static_cast<std::size_t>(a)].size(); }
    const std::unordered_set<NodeId>& of(NodeId a) const {
        return neighbors[static_cast<std::size_t>(a)];
    }
    bool adjacent(NodeId a, NodeId b) const {
        return neighbors[static_cast<std::size_t>(a)].count(b) != 0;
    }
};

// Incremental projection over a time-sorted sweep: advance_to(t) absorbs all
// hyperedges with time < t. Cutoffs must be nondecreasing.
class ProjectionSweep {
public:
    explicit ProjectionSweep(const TemporalHypergraph& g) : g_(&g) {
        proj_.neighbors.resize(g.n_nodes());
    }

    const StaticProjection& advance_to(double t) {
        if (t < last_t_) throw DomainError("projection sweep cutoffs must be nondecreasing");
        last_t_ = t;
        while (next_edge_ < g_->n_edges() &&
               g_->edge_time(static_cast<EdgeId>(next_edge_)) < t) {
            auto nodes = g_->edge_nodes(static_cast<EdgeId>(next_edge_));
            for (std::size_t i = 0; i < nodes.size(); ++i)
                for (std::size_t j = i + 1; j < nodes.size(); ++j) {
                    proj_.neighbors[static_cast<std::size_t>(nodes[i])].insert(nodes[j]);
                    proj_.neighbors[static_cast<std::size_t>(nodes[j])].insert(nodes[i]);
                }
            ++next_edge_;
        }
        return proj_;
    }

private:
    const TemporalHypergraph* g_;
    StaticProjection proj_;
    std::size_t next_edge_ = 0;
    double last_t_ = -std::numeric_limits<double>::infinity();
};

inline StaticProjection project(const TemporalHypergraph& g, double t) {
    ProjectionSweep sweep(g);
    return sweep.advance_to(t);
}

struct HeuristicFeatures {
    double aa3 = 0, jc3 = 0, pa3 = 0;
    double aa_mean = 0, jc_mean = 0, pa_mean = 0;

    double by_name(const std::string& name) const {
        if (name == "aa3") return aa3;
        if (name == "jc3") return jc3;
        if (name == "pa3") return pa3;
        if (name == "aa") return aa_mean;
        if (name == "jc") return jc_mean;
        if (name == "pa") return pa_mean;
        throw DomainError("unknown baseline feature: " + name);
    }
};

inline const std::array<const char*, 6>& baseline_feature_names() {
    static const std::array<const char*, 6> names = {"aa3", "jc3", "pa3", "aa", "jc", "pa"};
    return names;
}

namespace detail {

// Adamic-Adar mass of one common neighbor; degree <= 1 contributes 0 instead
// of dividing by log 1.
inline double aa_term(std::size_t degree) {
    return degree > 1 ? 1.0 / std::log(static_cast<double>(degree)) : 0.0;
}

inline double pair_aa(const StaticProjection& p, NodeId a, NodeId b) {
    const auto& na = p.of(a);
    const auto& nb = p.of(b);
    const auto& small = na.size() <= nb.size() ? na : nb;
    const auto& big = na.size() <= nb.size() ? nb : na;
    double s = 0.0;
    for (NodeId i : small)
        if (big.count(i)) s += aa_term(p.degree(i));
    return s;
}

inline double pair_jc(const StaticProjection& p, NodeId a, NodeId b) {
    const auto& na = p.of(a);
    const auto& nb = p.of(b);
    const auto& small = na.size() <= nb.size() ? na : nb;
    const auto& big = na.size() <= nb.size() ? nb : na;
    std::size_t inter = 0;
    for (NodeId i : small)
        if (big.count(i)) ++inter;
    std::size_t uni = na.size() + nb.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace detail

inline HeuristicFeatures heuristic_features(const StaticProjection& p, NodeId u, NodeId v,
                                            NodeId w) {
    HeuristicFeatures f;
    const auto& nu = p.of(u);
    const auto& nv = p.of(v);
    const auto& nw = p.of(w);
    // Iterate the smallest set when intersecting all three.
    const auto* small = &nu;
    if (nv.size() < small->size()) small = &nv;
    if (nw.size() < small->size()) small = &nw;
    std::size_t inter3 = 0;
    for (NodeId i : *small)
        if (nu.count(i) && nv.count(i) && nw.count(i)) {
            ++inter3;
            f.aa3 += detail::aa_term(p.degree(i));
        }
    std::unordered_set<NodeId> uni(nu.begin(), nu.end());
    uni.insert(nv.begin(), nv.end());
    uni.insert(nw.begin(), nw.end());
    f.jc3 = uni.empty() ? 0.0 : static_cast<double>(inter3) / static_cast<double>(uni.size());
    f.pa3 = static_cast<double>(nu.size()) * static_cast<double>(nv.size()) *
            static_cast<double>(nw.size());
    f.aa_mean = (detail::pair_aa(p, u, v) + detail::pair_aa(p, u, w) + detail::pair_aa(p, v, w)) /
                3.0;
    f.jc_mean = (detail::pair_jc(p, u, v) + detail::pair_jc(p, u, w) + detail::pair_jc(p, v, w)) /
                3.0;
    f.pa_mean = (static_cast<double>(nu.size()) * static_cast<double>(nv.size()) +
                 static_cast<double>(nu.size()) * static_cast<double>(nw.size()) +
                 static_cast<double>(nv.size()) * static_cast<double>(nw.size())) /
                3.0;
    return f;
}

// One scalar feature -> hidden 10 -> 4-class softmax head.
class BaselineModel {
public:
    ParamStore params;

    void init(std::uint64_t seed) {
        Rng rng(mix_seed(seed, 0xba5e));
        head_.init(params, "baseline.head", {1, 10, 4}, rng, false);
    }

    Vec predict(double feature) const { return softmax_vec(head_.forward({feature})); }

    double loss(double feature, PatternLabel y) const {
        return cross_entropy(predict(feature), static_cast<int>(y));
    }

    double loss_and_grad(double feature, PatternLabel y) {
        Mlp::Cache cache;
        Vec probs = softmax_vec(head_.forward({feature}, &cache));
        head_.backward(cache, softmax_ce_backward(probs, static_cast<int>(y)));
        return cross_entropy(probs, static_cast<int>(y));
    }

    void save(const std::string& path) const { params.save(path); }
    void load(const std::string& path) { params.load(path); }

private:
    Mlp head_;
};

}  // namespace hop
