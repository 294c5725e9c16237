#pragma once

// Backward temporal random walks.
//
// From a root (z, t0), each step looks at the hyperedges incident to the
// current node strictly before the current time, draws one with probability
// proportional to (|e| - 1) * exp(alpha * (t_l - t_e)), then moves to a node
// drawn uniformly from that hyperedge minus the current node. Larger alpha
// biases toward recent interactions; alpha = 0 ignores recency. A step with
// no history truncates the walk, which is kept and masked downstream.
//
// Weights are computed in log space and normalized after a max shift, so the
// recency term can never overflow. Every walk's randomness is seeded from
// (master_seed, root, t0, walk_index): sampling is a pure function of those,
// independent of scheduling or thread count.

#include <map>

#include "hop/hypergraph.hpp"
#include "hop/patterns.hpp"
#include "hop/rng.hpp"

namespace hop {

struct WalkStep {
    NodeId node;
    double time;
    bool operator==(const WalkStep&) const = default;
};

struct Walk {
    std::vector<WalkStep> steps;  // steps[0] = (root, t0); times strictly decrease
    bool truncated = false;       // realized_len < m+1

    std::size_t realized_len() const { return steps.size(); }
    bool operator==(const Walk&) const = default;
};

struct WalkSet {
    NodeId root = -1;
    double anchor = 0.0;
    std::vector<Walk> walks;  // exactly M
};

struct SamplerConfig {
    double alpha = 1e-5;  // per inverse (normalized) time unit
    int M = 64;
    int m = 2;
    std::uint64_t master_seed = 0;

    void validate() const {
        if (!(alpha >= 0.0)) throw DomainError("alpha must be >= 0");
        if (M < 1 || m < 1) throw DomainError("M and m must be >= 1");
    }
};

struct StepWeights {
    std::vector<EdgeId> edges;       // historical incident hyperedges of (z_l, t_l)
    std::vector<double> log_weight;  // log(|e|-1) + alpha*(t_l - t_e)
    std::vector<double> prob;        // normalized, sums to 1 when non-empty

    std::size_t size() const { return edges.size(); }
    bool empty() const { return edges.empty(); }
};

/// Per-hyperedge selection weights for one walk step.
inline StepWeights step_weights(const TemporalHypergraph& g, NodeId z_l, double t_l,
                                double alpha) {
    StepWeights out;
    auto hist = g.incident_before(z_l, t_l);
    if (hist.empty()) return out;
    out.edges.reserve(hist.size());
    out.log_weight.reserve(hist.size());
    double mx = -std::numeric_limits<double>::infinity();
    for (const auto& ent : hist) {
        double lw = std::log(static_cast<double>(g.edge_size(ent.edge) - 1)) +
                    alpha * (t_l - ent.time);
        out.edges.push_back(ent.edge);
        out.log_weight.push_back(lw);
        mx = std::max(mx, lw);
    }
    out.prob.resize(out.edges.size());
    double total = 0.0;
    for (std::size_t i = 0; i < out.prob.size(); ++i) {
        out.prob[i] = std::exp(out.log_weight[i] - mx);
        total += out.prob[i];
    }
    for (auto& p : out.prob) p /= total;
    return out;
}

inline std::uint64_t walk_seed(std::uint64_t master_seed, NodeId z, double t0,
                               std::uint64_t walk_index) {
    return mix_seed(mix_seed(mix_seed(master_seed, static_cast<std::uint64_t>(z)),
                             double_bits(t0)),
                    walk_index);
}

/// One m-step backward walk. Truncates (and flags) when a step has no history.
inline Walk sample_walk(const TemporalHypergraph& g, NodeId z, double t0,
                        const SamplerConfig& cfg, std::uint64_t walk_index) {
    cfg.validate();
    Rng rng(walk_seed(cfg.master_seed, z, t0, walk_index));
    Walk w;
    w.steps.reserve(static_cast<std::size_t>(cfg.m) + 1);
    w.steps.push_back({z, t0});
    NodeId cur = z;
    double t_l = t0;
    for (int step = 0; step < cfg.m; ++step) {
        auto sw = step_weights(g, cur, t_l, cfg.alpha);
        if (sw.empty()) {
            w.truncated = true;
            return w;
        }
        std::size_t pick = rng.next_categorical(sw.prob, 1.0);
        EdgeId e = sw.edges[pick];
        auto nodes = g.edge_nodes(e);
        // Uniform over e \ {cur}; cur occurs exactly once in the sorted list.
        std::size_t k = rng.next_below(nodes.size() - 1);
        NodeId nxt = -1;
        std::size_t seen = 0;
        for (NodeId cand : nodes) {
            if (cand == cur) continue;
            if (seen++ == k) {
                nxt = cand;
                break;
            }
        }
        cur = nxt;
        t_l = g.edge_time(e);
        w.steps.push_back({cur, t_l});
    }
    return w;
}

struct TripletContext {
    WalkSet s_u, s_v, s_w;

    const WalkSet& by_index(int i) const { return i == 0 ? s_u : i == 1 ? s_v : s_w; }
};

/// M walks from each of u, v, w, all anchored at the triplet's time. Only
/// strictly earlier hyperedges are reachable.
inline TripletContext sample_triplet_context(const TemporalHypergraph& g, const Triplet& tr,
                                             const SamplerConfig& cfg) {
    cfg.validate();
    auto sample_set = [&](NodeId z) {
        WalkSet s;
        s.root = z;
        s.anchor = tr.t;
        s.walks.reserve(static_cast<std::size_t>(cfg.M));
        for (int i = 0; i < cfg.M; ++i)
            s.walks.push_back(sample_walk(g, z, tr.t, cfg, static_cast<std::uint64_t>(i)));
        return s;
    };
    return {sample_set(tr.u), sample_set(tr.v), sample_set(tr.w)};
}

/// Exact probability of observing this (node, time) sequence from its root.
/// Edges indistinguishable at the observation level (same next node and
/// time) have their probabilities summed. Throws on walks the sampler could
/// never produce.
inline double walk_probability(const TemporalHypergraph& g, const Walk& w, double alpha) {
    if (w.steps.empty()) throw DomainError("walk_probability: empty walk");
    double p = 1.0;
    for (std::size_t i = 1; i < w.steps.size(); ++i) {
        const auto& prev = w.steps[i - 1];
        const auto& cur = w.steps[i];
        if (cur.node == prev.node || cur.time >= prev.time)
            throw DomainError("walk_probability: inconsistent step");
        auto sw = step_weights(g, prev.node, prev.time, alpha);
        double step_p = 0.0;
        for (std::size_t j = 0; j < sw.size(); ++j) {
            EdgeId e = sw.edges[j];
            if (g.edge_time(e) == cur.time && g.edge_contains(e, cur.node))
                step_p += sw.prob[j] / static_cast<double>(g.edge_size(e) - 1);
        }
        if (step_p == 0.0) throw DomainError("walk_probability: impossible step");
        p *= step_p;
    }
    if (w.truncated && !g.incident_before(w.steps.back().node, w.steps.back().time).empty())
        throw DomainError("walk_probability: walk flagged truncated but history exists");
    return p;
}

/// Exhaustively enumerates all maximal walks of up to m steps with their
/// exact probabilities. Truncation is an absorbing outcome, so the returned
/// probabilities always sum to 1. Order is deterministic (lexicographic in
/// (node, time) transitions).
inline std::vector<std::pair<Walk, double>> enumerate_walks(const TemporalHypergraph& g,
                                                            NodeId z, double t0, int m,
                                                            double alpha) {
    std::vector<std::pair<Walk, double>> out;
    Walk w;
    w.steps.push_back({z, t0});
    auto rec = [&](auto&& self, int depth, double prob) -> void {
        const auto& last = w.steps.back();
        if (depth == m) {
            out.push_back({w, prob});
            return;
        }
        auto sw = step_weights(g, last.node, last.time, alpha);
        if (sw.empty()) {
            Walk t = w;
            t.truncated = true;
            out.push_back({t, prob});
            return;
        }
        std::map<std::pair<NodeId, double>, double> trans;
        for (std::size_t j = 0; j < sw.size(); ++j) {
            EdgeId e = sw.edges[j];
            double per_node = sw.prob[j] / static_cast<double>(g.edge_size(e) - 1);
            for (NodeId nxt : g.edge_nodes(e))
                if (nxt != last.node) trans[{nxt, g.edge_time(e)}] += per_node;
        }
        for (const auto& [key, p] : trans) {
            w.steps.push_back({key.first, key.second});
            self(self, depth + 1, prob * p);
            w.steps.pop_back();
        }
    };
    rec(rec, 0, 1.0);
    return out;
}

/// Debug dump: one walk per line, "(node,time)" pairs tab-separated, then a
/// T/F truncation flag.
inline std::string format_walk_dump(const std::vector<WalkSet>& sets) {
    std::string s;
    for (const auto& ws : sets) {
        for (const auto& w : ws.walks) {
            for (std::size_t i = 0; i < w.steps.size(); ++i) {
                if (i) s += '\t';
                s += "(" + std::to_string(w.steps[i].node) + "," + fmt_double(w.steps[i].time) +
                     ")";
            }
            s += '\t';
            s += w.truncated ? 'T' : 'F';
            s += '\n';
        }
    }
    return s;
}

}  // namespace hop
