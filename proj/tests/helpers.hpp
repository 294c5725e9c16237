#pragma once

// Shared test fixtures: seeded random hypergraph generation and brute-force
// reference implementations ("oracles") that the optimized library code is
// checked against. Oracles favor obviousness over speed.

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "hop/hypergraph.hpp"
#include "hop/patterns.hpp"
#include "hop/rng.hpp"

namespace hoptest {

// Random temporal hypergraph: sizes in [2, max_size], integer times in
// [0, t_max] so ties and duplicate edges occur naturally.
inline hop::TemporalHypergraph random_graph(hop::Rng& rng, int n_nodes, int n_edges,
                                            int max_size = 4, int t_max = 50) {
    std::vector<hop::TemporalHyperedge> edges;
    edges.reserve(static_cast<std::size_t>(n_edges));
    for (int i = 0; i < n_edges; ++i) {
        int sz = 2 + static_cast<int>(rng.next_below(static_cast<std::size_t>(max_size - 1)));
        std::set<hop::NodeId> nodes;
        while (static_cast<int>(nodes.size()) < sz)
            nodes.insert(static_cast<hop::NodeId>(rng.next_below(static_cast<std::size_t>(n_nodes))));
        hop::TemporalHyperedge e;
        e.nodes.assign(nodes.begin(), nodes.end());
        e.time = static_cast<double>(rng.next_below(static_cast<std::size_t>(t_max + 1)));
        edges.push_back(std::move(e));
    }
    return hop::TemporalHypergraph::build(std::move(edges));
}

// Oracle: incidences of z strictly before t by scanning every edge.
inline std::vector<std::pair<hop::EdgeId, double>> incident_before_oracle(
    const hop::TemporalHypergraph& g, hop::NodeId z, double t) {
    std::vector<std::pair<hop::EdgeId, double>> out;
    for (std::size_t e = 0; e < g.n_edges(); ++e) {
        auto id = static_cast<hop::EdgeId>(e);
        if (g.edge_time(id) < t) {
            for (auto v : g.edge_nodes(id))
                if (v == z) out.emplace_back(id, g.edge_time(id));
        }
    }
    return out;
}

// Oracle: first co-coverage time of {a,b} by scanning every edge in time order.
inline std::optional<double> first_cover_oracle(const hop::TemporalHypergraph& g, hop::NodeId a,
                                                hop::NodeId b) {
    for (std::size_t e = 0; e < g.n_edges(); ++e) {
        auto id = static_cast<hop::EdgeId>(e);
        bool ha = false, hb = false;
        for (auto v : g.edge_nodes(id)) {
            ha = ha || v == a;
            hb = hb || v == b;
        }
        if (ha && hb) return g.edge_time(id);
    }
    return std::nullopt;
}

// Oracle: full instance enumeration by a cubic triple loop with full edge
// scans. Deliberately shares no code with the library implementation.
inline std::vector<hop::LabeledInstance> enumerate_oracle(const hop::TemporalHypergraph& g,
                                                          const hop::SplitConfig& cfg) {
    std::vector<hop::LabeledInstance> out;
    double t0 = g.min_time(), range = g.time_range();
    double t_w = cfg.window_fraction * range;
    auto n = static_cast<hop::NodeId>(g.n_nodes());
    for (hop::NodeId u = 0; u < n; ++u) {
        for (hop::NodeId v = u + 1; v < n; ++v) {
            auto fc = first_cover_oracle(g, u, v);
            if (!fc) continue;
            double t = *fc;
            double frac = (t - t0) / range;
            if (frac < cfg.b0 || frac >= cfg.b3) continue;
            hop::Split split = frac < cfg.b1   ? hop::Split::Train
                               : frac < cfg.b2 ? hop::Split::Valid
                                               : hop::Split::Test;
            for (hop::NodeId w = 0; w < n; ++w) {
                if (w == u || w == v) continue;
                bool invalid = false;
                for (std::size_t e = 0; e < g.n_edges() && !invalid; ++e) {
                    auto id = static_cast<hop::EdgeId>(e);
                    double te = g.edge_time(id);
                    if (te > t) break;  // edges are time sorted
                    bool hu = false, hv = false, hw = false;
                    for (auto x : g.edge_nodes(id)) {
                        hu = hu || x == u;
                        hv = hv || x == v;
                        hw = hw || x == w;
                    }
                    if (te < t && ((hu && hv) || (hu && hw) || (hv && hw))) invalid = true;
                    if (te == t && hw && (hu || hv)) invalid = true;
                }
                if (invalid) continue;
                std::optional<double> cu, cv, ca;
                for (std::size_t e = 0; e < g.n_edges(); ++e) {
                    auto id = static_cast<hop::EdgeId>(e);
                    double te = g.edge_time(id);
                    if (te <= t) continue;
                    if (te > t + t_w) break;
                    bool hu = false, hv = false, hw = false;
                    for (auto x : g.edge_nodes(id)) {
                        hu = hu || x == u;
                        hv = hv || x == v;
                        hw = hw || x == w;
                    }
                    if (hu && hw && !cu) cu = te;
                    if (hv && hw && !cv) cv = te;
                    if (hu && hv && hw && !ca) ca = te;
                }
                hop::LabeledInstance inst;
                inst.triplet = {u, v, w, t};
                inst.split = split;
                if (ca) inst.label = hop::PatternLabel::Closure;
                else if (cu && cv) inst.label = hop::PatternLabel::Triangle;
                else if (cu || cv) inst.label = hop::PatternLabel::Wedge;
                else inst.label = hop::PatternLabel::Edge;
                if (cu || cv)
                    inst.times.t_wedge =
                        std::min(cu.value_or(1e300), cv.value_or(1e300)) - t;
                if (cu && cv) inst.times.t_triangle = std::max(*cu, *cv) - t;
                if (ca) inst.times.t_closure = *ca - t;
                out.push_back(inst);
            }
        }
    }
    return out;
}

// Deterministic graph with every pattern class present in every split:
// T = 1000, anchors planted inside each split range with closing edges in
// the (t, t+100] window, fresh nodes per planted instance.
inline hop::TemporalHypergraph planted_fixture() {
    std::vector<hop::TemporalHyperedge> edges;
    hop::NodeId next = 0;
    auto fresh = [&next] { return next++; };
    auto plant = [&](double t, int kind) {
        hop::NodeId u = fresh(), v = fresh(), w = fresh();
        edges.push_back({{u, v}, t});
        switch (kind) {
            case 0: break;                                    // Edge: quiet window
            case 1: edges.push_back({{u, w}, t + 10}); break; // Wedge
            case 2:
                edges.push_back({{u, w}, t + 10});            // Triangle
                edges.push_back({{v, w}, t + 20});
                break;
            case 3: edges.push_back({{u, v, w}, t + 10}); break;  // Closure
        }
    };
    const double anchors[3][4] = {{450, 500, 550, 600}, {760, 770, 780, 790}, {830, 845, 860, 875}};
    for (int sp = 0; sp < 3; ++sp)
        for (int kind = 0; kind < 4; ++kind) plant(anchors[sp][kind], kind);
    // Pin the time range to [0, 1000].
    edges.push_back({{fresh(), fresh()}, 0.0});
    edges.push_back({{fresh(), fresh()}, 1000.0});
    return hop::TemporalHypergraph::build(std::move(edges));
}

inline bool same_instance(const hop::LabeledInstance& a, const hop::LabeledInstance& b) {
    auto same_opt = [](const std::optional<double>& x, const std::optional<double>& y) {
        if (x.has_value() != y.has_value()) return false;
        return !x || *x == *y;
    };
    return a.triplet.u == b.triplet.u && a.triplet.v == b.triplet.v &&
           a.triplet.w == b.triplet.w && a.triplet.t == b.triplet.t && a.label == b.label &&
           a.split == b.split && same_opt(a.times.t_wedge, b.times.t_wedge) &&
           same_opt(a.times.t_triangle, b.times.t_triangle) &&
           same_opt(a.times.t_closure, b.times.t_closure);
}

}  // namespace hoptest
