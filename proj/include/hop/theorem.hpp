#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "hop/patterns.hpp"
#include "hop/walks.hpp"

namespace hop {

// A claimed isomorphism between the historical m-hop subgraphs of two
// anchored triplets. `pi` must cover every node of every hyperedge in the
// first triplet's m-hop history. Witness times should be exactly
// representable (integers or dyadic fractions): time differences are compared
// bitwise, as the transfer statement demands equality, not closeness.
struct IsomorphismWitness {
    TemporalHypergraph g1, g2;
    std::map<NodeId, NodeId> pi;
    Triplet tau1, tau2;
};

struct WitnessReport {
    bool valid = false;        // the mapping satisfies the isomorphism definition
    std::string why;           // first violated condition, empty when valid
    bool walks_match = false;  // pi maps the exact walk distribution of side 1 onto side 2
    bool marginals_match = false;  // per-node appearance probabilities agree (statement 1)
    bool de_match = false;         // per-walk position-count distributions agree (statement 2)
    double max_walk_gap = 0.0;
    double max_marginal_gap = 0.0;
    double max_de_gap = 0.0;

    bool pass() const { return valid && walks_match && marginals_match && de_match; }
};

namespace detail {

// Historical m-hop subgraph: hyperedges strictly before t whose closest
// member sits within m clique-expansion hops of {u, v, w}, plus the node
// distances realized by that BFS.
struct HistorySubgraph {
    std::set<EdgeId> edges;
    std::map<NodeId, int> dist;
};

inline HistorySubgraph historical_subgraph(const TemporalHypergraph& g, const Triplet& tau,
                                           int m) {
    HistorySubgraph out;
    std::vector<NodeId> frontier = {tau.u, tau.v, tau.w};
    for (NodeId r : frontier) out.dist[r] = 0;
    for (int d = 1; !frontier.empty() && d <= m + 1; ++d) {
        std::vector<NodeId> next;
        for (NodeId x : frontier)
            for (const auto& ent : g.incidence(x)) {
                if (!(ent.time < tau.t)) continue;
                out.edges.insert(ent.edge);
                for (NodeId y : g.edge_nodes(ent.edge))
                    if (!out.dist.count(y)) {
                        out.dist[y] = d;
                        next.push_back(y);
                    }
            }
        frontier = std::move(next);
    }
    // Keep only edges whose nearest member is within m hops.
    for (auto it = out.edges.begin(); it != out.edges.end();) {
        int best = m + 1;
        for (NodeId y : g.edge_nodes(*it)) {
            auto d = out.dist.find(y);
            if (d != out.dist.end()) best = std::min(best, d->second);
        }
        it = best <= m ? std::next(it) : out.edges.erase(it);
    }
    return out;
}

template <typename NodeRange>
inline std::string edge_signature(const NodeRange& nodes, double time) {
    std::vector<NodeId> sorted(nodes.begin(), nodes.end());
    std::sort(sorted.begin(), sorted.end());
    std::string key;
    for (NodeId n : sorted) key += std::to_string(n) + ",";
    key += "@" + std::to_string(double_bits(time));
    return key;
}

inline std::string walk_signature(const Walk& w) {
    std::string key;
    for (const auto& s : w.steps)
        key += std::to_string(s.node) + "@" + std::to_string(double_bits(s.time)) + ";";
    key += w.truncated ? "T" : "F";
    return key;
}

// Per-walk position-count vectors: summing these over the M walks of a set
// reproduces the position-count feature, so equality of their exact
// distributions transfers the full DE distribution for any M.
using CountDist = std::map<NodeId, std::map<std::vector<int>, double>>;

inline CountDist de_count_distribution(const TemporalHypergraph& g, NodeId root, double t0,
                                       int m, double alpha) {
    CountDist dist;
    for (const auto& [walk, prob] : enumerate_walks(g, root, t0, m, alpha)) {
        std::set<NodeId> seen;
        for (const auto& s : walk.steps) seen.insert(s.node);
        for (NodeId a : seen) {
            std::vector<int> counts(static_cast<std::size_t>(m) + 1, 0);
            for (std::size_t i = 0; i < walk.steps.size(); ++i)
                if (walk.steps[i].node == a) counts[i] += 1;
            dist[a][counts] += prob;
        }
    }
    return dist;
}

}  // namespace detail

// Checks the isomorphism definition: pi is injective over the side-1 history,
// maps its hyperedge multiset onto side 2 with identical anchor-relative
// times, and preserves triplet roles ({pi(u), pi(v)} = {u', v'}, pi(w) = w').
inline std::pair<bool, std::string> witness_validity(const IsomorphismWitness& wit, int m) {
    const auto h1 = detail::historical_subgraph(wit.g1, wit.tau1, m);
    const auto h2 = detail::historical_subgraph(wit.g2, wit.tau2, m);
    auto mapped = [&](NodeId a) -> std::optional<NodeId> {
        auto it = wit.pi.find(a);
        if (it == wit.pi.end()) return std::nullopt;
        return it->second;
    };
    std::set<NodeId> image;
    for (const auto& [a, b] : wit.pi)
        if (!image.insert(b).second) return {false, "pi is not injective"};
    auto mu = mapped(wit.tau1.u), mv = mapped(wit.tau1.v), mw = mapped(wit.tau1.w);
    if (!mu || !mv || !mw) return {false, "pi does not cover the triplet roots"};
    if (*mw != wit.tau2.w) return {false, "pi must map w to w' (role-preserving)"};
    bool pair_ok = (*mu == wit.tau2.u && *mv == wit.tau2.v) ||
                   (*mu == wit.tau2.v && *mv == wit.tau2.u);
    if (!pair_ok) return {false, "pi must map {u, v} onto {u', v'}"};
    double delta = wit.tau2.t - wit.tau1.t;
    std::map<std::string, int> side2;
    for (EdgeId e : h2.edges)
        side2[detail::edge_signature(wit.g2.edge_nodes(e), wit.g2.edge_time(e))] += 1;
    for (EdgeId e : h1.edges) {
        std::vector<NodeId> img;
        for (NodeId a : wit.g1.edge_nodes(e)) {
            auto b = mapped(a);
            if (!b) return {false, "pi does not cover node " + std::to_string(a)};
            img.push_back(*b);
        }
        std::string key = detail::edge_signature(img, wit.g1.edge_time(e) + delta);
        auto it = side2.find(key);
        if (it == side2.end() || it->second == 0)
            return {false, "no counterpart for a side-1 hyperedge (or time offset differs)"};
        it->second -= 1;
    }
    for (const auto& [key, count] : side2)
        if (count != 0) return {false, "side 2 has an unmatched hyperedge in its history"};
    return {true, ""};
}

// Exhaustive verification of the transfer statements for one witness. All
// comparisons are exact enumerations; `tol` absorbs only floating-point
// rounding in the probability products.
inline WitnessReport theorem_check(const IsomorphismWitness& wit, int m, double alpha,
                                   double tol = 1e-12) {
    WitnessReport rep;
    auto [valid, why] = witness_validity(wit, m);
    rep.valid = valid;
    rep.why = why;
    if (!valid) return rep;
    double delta = wit.tau2.t - wit.tau1.t;
    const NodeId roots1[3] = {wit.tau1.u, wit.tau1.v, wit.tau1.w};
    rep.walks_match = rep.marginals_match = rep.de_match = true;
    for (NodeId r1 : roots1) {
        NodeId r2 = wit.pi.at(r1);
        auto walks1 = enumerate_walks(wit.g1, r1, wit.tau1.t, m, alpha);
        auto walks2 = enumerate_walks(wit.g2, r2, wit.tau2.t, m, alpha);
        // Distinct hyperedge choices can produce the same (node, time) step
        // sequence, so both sides aggregate by signature before comparing.
        std::map<std::string, double> probs1, probs2;
        std::map<NodeId, double> marg1, marg2;
        for (const auto& [w, p] : walks1) {
            Walk img = w;
            bool covered = true;
            for (auto& s : img.steps) {
                auto it = wit.pi.find(s.node);
                if (it == wit.pi.end()) {
                    covered = false;
                    break;
                }
                s.node = it->second;
                s.time += delta;
            }
            if (!covered) {
                rep.walks_match = false;
                continue;
            }
            probs1[detail::walk_signature(img)] += p;
            std::set<NodeId> seen;
            for (const auto& s : w.steps) seen.insert(s.node);
            for (NodeId a : seen) marg1[a] += p;
        }
        for (const auto& [w, p] : walks2) {
            probs2[detail::walk_signature(w)] += p;
            std::set<NodeId> seen;
            for (const auto& s : w.steps) seen.insert(s.node);
            for (NodeId a : seen) marg2[a] += p;
        }
        auto compare = [&](const std::map<std::string, double>& a,
                           const std::map<std::string, double>& b, bool& match, double& gap) {
            for (const auto& [key, p] : a) {
                auto it = b.find(key);
                double q = it == b.end() ? 0.0 : it->second;
                gap = std::max(gap, std::abs(p - q));
                if (std::abs(p - q) > tol) match = false;
            }
            for (const auto& [key, q] : b)
                if (!a.count(key)) {
                    gap = std::max(gap, std::abs(q));
                    match = false;
                }
        };
        compare(probs1, probs2, rep.walks_match, rep.max_walk_gap);
        for (const auto& [a, p] : marg1) {
            auto it = wit.pi.find(a);
            auto jt = it == wit.pi.end() ? marg2.end() : marg2.find(it->second);
            double q = jt == marg2.end() ? 0.0 : jt->second;
            rep.max_marginal_gap = std::max(rep.max_marginal_gap, std::abs(p - q));
            if (std::abs(p - q) > tol) rep.marginals_match = false;
        }
        if (marg1.size() != marg2.size()) rep.marginals_match = false;
        auto de1 = detail::de_count_distribution(wit.g1, r1, wit.tau1.t, m, alpha);
        auto de2 = detail::de_count_distribution(wit.g2, r2, wit.tau2.t, m, alpha);
        if (de1.size() != de2.size()) rep.de_match = false;
        for (const auto& [a, dist1] : de1) {
            auto it = wit.pi.find(a);
            if (it == wit.pi.end() || !de2.count(it->second)) {
                rep.de_match = false;
                continue;
            }
            const auto& dist2 = de2.at(it->second);
            if (dist1.size() != dist2.size()) rep.de_match = false;
            for (const auto& [counts, p] : dist1) {
                auto jt = dist2.find(counts);
                double q = jt == dist2.end() ? 0.0 : jt->second;
                rep.max_de_gap = std::max(rep.max_de_gap, std::abs(p - q));
                if (std::abs(p - q) > tol) rep.de_match = false;
            }
        }
    }
    return rep;
}

inline bool theorem_b1_check(const IsomorphismWitness& wit, int m, double alpha,
                             double tol = 1e-12) {
    return theorem_check(wit, m, alpha, tol).pass();
}

// --- hand-built witnesses ---------------------------------------------------

namespace witnesses {

inline TemporalHypergraph relabel_shift(const TemporalHypergraph& g,
                                        const std::map<NodeId, NodeId>& pi, double delta) {
    std::vector<TemporalHyperedge> edges;
    for (EdgeId e = 0; e < static_cast<EdgeId>(g.n_edges()); ++e) {
        TemporalHyperedge out;
        for (NodeId a : g.edge_nodes(e)) out.nodes.push_back(pi.at(a));
        out.time = g.edge_time(e) + delta;
        edges.push_back(std::move(out));
    }
    return TemporalHypergraph::build(std::move(edges));
}

// Shared base history: branching, multi-size hyperedges, 6 nodes.
inline TemporalHypergraph base_graph() {
    return TemporalHypergraph::build({
        {{0, 3}, 2.0},
        {{3, 4}, 4.0},
        {{1, 4}, 6.0},
        {{0, 1, 5}, 7.0},
        {{2, 5}, 9.0},
        {{2, 3, 4}, 11.0},
    });
}

// 1. Relabeled copy with a global time shift.
inline IsomorphismWitness relabeled_copy() {
    IsomorphismWitness wit;
    wit.g1 = base_graph();
    wit.pi = {{0, 5}, {1, 4}, {2, 3}, {3, 2}, {4, 1}, {5, 0}};
    wit.g2 = relabel_shift(wit.g1, wit.pi, 100.0);
    wit.tau1 = {0, 1, 2, 12.0};
    wit.tau2 = {5, 4, 3, 112.0};
    return wit;
}

// 2. Identity mapping: a triplet is isomorphic to itself.
inline IsomorphismWitness identity() {
    IsomorphismWitness wit;
    wit.g1 = base_graph();
    wit.g2 = base_graph();
    wit.pi = {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}, {5, 5}};
    wit.tau1 = {0, 1, 2, 12.0};
    wit.tau2 = {0, 1, 2, 12.0};
    return wit;
}

// 3. Two disjoint isomorphic components of one graph, offset in time.
inline IsomorphismWitness twin_components() {
    IsomorphismWitness wit;
    std::vector<TemporalHyperedge> edges = {
        {{0, 1}, 1.0}, {{1, 2}, 3.0},  {{0, 2, 3}, 5.0},   // component A
        {{4, 5}, 21.0}, {{5, 6}, 23.0}, {{4, 6, 7}, 25.0},  // component B, +20
    };
    wit.g1 = TemporalHypergraph::build(edges);
    wit.g2 = wit.g1;
    wit.pi = {{0, 4}, {1, 5}, {2, 6}, {3, 7}};
    wit.tau1 = {0, 2, 3, 6.0};
    wit.tau2 = {4, 6, 7, 26.0};
    return wit;
}

// 4. The unordered anchor pair: pi swaps u and v. Swapping 0<->1 and 3<->4
// maps the history onto itself only if the edge multiset is symmetric under
// it, so this witness uses a mirror-symmetric graph.
inline IsomorphismWitness swapped_pair() {
    IsomorphismWitness wit;
    wit.pi = {{0, 1}, {1, 0}, {2, 2}, {3, 4}, {4, 3}, {5, 5}};
    wit.g1 = TemporalHypergraph::build({
        {{0, 3}, 2.0},
        {{1, 4}, 2.0},
        {{3, 5}, 4.0},
        {{4, 5}, 4.0},
        {{0, 1, 2}, 6.0},
        {{2, 5}, 8.0},
    });
    wit.g2 = wit.g1;
    wit.tau1 = {0, 1, 2, 9.0};
    wit.tau2 = {0, 1, 2, 9.0};
    return wit;
}

// 5. Triple hyperedges and a fractional (dyadic) time offset.
inline IsomorphismWitness hyperedge_heavy() {
    IsomorphismWitness wit;
    wit.g1 = TemporalHypergraph::build({
        {{0, 1, 2, 3}, 0.5},
        {{2, 3, 4}, 1.5},
        {{0, 4, 5}, 2.25},
        {{1, 5}, 3.0},
    });
    wit.pi = {{0, 7}, {1, 6}, {2, 5}, {3, 4}, {4, 3}, {5, 2}};
    wit.g2 = relabel_shift(wit.g1, wit.pi, 0.75);
    wit.tau1 = {0, 1, 4, 3.5};
    wit.tau2 = {7, 6, 3, 4.25};
    return wit;
}

// Negative control: side 2 carries one extra historical hyperedge touching
// the walk-reachable region, so no hyperedge bijection can exist.
inline IsomorphismWitness extra_edge_control() {
    IsomorphismWitness wit = relabeled_copy();
    std::vector<TemporalHyperedge> edges;
    for (EdgeId e = 0; e < static_cast<EdgeId>(wit.g2.n_edges()); ++e) {
        TemporalHyperedge cp;
        auto nodes = wit.g2.edge_nodes(e);
        cp.nodes.assign(nodes.begin(), nodes.end());
        cp.time = wit.g2.edge_time(e);
        edges.push_back(std::move(cp));
    }
    edges.push_back({{5, 2}, 105.0});  // maps back to a {0, 2} edge side 1 lacks
    wit.g2 = TemporalHypergraph::build(std::move(edges));
    return wit;
}

// Negative control: correct structure, one hyperedge time nudged so the
// anchor-relative differences no longer agree.
inline IsomorphismWitness shifted_time_control() {
    IsomorphismWitness wit = relabeled_copy();
    std::vector<TemporalHyperedge> edges;
    for (EdgeId e = 0; e < static_cast<EdgeId>(wit.g2.n_edges()); ++e) {
        TemporalHyperedge cp;
        auto nodes = wit.g2.edge_nodes(e);
        cp.nodes.assign(nodes.begin(), nodes.end());
        cp.time = wit.g2.edge_time(e) + (e == 0 ? 0.5 : 0.0);
        edges.push_back(std::move(cp));
    }
    wit.g2 = TemporalHypergraph::build(std::move(edges));
    return wit;
}

// Role semantics: u and w sit at structurally different historical positions
// (u's bridge is older than w's), so only the role-preserving mapping is a
// witness; exchanging the u and w roles breaks the time correspondence.
inline IsomorphismWitness role_preserving() {
    IsomorphismWitness wit;
    wit.g1 = TemporalHypergraph::build({{{0, 3}, 1.0}, {{3, 2}, 4.0}, {{1, 3}, 2.5}});
    wit.pi = {{0, 10}, {1, 11}, {2, 12}, {3, 13}};
    wit.g2 = relabel_shift(wit.g1, wit.pi, 10.0);
    wit.tau1 = {0, 1, 2, 5.0};
    wit.tau2 = {10, 11, 12, 15.0};
    return wit;
}

// The same pair of graphs with the u and w roles exchanged on side 2. As
// unordered node sets the triplets are still isomorphic, but the mapping that
// aligns the histories cannot satisfy pi(w) = w'.
inline IsomorphismWitness role_swapped_control() {
    IsomorphismWitness wit = role_preserving();
    wit.tau2 = {12, 11, 10, 15.0};  // w' now sits where u' was
    return wit;
}

}  // namespace witnesses

struct TheoremSuiteCase {
    std::string name;
    bool expected_pass = true;
    WitnessReport report;

    bool ok() const { return report.pass() == expected_pass; }
};

struct TheoremSuiteResult {
    std::vector<TheoremSuiteCase> cases;

    bool ok() const {
        for (const auto& c : cases)
            if (!c.ok()) return false;
        return true;
    }
};

inline TheoremSuiteResult run_theorem_suite(int m = 2, double alpha = 0.3) {
    TheoremSuiteResult res;
    auto add = [&](const std::string& name, const IsomorphismWitness& wit, bool expected) {
        res.cases.push_back({name, expected, theorem_check(wit, m, alpha)});
    };
    add("relabeled copy with time shift", witnesses::relabeled_copy(), true);
    add("identity mapping", witnesses::identity(), true);
    add("twin components in one graph", witnesses::twin_components(), true);
    add("u/v pair swap", witnesses::swapped_pair(), true);
    add("hyperedge-heavy with dyadic offset", witnesses::hyperedge_heavy(), true);
    add("extra hyperedge (negative)", witnesses::extra_edge_control(), false);
    add("shifted edge time (negative)", witnesses::shifted_time_control(), false);
    add("role-preserving mapping", witnesses::role_preserving(), true);
    add("u/w role swap (negative)", witnesses::role_swapped_control(), false);
    return res;
}

}  // namespace hop
