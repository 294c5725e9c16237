#pragma once

// Higher-order pattern ground truth.
//
// A triplet of interest ({u,v}, w, t) exists when u and v first interact at
// time t through a hyperedge not involving w, and no two of {u,v,w} were
// covered together by any earlier hyperedge (nor is w covered with u or v by
// any hyperedge at exactly time t). Over the window (t, t+T_w] the triplet
// resolves to exactly one pattern:
//
//   Edge     neither {u,w} nor {v,w} is covered
//   Wedge    exactly one of the two pairs is covered
//   Triangle both pairs covered, but never all three nodes in one hyperedge
//   Closure  some hyperedge covers all three nodes
//
// First-formation times are tracked per pattern: t_wedge is the earliest
// coverage of either pair, t_triangle the instant the second pair gets
// covered, t_closure the earliest triple-covering hyperedge. A triple cover
// counts as covering both pairs. All times are stored as offsets > 0 from t.

#include <array>
#include <cstdio>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "hop/hypergraph.hpp"
#include "hop/rng.hpp"

namespace hop {

struct Triplet {
    NodeId u = -1, v = -1;  // unordered pair, stored with u < v
    NodeId w = -1;
    double t = 0.0;  // anchor: first u-v interaction time
};

enum class PatternLabel { Edge = 0, Wedge = 1, Triangle = 2, Closure = 3 };

inline const char* label_name(PatternLabel l) {
    switch (l) {
        case PatternLabel::Edge: return "edge";
        case PatternLabel::Wedge: return "wedge";
        case PatternLabel::Triangle: return "triangle";
        case PatternLabel::Closure: return "closure";
    }
    return "?";
}

inline std::optional<PatternLabel> label_from_name(const std::string& s) {
    if (s == "edge") return PatternLabel::Edge;
    if (s == "wedge") return PatternLabel::Wedge;
    if (s == "triangle") return PatternLabel::Triangle;
    if (s == "closure") return PatternLabel::Closure;
    return std::nullopt;
}

struct PatternTimes {
    std::optional<double> t_wedge, t_triangle, t_closure;  // offsets from anchor
};

enum class Split { Train = 0, Valid = 1, Test = 2 };

inline const char* split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Valid: return "valid";
        case Split::Test: return "test";
    }
    return "?";
}

inline std::optional<Split> split_from_name(const std::string& s) {
    if (s == "train") return Split::Train;
    if (s == "valid") return Split::Valid;
    if (s == "test") return Split::Test;
    return std::nullopt;
}

struct SplitConfig {
    // Fractions of the time range T: anchors in [b0,b1) train, [b1,b2) valid,
    // [b2,b3) test. Labeling reads past b3 (the tail completes expansions).
    double b0 = 0.4, b1 = 0.75, b2 = 0.825, b3 = 0.9;
    double window_fraction = 0.1;  // T_w / T
    std::uint64_t seed = 0;

    void validate() const {
        if (!(0.0 < b0 && b0 < b1 && b1 < b2 && b2 < b3 && b3 < 1.0))
            throw DomainError("split boundaries must be strictly increasing in (0,1)");
        if (!(window_fraction > 0.0)) throw DomainError("window_fraction must be > 0");
    }
};

struct LabeledInstance {
    Triplet triplet;
    PatternLabel label = PatternLabel::Edge;
    PatternTimes times;
    Split split = Split::Train;
};

// --- pair coverage primitives ----------------------------------------------

/// Earliest time a hyperedge covers both a and b, scanning the smaller
/// incidence list. nullopt when the pair is never covered.
inline std::optional<double> first_cover_time(const TemporalHypergraph& g, NodeId a, NodeId b) {
    if (a == b) throw DomainError("first_cover_time: identical nodes");
    auto ia = g.incidence(a), ib = g.incidence(b);
    if (ib.size() < ia.size()) {
        std::swap(a, b);
        std::swap(ia, ib);
    }
    for (const auto& ent : ia)
        if (g.edge_contains(ent.edge, b)) return ent.time;
    return std::nullopt;
}

/// All unordered pairs whose FIRST co-covering hyperedge has time in [lo, hi),
/// each pair once, sorted by (t, u, v). Sweeps edges in time order.
inline std::vector<std::pair<std::pair<NodeId, NodeId>, double>> first_interactions(
    const TemporalHypergraph& g, double lo, double hi) {
    if (!(lo < hi)) throw DomainError("first_interactions: lo must be < hi");
    std::unordered_set<std::uint64_t> seen;
    std::vector<std::pair<std::pair<NodeId, NodeId>, double>> out;
    const std::uint64_t shift = 32;
    for (std::size_t e = 0; e < g.n_edges(); ++e) {
        auto id = static_cast<EdgeId>(e);
        double t = g.edge_time(id);
        // Edges are time-sorted: any pair first seen from here on is out of
        // range, and pairs seen earlier already have their first time.
        if (t >= hi) break;
        auto ns = g.edge_nodes(id);
        for (std::size_t i = 0; i < ns.size(); ++i) {
            for (std::size_t j = i + 1; j < ns.size(); ++j) {
                std::uint64_t key = (static_cast<std::uint64_t>(ns[i]) << shift) |
                                    static_cast<std::uint64_t>(ns[j]);
                if (seen.insert(key).second && lo <= t && t < hi)
                    out.push_back({{ns[i], ns[j]}, t});
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::tie(a.second, a.first.first, a.first.second) <
               std::tie(b.second, b.first.first, b.first.second);
    });
    return out;
}

// --- triplet validity and labeling ------------------------------------------

/// Def.-3 validity: no hyperedge strictly before t covers two of {u,v,w},
/// some hyperedge at exactly t covers {u,v}, and no hyperedge at exactly t
/// covers w with u or v.
inline bool is_valid_triplet(const TemporalHypergraph& g, const Triplet& tr,
                             std::string* why = nullptr) {
    auto fail = [&](const char* msg) {
        if (why) *why = msg;
        return false;
    };
    if (tr.u == tr.v || tr.u == tr.w || tr.v == tr.w) return fail("nodes not distinct");
    if (tr.u < 0 || tr.v < 0 || tr.w < 0 ||
        std::max({tr.u, tr.v, tr.w}) >= static_cast<NodeId>(g.n_nodes()))
        return fail("node id out of range");
    auto fc_uv = first_cover_time(g, tr.u, tr.v);
    if (!fc_uv || *fc_uv != tr.t) return fail("t is not the first u-v interaction time");
    auto fc_uw = first_cover_time(g, tr.u, tr.w);
    if (fc_uw && *fc_uw <= tr.t) return fail("w covered with u at or before t");
    auto fc_vw = first_cover_time(g, tr.v, tr.w);
    if (fc_vw && *fc_vw <= tr.t) return fail("w covered with v at or before t");
    return true;
}

namespace detail {

// Label scan over w's incidences in (t, t+Tw]. Assumes the triplet is valid;
// the anchor and everything earlier is outside the scanned interval.
inline std::pair<PatternLabel, PatternTimes> label_valid_triplet(const TemporalHypergraph& g,
                                                                 const Triplet& tr, double t_w) {
    double hi = tr.t + t_w;
    std::optional<double> cover_u, cover_v, cover_all;
    auto inc = g.incidence(tr.w);
    auto it = std::lower_bound(inc.begin(), inc.end(), tr.t,
                               [](const IncidenceEntry& a, double v) { return a.time < v; });
    for (; it != inc.end() && it->time <= hi; ++it) {
        if (it->time <= tr.t) continue;  // strict left end
        bool has_u = g.edge_contains(it->edge, tr.u);
        bool has_v = g.edge_contains(it->edge, tr.v);
        if (has_u && !cover_u) cover_u = it->time;
        if (has_v && !cover_v) cover_v = it->time;
        if (has_u && has_v && !cover_all) {
            cover_all = it->time;
            break;  // nothing later can improve any first time
        }
        if (cover_u && cover_v && cover_all) break;
    }
    PatternTimes times;
    if (cover_u || cover_v)
        times.t_wedge = std::min(cover_u.value_or(std::numeric_limits<double>::infinity()),
                                 cover_v.value_or(std::numeric_limits<double>::infinity())) -
                        tr.t;
    if (cover_u && cover_v) times.t_triangle = std::max(*cover_u, *cover_v) - tr.t;
    if (cover_all) times.t_closure = *cover_all - tr.t;
    PatternLabel label = PatternLabel::Edge;
    if (cover_all) label = PatternLabel::Closure;
    else if (cover_u && cover_v) label = PatternLabel::Triangle;
    else if (cover_u || cover_v) label = PatternLabel::Wedge;
    return {label, times};
}

}  // namespace detail

/// Labels a valid triplet over (t, t+T_w]. Throws DomainError when the
/// triplet violates Def. 3.
inline std::pair<PatternLabel, PatternTimes> label_triplet(const TemporalHypergraph& g,
                                                           const Triplet& tr, double t_w) {
    if (!(t_w > 0.0)) throw DomainError("label_triplet: T_w must be > 0");
    std::string why;
    if (!is_valid_triplet(g, tr, &why)) throw DomainError("invalid triplet: " + why);
    return detail::label_valid_triplet(g, tr, t_w);
}

// --- candidate policies -------------------------------------------------------

struct CandidatePolicy {
    enum class Kind { TwoHop, Uniform, TwoHopUniform, Exhaustive } kind = Kind::TwoHopUniform;
    std::size_t n = 0;  // Uniform only: number of valid nodes requested
};

namespace detail {

inline bool third_is_valid(const TemporalHypergraph& g, NodeId u, NodeId v, double t, NodeId w) {
    if (w == u || w == v) return false;
    auto fc_uw = first_cover_time(g, u, w);
    if (fc_uw && *fc_uw <= t) return false;
    auto fc_vw = first_cover_time(g, v, w);
    return !(fc_vw && *fc_vw <= t);
}

inline void neighbors_before(const TemporalHypergraph& g, NodeId z, double t,
                             std::set<NodeId>& out) {
    for (const auto& ent : g.incident_before(z, t))
        for (NodeId x : g.edge_nodes(ent.edge))
            if (x != z) out.insert(x);
}

}  // namespace detail

/// Candidate third nodes for an anchored pair under a policy. All returned
/// nodes satisfy the Def.-3 constraints; order is ascending node id.
inline std::vector<NodeId> candidate_thirds(const TemporalHypergraph& g,
                                            std::pair<NodeId, NodeId> pair, double t,
                                            const CandidatePolicy& policy,
                                            std::uint64_t seed = 0) {
    NodeId u = std::min(pair.first, pair.second), v = std::max(pair.first, pair.second);
    std::set<NodeId> result;
    auto add_two_hop = [&] {
        std::set<NodeId> hop1;
        detail::neighbors_before(g, u, t, hop1);
        detail::neighbors_before(g, v, t, hop1);
        std::set<NodeId> hop2;
        for (NodeId x : hop1) detail::neighbors_before(g, x, t, hop2);
        for (NodeId w : hop2)
            if (detail::third_is_valid(g, u, v, t, w)) result.insert(w);
    };
    auto add_uniform = [&](std::size_t n) {
        if (g.n_nodes() < 3 || n == 0) return;
        Rng rng(mix_seed(mix_seed(mix_seed(mix_seed(seed, static_cast<std::uint64_t>(u)),
                                           static_cast<std::uint64_t>(v)),
                                  double_bits(t)),
                         0x1f3d5b79ull));
        std::size_t found = 0, attempts = 0, max_attempts = 20 * n + 200;
        while (found < n && attempts < max_attempts) {
            ++attempts;
            auto w = static_cast<NodeId>(rng.next_below(g.n_nodes()));
            if (result.count(w)) continue;
            if (detail::third_is_valid(g, u, v, t, w)) {
                result.insert(w);
                ++found;
            }
        }
    };
    switch (policy.kind) {
        case CandidatePolicy::Kind::TwoHop:
            add_two_hop();
            break;
        case CandidatePolicy::Kind::Uniform:
            add_uniform(policy.n);
            break;
        case CandidatePolicy::Kind::TwoHopUniform: {
            add_two_hop();
            add_uniform(result.size());
            break;
        }
        case CandidatePolicy::Kind::Exhaustive:
            for (NodeId w = 0; w < static_cast<NodeId>(g.n_nodes()); ++w)
                if (detail::third_is_valid(g, u, v, t, w)) result.insert(w);
            break;
        default:
            throw DomainError("unknown candidate policy");
    }
    return {result.begin(), result.end()};
}

// --- enumeration ---------------------------------------------------------------

namespace detail {

inline std::optional<Split> split_of(double t, double t0, double range, const SplitConfig& cfg) {
    double f = (t - t0) / range;
    if (f < cfg.b0 || f >= cfg.b3) return std::nullopt;
    if (f < cfg.b1) return Split::Train;
    if (f < cfg.b2) return Split::Valid;
    return Split::Test;
}

inline void sort_canonical(std::vector<LabeledInstance>& v) {
    std::sort(v.begin(), v.end(), [](const LabeledInstance& a, const LabeledInstance& b) {
        return std::tie(a.triplet.t, a.triplet.u, a.triplet.v, a.triplet.w) <
               std::tie(b.triplet.t, b.triplet.u, b.triplet.v, b.triplet.w);
    });
}

}  // namespace detail

/// Enumerates labeled instances: anchors from first u-v interactions inside
/// the split range, thirds from the policy, labels over (t, t+T_w]. Output is
/// canonically ordered by (t, u, v, w) so it is independent of traversal
/// order. Labeling near the test boundary reads edges beyond b3*T.
inline std::vector<LabeledInstance> enumerate_instances(const TemporalHypergraph& g,
                                                        const SplitConfig& cfg,
                                                        const CandidatePolicy& policy) {
    cfg.validate();
    if (g.empty()) throw DomainError("enumerate_instances: empty graph");
    double t0 = g.min_time(), range = g.time_range();
    if (range <= 0.0) throw DomainError("enumerate_instances: degenerate time range");
    double t_w = cfg.window_fraction * range;
    auto anchors = first_interactions(g, t0 + cfg.b0 * range, t0 + cfg.b3 * range);
    std::vector<LabeledInstance> out;
    for (const auto& [pr, t] : anchors) {
        auto split = detail::split_of(t, t0, range, cfg);
        if (!split) continue;
        for (NodeId w : candidate_thirds(g, pr, t, policy, cfg.seed)) {
            LabeledInstance inst;
            inst.triplet = {pr.first, pr.second, w, t};
            auto [label, times] = detail::label_valid_triplet(g, inst.triplet, t_w);
            inst.label = label;
            inst.times = times;
            inst.split = *split;
            out.push_back(inst);
        }
    }
    detail::sort_canonical(out);
    int n_train = 0, n_valid = 0, n_test = 0;
    for (const auto& i : out) {
        if (i.split == Split::Train) ++n_train;
        else if (i.split == Split::Valid) ++n_valid;
        else ++n_test;
    }
    if (n_train == 0 || n_valid == 0 || n_test == 0)
        std::cerr << "warning: empty split in enumeration (train=" << n_train
                  << " valid=" << n_valid << " test=" << n_test << ")\n";
    return out;
}

/// Per split, downsamples every class to that split's minimum class size,
/// without replacement, deterministically from the seed. A class absent from
/// a split is an error naming the class and split.
inline std::vector<LabeledInstance> balance_classes(const std::vector<LabeledInstance>& instances,
                                                    std::uint64_t seed) {
    std::vector<LabeledInstance> out;
    for (Split sp : {Split::Train, Split::Valid, Split::Test}) {
        std::array<std::vector<std::size_t>, 4> per_class;
        for (std::size_t i = 0; i < instances.size(); ++i)
            if (instances[i].split == sp)
                per_class[static_cast<int>(instances[i].label)].push_back(i);
        bool split_present = false;
        for (const auto& c : per_class) split_present = split_present || !c.empty();
        if (!split_present) continue;  // whole split absent: nothing to balance
        std::size_t n_min = std::numeric_limits<std::size_t>::max();
        for (int c = 0; c < 4; ++c) {
            if (per_class[c].empty())
                throw DomainError(std::string("balance_classes: class '") +
                                  label_name(static_cast<PatternLabel>(c)) +
                                  "' is empty in split '" + split_name(sp) + "'");
            n_min = std::min(n_min, per_class[c].size());
        }
        Rng rng(mix_seed(mix_seed(seed, 0xba1a9ceull), static_cast<std::uint64_t>(sp)));
        for (int c = 0; c < 4; ++c) {
            auto picks = rng.sample_without_replacement(per_class[c].size(), n_min);
            for (auto k : picks) out.push_back(instances[per_class[c][k]]);
        }
    }
    detail::sort_canonical(out);
    return out;
}

// --- instance (de)serialization -------------------------------------------------

/// Lines of "u,v,w,t,label,t_wedge,t_triangle,t_closure,split" with NA for
/// absent times. `header_lines` are embedded as leading '#' comments.
inline std::string format_instances(const std::vector<LabeledInstance>& instances,
                                    const std::vector<std::string>& header_lines = {}) {
    std::string s;
    for (const auto& h : header_lines) s += "# " + h + "\n";
    for (const auto& in : instances) {
        s += std::to_string(in.triplet.u) + "," + std::to_string(in.triplet.v) + "," +
             std::to_string(in.triplet.w) + "," + fmt_double(in.triplet.t) + "," +
             label_name(in.label) + "," + fmt_optional(in.times.t_wedge) + "," +
             fmt_optional(in.times.t_triangle) + "," + fmt_optional(in.times.t_closure) + "," +
             split_name(in.split) + "\n";
    }
    return s;
}

inline void write_instances(const std::filesystem::path& path,
                            const std::vector<LabeledInstance>& instances,
                            const std::vector<std::string>& header_lines = {}) {
    atomic_write_file(path, format_instances(instances, header_lines));
}

inline std::vector<LabeledInstance> parse_instances(const std::string& text,
                                                    const std::string& origin = "<string>") {
    std::vector<LabeledInstance> out;
    std::size_t line_no = 0, start = 0;
    auto parse_opt = [&](const std::string& tok) -> std::optional<double> {
        if (tok == "NA") return std::nullopt;
        double v;
        if (!detail::parse_f64(tok, v)) throw ParseError(origin, line_no, "bad time '" + tok + "'");
        return v;
    };
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        ++line_no;
        std::string line = trim(text.substr(start, end - start));
        if (!line.empty() && line[0] != '#') {
            auto f = split_on(line, ',');
            if (f.size() != 9)
                throw ParseError(origin, line_no,
                                 "expected 9 fields, got " + std::to_string(f.size()));
            LabeledInstance in;
            try {
                in.triplet.u = std::stoi(trim(f[0]));
                in.triplet.v = std::stoi(trim(f[1]));
                in.triplet.w = std::stoi(trim(f[2]));
                in.triplet.t = std::stod(trim(f[3]));
            } catch (const std::exception&) {
                throw ParseError(origin, line_no, "bad numeric field");
            }
            auto lbl = label_from_name(trim(f[4]));
            if (!lbl) throw ParseError(origin, line_no, "unknown label '" + f[4] + "'");
            in.label = *lbl;
            in.times.t_wedge = parse_opt(trim(f[5]));
            in.times.t_triangle = parse_opt(trim(f[6]));
            in.times.t_closure = parse_opt(trim(f[7]));
            auto sp = split_from_name(trim(f[8]));
            if (!sp) throw ParseError(origin, line_no, "unknown split '" + f[8] + "'");
            in.split = *sp;
            out.push_back(in);
        }
        if (end == text.size()) break;
        start = end + 1;
    }
    return out;
}

inline std::vector<LabeledInstance> read_instances(const std::filesystem::path& path) {
    return parse_instances(read_file(path), path.string());
}

}  // namespace hop
