#pragma once

// Temporal hypergraph store.
//
// A temporal hypergraph is a sequence of hyperedges (node sets, |e| >= 2) with
// timestamps. Duplicate (nodes, time) hyperedges are preserved, never merged:
// repeated interactions carry signal and dedup would change walk probabilities.
// The store is immutable after build; concurrent reads are safe.
//
// Storage is CSR-style: one flat node array plus offsets, and a per-node
// incidence index sorted by time. All history queries are strict (< t).

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hop/common.hpp"

namespace hop {

struct TemporalHyperedge {
    std::vector<NodeId> nodes;  // sorted, deduplicated, size >= 2
    double time = 0.0;
};

struct IncidenceEntry {
    EdgeId edge;
    double time;
};

struct DatasetStats {
    std::size_t n_nodes = 0;
    std::size_t n_hyperedges = 0;
    double avg_size = 0.0;
    double std_size = 0.0;   // population standard deviation
    double time_range = 0.0;
    double edge_intensity = 0.0;  // 2*|E|*avg_size^2 / (|V|*T)

    std::string to_json() const {
        std::string s = "{\n";
        s += "  \"n_nodes\": " + std::to_string(n_nodes) + ",\n";
        s += "  \"n_hyperedges\": " + std::to_string(n_hyperedges) + ",\n";
        s += "  \"avg_size\": " + fmt_double(avg_size) + ",\n";
        s += "  \"std_size\": " + fmt_double(std_size) + ",\n";
        s += "  \"time_range\": " + fmt_double(time_range) + ",\n";
        s += "  \"edge_intensity\": " + fmt_double(edge_intensity) + "\n";
        s += "}\n";
        return s;
    }
};

class TemporalHypergraph {
public:
    TemporalHypergraph() = default;

    /// Builds the store from explicit hyperedges. Node lists are sorted and
    /// deduplicated here; an edge with fewer than 2 distinct nodes is a
    /// caller error (ingestion is responsible for dropping singletons).
    /// Edges are stably sorted by time, so equal-timestamp edges keep their
    /// input order and edge ids are positions in that sorted order.
    static TemporalHypergraph build(std::vector<TemporalHyperedge> edges) {
        TemporalHypergraph g;
        std::stable_sort(edges.begin(), edges.end(),
                         [](const TemporalHyperedge& a, const TemporalHyperedge& b) {
                             return a.time < b.time;
                         });
        g.edge_off_.reserve(edges.size() + 1);
        g.edge_off_.push_back(0);
        g.edge_time_.reserve(edges.size());
        NodeId max_id = -1;
        for (auto& e : edges) {
            std::sort(e.nodes.begin(), e.nodes.end());
            e.nodes.erase(std::unique(e.nodes.begin(), e.nodes.end()), e.nodes.end());
            if (e.nodes.size() < 2)
                throw DomainError("hyperedge with fewer than 2 distinct nodes");
            if (e.nodes.front() < 0) throw DomainError("negative node id");
            if (!std::isfinite(e.time)) throw DomainError("non-finite timestamp");
            max_id = std::max(max_id, e.nodes.back());
            g.edge_nodes_.insert(g.edge_nodes_.end(), e.nodes.begin(), e.nodes.end());
            g.edge_off_.push_back(g.edge_nodes_.size());
            g.edge_time_.push_back(e.time);
        }
        g.n_nodes_ = static_cast<std::size_t>(max_id + 1);
        g.build_incidence();
        return g;
    }

    std::size_t n_nodes() const { return n_nodes_; }
    std::size_t n_edges() const { return edge_time_.size(); }
    bool empty() const { return edge_time_.empty(); }

    std::span<const NodeId> edge_nodes(EdgeId e) const {
        return {edge_nodes_.data() + edge_off_[e], edge_off_[e + 1] - edge_off_[e]};
    }
    std::size_t edge_size(EdgeId e) const { return edge_off_[e + 1] - edge_off_[e]; }
    double edge_time(EdgeId e) const { return edge_time_[static_cast<std::size_t>(e)]; }

    bool edge_contains(EdgeId e, NodeId z) const {
        auto ns = edge_nodes(e);
        return std::binary_search(ns.begin(), ns.end(), z);
    }

    std::span<const IncidenceEntry> incidence(NodeId z) const {
        return {inc_.data() + inc_off_[z], inc_off_[z + 1] - inc_off_[z]};
    }

    /// All incidences of z with time strictly before t, sorted by time.
    std::span<const IncidenceEntry> incident_before(NodeId z, double t) const {
        auto all = incidence(z);
        auto it = std::lower_bound(all.begin(), all.end(), t,
                                   [](const IncidenceEntry& a, double v) { return a.time < v; });
        return all.subspan(0, static_cast<std::size_t>(it - all.begin()));
    }

    double min_time() const { return edge_time_.empty() ? 0.0 : edge_time_.front(); }
    double max_time() const { return edge_time_.empty() ? 0.0 : edge_time_.back(); }
    double time_range() const { return max_time() - min_time(); }

    DatasetStats stats() const {
        if (empty()) throw DomainError("stats() on empty graph");
        DatasetStats s;
        s.n_nodes = n_nodes_;
        s.n_hyperedges = n_edges();
        double sum = 0.0, sum2 = 0.0;
        for (std::size_t e = 0; e < n_edges(); ++e) {
            double sz = static_cast<double>(edge_size(static_cast<EdgeId>(e)));
            sum += sz;
            sum2 += sz * sz;
        }
        double n = static_cast<double>(n_edges());
        s.avg_size = sum / n;
        double var = std::max(0.0, sum2 / n - s.avg_size * s.avg_size);
        s.std_size = std::sqrt(var);
        s.time_range = time_range();
        s.edge_intensity =
            s.time_range > 0.0
                ? 2.0 * n * s.avg_size * s.avg_size / (static_cast<double>(n_nodes_) * s.time_range)
                : std::numeric_limits<double>::infinity();
        return s;
    }

    /// Shifts the minimum timestamp to 0 and rescales so that the average
    /// edge intensity 2|E|avg^2/(|V|T) equals target_intensity. Relative
    /// edge order and all time ratios are preserved. The extremes map to
    /// 0 and the new range exactly ((t-min)/T rounds to 0 and 1 there);
    /// the resulting intensity matches target to within a rounding or two.
    TemporalHypergraph normalize_time(double target_intensity = 1e-5) const {
        if (empty()) throw DomainError("normalize_time on empty graph");
        if (!(target_intensity > 0.0)) throw DomainError("target_intensity must be > 0");
        double t_raw = time_range();
        if (t_raw <= 0.0) throw DomainError("degenerate time range: all timestamps equal");
        DatasetStats s = stats();
        double c = 2.0 * static_cast<double>(n_edges()) * s.avg_size * s.avg_size /
                   static_cast<double>(n_nodes_);
        double t_new = c / target_intensity;
        TemporalHypergraph g = *this;
        double lo = min_time();
        for (auto& t : g.edge_time_) t = (t - lo) / t_raw * t_new;
        g.build_incidence();  // refresh stored times in the index
        return g;
    }

    // --- versioned binary cache -------------------------------------------
    // Layout: magic, version, n_nodes, n_edges, total node slots, then
    // sizes[u32], times[f64], nodes[i32]. Incidence is rebuilt on load.

    void save_cache(const std::filesystem::path& path) const {
        std::string buf;
        auto put = [&buf](const void* p, std::size_t n) {
            buf.append(static_cast<const char*>(p), n);
        };
        const char magic[8] = {'H', 'O', 'P', 'G', 'R', 'A', 'F', '\0'};
        put(magic, 8);
        std::uint32_t version = 1;
        put(&version, 4);
        std::uint64_t nn = n_nodes_, ne = n_edges(), tot = edge_nodes_.size();
        put(&nn, 8);
        put(&ne, 8);
        put(&tot, 8);
        for (std::size_t e = 0; e < n_edges(); ++e) {
            std::uint32_t sz = static_cast<std::uint32_t>(edge_size(static_cast<EdgeId>(e)));
            put(&sz, 4);
        }
        put(edge_time_.data(), edge_time_.size() * sizeof(double));
        put(edge_nodes_.data(), edge_nodes_.size() * sizeof(NodeId));
        atomic_write_file(path, buf);
    }

    static TemporalHypergraph load_cache(const std::filesystem::path& path) {
        std::string buf = read_file(path);
        std::size_t pos = 0;
        auto get = [&](void* p, std::size_t n) {
            if (pos + n > buf.size()) throw ParseError("truncated graph cache: " + path.string());
            std::memcpy(p, buf.data() + pos, n);
            pos += n;
        };
        char magic[8];
        get(magic, 8);
        if (std::string(magic, 7) != "HOPGRAF")
            throw ParseError("bad magic in graph cache: " + path.string());
        std::uint32_t version;
        get(&version, 4);
        if (version != 1)
            throw ParseError("unsupported graph cache version " + std::to_string(version));
        std::uint64_t nn, ne, tot;
        get(&nn, 8);
        get(&ne, 8);
        get(&tot, 8);
        TemporalHypergraph g;
        g.n_nodes_ = nn;
        g.edge_off_.resize(ne + 1);
        g.edge_off_[0] = 0;
        for (std::size_t e = 0; e < ne; ++e) {
            std::uint32_t sz;
            get(&sz, 4);
            g.edge_off_[e + 1] = g.edge_off_[e] + sz;
        }
        if (g.edge_off_[ne] != tot) throw ParseError("inconsistent node counts in graph cache");
        g.edge_time_.resize(ne);
        get(g.edge_time_.data(), ne * sizeof(double));
        g.edge_nodes_.resize(tot);
        get(g.edge_nodes_.data(), tot * sizeof(NodeId));
        if (pos != buf.size()) throw ParseError("trailing bytes in graph cache");
        for (std::size_t e = 1; e < ne; ++e)
            if (g.edge_time_[e] < g.edge_time_[e - 1])
                throw ParseError("graph cache edges not time-sorted");
        g.build_incidence();
        return g;
    }

    bool operator==(const TemporalHypergraph& o) const {
        return n_nodes_ == o.n_nodes_ && edge_off_ == o.edge_off_ &&
               edge_nodes_ == o.edge_nodes_ && edge_time_ == o.edge_time_;
    }

private:
    void build_incidence() {
        inc_off_.assign(n_nodes_ + 1, 0);
        for (NodeId v : edge_nodes_) inc_off_[static_cast<std::size_t>(v) + 1]++;
        for (std::size_t i = 1; i <= n_nodes_; ++i) inc_off_[i] += inc_off_[i - 1];
        inc_.resize(edge_nodes_.size());
        std::vector<std::size_t> cursor(inc_off_.begin(), inc_off_.end() - 1);
        // Edges are time-sorted, so per-node incidence comes out time-sorted.
        for (std::size_t e = 0; e < n_edges(); ++e) {
            for (NodeId v : edge_nodes(static_cast<EdgeId>(e)))
                inc_[cursor[static_cast<std::size_t>(v)]++] = {static_cast<EdgeId>(e),
                                                               edge_time_[e]};
        }
    }

    std::size_t n_nodes_ = 0;
    std::vector<std::size_t> edge_off_;   // n_edges + 1
    std::vector<NodeId> edge_nodes_;      // flat, sorted within each edge
    std::vector<double> edge_time_;       // non-decreasing
    std::vector<std::size_t> inc_off_;    // n_nodes + 1
    std::vector<IncidenceEntry> inc_;
};

// --- three-file text ingestion ---------------------------------------------

struct IngestResult {
    std::vector<TemporalHyperedge> edges;   // file order, ids remapped
    std::vector<std::int64_t> original_ids; // original_ids[new_id] = raw id
    std::size_t singletons_dropped = 0;
};

namespace detail {

// One numeric token per line; blank lines are ignored. Line numbers are
// tracked for error messages.
template <typename T, typename Parse>
std::vector<T> parse_column(const std::filesystem::path& path, Parse parse) {
    std::string text = read_file(path);
    std::vector<T> out;
    std::size_t line_no = 0, start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        ++line_no;
        std::string tok = trim(text.substr(start, end - start));
        if (!tok.empty()) {
            T v;
            if (!parse(tok, v))
                throw ParseError(path.string(), line_no, "malformed value '" + tok + "'");
            out.push_back(v);
        }
        if (end == text.size()) break;
        start = end + 1;
    }
    return out;
}

inline bool parse_i64(const std::string& s, std::int64_t& v) {
    char* end = nullptr;
    errno = 0;
    long long x = std::strtoll(s.c_str(), &end, 10);
    if (errno != 0 || end == s.c_str() || *end != '\0') return false;
    v = x;
    return true;
}

inline bool parse_f64(const std::string& s, double& v) {
    char* end = nullptr;
    errno = 0;
    double x = std::strtod(s.c_str(), &end);
    if (errno != 0 || end == s.c_str() || *end != '\0' || !std::isfinite(x)) return false;
    v = x;
    return true;
}

}  // namespace detail

/// Reads the three-file simplicial format: one simplex size per line in
/// `nverts`, node ids one per line concatenated in `simplices`, one timestamp
/// per line in `times`. Node ids are remapped to dense 0-based ids in order
/// of first appearance within retained simplices. Simplices with fewer than
/// 2 distinct nodes are dropped and counted.
inline IngestResult ingest_benson(const std::filesystem::path& nverts_path,
                                  const std::filesystem::path& simplices_path,
                                  const std::filesystem::path& times_path) {
    auto nverts = detail::parse_column<std::int64_t>(nverts_path, detail::parse_i64);
    auto simplices = detail::parse_column<std::int64_t>(simplices_path, detail::parse_i64);
    auto times = detail::parse_column<double>(times_path, detail::parse_f64);

    if (nverts.size() != times.size())
        throw ParseError("format error: " + nverts_path.string() + " has " +
                         std::to_string(nverts.size()) + " entries but " + times_path.string() +
                         " has " + std::to_string(times.size()));
    std::size_t total = 0;
    for (std::size_t i = 0; i < nverts.size(); ++i) {
        if (nverts[i] <= 0)
            throw ParseError(nverts_path.string(), i + 1, "non-positive simplex size");
        total += static_cast<std::size_t>(nverts[i]);
    }
    if (total != simplices.size())
        throw ParseError("format error: " + nverts_path.string() + " sums to " +
                         std::to_string(total) + " node slots but " + simplices_path.string() +
                         " has " + std::to_string(simplices.size()));

    IngestResult res;
    res.edges.reserve(nverts.size());
    std::unordered_map<std::int64_t, NodeId> remap;
    std::size_t cursor = 0;
    std::vector<std::int64_t> raw;
    for (std::size_t i = 0; i < nverts.size(); ++i) {
        std::size_t sz = static_cast<std::size_t>(nverts[i]);
        raw.assign(simplices.begin() + static_cast<std::ptrdiff_t>(cursor),
                   simplices.begin() + static_cast<std::ptrdiff_t>(cursor + sz));
        cursor += sz;
        std::sort(raw.begin(), raw.end());
        raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
        if (raw.size() < 2) {
            res.singletons_dropped++;
            continue;
        }
        // Remap in the simplex's file order of first appearance.
        TemporalHyperedge e;
        e.time = times[i];
        e.nodes.reserve(raw.size());
        for (std::size_t k = cursor - sz; k < cursor; ++k) {
            std::int64_t id = simplices[k];
            auto [it, inserted] = remap.try_emplace(id, static_cast<NodeId>(remap.size()));
            if (inserted) res.original_ids.push_back(id);
            if (std::find(e.nodes.begin(), e.nodes.end(), it->second) == e.nodes.end())
                e.nodes.push_back(it->second);
        }
        std::sort(e.nodes.begin(), e.nodes.end());
        res.edges.push_back(std::move(e));
    }
    return res;
}

}  // namespace hop
