#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hop/model.hpp"
#include "hop/train.hpp"

namespace hop {

// Role-aware identity of a walk position: the unordered pair of SPD codes
// with respect to the u and v walk sets, plus the code with respect to w's.
// Codes 0..m are shortest positions; m+1 is the X bucket (never seen within
// m hops). The pair is stored sorted so u/v relabeling cannot change it.
struct WalkCategory {
    struct Entry {
        int pair_lo = 0;
        int pair_hi = 0;
        int w = 0;
        auto operator<=>(const Entry&) const = default;
    };
    std::vector<Entry> entries;  // one per position 0..m

    bool operator==(const WalkCategory& o) const { return entries == o.entries; }
    bool operator<(const WalkCategory& o) const { return entries < o.entries; }

    // "({0,x},x)({1,1},1)({2,x},x)"; x marks the out-of-range bucket.
    std::string str() const {
        int x = entries.empty() ? 0 : static_cast<int>(entries.size());
        std::ostringstream os;
        auto code = [&](int c) {
            if (c >= x)
                os << 'x';
            else
                os << c;
        };
        for (const auto& e : entries) {
            os << "({";
            code(e.pair_lo);
            os << ',';
            code(e.pair_hi);
            os << "},";
            code(e.w);
            os << ')';
        }
        return os.str();
    }
};

/// Category of one walk under a triplet's SPD table. Positions the walk
/// never reached (truncation) fall in the X bucket for all three roles.
inline WalkCategory categorize(const Walk& walk, const SpdTable& table) {
    int m = table.m;
    int x = m + 1;
    auto mapped = [&](int c) { return c == kSpdNone ? x : c; };
    WalkCategory cat;
    cat.entries.assign(static_cast<std::size_t>(m) + 1, {x, x, x});
    std::size_t n = std::min(walk.steps.size(), static_cast<std::size_t>(m) + 1);
    for (std::size_t i = 0; i < n; ++i) {
        auto codes = table.of(walk.steps[i].node);
        int cu = mapped(codes[0]);
        int cv = mapped(codes[1]);
        cat.entries[i] = {std::min(cu, cv), std::max(cu, cv), mapped(codes[2])};
    }
    return cat;
}

struct CategoryReport {
    WalkCategory category;
    double mean_score = 0.0;  // mean per-walk C_W under the trained head
    std::size_t count = 0;
    double class_ratio = 0.0;  // occurrences among p1 instances / total
};

struct RankConfig {
    std::size_t min_support = 30;    // categories below this are dropped
    std::size_t max_instances = 3000;  // cap on scored test examples
};

namespace detail {

struct CategoryCell {
    double sum = 0.0;
    std::size_t count = 0;
    std::size_t p1 = 0;
};

using CategoryCells = std::map<WalkCategory, CategoryCell>;

}  // namespace detail

/// Folds every walk of one triplet context into the running category cells.
inline void accumulate_categories(const Q3Model& model, const TripletContext& ctx, bool is_p1,
                                  detail::CategoryCells& cells) {
    SpdTable table = SpdTable::build(ctx, model.m);
    for (int r = 0; r < 3; ++r) {
        for (const auto& w : ctx.by_index(r).walks) {
            auto& cell = cells[categorize(w, table)];
            cell.sum += model.head.score(q3_walk_features(w, table));
            cell.count += 1;
            if (is_p1) cell.p1 += 1;
        }
    }
}

/// Cells -> reports sorted by mean C_W descending; equal means fall back to
/// the canonical (ascending) category order, so ranking is a pure function
/// of the inputs.
inline std::vector<CategoryReport> finalize_categories(const detail::CategoryCells& cells,
                                                       std::size_t min_support) {
    std::vector<CategoryReport> out;
    for (const auto& [cat, cell] : cells) {
        if (cell.count < min_support) continue;
        out.push_back({cat, cell.sum / static_cast<double>(cell.count), cell.count,
                       static_cast<double>(cell.p1) / static_cast<double>(cell.count)});
    }
    std::sort(out.begin(), out.end(), [](const CategoryReport& a, const CategoryReport& b) {
        if (a.mean_score != b.mean_score) return a.mean_score > b.mean_score;
        return a.category < b.category;
    });
    return out;
}

/// Category table for a trained head over the task's test instances.
inline std::vector<CategoryReport> rank_categories(const Q3Model& model,
                                                   const TemporalHypergraph& g,
                                                   const std::vector<LabeledInstance>& test,
                                                   const Q3Task& task, const SamplerConfig& sc,
                                                   const RankConfig& rc = {}) {
    auto insts = q3_filter(test, task);
    if (insts.empty()) throw DomainError("rank_categories: no test instances in task");
    if (insts.size() > rc.max_instances) insts.resize(rc.max_instances);
    detail::CategoryCells cells;
    for (const auto& inst : insts)
        accumulate_categories(model, instance_context(g, inst, sc), task.in_p1(inst.label), cells);
    return finalize_categories(cells, rc.min_support);
}

inline std::string category_csv(const std::vector<CategoryReport>& reports) {
    std::ostringstream os;
    os.precision(17);
    os << "category,mean_C_W,count,class_ratio\n";
    for (const auto& r : reports)
        os << r.category.str() << ',' << r.mean_score << ',' << r.count << ',' << r.class_ratio
           << '\n';
    return os.str();
}

}  // namespace hop
