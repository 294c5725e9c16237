#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "helpers.hpp"
#include "hop/pattern_index.hpp"
#include "hop/patterns.hpp"

using namespace hop;

namespace {

// u=0, v=1, w=2 with first u-v interaction at t=10; extra nodes for context.
TemporalHypergraph window_fixture(std::vector<TemporalHyperedge> tail) {
    std::vector<TemporalHyperedge> edges = {{{0, 3}, 1.0}, {{1, 4}, 2.0}, {{2, 5}, 3.0},
                                            {{0, 1}, 10.0}};
    for (auto& e : tail) edges.push_back(std::move(e));
    return TemporalHypergraph::build(std::move(edges));
}

SplitConfig test_cfg(std::uint64_t seed = 1) {
    SplitConfig cfg;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("first_interactions reports each pair once at its first time", "[patterns]") {
    auto g = TemporalHypergraph::build({{{0, 1}, 1.0}, {{0, 1}, 5.0}});
    auto r = first_interactions(g, 0.0, 10.0);
    REQUIRE(r.size() == 1);
    CHECK(r[0].first == std::pair<NodeId, NodeId>{0, 1});
    CHECK(r[0].second == 1.0);
}

TEST_CASE("a hyperedge covers all its pairs", "[patterns]") {
    auto g = TemporalHypergraph::build({{{0, 1, 2}, 3.0}});
    auto r = first_interactions(g, 0.0, 10.0);
    REQUIRE(r.size() == 3);
    CHECK(r[0].first == std::pair<NodeId, NodeId>{0, 1});
    CHECK(r[1].first == std::pair<NodeId, NodeId>{0, 2});
    CHECK(r[2].first == std::pair<NodeId, NodeId>{1, 2});
    for (const auto& [pr, t] : r) CHECK(t == 3.0);
}

TEST_CASE("first_interactions matches quadratic oracle", "[patterns]") {
    hop::Rng rng(21);
    for (int trial = 0; trial < 15; ++trial) {
        auto g = hoptest::random_graph(rng, 30, 80);
        double lo = 5.0, hi = 40.0;
        auto fast = first_interactions(g, lo, hi);
        std::vector<std::pair<std::pair<NodeId, NodeId>, double>> slow;
        for (NodeId a = 0; a < static_cast<NodeId>(g.n_nodes()); ++a)
            for (NodeId b = a + 1; b < static_cast<NodeId>(g.n_nodes()); ++b) {
                auto fc = hoptest::first_cover_oracle(g, a, b);
                if (fc && lo <= *fc && *fc < hi) slow.push_back({{a, b}, *fc});
            }
        std::sort(slow.begin(), slow.end(), [](const auto& x, const auto& y) {
            return std::tie(x.second, x.first.first, x.first.second) <
                   std::tie(y.second, y.first.first, y.first.second);
        });
        REQUIRE(fast.size() == slow.size());
        for (std::size_t i = 0; i < fast.size(); ++i) {
            CHECK(fast[i].first == slow[i].first);
            CHECK(fast[i].second == slow[i].second);
        }
    }
}

TEST_CASE("first_cover_time agrees with oracle", "[patterns]") {
    hop::Rng rng(22);
    auto g = hoptest::random_graph(rng, 12, 50);
    for (NodeId a = 0; a < 12; ++a)
        for (NodeId b = a + 1; b < 12; ++b)
            CHECK(first_cover_time(g, a, b) == hoptest::first_cover_oracle(g, a, b));
}

TEST_CASE("label_triplet: wedge example", "[patterns]") {
    auto g = window_fixture({{{0, 2}, 11.0}});
    auto [label, times] = label_triplet(g, {0, 1, 2, 10.0}, 5.0);
    CHECK(label == PatternLabel::Wedge);
    REQUIRE(times.t_wedge);
    CHECK(*times.t_wedge == 1.0);
    CHECK_FALSE(times.t_triangle);
    CHECK_FALSE(times.t_closure);
}

TEST_CASE("label_triplet: triangle example", "[patterns]") {
    auto g = window_fixture({{{0, 2}, 11.0}, {{1, 2}, 12.0}});
    auto [label, times] = label_triplet(g, {0, 1, 2, 10.0}, 5.0);
    CHECK(label == PatternLabel::Triangle);
    REQUIRE(times.t_wedge);
    REQUIRE(times.t_triangle);
    CHECK(*times.t_wedge == 1.0);
    CHECK(*times.t_triangle == 2.0);
    CHECK_FALSE(times.t_closure);
}

TEST_CASE("label_triplet: closure via triple hyperedge covers both pairs", "[patterns]") {
    auto g = window_fixture({{{0, 1, 2}, 11.0}});
    auto [label, times] = label_triplet(g, {0, 1, 2, 10.0}, 5.0);
    CHECK(label == PatternLabel::Closure);
    REQUIRE(times.t_closure);
    CHECK(*times.t_closure == 1.0);
    CHECK(*times.t_wedge == 1.0);
    CHECK(*times.t_triangle == 1.0);
}

TEST_CASE("label_triplet: edge when window is quiet", "[patterns]") {
    auto g = window_fixture({{{0, 2}, 100.0}});  // beyond the window
    auto [label, times] = label_triplet(g, {0, 1, 2, 10.0}, 5.0);
    CHECK(label == PatternLabel::Edge);
    CHECK_FALSE(times.t_wedge);
}

TEST_CASE("label_triplet window is strict at t, inclusive at t+Tw", "[patterns]") {
    // Coverage exactly at t does not count (and in fact invalidates w);
    // coverage exactly at t+Tw does count.
    auto g = window_fixture({{{0, 2}, 15.0}});
    auto [label, times] = label_triplet(g, {0, 1, 2, 10.0}, 5.0);
    CHECK(label == PatternLabel::Wedge);
    CHECK(*times.t_wedge == 5.0);
}

TEST_CASE("label_triplet rejects invalid triplets", "[patterns]") {
    auto g1 = window_fixture({});
    CHECK_THROWS_AS(label_triplet(g1, {0, 1, 2, 9.0}, 5.0), DomainError);   // wrong anchor
    CHECK_THROWS_AS(label_triplet(g1, {0, 1, 1, 10.0}, 5.0), DomainError);  // repeated node
    CHECK_THROWS_AS(label_triplet(g1, {0, 1, 2, 10.0}, 0.0), DomainError);  // bad window
    // w covered with u before t
    auto g2 = window_fixture({{{0, 2}, 5.0}});
    CHECK_THROWS_AS(label_triplet(g2, {0, 1, 2, 10.0}, 5.0), DomainError);
    // w covered with v at exactly t by a simultaneous hyperedge
    auto g3 = window_fixture({{{1, 2}, 10.0}});
    CHECK_THROWS_AS(label_triplet(g3, {0, 1, 2, 10.0}, 5.0), DomainError);
}

TEST_CASE("candidate_thirds: exhaustive equals brute-force filter", "[patterns]") {
    hop::Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        auto g = hoptest::random_graph(rng, 10, 35);
        auto anchors = first_interactions(g, 0.0, 1e18);
        for (const auto& [pr, t] : anchors) {
            auto cand = candidate_thirds(g, pr, t, {CandidatePolicy::Kind::Exhaustive, 0});
            std::vector<NodeId> expect;
            for (NodeId w = 0; w < static_cast<NodeId>(g.n_nodes()); ++w) {
                if (w == pr.first || w == pr.second) continue;
                auto fu = hoptest::first_cover_oracle(g, pr.first, w);
                auto fv = hoptest::first_cover_oracle(g, pr.second, w);
                if ((fu && *fu <= t) || (fv && *fv <= t)) continue;
                expect.push_back(w);
            }
            CHECK(cand == expect);
        }
    }
}

TEST_CASE("candidate_thirds excludes anchor-hyperedge co-members", "[patterns]") {
    // Anchor hyperedge {u,v,x}: x is covered with u at time t, so x is out.
    auto g = TemporalHypergraph::build({{{0, 5}, 1.0}, {{0, 1, 2}, 10.0}, {{3, 5}, 2.0}});
    auto cand = candidate_thirds(g, {0, 1}, 10.0, {CandidatePolicy::Kind::Exhaustive, 0});
    CHECK(std::find(cand.begin(), cand.end(), 2) == cand.end());
    CHECK(std::find(cand.begin(), cand.end(), 3) != cand.end());
}

TEST_CASE("candidate_thirds: two_hop stays within validity and 2-hop reach", "[patterns]") {
    // 0-1 anchor at t=10; 3 is a pre-t neighbor of 0; 6 shares a pre-t edge
    // with 3 (two-hop); 7 is isolated (not two-hop).
    auto g = TemporalHypergraph::build(
        {{{0, 3}, 1.0}, {{3, 6}, 2.0}, {{1, 4}, 3.0}, {{7, 8}, 50.0}, {{0, 1}, 10.0}});
    auto cand = candidate_thirds(g, {0, 1}, 10.0, {CandidatePolicy::Kind::TwoHop, 0});
    CHECK(std::find(cand.begin(), cand.end(), 6) != cand.end());
    CHECK(std::find(cand.begin(), cand.end(), 7) == cand.end());
    // 3 and 4 are direct pre-t neighbors, hence invalid thirds.
    CHECK(std::find(cand.begin(), cand.end(), 3) == cand.end());
    CHECK(std::find(cand.begin(), cand.end(), 4) == cand.end());
}

TEST_CASE("candidate_thirds: uniform policy is deterministic and valid", "[patterns]") {
    hop::Rng rng(33);
    auto g = hoptest::random_graph(rng, 20, 60);
    auto anchors = first_interactions(g, 0.0, 1e18);
    REQUIRE(!anchors.empty());
    auto [pr, t] = anchors[anchors.size() / 2];
    auto a = candidate_thirds(g, pr, t, {CandidatePolicy::Kind::Uniform, 5}, 99);
    auto b = candidate_thirds(g, pr, t, {CandidatePolicy::Kind::Uniform, 5}, 99);
    CHECK(a == b);
    for (NodeId w : a) {
        auto fu = hoptest::first_cover_oracle(g, pr.first, w);
        auto fv = hoptest::first_cover_oracle(g, pr.second, w);
        CHECK_FALSE((fu && *fu <= t));
        CHECK_FALSE((fv && *fv <= t));
    }
}

TEST_CASE("enumerate_instances(exhaustive) matches cubic oracle", "[patterns][oracle]") {
    hop::Rng rng(41);
    for (int trial = 0; trial < 12; ++trial) {
        auto g = hoptest::random_graph(rng, 14, 70, 4, 40);
        auto cfg = test_cfg();
        auto fast = enumerate_instances(g, cfg, {CandidatePolicy::Kind::Exhaustive, 0});
        auto slow = hoptest::enumerate_oracle(g, cfg);
        std::sort(slow.begin(), slow.end(), [](const LabeledInstance& a, const LabeledInstance& b) {
            return std::tie(a.triplet.t, a.triplet.u, a.triplet.v, a.triplet.w) <
                   std::tie(b.triplet.t, b.triplet.u, b.triplet.v, b.triplet.w);
        });
        REQUIRE(fast.size() == slow.size());
        for (std::size_t i = 0; i < fast.size(); ++i) CHECK(hoptest::same_instance(fast[i], slow[i]));
    }
}

TEST_CASE("anchor at 0.5T lands in train", "[patterns]") {
    auto g = TemporalHypergraph::build(
        {{{0, 1}, 0.0}, {{2, 3}, 50.0}, {{4, 5}, 100.0}});
    auto cfg = test_cfg();
    auto inst = enumerate_instances(g, cfg, {CandidatePolicy::Kind::Exhaustive, 0});
    REQUIRE(!inst.empty());
    for (const auto& i : inst) {
        CHECK(i.triplet.u == 2);
        CHECK(i.split == Split::Train);
    }
}

TEST_CASE("label monotonicity in window size", "[patterns][property]") {
    hop::Rng rng(51);
    int checked = 0;
    for (int trial = 0; trial < 10; ++trial) {
        auto g = hoptest::random_graph(rng, 12, 60, 4, 40);
        auto anchors = first_interactions(g, 0.0, 1e18);
        for (const auto& [pr, t] : anchors) {
            for (NodeId w :
                 candidate_thirds(g, pr, t, {CandidatePolicy::Kind::Exhaustive, 0})) {
                Triplet tr{pr.first, pr.second, w, t};
                auto [l1, times1] = label_triplet(g, tr, 5.0);
                auto [l2, times2] = label_triplet(g, tr, 15.0);
                CHECK(static_cast<int>(l2) >= static_cast<int>(l1));
                // Times respect the partial order when present.
                if (times2.t_wedge && times2.t_triangle)
                    CHECK(*times2.t_wedge <= *times2.t_triangle);
                if (times2.t_closure && times2.t_wedge)
                    CHECK(*times2.t_closure >= *times2.t_wedge);
                ++checked;
            }
        }
    }
    CHECK(checked > 200);
}

TEST_CASE("balance_classes: min rule, determinism, error on empty class", "[patterns]") {
    std::vector<LabeledInstance> pool;
    hop::Rng rng(61);
    auto add = [&](PatternLabel l, int n, Split sp) {
        for (int i = 0; i < n; ++i) {
            LabeledInstance in;
            in.triplet = {static_cast<NodeId>(rng.next_below(1000)),
                          static_cast<NodeId>(1000 + rng.next_below(1000)),
                          static_cast<NodeId>(2000 + rng.next_below(1000)),
                          static_cast<double>(pool.size())};
            in.label = l;
            in.split = sp;
            pool.push_back(in);
        }
    };
    for (Split sp : {Split::Train, Split::Valid, Split::Test}) {
        add(PatternLabel::Edge, 100, sp);
        add(PatternLabel::Wedge, 50, sp);
        add(PatternLabel::Triangle, 20, sp);
        add(PatternLabel::Closure, 20, sp);
    }
    auto bal = balance_classes(pool, 7);
    std::map<std::pair<Split, PatternLabel>, int> hist;
    for (const auto& i : bal) hist[{i.split, i.label}]++;
    for (Split sp : {Split::Train, Split::Valid, Split::Test})
        for (auto l : {PatternLabel::Edge, PatternLabel::Wedge, PatternLabel::Triangle,
                       PatternLabel::Closure})
            CHECK(hist[{sp, l}] == 20);

    auto bal2 = balance_classes(pool, 7);
    REQUIRE(bal.size() == bal2.size());
    bool identical = true;
    for (std::size_t i = 0; i < bal.size(); ++i)
        identical = identical && hoptest::same_instance(bal[i], bal2[i]);
    CHECK(identical);

    auto bal3 = balance_classes(pool, 8);
    bool differs = bal3.size() != bal.size();
    for (std::size_t i = 0; !differs && i < bal.size(); ++i)
        differs = !hoptest::same_instance(bal[i], bal3[i]);
    CHECK(differs);

    // Remove all train closures: must raise a named error.
    std::vector<LabeledInstance> broken;
    for (const auto& i : pool)
        if (!(i.split == Split::Train && i.label == PatternLabel::Closure)) broken.push_back(i);
    CHECK_THROWS_WITH(balance_classes(broken, 7),
                      Catch::Matchers::ContainsSubstring("closure") &&
                          Catch::Matchers::ContainsSubstring("train"));
}

TEST_CASE("instance serialization round-trips", "[patterns][io]") {
    hop::Rng rng(71);
    auto g = hoptest::random_graph(rng, 14, 70, 4, 40);
    auto inst = enumerate_instances(g, test_cfg(), {CandidatePolicy::Kind::Exhaustive, 0});
    REQUIRE(!inst.empty());
    auto text = format_instances(inst, {"seed=1", "source=test"});
    auto back = parse_instances(text);
    REQUIRE(back.size() == inst.size());
    for (std::size_t i = 0; i < inst.size(); ++i) CHECK(hoptest::same_instance(inst[i], back[i]));
}

TEST_CASE("instance parser reports malformed lines", "[patterns][io]") {
    CHECK_THROWS_AS(parse_instances("1,2,3\n"), ParseError);
    CHECK_THROWS_AS(parse_instances("1,2,3,4.0,np,NA,NA,NA,train\n"), ParseError);
    CHECK_THROWS_AS(parse_instances("1,2,3,4.0,edge,NA,NA,NA,elsewhere\n"), ParseError);
    CHECK_THROWS_AS(parse_instances("1,2,x,4.0,edge,NA,NA,NA,train\n"), ParseError);
    CHECK_THROWS_AS(parse_instances("1,2,3,4.0,edge,zz,NA,NA,train\n"), ParseError);
}

TEST_CASE("count_patterns matches oracle class counts", "[patterns][index]") {
    hop::Rng rng(81);
    for (int trial = 0; trial < 8; ++trial) {
        auto g = hoptest::random_graph(rng, 16, 90, 4, 40);
        auto cfg = test_cfg();
        auto counts = count_patterns(g, cfg);
        std::uint64_t wedge = 0, tri = 0, clo = 0;
        for (const auto& i : hoptest::enumerate_oracle(g, cfg)) {
            if (i.label == PatternLabel::Wedge) wedge++;
            else if (i.label == PatternLabel::Triangle) tri++;
            else if (i.label == PatternLabel::Closure) clo++;
        }
        CHECK(counts.wedge == wedge);
        CHECK(counts.triangle == tri);
        CHECK(counts.closure == clo);
    }
}

TEST_CASE("sample_balanced_instances draws valid balanced classes", "[patterns][index]") {
    auto g = hoptest::planted_fixture();
    auto sample = sample_balanced_instances(g, test_cfg(3), 10);
    auto oracle = hoptest::enumerate_oracle(g, test_cfg(3));
    std::map<std::pair<Split, PatternLabel>, int> hist;
    for (const auto& s : sample) {
        hist[{s.split, s.label}]++;
        bool found = false;
        for (const auto& o : oracle) found = found || hoptest::same_instance(s, o);
        CHECK(found);
    }
    // Per split, all four classes have equal counts.
    for (Split sp : {Split::Train, Split::Valid, Split::Test}) {
        int n = hist[{sp, PatternLabel::Edge}];
        CHECK(n >= 1);
        CHECK(hist[{sp, PatternLabel::Wedge}] == n);
        CHECK(hist[{sp, PatternLabel::Triangle}] == n);
        CHECK(hist[{sp, PatternLabel::Closure}] == n);
    }
    // Determinism.
    auto sample2 = sample_balanced_instances(g, test_cfg(3), 10);
    REQUIRE(sample.size() == sample2.size());
    for (std::size_t i = 0; i < sample.size(); ++i)
        CHECK(hoptest::same_instance(sample[i], sample2[i]));
}
