#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "hop/hypergraph.hpp"

using hop::TemporalHyperedge;
using hop::TemporalHypergraph;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
    fs::path p = fs::temp_directory_path() / name;
    std::ofstream out(p);
    out << content;
    return p;
}

TemporalHypergraph tiny_graph() {
    return TemporalHypergraph::build({
        {{0, 1}, 10.0},
        {{0, 1, 2}, 20.0},
        {{1, 2}, 20.0},
        {{0, 3}, 30.0},
    });
}

}  // namespace

TEST_CASE("build sorts by time, keeps ties in input order", "[hypergraph]") {
    auto g = TemporalHypergraph::build({
        {{2, 3}, 5.0},
        {{0, 1}, 1.0},
        {{4, 5}, 5.0},
    });
    REQUIRE(g.n_edges() == 3);
    CHECK(g.edge_time(0) == 1.0);
    CHECK(g.edge_time(1) == 5.0);
    CHECK(g.edge_nodes(1)[0] == 2);  // {2,3} ingested before {4,5} at equal time
    CHECK(g.edge_nodes(2)[0] == 4);
}

TEST_CASE("build rejects degenerate edges", "[hypergraph]") {
    CHECK_THROWS_AS(TemporalHypergraph::build({{{3, 3}, 1.0}}), hop::DomainError);
    CHECK_THROWS_AS(TemporalHypergraph::build({{{3}, 1.0}}), hop::DomainError);
    CHECK_THROWS_AS(TemporalHypergraph::build({{{-1, 2}, 1.0}}), hop::DomainError);
}

TEST_CASE("duplicate hyperedges are preserved, never merged", "[hypergraph]") {
    auto g = TemporalHypergraph::build({{{0, 1}, 7.0}, {{0, 1}, 7.0}, {{0, 1}, 7.0}});
    REQUIRE(g.n_edges() == 3);
    CHECK(g.incidence(0).size() == 3);
}

TEST_CASE("incidence is consistent with edges both ways", "[hypergraph]") {
    hop::Rng rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        auto g = hoptest::random_graph(rng, 12, 40);
        for (hop::NodeId z = 0; z < static_cast<hop::NodeId>(g.n_nodes()); ++z) {
            for (auto [e, t] : g.incidence(z)) {
                CHECK(g.edge_contains(e, z));
                CHECK(g.edge_time(e) == t);
            }
        }
        std::size_t total_inc = 0;
        for (hop::NodeId z = 0; z < static_cast<hop::NodeId>(g.n_nodes()); ++z)
            total_inc += g.incidence(z).size();
        std::size_t total_slots = 0;
        for (std::size_t e = 0; e < g.n_edges(); ++e)
            total_slots += g.edge_size(static_cast<hop::EdgeId>(e));
        CHECK(total_inc == total_slots);
    }
}

TEST_CASE("incident_before matches brute-force oracle", "[hypergraph]") {
    hop::Rng rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        auto g = hoptest::random_graph(rng, 10, 30);
        for (int q = 0; q < 50; ++q) {
            auto z = static_cast<hop::NodeId>(rng.next_below(g.n_nodes()));
            double t = static_cast<double>(rng.next_below(60));
            auto fast = g.incident_before(z, t);
            auto slow = hoptest::incident_before_oracle(g, z, t);
            REQUIRE(fast.size() == slow.size());
            for (std::size_t i = 0; i < fast.size(); ++i) {
                CHECK(fast[i].edge == slow[i].first);
                CHECK(fast[i].time == slow[i].second);
            }
        }
    }
}

TEST_CASE("incident_before edge cases", "[hypergraph]") {
    auto g = tiny_graph();
    CHECK(g.incident_before(1, 0.0).empty());
    auto r = g.incident_before(1, 20.0);  // strict: excludes the two edges at 20
    REQUIRE(r.size() == 1);
    CHECK(r[0].time == 10.0);
}

TEST_CASE("stats on a single edge", "[hypergraph]") {
    auto g = TemporalHypergraph::build({{{0, 1}, 3.0}});
    auto s = g.stats();
    CHECK(s.n_nodes == 2);
    CHECK(s.n_hyperedges == 1);
    CHECK(s.avg_size == 2.0);
    CHECK(s.std_size == 0.0);
}

TEST_CASE("stats moments match a direct computation", "[hypergraph]") {
    auto g = tiny_graph();
    auto s = g.stats();
    CHECK(s.n_nodes == 4);
    CHECK(s.n_hyperedges == 4);
    // sizes 2,3,2,2 -> mean 2.25, population var (3*0.0625 + 0.5625)/4
    CHECK(s.avg_size == Catch::Approx(2.25));
    CHECK(s.std_size == Catch::Approx(std::sqrt((3 * 0.0625 + 0.5625) / 4.0)));
    CHECK(s.time_range == 20.0);
    CHECK(s.edge_intensity == Catch::Approx(2.0 * 4 * 2.25 * 2.25 / (4 * 20.0)));
}

TEST_CASE("normalize_time hits the target intensity and zero origin", "[hypergraph]") {
    auto g = tiny_graph().normalize_time(1e-5);
    CHECK(g.min_time() == 0.0);
    auto s = g.stats();
    // Two IEEE roundings stand between the formula and the stored range.
    CHECK(s.edge_intensity == Catch::Approx(1e-5).epsilon(1e-12));
}

TEST_CASE("normalize_time preserves time ratios", "[hypergraph]") {
    hop::Rng rng(11);
    auto g = hoptest::random_graph(rng, 8, 25, 3, 1000);
    auto n = g.normalize_time(1e-5);
    REQUIRE(g.n_edges() == n.n_edges());
    // Pick timestamp quadruples and compare (ti-tj)/(tk-tl).
    for (int q = 0; q < 100; ++q) {
        auto i = rng.next_below(g.n_edges()), j = rng.next_below(g.n_edges());
        auto k = rng.next_below(g.n_edges()), l = rng.next_below(g.n_edges());
        double den = g.edge_time(static_cast<hop::EdgeId>(k)) - g.edge_time(static_cast<hop::EdgeId>(l));
        if (den == 0.0) continue;
        double r_raw = (g.edge_time(static_cast<hop::EdgeId>(i)) - g.edge_time(static_cast<hop::EdgeId>(j))) / den;
        double nden = n.edge_time(static_cast<hop::EdgeId>(k)) - n.edge_time(static_cast<hop::EdgeId>(l));
        REQUIRE(nden != 0.0);
        double r_new = (n.edge_time(static_cast<hop::EdgeId>(i)) - n.edge_time(static_cast<hop::EdgeId>(j))) / nden;
        CHECK(r_new == Catch::Approx(r_raw).epsilon(1e-9).margin(1e-12));
    }
}

TEST_CASE("normalize_time rejects degenerate ranges", "[hypergraph]") {
    auto g = TemporalHypergraph::build({{{0, 1}, 5.0}, {{1, 2}, 5.0}});
    CHECK_THROWS_AS(g.normalize_time(1e-5), hop::DomainError);
}

TEST_CASE("ingest_benson parses the documented example", "[hypergraph][ingest]") {
    auto nverts = write_temp("hop_t1_nverts.txt", "2\n3\n");
    auto simplices = write_temp("hop_t1_simplices.txt", "7\n9\n7\n9\n11\n");
    auto times = write_temp("hop_t1_times.txt", "10\n20\n");
    auto res = hop::ingest_benson(nverts, simplices, times);
    REQUIRE(res.edges.size() == 2);
    CHECK(res.edges[0].nodes == std::vector<hop::NodeId>{0, 1});
    CHECK(res.edges[0].time == 10.0);
    CHECK(res.edges[1].nodes == std::vector<hop::NodeId>{0, 1, 2});
    CHECK(res.edges[1].time == 20.0);
    CHECK(res.original_ids == std::vector<std::int64_t>{7, 9, 11});
    CHECK(res.singletons_dropped == 0);
}

TEST_CASE("ingest_benson drops singletons", "[hypergraph][ingest]") {
    auto nverts = write_temp("hop_t2_nverts.txt", "1\n");
    auto simplices = write_temp("hop_t2_simplices.txt", "5\n");
    auto times = write_temp("hop_t2_times.txt", "3\n");
    auto res = hop::ingest_benson(nverts, simplices, times);
    CHECK(res.edges.empty());
    CHECK(res.singletons_dropped == 1);
    CHECK(res.original_ids.empty());
}

TEST_CASE("ingest_benson reports malformed and mismatched input", "[hypergraph][ingest]") {
    auto nverts = write_temp("hop_t3_nverts.txt", "2\nx\n");
    auto simplices = write_temp("hop_t3_simplices.txt", "1\n2\n3\n4\n");
    auto times = write_temp("hop_t3_times.txt", "1\n2\n");
    CHECK_THROWS_AS(hop::ingest_benson(nverts, simplices, times), hop::ParseError);

    auto nverts2 = write_temp("hop_t4_nverts.txt", "2\n2\n");
    auto simplices2 = write_temp("hop_t4_simplices.txt", "1\n2\n3\n");
    CHECK_THROWS_AS(hop::ingest_benson(nverts2, simplices2, times), hop::ParseError);

    auto times3 = write_temp("hop_t5_times.txt", "1\n");
    auto simplices3 = write_temp("hop_t5_simplices.txt", "1\n2\n3\n4\n");
    CHECK_THROWS_AS(hop::ingest_benson(nverts2, simplices3, times3), hop::ParseError);
}

TEST_CASE("ingest -> cache -> load round-trips identically", "[hypergraph][cache]") {
    hop::Rng rng(3);
    auto g = hoptest::random_graph(rng, 15, 60);
    fs::path p = fs::temp_directory_path() / "hop_cache_test.bin";
    g.save_cache(p);
    auto g2 = TemporalHypergraph::load_cache(p);
    CHECK(g == g2);
    // And the reloaded copy serializes to the same bytes.
    fs::path p2 = fs::temp_directory_path() / "hop_cache_test2.bin";
    g2.save_cache(p2);
    CHECK(hop::read_file(p) == hop::read_file(p2));
    fs::remove(p);
    fs::remove(p2);
}

TEST_CASE("cache loader rejects corruption", "[hypergraph][cache]") {
    hop::Rng rng(4);
    auto g = hoptest::random_graph(rng, 6, 10);
    fs::path p = fs::temp_directory_path() / "hop_cache_bad.bin";
    g.save_cache(p);
    auto bytes = hop::read_file(p);
    bytes[0] = 'X';
    hop::atomic_write_file(p, bytes);
    CHECK_THROWS_AS(TemporalHypergraph::load_cache(p), hop::ParseError);
    bytes = hop::read_file(p);
    bytes[0] = 'H';
    hop::atomic_write_file(p, bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS_AS(TemporalHypergraph::load_cache(p), hop::ParseError);
    fs::remove(p);
}
