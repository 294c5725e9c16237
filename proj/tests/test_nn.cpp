#include <catch2/catch_amalgamated.hpp>

#include <cstring>

#include "hop/gradcheck.hpp"
#include "hop/nn.hpp"

using namespace hop;

TEST_CASE("tensor shape and indexing", "[tensor]") {
    Tensor t({3, 4});
    CHECK(t.numel() == 12);
    CHECK(t.rows() == 3);
    CHECK(t.cols() == 4);
    t.at(2, 3) = 7.0;
    CHECK(t.v[11] == 7.0);
    t.g[5] = 1.0;
    t.zero_grad();
    CHECK(t.g[5] == 0.0);
}

TEST_CASE("glorot init stays within the fan bound", "[tensor]") {
    Tensor t({10, 20});
    Rng rng(3);
    glorot_init(t, rng, 20, 10);
    double limit = std::sqrt(6.0 / 30.0);
    for (double x : t.v) {
        CHECK(std::abs(x) <= limit);
    }
    double mean = 0.0;
    for (double x : t.v) mean += x;
    CHECK(std::abs(mean / 200.0) < 0.05);
}

TEST_CASE("param store add/get and duplicate rejection", "[tensor]") {
    ParamStore ps;
    ps.add("a", {2, 2});
    ps.add("b", {3});
    CHECK(ps.total_params() == 7);
    CHECK(ps.has("a"));
    CHECK_FALSE(ps.has("c"));
    CHECK_THROWS_AS(ps.add("a", {1}), DomainError);
    CHECK_THROWS_AS(ps.get("missing"), DomainError);
}

TEST_CASE("adam with zero learning rate leaves values bit-identical", "[tensor]") {
    ParamStore ps;
    auto& t = ps.add("w", {4});
    Rng rng(5);
    for (auto& x : t.v) x = rng.next_normal();
    auto before = t.v;
    for (int i = 0; i < 3; ++i) {
        for (auto& g : t.g) g = rng.next_normal();
        ps.adam_step(0.0);
    }
    for (std::size_t i = 0; i < before.size(); ++i) {
        CHECK(std::memcmp(&t.v[i], &before[i], sizeof(double)) == 0);
    }
}

TEST_CASE("adam minimizes a quadratic", "[tensor]") {
    ParamStore ps;
    auto& t = ps.add("w", {3});
    t.v = {5.0, -4.0, 2.5};
    auto loss = [&] { return t.v[0] * t.v[0] + t.v[1] * t.v[1] + t.v[2] * t.v[2]; };
    double first = loss();
    for (int i = 0; i < 2000; ++i) {
        ps.zero_grad();
        for (int j = 0; j < 3; ++j) t.g[j] = 2.0 * t.v[j];
        ps.adam_step(1e-2);
    }
    CHECK(loss() < 1e-3 * first);
}

TEST_CASE("checkpoint round trip is bit-identical", "[tensor][io]") {
    ParamStore ps;
    Rng rng(7);
    auto& a = ps.add("alpha", {2, 3});
    auto& b = ps.add("beta", {5});
    for (auto& x : a.v) x = rng.next_normal();
    for (auto& x : b.v) x = rng.next_normal();
    std::string blob = ps.serialize();

    ParamStore fresh;
    fresh.deserialize(blob);
    CHECK(fresh.get("alpha").shape == a.shape);
    CHECK(fresh.get("alpha").v == a.v);
    CHECK(fresh.get("beta").v == b.v);
    CHECK(fresh.serialize() == blob);
}

TEST_CASE("checkpoint validation rejects corruption", "[tensor][io]") {
    ParamStore ps;
    ps.add("w", {2});
    std::string blob = ps.serialize();

    ParamStore fresh;
    std::string bad = blob;
    bad[0] = 'X';
    CHECK_THROWS_AS(fresh.deserialize(bad), ParseError);
    CHECK_THROWS_AS(fresh.deserialize(blob.substr(0, blob.size() - 3)), ParseError);
    CHECK_THROWS_AS(fresh.deserialize(blob + "zz"), ParseError);

    ParamStore other;
    other.add("w", {3});
    CHECK_THROWS_AS(other.deserialize(blob), ParseError);
    ParamStore renamed;
    renamed.add("v", {2});
    CHECK_THROWS_AS(renamed.deserialize(blob), ParseError);
}

TEST_CASE("loading into an attached model keeps tensor addresses", "[tensor][io]") {
    ParamStore ps;
    Rng rng(9);
    Linear lin;
    lin.init(ps, "lin", 3, 2, rng);
    std::string blob = ps.serialize();
    const Tensor* w_before = lin.W;
    for (auto& x : ps.get("lin.W").v) x = 0.0;
    ps.deserialize(blob);
    CHECK(lin.W == w_before);
    bool any_nonzero = false;
    for (double x : lin.W->v) any_nonzero = any_nonzero || x != 0.0;
    CHECK(any_nonzero);
}

TEST_CASE("softmax basics", "[nn]") {
    Vec p = softmax_vec({1.0, 1.0, 1.0, 1.0});
    for (double x : p) CHECK(x == Catch::Approx(0.25));
    Vec q = softmax_vec({1000.0, 1001.0});
    CHECK(q[0] + q[1] == Catch::Approx(1.0));
    CHECK(q[1] == Catch::Approx(1.0 / (1.0 + std::exp(-1.0))));
    // shift invariance
    Vec a = softmax_vec({0.3, -1.2, 2.0});
    Vec b = softmax_vec({0.3 + 5.0, -1.2 + 5.0, 2.0 + 5.0});
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == Catch::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("matrix product helpers match naive loops", "[nn]") {
    Rng rng(11);
    std::size_t ra = 4, ca = 5, cb = 3;
    std::vector<double> A(ra * ca), B(ca * cb), C(ra * cb);
    for (auto& x : A) x = rng.next_normal();
    for (auto& x : B) x = rng.next_normal();
    auto got = mat_mul(A, ra, ca, B, cb);
    for (std::size_t i = 0; i < ra; ++i)
        for (std::size_t j = 0; j < cb; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < ca; ++k) s += A[i * ca + k] * B[k * cb + j];
            CHECK(got[i * cb + j] == Catch::Approx(s).margin(1e-12));
        }
    // A^T B: A is ra x ca viewed as (ca x ra)^T; B here must have ra rows.
    std::vector<double> B2(ra * cb);
    for (auto& x : B2) x = rng.next_normal();
    auto gt = mat_mul_at_b(A, ra, ca, B2, cb);
    for (std::size_t i = 0; i < ca; ++i)
        for (std::size_t j = 0; j < cb; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < ra; ++k) s += A[k * ca + i] * B2[k * cb + j];
            CHECK(gt[i * cb + j] == Catch::Approx(s).margin(1e-12));
        }
    // A B^T with B rb x ca.
    std::size_t rb = 6;
    std::vector<double> B3(rb * ca);
    for (auto& x : B3) x = rng.next_normal();
    auto gbt = mat_mul_a_bt(A, ra, ca, B3, rb);
    for (std::size_t i = 0; i < ra; ++i)
        for (std::size_t j = 0; j < rb; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < ca; ++k) s += A[i * ca + k] * B3[j * ca + k];
            CHECK(gbt[i * rb + j] == Catch::Approx(s).margin(1e-12));
        }
}

TEST_CASE("linear gradient is exact on a quadratic loss", "[nn][gradcheck]") {
    ParamStore ps;
    Rng rng(13);
    Linear lin;
    lin.init(ps, "lin", 4, 3, rng);
    Vec x = {0.5, -1.0, 2.0, 0.25};
    auto loss = [&] {
        Vec y = lin.forward(x);
        double s = 0.0;
        for (double v : y) s += v * v;
        return s;
    };
    ps.zero_grad();
    Vec y = lin.forward(x);
    Vec dy(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) dy[i] = 2.0 * y[i];
    lin.backward(x, dy);
    auto res = check_gradients(ps, loss, 1e-5);
    // Central differences are exact for quadratics up to rounding.
    CHECK(res.max_rel_err <= 1e-8);
    CHECK(res.n_checked == ps.total_params());
}

TEST_CASE("mlp gradient matches finite differences", "[nn][gradcheck]") {
    ParamStore ps;
    Rng rng(15);
    Mlp mlp;
    mlp.init(ps, "mlp", {5, 7, 3}, rng, true);
    Vec x = {0.1, -0.4, 0.9, 0.0, -1.3};
    Vec target = {0.2, -0.1, 0.5};
    auto loss = [&] {
        Vec y = mlp.forward(x);
        double s = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - target[i]) * (y[i] - target[i]);
        return s;
    };
    ps.zero_grad();
    Mlp::Cache cache;
    Vec y = mlp.forward(x, &cache);
    Vec dy(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) dy[i] = 2.0 * (y[i] - target[i]);
    mlp.backward(cache, dy);
    auto res = check_gradients(ps, loss, 1e-5);
    CHECK(res.max_rel_err <= 1e-4);
}

TEST_CASE("mlp input gradient matches finite differences", "[nn][gradcheck]") {
    ParamStore ps;
    Rng rng(16);
    Mlp mlp;
    mlp.init(ps, "mlp", {4, 6, 2}, rng, false);
    Vec x = {0.3, -0.2, 0.8, -0.5};
    auto loss = [&] {
        Vec y = mlp.forward(x);
        return y[0] * y[0] + 0.5 * y[1];
    };
    Mlp::Cache cache;
    Vec y = mlp.forward(x, &cache);
    Vec dx = mlp.backward(cache, {2.0 * y[0], 0.5});
    for (std::size_t i = 0; i < x.size(); ++i) {
        double saved = x[i];
        x[i] = saved + 1e-6;
        double up = loss();
        x[i] = saved - 1e-6;
        double down = loss();
        x[i] = saved;
        CHECK(grad_rel_err(dx[i], (up - down) / 2e-6) <= 1e-4);
    }
}

TEST_CASE("gru with zero weights maps zero state to zero", "[nn]") {
    ParamStore ps;
    Rng rng(17);
    GruCell gru;
    gru.init(ps, "gru", 3, 4, rng);
    for (auto& [name, t] : ps.all()) std::fill(t.v.begin(), t.v.end(), 0.0);
    Vec h(4, 0.0);
    h = gru.forward({1.0, -2.0, 3.0}, h, nullptr);
    for (double x : h) CHECK(x == 0.0);
}

TEST_CASE("gru gradient over a three-step sequence", "[nn][gradcheck]") {
    ParamStore ps;
    Rng rng(19);
    GruCell gru;
    gru.init(ps, "gru", 3, 5, rng);
    std::vector<Vec> xs = {{0.2, -0.7, 1.1}, {-0.3, 0.4, 0.0}, {-1.0, 0.6, 0.5}};
    auto run = [&] {
        Vec h(5, 0.0);
        for (const auto& x : xs) h = gru.forward(x, h, nullptr);
        double s = 0.0;
        for (double v : h) s += v * v;
        return s;
    };
    ps.zero_grad();
    std::vector<GruCell::Cache> caches(xs.size());
    Vec h(5, 0.0);
    for (std::size_t i = 0; i < xs.size(); ++i) h = gru.forward(xs[i], h, &caches[i]);
    Vec dh(5);
    for (std::size_t i = 0; i < 5; ++i) dh[i] = 2.0 * h[i];
    std::vector<Vec> dxs(xs.size());
    for (std::size_t i = xs.size(); i-- > 0;) {
        auto [dx, dh_prev] = gru.backward(caches[i], dh);
        dxs[i] = std::move(dx);
        dh = std::move(dh_prev);
    }
    auto res = check_gradients(ps, run, 1e-5);
    CHECK(res.max_rel_err <= 1e-4);
    // Inputs too.
    for (std::size_t s = 0; s < xs.size(); ++s)
        for (std::size_t i = 0; i < 3; ++i) {
            double saved = xs[s][i];
            xs[s][i] = saved + 1e-6;
            double up = run();
            xs[s][i] = saved - 1e-6;
            double down = run();
            xs[s][i] = saved;
            CHECK(grad_rel_err(dxs[s][i], (up - down) / 2e-6) <= 1e-4);
        }
}

TEST_CASE("corrupted gradient is caught by the checker", "[nn][gradcheck]") {
    ParamStore ps;
    Rng rng(21);
    Linear lin;
    lin.init(ps, "lin", 3, 2, rng);
    Vec x = {1.0, 2.0, -0.5};
    auto loss = [&] {
        Vec y = lin.forward(x);
        return y[0] * y[0] + y[1] * y[1];
    };
    ps.zero_grad();
    Vec y = lin.forward(x);
    lin.backward(x, {2.0 * y[0], 2.0 * y[1]});
    ps.get("lin.W").g[0] += 1.0;  // deliberate corruption
    auto res = check_gradients(ps, loss, 1e-5);
    CHECK(res.max_rel_err > 1e-2);
    CHECK(res.worst_param == "lin.W");
}
