#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "hop/encoder.hpp"
#include "hop/mathutil.hpp"
#include "hop/patterns.hpp"

namespace hop {

// ---- Q1: which pattern forms ----

// probs = softmax(F4((psi_u + psi_v) (+) psi_w)). The sum makes the head
// exactly invariant under swapping psi_u and psi_v.
class Q1Head {
public:
    void init(ParamStore& ps, std::size_t embed_dim, std::size_t hidden, Rng& rng) {
        f4_.init(ps, "q1.f4", {2 * embed_dim, hidden, 4}, rng, false);
    }

    struct Cache {
        Mlp::Cache f4c;
        Vec probs;
    };

    Vec forward(const Vec& psi_u, const Vec& psi_v, const Vec& psi_w, Cache* c) const {
        Vec h(psi_u.size() + psi_w.size());
        for (std::size_t i = 0; i < psi_u.size(); ++i) h[i] = psi_u[i] + psi_v[i];
        std::copy(psi_w.begin(), psi_w.end(), h.begin() + static_cast<std::ptrdiff_t>(psi_u.size()));
        Vec probs = softmax_vec(f4_.forward(h, c ? &c->f4c : nullptr));
        if (c) c->probs = probs;
        return probs;
    }

    // Cross-entropy backward; returns (dpsi_u, dpsi_v, dpsi_w).
    std::array<Vec, 3> backward_ce(Cache& c, PatternLabel label) {
        Vec dh = f4_.backward(c.f4c, softmax_ce_backward(c.probs, static_cast<int>(label)));
        std::size_t H = dh.size() / 2;
        Vec du(dh.begin(), dh.begin() + static_cast<std::ptrdiff_t>(H));
        Vec dw(dh.begin() + static_cast<std::ptrdiff_t>(H), dh.end());
        return {du, du, std::move(dw)};
    }

private:
    Mlp f4_;
};

// ---- Q2: when the pattern first forms ----

// log t ~ sum_i w_i N(mu_i, sigma_i^2); w = softmax(head), sigma^2 = exp(head)
// so the simplex and positivity invariants hold by construction.
struct Mixture {
    Vec w, mu, var;
    std::size_t k() const { return w.size(); }
};

// Patterns with a formation time: Wedge, Triangle, Closure.
inline std::size_t q2_pattern_index(PatternLabel p) {
    if (p == PatternLabel::Edge) throw DomainError("q2 has no head for the edge pattern");
    return static_cast<std::size_t>(p) - 1;
}

class Q2Head {
public:
    void init(ParamStore& ps, std::size_t embed_dim, std::size_t k, Rng& rng) {
        if (k == 0) throw DomainError("q2 mixture needs k >= 1");
        k_ = k;
        for (std::size_t p = 0; p < 3; ++p) {
            std::string pre =
                "q2." + std::string(label_name(static_cast<PatternLabel>(p + 1)));
            wl_[p].init(ps, pre + ".w", 2 * embed_dim, k, rng);
            ml_[p].init(ps, pre + ".mu", 2 * embed_dim, k, rng);
            sl_[p].init(ps, pre + ".s", 2 * embed_dim, k, rng);
        }
    }

    std::size_t k() const { return k_; }

    struct Cache {
        Vec h, wlogits, s;
        Mixture mix;
        std::size_t p = 0;
    };

    Mixture forward(const Vec& psi_u, const Vec& psi_v, const Vec& psi_w, PatternLabel p,
                    Cache* c) const {
        Vec h(psi_u.size() + psi_w.size());
        for (std::size_t i = 0; i < psi_u.size(); ++i) h[i] = psi_u[i] + psi_v[i];
        std::copy(psi_w.begin(), psi_w.end(), h.begin() + static_cast<std::ptrdiff_t>(psi_u.size()));
        std::size_t pi = q2_pattern_index(p);
        Mixture mix;
        Vec wlogits = wl_[pi].forward(h);
        mix.w = softmax_vec(wlogits);
        mix.mu = ml_[pi].forward(h);
        Vec s = sl_[pi].forward(h);
        mix.var.resize(k_);
        for (std::size_t i = 0; i < k_; ++i) mix.var[i] = std::exp(s[i]);
        if (c) {
            c->h = std::move(h);
            c->wlogits = std::move(wlogits);
            c->s = std::move(s);
            c->mix = mix;
            c->p = pi;
        }
        return mix;
    }

    // NLL backward; returns (dpsi_u, dpsi_v, dpsi_w).
    std::array<Vec, 3> backward_nll(Cache& c, double t) {
        if (!(t > 0.0)) throw DomainError("q2 time must be positive");
        double y = std::log(t);
        const Mixture& mix = c.mix;
        Vec post = nll_posterior(mix, y);
        Vec dwlogit(k_), dmu(k_), ds(k_);
        for (std::size_t i = 0; i < k_; ++i) {
            dwlogit[i] = mix.w[i] - post[i];
            dmu[i] = -post[i] * (y - mix.mu[i]) / mix.var[i];
            ds[i] = -post[i] * (-0.5 + (y - mix.mu[i]) * (y - mix.mu[i]) / (2.0 * mix.var[i]));
        }
        Vec dh = wl_[c.p].backward(c.h, dwlogit);
        Vec t2 = ml_[c.p].backward(c.h, dmu);
        for (std::size_t i = 0; i < dh.size(); ++i) dh[i] += t2[i];
        t2 = sl_[c.p].backward(c.h, ds);
        for (std::size_t i = 0; i < dh.size(); ++i) dh[i] += t2[i];
        std::size_t H = dh.size() / 2;
        Vec du(dh.begin(), dh.begin() + static_cast<std::ptrdiff_t>(H));
        Vec dw(dh.begin() + static_cast<std::ptrdiff_t>(H), dh.end());
        return {du, du, std::move(dw)};
    }

    // Per-component joint log densities log(w_i N(y; mu_i, var_i)).
    static Vec component_logs(const Mixture& mix, double y) {
        Vec xi(mix.k());
        for (std::size_t i = 0; i < mix.k(); ++i)
            xi[i] = std::log(std::max(mix.w[i], 1e-300)) -
                    0.5 * std::log(2.0 * kPi * mix.var[i]) -
                    (y - mix.mu[i]) * (y - mix.mu[i]) / (2.0 * mix.var[i]);
        return xi;
    }

    static Vec nll_posterior(const Mixture& mix, double y) {
        Vec xi = component_logs(mix, y);
        double lse = log_sum_exp(xi);
        Vec post(xi.size());
        for (std::size_t i = 0; i < xi.size(); ++i) post[i] = std::exp(xi[i] - lse);
        return post;
    }

private:
    std::size_t k_ = 0;
    std::array<Linear, 3> wl_, ml_, sl_;
};

inline double q2_nll(const Mixture& mix, double t) {
    if (!(t > 0.0)) throw DomainError("q2 time must be positive");
    return -log_sum_exp(Q2Head::component_logs(mix, std::log(t)));
}

// Point estimate: the mixture mean in log space, exp(sum_i w_i mu_i).
inline double q2_point_estimate(const Mixture& mix) {
    double s = 0.0;
    for (std::size_t i = 0; i < mix.k(); ++i) s += mix.w[i] * mix.mu[i];
    return std::exp(s);
}

// Density over t implied by the log-normal mixture.
inline double q2_density(const Mixture& mix, double t) {
    if (!(t > 0.0)) return 0.0;
    double y = std::log(t);
    double f = 0.0;
    for (std::size_t i = 0; i < mix.k(); ++i)
        f += mix.w[i] / (t * std::sqrt(2.0 * kPi * mix.var[i])) *
             std::exp(-(y - mix.mu[i]) * (y - mix.mu[i]) / (2.0 * mix.var[i]));
    return f;
}

// Simpson quadrature of q2_density over t in (0, inf), evaluated on an
// exponential grid t = e^y (the Jacobian e^y is applied numerically).
inline double q2_quadrature(const Mixture& mix, std::size_t n = 4001) {
    double lo = mix.mu[0], hi = mix.mu[0], smax = 0.0;
    for (std::size_t i = 0; i < mix.k(); ++i) {
        lo = std::min(lo, mix.mu[i]);
        hi = std::max(hi, mix.mu[i]);
        smax = std::max(smax, std::sqrt(mix.var[i]));
    }
    lo -= 12.0 * smax;
    hi += 12.0 * smax;
    if (n % 2 == 0) ++n;
    double h = (hi - lo) / static_cast<double>(n - 1);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double y = lo + h * static_cast<double>(i);
        double t = std::exp(y);
        double f = q2_density(mix, t) * t;
        double coef = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        total += coef * f;
    }
    return total * h / 3.0;
}

// ---- Q3: linear walk scoring ----

// Role-aware shortest-position codes for every node seen in a triplet's walk
// sets; the query falls back to (X, X, X) for unseen nodes.
struct SpdTable {
    int m = 0;
    std::map<NodeId, std::array<int, 3>> codes;

    static SpdTable build(const TripletContext& ctx, int m) {
        SpdTable t;
        t.m = m;
        TripletCounts counts = position_counts_all(ctx, m);
        for (const auto& [node, per_role] : counts.by_node)
            t.codes[node] = {spd_code_from_counts(per_role[0]),
                             spd_code_from_counts(per_role[1]),
                             spd_code_from_counts(per_role[2])};
        return t;
    }

    std::array<int, 3> of(NodeId a) const {
        auto it = codes.find(a);
        return it == codes.end() ? std::array<int, 3>{kSpdNone, kSpdNone, kSpdNone} : it->second;
    }
};

// Fixed walk features for the linear model: per position, a one-hot over
// codes {0..m, X} for the w role plus the SUM of the u and v one-hots (the
// sum encodes the unordered pair, keeping the u/v symmetry exact). Truncated
// positions contribute zero blocks.
inline std::size_t q3_feature_dim(int m) {
    return static_cast<std::size_t>(m + 1) * 2 * static_cast<std::size_t>(m + 2);
}

inline Vec q3_walk_features(const Walk& walk, const SpdTable& table) {
    int m = table.m;
    std::size_t block = static_cast<std::size_t>(m + 2);
    Vec out(q3_feature_dim(m), 0.0);
    auto hot = [&](int code) {
        return code == kSpdNone ? block - 1 : static_cast<std::size_t>(code);
    };
    for (std::size_t i = 0; i < walk.steps.size(); ++i) {
        auto codes = table.of(walk.steps[i].node);
        std::size_t base = i * 2 * block;
        out[base + hot(codes[0])] += 1.0;
        out[base + hot(codes[1])] += 1.0;
        out[base + block + hot(codes[2])] += 1.0;
    }
    return out;
}

// x = sum_W C_W + b with C_W = B^T Enc(W); per-walk scores are exposed for
// the interpretation report.
class Q3Head {
public:
    void init(ParamStore& ps, std::size_t feat_dim, Rng& rng) {
        B_ = &ps.add("q3.B", {feat_dim});
        bias_ = &ps.add("q3.b", {1});
        glorot_init(*B_, rng, feat_dim, 1);
    }

    double score(const Vec& features) const {
        double s = 0.0;
        for (std::size_t i = 0; i < features.size(); ++i) s += B_->v[i] * features[i];
        return s;
    }

    double forward(const std::vector<Vec>& walk_features, std::vector<double>* scores) const {
        if (walk_features.empty()) throw DomainError("q3 needs a nonempty walk set");
        double x = bias_->v[0];
        if (scores) scores->clear();
        for (const auto& f : walk_features) {
            double cw = score(f);
            if (scores) scores->push_back(cw);
            x += cw;
        }
        return x;
    }

    void backward(const std::vector<Vec>& walk_features, double dx) {
        bias_->g[0] += dx;
        for (const auto& f : walk_features)
            for (std::size_t i = 0; i < f.size(); ++i) B_->g[i] += dx * f[i];
    }

private:
    Tensor* B_ = nullptr;
    Tensor* bias_ = nullptr;
};

// Negated Bernoulli log-likelihood: softplus(x) - x * 1[label = p1].
inline double q3_loss(double x, bool is_p1) {
    double sp = x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    return sp - (is_p1 ? x : 0.0);
}

inline double q3_loss_dx(double x, bool is_p1) {
    double sig = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    return sig - (is_p1 ? 1.0 : 0.0);
}

}  // namespace hop
