#pragma once

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "hop/nn.hpp"
#include "hop/walks.hpp"

namespace hop {

// Position-code sentinel: the node never appears in the walk set.
constexpr int kSpdNone = -1;

enum class DeMode { Asymmetric, SymmetricSum, None };
enum class PoolMode { Mean, SelfAttention };

inline const char* de_mode_name(DeMode m) {
    switch (m) {
        case DeMode::Asymmetric: return "asymmetric";
        case DeMode::SymmetricSum: return "symmetric_sum";
        default: return "none";
    }
}

inline const char* pool_mode_name(PoolMode m) {
    return m == PoolMode::Mean ? "mean" : "self_attention";
}

inline DeMode de_mode_from_name(const std::string& s) {
    if (s == "asymmetric") return DeMode::Asymmetric;
    if (s == "symmetric_sum") return DeMode::SymmetricSum;
    if (s == "none") return DeMode::None;
    throw ParseError("unknown de mode: " + s);
}

inline PoolMode pool_mode_from_name(const std::string& s) {
    if (s == "mean") return PoolMode::Mean;
    if (s == "self_attention") return PoolMode::SelfAttention;
    throw ParseError("unknown pool mode: " + s);
}

struct EncoderConfig {
    int m = 2;                    // walk length; positions 0..m
    std::size_t de_dim = 108;     // distance-encoding output width
    std::size_t time_dim = 172;   // Fourier time-feature width
    std::size_t hidden_dim = 172; // recurrent state width
    DeMode de_mode = DeMode::Asymmetric;
    PoolMode pool = PoolMode::SelfAttention;
    double time_scale = 1e6;      // spread of beta initialization periods

    void validate() const {
        if (m < 1) throw DomainError("encoder m must be >= 1");
        if (de_dim == 0 || time_dim == 0 || hidden_dim == 0)
            throw DomainError("encoder dimensions must be positive");
        if (!(time_scale > 1.0)) throw DomainError("time_scale must exceed 1");
    }
};

// g(a; S_z)[i] = number of walks in S_z whose position i holds node a.
// Truncated walks contribute only to their realized positions.
inline Vec position_counts(NodeId a, const WalkSet& s, int m) {
    Vec out(static_cast<std::size_t>(m) + 1, 0.0);
    for (const auto& w : s.walks)
        for (std::size_t i = 0; i < w.steps.size(); ++i)
            if (w.steps[i].node == a) out[i] += 1.0;
    return out;
}

inline int spd_code_from_counts(const Vec& counts) {
    for (std::size_t i = 0; i < counts.size(); ++i)
        if (counts[i] > 0.0) return static_cast<int>(i);
    return kSpdNone;
}

inline int spd_code(NodeId a, const WalkSet& s, int m) {
    return spd_code_from_counts(position_counts(a, s, m));
}

// Counts for every node that appears anywhere in the triplet's walk sets,
// per role (u, v, w). std::map keeps downstream iteration deterministic.
struct TripletCounts {
    int m = 0;
    std::map<NodeId, std::array<Vec, 3>> by_node;
};

inline TripletCounts position_counts_all(const TripletContext& ctx, int m) {
    TripletCounts tc;
    tc.m = m;
    std::size_t width = static_cast<std::size_t>(m) + 1;
    for (int r = 0; r < 3; ++r) {
        for (const auto& w : ctx.by_index(r).walks) {
            for (std::size_t i = 0; i < w.steps.size(); ++i) {
                auto [it, fresh] = tc.by_node.try_emplace(w.steps[i].node);
                if (fresh)
                    for (auto& vec : it->second) vec.assign(width, 0.0);
                it->second[static_cast<std::size_t>(r)][i] += 1.0;
            }
        }
    }
    return tc;
}

// Walk-set encoder: distance encoding -> Fourier time features -> recurrent
// cell -> set pooling. Forward passes fill caches that the matching backward
// passes consume; parameter gradients accumulate into the ParamStore.
class WalkEncoder {
public:
    EncoderConfig cfg;

    void init(ParamStore& ps, const EncoderConfig& c, Rng& rng) {
        c.validate();
        cfg = c;
        std::size_t counts_w = static_cast<std::size_t>(cfg.m) + 1;
        if (cfg.de_mode == DeMode::Asymmetric) {
            f2_.init(ps, "enc.f2", {2 * counts_w, cfg.de_dim}, rng, true);
            f1_.init(ps, "enc.f1", {2 * cfg.de_dim, cfg.de_dim, cfg.de_dim}, rng, true);
        } else if (cfg.de_mode == DeMode::SymmetricSum) {
            f2_.init(ps, "enc.f2", {counts_w, cfg.de_dim}, rng, true);
            f1_.init(ps, "enc.f1", {cfg.de_dim, cfg.de_dim, cfg.de_dim}, rng, true);
        }
        beta_ = &ps.add("enc.time.beta", {cfg.time_dim});
        phi_ = &ps.add("enc.time.phi", {cfg.time_dim});
        // Log-uniform frequencies so Fourier periods span [1, time_scale].
        for (auto& b : beta_->v) b = std::exp(rng.next_uniform(-std::log(cfg.time_scale), 0.0));
        gru_.init(ps, "enc.gru", gru_input_dim(), cfg.hidden_dim, rng);
        if (cfg.pool == PoolMode::SelfAttention) {
            theta1_ = &ps.add("enc.att.theta1", {cfg.hidden_dim, cfg.hidden_dim});
            theta2_ = &ps.add("enc.att.theta2", {cfg.hidden_dim, cfg.hidden_dim});
            glorot_init(*theta1_, rng, cfg.hidden_dim, cfg.hidden_dim);
            glorot_init(*theta2_, rng, cfg.hidden_dim, cfg.hidden_dim);
        }
    }

    std::size_t de_dim_effective() const {
        return cfg.de_mode == DeMode::None ? 0 : cfg.de_dim;
    }
    std::size_t gru_input_dim() const { return de_dim_effective() + cfg.time_dim; }
    std::size_t embedding_dim() const { return cfg.hidden_dim; }

    // ---- distance encoding ----

    struct DeCache {
        Mlp::Cache f2b, f2c, f2w;  // f2w used by the symmetric-sum variant
        Mlp::Cache f1c;
        Vec b, c;
    };

    // I(a) = F1((b + c) (+) |b - c|), b = F2(g_u (+) g_w), c = F2(g_v (+) g_w).
    // b + c and |b - c| are symmetric in (b, c), so swapping the u and v walk
    // sets leaves the output bit-identical.
    Vec de_forward(const std::array<Vec, 3>& counts, DeCache* cache) const {
        if (cfg.de_mode == DeMode::None) return {};
        if (cfg.de_mode == DeMode::SymmetricSum) {
            Vec b = f2_.forward(counts[0], cache ? &cache->f2b : nullptr);
            Vec c = f2_.forward(counts[1], cache ? &cache->f2c : nullptr);
            Vec w = f2_.forward(counts[2], cache ? &cache->f2w : nullptr);
            Vec s(cfg.de_dim);
            for (std::size_t i = 0; i < s.size(); ++i) s[i] = b[i] + c[i] + w[i];
            return f1_.forward(s, cache ? &cache->f1c : nullptr);
        }
        Vec b = f2_.forward(concat(counts[0], counts[2]), cache ? &cache->f2b : nullptr);
        Vec c = f2_.forward(concat(counts[1], counts[2]), cache ? &cache->f2c : nullptr);
        Vec h(2 * cfg.de_dim);
        for (std::size_t i = 0; i < cfg.de_dim; ++i) {
            h[i] = b[i] + c[i];
            h[cfg.de_dim + i] = std::abs(b[i] - c[i]);
        }
        if (cache) {
            cache->b = b;
            cache->c = c;
        }
        return f1_.forward(h, cache ? &cache->f1c : nullptr);
    }

    void de_backward(DeCache& cache, const Vec& dI) {
        if (cfg.de_mode == DeMode::None) return;
        if (cfg.de_mode == DeMode::SymmetricSum) {
            Vec ds = f1_.backward(cache.f1c, dI);
            f2_.backward(cache.f2b, ds);
            f2_.backward(cache.f2c, ds);
            f2_.backward(cache.f2w, ds);
            return;
        }
        Vec dh = f1_.backward(cache.f1c, dI);
        Vec db(cfg.de_dim), dc(cfg.de_dim);
        for (std::size_t i = 0; i < cfg.de_dim; ++i) {
            double diff = cache.b[i] - cache.c[i];
            double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
            db[i] = dh[i] + dh[cfg.de_dim + i] * sign;
            dc[i] = dh[i] - dh[cfg.de_dim + i] * sign;
        }
        f2_.backward(cache.f2b, db);
        f2_.backward(cache.f2c, dc);
    }

    // ---- time features ----

    // F3(dt)[j] = cos(beta_j dt) + phi_j, dt = anchor - step time (>= 0).
    Vec time_forward(double dt) const {
        Vec out(cfg.time_dim);
        for (std::size_t j = 0; j < cfg.time_dim; ++j)
            out[j] = std::cos(beta_->v[j] * dt) + phi_->v[j];
        return out;
    }

    void time_backward(double dt, const Vec& dout) {
        for (std::size_t j = 0; j < cfg.time_dim; ++j) {
            beta_->g[j] += dout[j] * (-dt * std::sin(beta_->v[j] * dt));
            phi_->g[j] += dout[j];
        }
    }

    // ---- recurrent walk encoding ----

    struct WalkCache {
        std::vector<GruCell::Cache> steps;
        std::vector<double> dts;
        std::vector<NodeId> nodes;
    };

    // Enc(W) = final hidden state over inputs I(z_i) (+) F3(t0 - t_i),
    // stopping at the realized length of a truncated walk.
    Vec encode_walk(const Walk& walk, double anchor, const std::map<NodeId, Vec>& de_values,
                    WalkCache* cache) const {
        Vec h(cfg.hidden_dim, 0.0);
        for (const auto& step : walk.steps) {
            double dt = anchor - step.time;
            Vec x = time_forward(dt);
            if (cfg.de_mode != DeMode::None) {
                auto it = de_values.find(step.node);
                if (it == de_values.end())
                    throw DomainError("walk node missing a distance encoding");
                x = concat(it->second, x);
            }
            if (cache) {
                cache->steps.emplace_back();
                cache->dts.push_back(dt);
                cache->nodes.push_back(step.node);
                h = gru_.forward(x, h, &cache->steps.back());
            } else {
                h = gru_.forward(x, h, nullptr);
            }
        }
        return h;
    }

    // Propagates d loss / d Enc(W) back through the cell chain; per-node
    // distance-encoding gradients accumulate into `de_grads`.
    void walk_backward(WalkCache& cache, const Vec& d_enc, std::map<NodeId, Vec>& de_grads) {
        Vec dh = d_enc;
        std::size_t de_n = de_dim_effective();
        for (std::size_t s = cache.steps.size(); s-- > 0;) {
            auto [dx, dh_prev] = gru_.backward(cache.steps[s], dh);
            Vec dtime(dx.begin() + static_cast<std::ptrdiff_t>(de_n), dx.end());
            time_backward(cache.dts[s], dtime);
            if (de_n > 0) {
                auto [it, fresh] = de_grads.try_emplace(cache.nodes[s], Vec(de_n, 0.0));
                for (std::size_t i = 0; i < de_n; ++i) it->second[i] += dx[i];
            }
            dh = std::move(dh_prev);
        }
    }

    // ---- set pooling ----

    struct PoolCache {
        std::vector<Vec> encs;
        std::vector<double> att;     // row-softmaxed scores, M x M
        std::vector<double> f;       // E Theta1, M x H
        std::vector<double> ft;      // E Theta1^T, M x H
        Vec pooled;                  // pre-Theta2 mean of attention contexts
    };

    // Mean(S_z) = (1/M) sum_i enc(W_i).
    // Self-Att(S_z) = ((1/M) sum_i sum_j a_ij enc(W_j)) Theta2 with
    // a_i = softmax_j(enc(W_i)^T Theta1 enc(W_j)). Both are invariant to walk
    // order.
    Vec pool_forward(const std::vector<Vec>& encs, PoolCache* cache) const {
        if (encs.empty()) throw DomainError("pool over an empty walk set");
        std::size_t M = encs.size(), H = cfg.hidden_dim;
        if (cache) cache->encs = encs;
        if (cfg.pool == PoolMode::Mean) {
            Vec out(H, 0.0);
            for (const auto& e : encs)
                for (std::size_t i = 0; i < H; ++i) out[i] += e[i];
            for (auto& x : out) x /= static_cast<double>(M);
            if (cache) cache->pooled = out;
            return out;
        }
        std::vector<double> E(M * H);
        for (std::size_t i = 0; i < M; ++i)
            std::copy(encs[i].begin(), encs[i].end(), E.begin() + static_cast<std::ptrdiff_t>(i * H));
        std::vector<double> f = mat_mul(E, M, H, theta1_->v, H);        // E Theta1
        std::vector<double> scores = mat_mul_a_bt(f, M, H, E, M);       // (E Theta1) E^T
        std::vector<double> att(M * M);
        for (std::size_t i = 0; i < M; ++i) {
            Vec row(scores.begin() + static_cast<std::ptrdiff_t>(i * M),
                    scores.begin() + static_cast<std::ptrdiff_t>((i + 1) * M));
            Vec sm = softmax_vec(row);
            std::copy(sm.begin(), sm.end(), att.begin() + static_cast<std::ptrdiff_t>(i * M));
        }
        std::vector<double> ctx = mat_mul(att, M, M, E, H);             // A E
        Vec pooled(H, 0.0);
        for (std::size_t i = 0; i < M; ++i)
            for (std::size_t k = 0; k < H; ++k) pooled[k] += ctx[i * H + k];
        for (auto& x : pooled) x /= static_cast<double>(M);
        Vec out(H, 0.0);
        for (std::size_t k = 0; k < H; ++k)
            for (std::size_t l = 0; l < H; ++l) out[k] += pooled[l] * theta2_->v[l * H + k];
        if (cache) {
            cache->att = std::move(att);
            cache->f = std::move(f);
            cache->ft = mat_mul_a_bt(E, M, H, theta1_->v, H);           // E Theta1^T
            cache->pooled = std::move(pooled);
        }
        return out;
    }

    // Returns d loss / d enc(W_i) for every walk.
    std::vector<Vec> pool_backward(const PoolCache& cache, const Vec& dout) {
        std::size_t M = cache.encs.size(), H = cfg.hidden_dim;
        std::vector<Vec> d_encs(M, Vec(H, 0.0));
        if (cfg.pool == PoolMode::Mean) {
            for (std::size_t i = 0; i < M; ++i)
                for (std::size_t k = 0; k < H; ++k)
                    d_encs[i][k] = dout[k] / static_cast<double>(M);
            return d_encs;
        }
        std::vector<double> E(M * H);
        for (std::size_t i = 0; i < M; ++i)
            std::copy(cache.encs[i].begin(), cache.encs[i].end(),
                      E.begin() + static_cast<std::ptrdiff_t>(i * H));
        Vec dpooled(H, 0.0);
        for (std::size_t l = 0; l < H; ++l) {
            for (std::size_t k = 0; k < H; ++k) {
                theta2_->g[l * H + k] += cache.pooled[l] * dout[k];
                dpooled[l] += theta2_->v[l * H + k] * dout[k];
            }
        }
        // d ctx rows are all dpooled / M; fold the mean in directly.
        std::vector<double> dctx(M * H);
        for (std::size_t i = 0; i < M; ++i)
            for (std::size_t k = 0; k < H; ++k) dctx[i * H + k] = dpooled[k] / static_cast<double>(M);
        std::vector<double> datt = mat_mul_a_bt(dctx, M, H, E, M);      // dCTX E^T
        std::vector<double> dE = mat_mul_at_b(cache.att, M, M, dctx, H);// A^T dCTX
        std::vector<double> dscores(M * M);
        for (std::size_t i = 0; i < M; ++i) {
            double dot = 0.0;
            for (std::size_t j = 0; j < M; ++j) dot += cache.att[i * M + j] * datt[i * M + j];
            for (std::size_t j = 0; j < M; ++j)
                dscores[i * M + j] = cache.att[i * M + j] * (datt[i * M + j] - dot);
        }
        {
            std::vector<double> t = mat_mul(dscores, M, M, cache.ft, H);  // dS (E Theta1^T)
            for (std::size_t i = 0; i < M * H; ++i) dE[i] += t[i];
            t = mat_mul_at_b(dscores, M, M, cache.f, H);                  // dS^T (E Theta1)
            for (std::size_t i = 0; i < M * H; ++i) dE[i] += t[i];
            std::vector<double> g = mat_mul(dscores, M, M, E, H);         // dS E
            std::vector<double> dth1 = mat_mul_at_b(E, M, H, g, H);       // E^T (dS E)
            for (std::size_t i = 0; i < H * H; ++i) theta1_->g[i] += dth1[i];
        }
        for (std::size_t i = 0; i < M; ++i)
            std::copy(dE.begin() + static_cast<std::ptrdiff_t>(i * H),
                      dE.begin() + static_cast<std::ptrdiff_t>((i + 1) * H), d_encs[i].begin());
        return d_encs;
    }

    // ---- whole-triplet orchestration ----

    struct TripletCache {
        TripletCounts counts;
        std::map<NodeId, Vec> de_values;
        std::map<NodeId, DeCache> de_caches;
        std::array<std::vector<WalkCache>, 3> walk_caches;
        std::array<PoolCache, 3> pool_caches;
    };

    struct TripletEmbedding {
        Vec psi_u, psi_v, psi_w;
        const Vec& by_index(int i) const { return i == 0 ? psi_u : (i == 1 ? psi_v : psi_w); }
    };

    TripletEmbedding encode_triplet(const TripletContext& ctx, TripletCache* cache) const {
        std::map<NodeId, Vec> local_de;
        std::map<NodeId, Vec>* de_values = cache ? &cache->de_values : &local_de;
        if (cfg.de_mode != DeMode::None) {
            TripletCounts counts = position_counts_all(ctx, cfg.m);
            for (const auto& [node, per_role] : counts.by_node) {
                DeCache* dc = nullptr;
                if (cache) dc = &cache->de_caches[node];
                (*de_values)[node] = de_forward(per_role, dc);
            }
            if (cache) cache->counts = std::move(counts);
        }
        TripletEmbedding out;
        for (int r = 0; r < 3; ++r) {
            const WalkSet& ws = ctx.by_index(r);
            std::vector<Vec> encs;
            encs.reserve(ws.walks.size());
            for (const auto& w : ws.walks) {
                WalkCache* wc = nullptr;
                if (cache) {
                    cache->walk_caches[static_cast<std::size_t>(r)].emplace_back();
                    wc = &cache->walk_caches[static_cast<std::size_t>(r)].back();
                }
                encs.push_back(encode_walk(w, ws.anchor, *de_values, wc));
            }
            Vec psi = pool_forward(encs, cache ? &cache->pool_caches[static_cast<std::size_t>(r)]
                                               : nullptr);
            (r == 0 ? out.psi_u : r == 1 ? out.psi_v : out.psi_w) = std::move(psi);
        }
        return out;
    }

    void triplet_backward(TripletCache& cache, const Vec& dpsi_u, const Vec& dpsi_v,
                          const Vec& dpsi_w) {
        std::map<NodeId, Vec> de_grads;
        const Vec* dpsi[3] = {&dpsi_u, &dpsi_v, &dpsi_w};
        for (int r = 0; r < 3; ++r) {
            auto d_encs = pool_backward(cache.pool_caches[static_cast<std::size_t>(r)], *dpsi[r]);
            auto& wcs = cache.walk_caches[static_cast<std::size_t>(r)];
            for (std::size_t k = 0; k < wcs.size(); ++k)
                walk_backward(wcs[k], d_encs[k], de_grads);
        }
        for (auto& [node, dI] : de_grads) de_backward(cache.de_caches.at(node), dI);
    }

private:
    Mlp f2_, f1_;
    Tensor* beta_ = nullptr;
    Tensor* phi_ = nullptr;
    GruCell gru_;
    Tensor* theta1_ = nullptr;
    Tensor* theta2_ = nullptr;
};

}  // namespace hop
