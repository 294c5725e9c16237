#pragma once

#include "hop/decoders.hpp"

namespace hop {

struct ModelConfig {
    EncoderConfig enc;
    std::size_t q1_hidden = 172;
    std::size_t q2_k = 3;
    std::uint64_t init_seed = 1;
};

// Walk encoder plus the Q1/Q2 heads over one shared parameter store.
class HitModel {
public:
    ParamStore params;
    WalkEncoder encoder;
    Q1Head q1;
    Q2Head q2;
    ModelConfig cfg;

    void init(const ModelConfig& c) {
        cfg = c;
        Rng rng(mix_seed(c.init_seed, 0x1417));
        encoder.init(params, c.enc, rng);
        q1.init(params, encoder.embedding_dim(), c.q1_hidden, rng);
        q2.init(params, encoder.embedding_dim(), c.q2_k, rng);
    }

    Vec q1_predict(const TripletContext& ctx) const {
        auto emb = encoder.encode_triplet(ctx, nullptr);
        return q1.forward(emb.psi_u, emb.psi_v, emb.psi_w, nullptr);
    }

    double q1_loss(const TripletContext& ctx, PatternLabel y) const {
        return cross_entropy(q1_predict(ctx), static_cast<int>(y));
    }

    // Forward + backward; gradients accumulate into `params`.
    double q1_loss_and_grad(const TripletContext& ctx, PatternLabel y) {
        WalkEncoder::TripletCache ec;
        auto emb = encoder.encode_triplet(ctx, &ec);
        Q1Head::Cache qc;
        Vec probs = q1.forward(emb.psi_u, emb.psi_v, emb.psi_w, &qc);
        double loss = cross_entropy(probs, static_cast<int>(y));
        auto d = q1.backward_ce(qc, y);
        encoder.triplet_backward(ec, d[0], d[1], d[2]);
        return loss;
    }

    Mixture q2_predict(const TripletContext& ctx, PatternLabel p) const {
        auto emb = encoder.encode_triplet(ctx, nullptr);
        return q2.forward(emb.psi_u, emb.psi_v, emb.psi_w, p, nullptr);
    }

    double q2_loss(const TripletContext& ctx, PatternLabel p, double t_rel) const {
        return q2_nll(q2_predict(ctx, p), t_rel);
    }

    double q2_loss_and_grad(const TripletContext& ctx, PatternLabel p, double t_rel) {
        WalkEncoder::TripletCache ec;
        auto emb = encoder.encode_triplet(ctx, &ec);
        Q2Head::Cache qc;
        Mixture mix = q2.forward(emb.psi_u, emb.psi_v, emb.psi_w, p, &qc);
        double loss = q2_nll(mix, t_rel);
        auto d = q2.backward_nll(qc, t_rel);
        encoder.triplet_backward(ec, d[0], d[1], d[2]);
        return loss;
    }

    void save(const std::string& path) const { params.save(path); }
    void load(const std::string& path) { params.load(path); }
};

// Q3 is a standalone linear model over fixed role-aware SPD walk features.
class Q3Model {
public:
    ParamStore params;
    Q3Head head;
    int m = 2;

    void init(int m_, std::uint64_t seed) {
        m = m_;
        Rng rng(mix_seed(seed, 0x93));
        head.init(params, q3_feature_dim(m), rng);
    }

    std::vector<Vec> features(const TripletContext& ctx) const {
        SpdTable table = SpdTable::build(ctx, m);
        std::vector<Vec> feats;
        for (int r = 0; r < 3; ++r)
            for (const auto& w : ctx.by_index(r).walks)
                feats.push_back(q3_walk_features(w, table));
        return feats;
    }

    double logit(const TripletContext& ctx, std::vector<double>* scores = nullptr) const {
        return head.forward(features(ctx), scores);
    }

    double loss_and_grad(const TripletContext& ctx, bool is_p1) {
        auto feats = features(ctx);
        double x = head.forward(feats, nullptr);
        head.backward(feats, q3_loss_dx(x, is_p1));
        return q3_loss(x, is_p1);
    }

    void save(const std::string& path) const { params.save(path); }
    void load(const std::string& path) { params.load(path); }
};

}  // namespace hop
