#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <vector>

#include "hop/baselines.hpp"
#include "hop/metrics.hpp"
#include "hop/model.hpp"

namespace hop {

struct TrainConfig {
    double lr = 1e-4;
    double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
    // Decoupled L2 decay. Zero everywhere by default; the planted suite sets
    // it for the Q3 head so the separating direction is unique and category
    // scores do not drift along loss-flat directions.
    double weight_decay = 0.0;
    std::size_t batch_size = 64;
    std::size_t max_epochs = 50;
    std::size_t patience = 5;
    SamplerConfig sampler;  // master_seed is re-derived per epoch from `seed`
    std::uint64_t seed = 1;

    void validate() const {
        if (lr < 0.0 || !std::isfinite(lr)) throw DomainError("learning rate must be >= 0");
        if (weight_decay < 0.0 || !std::isfinite(weight_decay))
            throw DomainError("weight decay must be >= 0");
        if (batch_size == 0) throw DomainError("batch size must be positive");
        sampler.validate();
    }
};

struct EpochStats {
    double train_loss = 0.0;
    double valid_metric = 0.0;
};

struct TrainResult {
    std::vector<EpochStats> history;
    std::size_t best_epoch = 0;  // 0 means the initial parameters
    double best_metric = 0.0;
};

namespace detail {

inline constexpr std::uint64_t kTrainStream = 0x7261;
inline constexpr std::uint64_t kEvalStream = 0xe7a1;
inline constexpr std::uint64_t kShuffleStream = 0x5f1e;

// Shared epoch/batch/early-stopping structure. `loss_grad(i, epoch)` runs
// forward+backward for one training instance; `evaluate()` scores the
// validation split from fixed-seed walks. The best checkpoint (including the
// untrained epoch-0 state) is restored before returning.
inline TrainResult train_loop(ParamStore& params, std::size_t n_train,
                              const std::function<double(std::size_t, std::size_t)>& loss_grad,
                              const std::function<double()>& evaluate, const TrainConfig& cfg,
                              bool higher_is_better) {
    cfg.validate();
    if (n_train == 0) throw DomainError("training split is empty");
    auto checked_eval = [&evaluate](std::size_t epoch) {
        double m = evaluate();
        if (!std::isfinite(m))
            throw DomainError("training diverged: non-finite validation metric at epoch " +
                              std::to_string(epoch));
        return m;
    };
    TrainResult res;
    res.best_metric = checked_eval(0);
    res.best_epoch = 0;
    std::string best_blob = params.serialize();
    res.history.push_back({0.0, res.best_metric});
    std::vector<std::size_t> order(n_train);
    for (std::size_t i = 0; i < n_train; ++i) order[i] = i;
    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        Rng shuffle_rng(mix_seed(mix_seed(cfg.seed, kShuffleStream), epoch));
        shuffle_rng.shuffle(order);
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < n_train; start += cfg.batch_size) {
            std::size_t stop = std::min(n_train, start + cfg.batch_size);
            params.zero_grad();
            for (std::size_t k = start; k < stop; ++k) {
                double loss = loss_grad(order[k], epoch);
                if (!std::isfinite(loss))
                    throw DomainError("training diverged: non-finite loss at epoch " +
                                      std::to_string(epoch));
                loss_sum += loss;
            }
            double inv = 1.0 / static_cast<double>(stop - start);
            for (auto& [name, t] : params.all())
                for (auto& g : t.g) g *= inv;
            params.adam_step(cfg.lr, cfg.beta1, cfg.beta2, cfg.adam_eps, cfg.weight_decay);
        }
        double metric = checked_eval(epoch);
        res.history.push_back({loss_sum / static_cast<double>(n_train), metric});
        bool improved = higher_is_better ? metric > res.best_metric : metric < res.best_metric;
        if (improved) {
            res.best_metric = metric;
            res.best_epoch = epoch;
            best_blob = params.serialize();
        } else if (epoch - res.best_epoch > cfg.patience) {
            break;
        }
    }
    params.deserialize(best_blob);
    return res;
}

inline SamplerConfig epoch_sampler(const TrainConfig& cfg, std::uint64_t stream,
                                   std::size_t epoch) {
    SamplerConfig sc = cfg.sampler;
    sc.master_seed = mix_seed(mix_seed(cfg.seed, stream), epoch);
    return sc;
}

}  // namespace detail

inline TripletContext instance_context(const TemporalHypergraph& g, const LabeledInstance& inst,
                                       const SamplerConfig& sc) {
    return sample_triplet_context(g, inst.triplet, sc);
}

// ---- Q1 ----

inline std::vector<Prob4> q1_predict_all(const HitModel& model, const TemporalHypergraph& g,
                                         const std::vector<LabeledInstance>& insts,
                                         const SamplerConfig& sc) {
    std::vector<Prob4> out;
    out.reserve(insts.size());
    for (const auto& inst : insts)
        out.push_back(to_prob4(model.q1_predict(instance_context(g, inst, sc))));
    return out;
}

inline std::vector<PatternLabel> labels_of(const std::vector<LabeledInstance>& insts) {
    std::vector<PatternLabel> ys;
    ys.reserve(insts.size());
    for (const auto& i : insts) ys.push_back(i.label);
    return ys;
}

inline TrainResult train_q1(HitModel& model, const TemporalHypergraph& g,
                            const std::vector<LabeledInstance>& train,
                            const std::vector<LabeledInstance>& valid, const TrainConfig& cfg) {
    auto loss_grad = [&](std::size_t i, std::size_t epoch) {
        auto sc = detail::epoch_sampler(cfg, detail::kTrainStream, epoch);
        return model.q1_loss_and_grad(instance_context(g, train[i], sc), train[i].label);
    };
    auto evaluate = [&] {
        auto sc = detail::epoch_sampler(cfg, detail::kEvalStream, 0);
        return auc_1v1(q1_predict_all(model, g, valid, sc), labels_of(valid)).mean_percent;
    };
    return detail::train_loop(model.params, train.size(), loss_grad, evaluate, cfg, true);
}

// ---- Q2 ----

// The first-formation offset for pattern p, when it exists in the window.
inline std::optional<double> q2_target_time(const LabeledInstance& inst, PatternLabel p) {
    switch (p) {
        case PatternLabel::Wedge: return inst.times.t_wedge;
        case PatternLabel::Triangle: return inst.times.t_triangle;
        case PatternLabel::Closure: return inst.times.t_closure;
        default: throw DomainError("q2 has no head for the edge pattern");
    }
}

inline std::vector<LabeledInstance> q2_filter(const std::vector<LabeledInstance>& insts,
                                              PatternLabel p) {
    std::vector<LabeledInstance> out;
    for (const auto& i : insts)
        if (q2_target_time(i, p).has_value()) out.push_back(i);
    return out;
}

inline double q2_mean_nll(const HitModel& model, const TemporalHypergraph& g,
                          const std::vector<LabeledInstance>& insts, PatternLabel p,
                          const SamplerConfig& sc) {
    if (insts.empty()) throw DomainError("q2 evaluation needs instances with the pattern time");
    double s = 0.0;
    for (const auto& inst : insts)
        s += q2_nll(model.q2_predict(instance_context(g, inst, sc), p),
                    *q2_target_time(inst, p));
    return s / static_cast<double>(insts.size());
}

inline TrainResult train_q2(HitModel& model, const TemporalHypergraph& g,
                            const std::vector<LabeledInstance>& train_all,
                            const std::vector<LabeledInstance>& valid_all, PatternLabel p,
                            const TrainConfig& cfg) {
    auto train = q2_filter(train_all, p);
    auto valid = q2_filter(valid_all, p);
    if (train.empty() || valid.empty())
        throw DomainError("q2: no instances with a formation time for this pattern");
    auto loss_grad = [&, train](std::size_t i, std::size_t epoch) {
        auto sc = detail::epoch_sampler(cfg, detail::kTrainStream, epoch);
        return model.q2_loss_and_grad(instance_context(g, train[i], sc), p,
                                      *q2_target_time(train[i], p));
    };
    auto evaluate = [&, valid] {
        auto sc = detail::epoch_sampler(cfg, detail::kEvalStream, 0);
        return q2_mean_nll(model, g, valid, p, sc);
    };
    return detail::train_loop(model.params, train.size(), loss_grad, evaluate, cfg, false);
}

// ---- Q3 ----

// Binary task between two label groups; p1 is the positive side.
struct Q3Task {
    std::vector<PatternLabel> p1, p2;

    bool in_p1(PatternLabel y) const {
        return std::find(p1.begin(), p1.end(), y) != p1.end();
    }
    bool in_task(PatternLabel y) const {
        return in_p1(y) || std::find(p2.begin(), p2.end(), y) != p2.end();
    }
};

inline std::vector<LabeledInstance> q3_filter(const std::vector<LabeledInstance>& insts,
                                              const Q3Task& task) {
    std::vector<LabeledInstance> out;
    for (const auto& i : insts)
        if (task.in_task(i.label)) out.push_back(i);
    return out;
}

inline double q3_auc(const Q3Model& model, const TemporalHypergraph& g,
                     const std::vector<LabeledInstance>& insts, const Q3Task& task,
                     const SamplerConfig& sc) {
    std::vector<double> scores;
    std::vector<bool> pos;
    for (const auto& inst : insts) {
        scores.push_back(model.logit(instance_context(g, inst, sc)));
        pos.push_back(task.in_p1(inst.label));
    }
    return auc_binary(scores, pos);
}

inline TrainResult train_q3(Q3Model& model, const TemporalHypergraph& g,
                            const std::vector<LabeledInstance>& train_all,
                            const std::vector<LabeledInstance>& valid_all, const Q3Task& task,
                            const TrainConfig& cfg) {
    auto train = q3_filter(train_all, task);
    auto valid = q3_filter(valid_all, task);
    if (train.empty() || valid.empty()) throw DomainError("q3: task classes missing from splits");
    auto loss_grad = [&, train](std::size_t i, std::size_t epoch) {
        auto sc = detail::epoch_sampler(cfg, detail::kTrainStream, epoch);
        return model.loss_and_grad(instance_context(g, train[i], sc),
                                   task.in_p1(train[i].label));
    };
    auto evaluate = [&, valid] {
        auto sc = detail::epoch_sampler(cfg, detail::kEvalStream, 0);
        return q3_auc(model, g, valid, task, sc);
    };
    return detail::train_loop(model.params, train.size(), loss_grad, evaluate, cfg, true);
}

// ---- Baseline ----

inline TrainResult train_baseline(BaselineModel& model, const std::vector<double>& feat_train,
                                  const std::vector<PatternLabel>& y_train,
                                  const std::vector<double>& feat_valid,
                                  const std::vector<PatternLabel>& y_valid,
                                  const TrainConfig& cfg) {
    if (feat_train.size() != y_train.size() || feat_valid.size() != y_valid.size())
        throw DomainError("baseline: feature/label size mismatch");
    auto loss_grad = [&](std::size_t i, std::size_t) {
        return model.loss_and_grad(feat_train[i], y_train[i]);
    };
    auto evaluate = [&] {
        std::vector<Prob4> probs;
        probs.reserve(feat_valid.size());
        for (double f : feat_valid) probs.push_back(to_prob4(model.predict(f)));
        return auc_1v1(probs, y_valid).mean_percent;
    };
    return detail::train_loop(model.params, feat_train.size(), loss_grad, evaluate, cfg, true);
}

// Five-seed mean with population standard deviation.
inline MeanStd aggregate_runs(const std::vector<double>& values) { return mean_std(values); }

}  // namespace hop
