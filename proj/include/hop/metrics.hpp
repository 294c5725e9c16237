#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "hop/mathutil.hpp"
#include "hop/patterns.hpp"

namespace hop {

// Rank-based binary ROC-AUC; tied scores contribute 1/2 through midranks.
inline double auc_binary(const std::vector<double>& scores, const std::vector<bool>& positive) {
    if (scores.size() != positive.size()) throw DomainError("auc: size mismatch");
    for (double s : scores)
        if (!std::isfinite(s)) throw DomainError("auc: non-finite score");
    std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double rank_sum_pos = 0.0;
    std::size_t n_pos = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        double midrank = 0.5 * static_cast<double>(i + 1 + j);  // average of ranks i+1..j
        for (std::size_t k = i; k < j; ++k)
            if (positive[order[k]]) {
                rank_sum_pos += midrank;
                ++n_pos;
            }
        i = j;
    }
    std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw DomainError("auc: needs both classes");
    return (rank_sum_pos - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1)) /
           (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

using Prob4 = std::array<double, 4>;

inline Prob4 to_prob4(const std::vector<double>& v) {
    if (v.size() != 4) throw DomainError("expected a 4-class probability vector");
    return {v[0], v[1], v[2], v[3]};
}

struct Auc1v1 {
    double mean_percent = 0.0;                       // unweighted mean over computed pairs, x100
    std::array<std::array<double, 4>, 4> pair_auc{}; // [c1][c2], c1 < c2; 0 elsewhere
    int pairs_used = 0;
    int pairs_skipped = 0;                           // one of the two classes absent
};

// For each unordered class pair (c1, c2): restrict to instances labeled c1 or
// c2, score p(c1) - p(c2) with c1 positive, then average the 6 binary AUCs
// unweighted.
inline Auc1v1 auc_1v1(const std::vector<Prob4>& probs, const std::vector<PatternLabel>& labels) {
    if (probs.size() != labels.size()) throw DomainError("auc_1v1: size mismatch");
    Auc1v1 out;
    double total = 0.0;
    for (int c1 = 0; c1 < 4; ++c1) {
        for (int c2 = c1 + 1; c2 < 4; ++c2) {
            std::vector<double> scores;
            std::vector<bool> positive;
            for (std::size_t i = 0; i < probs.size(); ++i) {
                int y = static_cast<int>(labels[i]);
                if (y != c1 && y != c2) continue;
                scores.push_back(probs[i][static_cast<std::size_t>(c1)] -
                                 probs[i][static_cast<std::size_t>(c2)]);
                positive.push_back(y == c1);
            }
            bool has_pos = std::find(positive.begin(), positive.end(), true) != positive.end();
            bool has_neg = std::find(positive.begin(), positive.end(), false) != positive.end();
            if (!has_pos || !has_neg) {
                ++out.pairs_skipped;
                continue;
            }
            double a = auc_binary(scores, positive);
            out.pair_auc[static_cast<std::size_t>(c1)][static_cast<std::size_t>(c2)] = a;
            total += a;
            ++out.pairs_used;
        }
    }
    if (out.pairs_used == 0) throw DomainError("auc_1v1: no class pair present");
    out.mean_percent = 100.0 * total / static_cast<double>(out.pairs_used);
    return out;
}

// Rows are ground truth, columns are predictions.
inline std::array<std::array<std::size_t, 4>, 4> confusion_matrix(
    const std::vector<PatternLabel>& predicted, const std::vector<PatternLabel>& labels) {
    if (predicted.size() != labels.size()) throw DomainError("confusion: size mismatch");
    std::array<std::array<std::size_t, 4>, 4> m{};
    for (std::size_t i = 0; i < labels.size(); ++i)
        ++m[static_cast<std::size_t>(labels[i])][static_cast<std::size_t>(predicted[i])];
    return m;
}

inline PatternLabel argmax_label(const Prob4& probs) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < 4; ++i)
        if (probs[i] > probs[best]) best = i;
    return static_cast<PatternLabel>(best);
}

// Mean absolute error between log t and log t-hat.
inline double mae_log(const std::vector<double>& t_true, const std::vector<double>& t_pred) {
    if (t_true.size() != t_pred.size() || t_true.empty())
        throw DomainError("mae_log: bad input sizes");
    double s = 0.0;
    for (std::size_t i = 0; i < t_true.size(); ++i) {
        if (!(t_true[i] > 0.0) || !(t_pred[i] > 0.0))
            throw DomainError("mae_log: times must be positive");
        s += std::abs(std::log(t_true[i]) - std::log(t_pred[i]));
    }
    return s / static_cast<double>(t_true.size());
}

}  // namespace hop
