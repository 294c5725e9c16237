#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "hop/tensor.hpp"

namespace hop {

// Relative error with an absolute floor so near-zero gradients compare on an
// absolute scale instead of blowing up the ratio.
inline double grad_rel_err(double analytic, double numeric, double floor = 1e-6) {
    return std::abs(analytic - numeric) /
           std::max({std::abs(analytic), std::abs(numeric), floor});
}

struct GradCheckResult {
    double max_rel_err = 0.0;
    std::string worst_param;
    std::size_t worst_index = 0;
    std::size_t n_checked = 0;
};

// Central-difference check of the gradients already accumulated in `store`
// against `loss`, which must re-evaluate the forward pass from the current
// parameter values without touching gradients. Tensors larger than
// `max_per_tensor` are spot-checked on a seeded random subset.
inline GradCheckResult check_gradients(ParamStore& store, const std::function<double()>& loss,
                                       double eps = 1e-5, std::size_t max_per_tensor = 24,
                                       std::uint64_t seed = 0x9cad5eed) {
    GradCheckResult res;
    for (auto& [name, t] : store.all()) {
        std::vector<std::size_t> idx;
        if (t.numel() <= max_per_tensor) {
            idx.resize(t.numel());
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        } else {
            Rng rng(mix_seed(seed, std::hash<std::string>{}(name)));
            auto pick = rng.sample_without_replacement(t.numel(), max_per_tensor);
            idx.assign(pick.begin(), pick.end());
        }
        for (std::size_t i : idx) {
            double saved = t.v[i];
            t.v[i] = saved + eps;
            double up = loss();
            t.v[i] = saved - eps;
            double down = loss();
            t.v[i] = saved;
            double numeric = (up - down) / (2.0 * eps);
            double err = grad_rel_err(t.g[i], numeric);
            ++res.n_checked;
            if (err > res.max_rel_err) {
                res.max_rel_err = err;
                res.worst_param = name;
                res.worst_index = i;
            }
        }
    }
    return res;
}

}  // namespace hop
