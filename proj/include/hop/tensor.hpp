#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <string>
#include <vector>

#include "hop/common.hpp"
#include "hop/rng.hpp"

namespace hop {

// Dense row-major tensor with a matching gradient buffer.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> v;
    std::vector<double> g;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
        std::size_t n = 1;
        for (auto d : shape) n *= d;
        v.assign(n, 0.0);
        g.assign(n, 0.0);
    }

    std::size_t numel() const { return v.size(); }
    std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
    std::size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }

    double& at(std::size_t i, std::size_t j) { return v[i * cols() + j]; }
    double at(std::size_t i, std::size_t j) const { return v[i * cols() + j]; }
    double& gat(std::size_t i, std::size_t j) { return g[i * cols() + j]; }

    void zero_grad() { std::fill(g.begin(), g.end(), 0.0); }
};

inline void glorot_init(Tensor& t, Rng& rng, std::size_t fan_in, std::size_t fan_out) {
    double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (auto& x : t.v) x = rng.next_uniform(-limit, limit);
}

// Named parameter collection. std::map keeps iteration order deterministic,
// which makes optimizer updates and checkpoints reproducible.
class ParamStore {
public:
    Tensor& add(const std::string& name, std::vector<std::size_t> shape) {
        auto [it, fresh] = params_.try_emplace(name, Tensor(std::move(shape)));
        if (!fresh) throw DomainError("duplicate parameter name: " + name);
        return it->second;
    }

    Tensor& get(const std::string& name) {
        auto it = params_.find(name);
        if (it == params_.end()) throw DomainError("unknown parameter: " + name);
        return it->second;
    }
    const Tensor& get(const std::string& name) const {
        auto it = params_.find(name);
        if (it == params_.end()) throw DomainError("unknown parameter: " + name);
        return it->second;
    }
    bool has(const std::string& name) const { return params_.count(name) != 0; }

    std::map<std::string, Tensor>& all() { return params_; }
    const std::map<std::string, Tensor>& all() const { return params_; }

    std::size_t total_params() const {
        std::size_t n = 0;
        for (const auto& [k, t] : params_) n += t.numel();
        return n;
    }

    void zero_grad() {
        for (auto& [k, t] : params_) t.zero_grad();
    }

    // Adam with bias correction. lr = 0 leaves every value bit-identical.
    // weight_decay is decoupled (applied to the value, not the gradient), so
    // the moment estimates stay pure gradient statistics.
    void adam_step(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8,
                   double weight_decay = 0.0) {
        ++step_;
        double c1 = 1.0 - std::pow(beta1, static_cast<double>(step_));
        double c2 = 1.0 - std::pow(beta2, static_cast<double>(step_));
        for (auto& [name, t] : params_) {
            auto& st = adam_[name];
            if (st.m.size() != t.numel()) {
                st.m.assign(t.numel(), 0.0);
                st.v.assign(t.numel(), 0.0);
            }
            for (std::size_t i = 0; i < t.numel(); ++i) {
                double gi = t.g[i];
                st.m[i] = beta1 * st.m[i] + (1.0 - beta1) * gi;
                st.v[i] = beta2 * st.v[i] + (1.0 - beta2) * gi * gi;
                double mhat = st.m[i] / c1;
                double vhat = st.v[i] / c2;
                t.v[i] -= lr * (mhat / (std::sqrt(vhat) + eps) + weight_decay * t.v[i]);
            }
        }
    }

    void reset_optimizer() {
        adam_.clear();
        step_ = 0;
    }

    // Checkpoint layout: "HOPCKPT\0", u32 version, u64 tensor count, then per
    // tensor: u64 name length, name bytes, u64 ndim, u64 dims, f64 values.
    std::string serialize() const {
        std::string out;
        auto put = [&out](const void* p, std::size_t n) {
            out.append(static_cast<const char*>(p), n);
        };
        out.append("HOPCKPT", 8);
        std::uint32_t version = 1;
        put(&version, 4);
        std::uint64_t count = params_.size();
        put(&count, 8);
        for (const auto& [name, t] : params_) {
            std::uint64_t len = name.size();
            put(&len, 8);
            out.append(name);
            std::uint64_t nd = t.shape.size();
            put(&nd, 8);
            for (auto d : t.shape) {
                std::uint64_t d64 = d;
                put(&d64, 8);
            }
            put(t.v.data(), t.v.size() * sizeof(double));
        }
        return out;
    }

    void deserialize(const std::string& blob) {
        std::size_t pos = 0;
        auto take = [&](void* p, std::size_t n) {
            if (pos + n > blob.size()) throw ParseError("checkpoint truncated");
            std::memcpy(p, blob.data() + pos, n);
            pos += n;
        };
        char magic[8];
        take(magic, 8);
        if (std::memcmp(magic, "HOPCKPT", 8) != 0) throw ParseError("bad checkpoint magic");
        std::uint32_t version = 0;
        take(&version, 4);
        if (version != 1) throw ParseError("unsupported checkpoint version");
        std::uint64_t count = 0;
        take(&count, 8);
        std::map<std::string, Tensor> loaded;
        for (std::uint64_t i = 0; i < count; ++i) {
            std::uint64_t len = 0;
            take(&len, 8);
            if (pos + len > blob.size()) throw ParseError("checkpoint truncated");
            std::string name(blob.data() + pos, len);
            pos += len;
            std::uint64_t nd = 0;
            take(&nd, 8);
            std::vector<std::size_t> shape(nd);
            for (auto& d : shape) {
                std::uint64_t d64 = 0;
                take(&d64, 8);
                d = static_cast<std::size_t>(d64);
            }
            Tensor t(shape);
            take(t.v.data(), t.v.size() * sizeof(double));
            if (!loaded.emplace(name, std::move(t)).second)
                throw ParseError("duplicate tensor in checkpoint: " + name);
        }
        if (pos != blob.size()) throw ParseError("trailing bytes in checkpoint");
        if (params_.empty()) {
            params_ = std::move(loaded);
        } else {
            // Loading into a built model: shapes must line up exactly. Values
            // are copied in place so Tensor addresses held by modules stay
            // valid.
            if (loaded.size() != params_.size())
                throw ParseError("checkpoint tensor set does not match model");
            for (auto& [name, t] : params_) {
                auto it = loaded.find(name);
                if (it == loaded.end()) throw ParseError("checkpoint missing tensor: " + name);
                if (it->second.shape != t.shape)
                    throw ParseError("checkpoint shape mismatch for: " + name);
                t.v = std::move(it->second.v);
            }
        }
        reset_optimizer();
    }

    void save(const std::string& path) const { atomic_write_file(path, serialize()); }
    void load(const std::string& path) { deserialize(read_file(path)); }

private:
    struct AdamState {
        std::vector<double> m, v;
    };
    std::map<std::string, Tensor> params_;
    std::map<std::string, AdamState> adam_;
    std::uint64_t step_ = 0;
};

}  // namespace hop
