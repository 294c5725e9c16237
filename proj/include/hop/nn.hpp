#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "hop/tensor.hpp"

namespace hop {

using Vec = std::vector<double>;

inline Vec concat(const Vec& a, const Vec& b) {
    Vec out;
    out.reserve(a.size() + b.size());
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

// Flat row-major matrix products used by attention pooling.
// A is ra x ca, B is ca x cb.
inline std::vector<double> mat_mul(const std::vector<double>& A, std::size_t ra, std::size_t ca,
                                   const std::vector<double>& B, std::size_t cb) {
    std::vector<double> out(ra * cb, 0.0);
    for (std::size_t i = 0; i < ra; ++i)
        for (std::size_t k = 0; k < ca; ++k) {
            double a = A[i * ca + k];
            if (a == 0.0) continue;
            const double* brow = B.data() + k * cb;
            double* orow = out.data() + i * cb;
            for (std::size_t j = 0; j < cb; ++j) orow[j] += a * brow[j];
        }
    return out;
}

// A^T B where A is ra x ca and B is ra x cb; result ca x cb.
inline std::vector<double> mat_mul_at_b(const std::vector<double>& A, std::size_t ra,
                                        std::size_t ca, const std::vector<double>& B,
                                        std::size_t cb) {
    std::vector<double> out(ca * cb, 0.0);
    for (std::size_t i = 0; i < ra; ++i)
        for (std::size_t k = 0; k < ca; ++k) {
            double a = A[i * ca + k];
            if (a == 0.0) continue;
            const double* brow = B.data() + i * cb;
            double* orow = out.data() + k * cb;
            for (std::size_t j = 0; j < cb; ++j) orow[j] += a * brow[j];
        }
    return out;
}

// A B^T where A is ra x ca and B is rb x ca; result ra x rb.
inline std::vector<double> mat_mul_a_bt(const std::vector<double>& A, std::size_t ra,
                                        std::size_t ca, const std::vector<double>& B,
                                        std::size_t rb) {
    std::vector<double> out(ra * rb, 0.0);
    for (std::size_t i = 0; i < ra; ++i)
        for (std::size_t j = 0; j < rb; ++j) {
            double s = 0.0;
            const double* arow = A.data() + i * ca;
            const double* brow = B.data() + j * ca;
            for (std::size_t k = 0; k < ca; ++k) s += arow[k] * brow[k];
            out[i * rb + j] = s;
        }
    return out;
}

inline Vec softmax_vec(const Vec& logits) {
    double hi = logits[0];
    for (double x : logits) hi = std::max(hi, x);
    Vec out(logits.size());
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - hi);
        total += out[i];
    }
    for (auto& x : out) x /= total;
    return out;
}

inline double cross_entropy(const Vec& probs, int label) {
    return -std::log(std::max(probs[static_cast<std::size_t>(label)], 1e-300));
}

// d loss / d logits for softmax followed by cross-entropy.
inline Vec softmax_ce_backward(const Vec& probs, int label) {
    Vec d = probs;
    d[static_cast<std::size_t>(label)] -= 1.0;
    return d;
}

inline Vec tanh_forward(const Vec& a) {
    Vec y(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) y[i] = std::tanh(a[i]);
    return y;
}

// Takes the activated output y, not the pre-activation.
inline Vec tanh_backward(const Vec& y, const Vec& dy) {
    Vec da(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) da[i] = dy[i] * (1.0 - y[i] * y[i]);
    return da;
}

inline Vec sigmoid_forward(const Vec& a) {
    Vec y(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        y[i] = a[i] >= 0.0 ? 1.0 / (1.0 + std::exp(-a[i]))
                           : std::exp(a[i]) / (1.0 + std::exp(a[i]));
    return y;
}

inline Vec sigmoid_backward(const Vec& y, const Vec& dy) {
    Vec da(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) da[i] = dy[i] * y[i] * (1.0 - y[i]);
    return da;
}

// y = W x + b with W stored [out, in]. Holds pointers into a ParamStore; the
// store's map nodes are address-stable, so attachment survives checkpoints.
struct Linear {
    Tensor* W = nullptr;
    Tensor* b = nullptr;

    void init(ParamStore& ps, const std::string& prefix, std::size_t in, std::size_t out,
              Rng& rng) {
        W = &ps.add(prefix + ".W", {out, in});
        b = &ps.add(prefix + ".b", {out});
        glorot_init(*W, rng, in, out);
    }

    std::size_t in_dim() const { return W->cols(); }
    std::size_t out_dim() const { return W->rows(); }

    Vec forward(const Vec& x) const {
        std::size_t out = out_dim(), in = in_dim();
        Vec y(out);
        for (std::size_t i = 0; i < out; ++i) {
            double s = b->v[i];
            const double* row = W->v.data() + i * in;
            for (std::size_t j = 0; j < in; ++j) s += row[j] * x[j];
            y[i] = s;
        }
        return y;
    }

    // Accumulates parameter gradients; returns d loss / d x.
    Vec backward(const Vec& x, const Vec& dy) {
        std::size_t out = out_dim(), in = in_dim();
        Vec dx(in, 0.0);
        for (std::size_t i = 0; i < out; ++i) {
            double d = dy[i];
            b->g[i] += d;
            const double* row = W->v.data() + i * in;
            double* grow = W->g.data() + i * in;
            for (std::size_t j = 0; j < in; ++j) {
                grow[j] += d * x[j];
                dx[j] += d * row[j];
            }
        }
        return dx;
    }
};

// Affine layers with tanh between them; the final tanh is optional so heads
// can emit unbounded logits.
struct Mlp {
    std::vector<Linear> layers;
    bool final_tanh = true;

    struct Cache {
        std::vector<Vec> inputs;   // input to each layer
        std::vector<Vec> outputs;  // post-activation output of each layer
    };

    void init(ParamStore& ps, const std::string& prefix, const std::vector<std::size_t>& dims,
              Rng& rng, bool final_nonlinear) {
        final_tanh = final_nonlinear;
        layers.resize(dims.size() - 1);
        for (std::size_t i = 0; i + 1 < dims.size(); ++i)
            layers[i].init(ps, prefix + ".L" + std::to_string(i), dims[i], dims[i + 1], rng);
    }

    Vec forward(const Vec& x, Cache* cache = nullptr) const {
        Vec cur = x;
        if (cache) {
            cache->inputs.clear();
            cache->outputs.clear();
        }
        for (std::size_t i = 0; i < layers.size(); ++i) {
            if (cache) cache->inputs.push_back(cur);
            Vec a = layers[i].forward(cur);
            bool act = (i + 1 < layers.size()) || final_tanh;
            cur = act ? tanh_forward(a) : std::move(a);
            if (cache) cache->outputs.push_back(cur);
        }
        return cur;
    }

    Vec backward(const Cache& cache, Vec dy) {
        for (std::size_t k = layers.size(); k-- > 0;) {
            bool act = (k + 1 < layers.size()) || final_tanh;
            if (act) dy = tanh_backward(cache.outputs[k], dy);
            dy = layers[k].backward(cache.inputs[k], dy);
        }
        return dy;
    }
};

// Gated recurrent cell:
//   z = sigmoid(Wz x + Uz h + bz), r = sigmoid(Wr x + Ur h + br)
//   n = tanh(Wn x + Un (r o h) + bn), h' = (1 - z) o n + z o h
struct GruCell {
    Linear Wz, Wr, Wn;  // input -> hidden (carry the biases)
    Linear Uz, Ur, Un;  // hidden -> hidden

    struct Cache {
        Vec x, h_prev, z, r, n, rh;
    };

    void init(ParamStore& ps, const std::string& prefix, std::size_t in, std::size_t hidden,
              Rng& rng) {
        Wz.init(ps, prefix + ".Wz", in, hidden, rng);
        Wr.init(ps, prefix + ".Wr", in, hidden, rng);
        Wn.init(ps, prefix + ".Wn", in, hidden, rng);
        Uz.init(ps, prefix + ".Uz", hidden, hidden, rng);
        Ur.init(ps, prefix + ".Ur", hidden, hidden, rng);
        Un.init(ps, prefix + ".Un", hidden, hidden, rng);
    }

    std::size_t hidden_dim() const { return Wz.out_dim(); }

    Vec forward(const Vec& x, const Vec& h_prev, Cache* c = nullptr) const {
        std::size_t h = hidden_dim();
        Vec az = Wz.forward(x), ar = Wr.forward(x);
        {
            Vec uz = Uz.forward(h_prev), ur = Ur.forward(h_prev);
            for (std::size_t i = 0; i < h; ++i) {
                az[i] += uz[i];
                ar[i] += ur[i];
            }
        }
        Vec z = sigmoid_forward(az), r = sigmoid_forward(ar);
        Vec rh(h);
        for (std::size_t i = 0; i < h; ++i) rh[i] = r[i] * h_prev[i];
        Vec an = Wn.forward(x);
        {
            Vec un = Un.forward(rh);
            for (std::size_t i = 0; i < h; ++i) an[i] += un[i];
        }
        Vec n = tanh_forward(an);
        Vec h_new(h);
        for (std::size_t i = 0; i < h; ++i) h_new[i] = (1.0 - z[i]) * n[i] + z[i] * h_prev[i];
        if (c) *c = Cache{x, h_prev, z, r, n, rh};
        return h_new;
    }

    // Returns (dx, dh_prev).
    std::pair<Vec, Vec> backward(const Cache& c, const Vec& dh) {
        std::size_t h = hidden_dim();
        Vec dz(h), dn(h), dh_prev(h);
        for (std::size_t i = 0; i < h; ++i) {
            dz[i] = dh[i] * (c.h_prev[i] - c.n[i]);
            dn[i] = dh[i] * (1.0 - c.z[i]);
            dh_prev[i] = dh[i] * c.z[i];
        }
        Vec dan = tanh_backward(c.n, dn);
        Vec dx = Wn.backward(c.x, dan);
        Vec drh = Un.backward(c.rh, dan);
        Vec dr(h);
        for (std::size_t i = 0; i < h; ++i) {
            dr[i] = drh[i] * c.h_prev[i];
            dh_prev[i] += drh[i] * c.r[i];
        }
        Vec daz = sigmoid_backward(c.z, dz);
        Vec dar = sigmoid_backward(c.r, dr);
        {
            Vec t = Wz.backward(c.x, daz);
            for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += t[i];
            t = Wr.backward(c.x, dar);
            for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += t[i];
        }
        {
            Vec t = Uz.backward(c.h_prev, daz);
            for (std::size_t i = 0; i < h; ++i) dh_prev[i] += t[i];
            t = Ur.backward(c.h_prev, dar);
            for (std::size_t i = 0; i < h; ++i) dh_prev[i] += t[i];
        }
        return {std::move(dx), std::move(dh_prev)};
    }
};

}  // namespace hop
