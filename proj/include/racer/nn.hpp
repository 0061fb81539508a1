#ifndef RACER_NN_HPP_
#define RACER_NN_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "racer/rng.hpp"
#include "racer/tensor.hpp"

namespace racer {

struct ConvSpec {
    int filters = 0;
    int kernel = 0;
    int stride = 1;
};

// Fixed feed-forward architecture: a stack of valid (unpadded) strided
// convolutions with ReLU, flattened into ReLU fully-connected hidden layers
// and a linear output layer of `outputs` logits.
struct NetSpec {
    int input_h = 0;
    int input_w = 0;
    int input_c = 1;
    std::vector<ConvSpec> conv;
    std::vector<int> fc_hidden;
    int outputs = 0;

    static NetSpec policy_default(int h, int w, int n_actions) {
        NetSpec s;
        s.input_h = h;
        s.input_w = w;
        s.conv = {{16, 8, 4}, {32, 4, 2}, {32, 3, 1}};
        s.fc_hidden = {256};
        s.outputs = n_actions;
        return s;
    }
};

struct LayerDims {
    // Per conv layer: output {c, h, w}; flat = conv output size feeding fc.
    std::vector<std::array<int, 3>> conv_out;
    int flat = 0;
    std::vector<int> fc_in;   // input size of each fc layer (hidden + output)
    std::vector<int> fc_out;  // output size of each fc layer
};

inline LayerDims chain_dims(const NetSpec& spec) {
    if (spec.input_h <= 0 || spec.input_w <= 0 || spec.input_c <= 0)
        throw std::invalid_argument("net spec: bad input dims");
    if (spec.outputs <= 0) throw std::invalid_argument("net spec: outputs must be positive");
    LayerDims d;
    int c = spec.input_c, h = spec.input_h, w = spec.input_w;
    for (const auto& cv : spec.conv) {
        if (cv.filters <= 0 || cv.kernel <= 0 || cv.stride <= 0)
            throw std::invalid_argument("net spec: bad conv layer");
        if (cv.kernel > h || cv.kernel > w)
            throw std::invalid_argument("net spec: kernel larger than input");
        h = (h - cv.kernel) / cv.stride + 1;
        w = (w - cv.kernel) / cv.stride + 1;
        c = cv.filters;
        d.conv_out.push_back({c, h, w});
    }
    d.flat = c * h * w;
    int in = d.flat;
    for (int hid : spec.fc_hidden) {
        if (hid <= 0) throw std::invalid_argument("net spec: bad fc width");
        d.fc_in.push_back(in);
        d.fc_out.push_back(hid);
        in = hid;
    }
    d.fc_in.push_back(in);
    d.fc_out.push_back(spec.outputs);
    return d;
}

// Parameter order: per conv layer W [f,c,k,k] then b [f]; per fc layer
// (hidden layers first, output last) W [out,in] then b [out].
template <typename S>
struct PolicyNetT {
    NetSpec spec;
    std::vector<TensorT<S>> params;

    int64_t param_count() const {
        int64_t n = 0;
        for (const auto& p : params) n += p.size();
        return n;
    }

    template <typename T>
    PolicyNetT<T> cast() const {
        PolicyNetT<T> out;
        out.spec = spec;
        out.params.reserve(params.size());
        for (const auto& p : params) out.params.push_back(p.template cast<T>());
        return out;
    }
};

using PolicyNet = PolicyNetT<float>;

template <typename S>
using GradsT = std::vector<TensorT<S>>;
using Grads = GradsT<float>;

template <typename S>
GradsT<S> zero_grads_like(const std::vector<TensorT<S>>& params) {
    GradsT<S> g;
    g.reserve(params.size());
    for (const auto& p : params) g.emplace_back(p.shape);
    return g;
}

template <typename S>
void accumulate_grads(GradsT<S>& into, const GradsT<S>& from) {
    for (std::size_t i = 0; i < into.size(); ++i) {
        S* a = into[i].ptr();
        const S* b = from[i].ptr();
        const int64_t n = into[i].size();
        for (int64_t j = 0; j < n; ++j) a[j] += b[j];
    }
}

template <typename S>
PolicyNetT<S> glorot_init(const NetSpec& spec, uint64_t seed) {
    const LayerDims dims = chain_dims(spec);
    PolicyNetT<S> net;
    net.spec = spec;
    Rng rng(seed);

    int in_c = spec.input_c;
    for (std::size_t l = 0; l < spec.conv.size(); ++l) {
        const auto& cv = spec.conv[l];
        const int fan_in = in_c * cv.kernel * cv.kernel;
        const int fan_out = cv.filters * cv.kernel * cv.kernel;
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        TensorT<S> w({cv.filters, in_c, cv.kernel, cv.kernel});
        for (auto& v : w.data) v = static_cast<S>(rng.uniform(-limit, limit));
        net.params.push_back(std::move(w));
        net.params.emplace_back(std::vector<int>{cv.filters});  // bias, zero
        in_c = cv.filters;
    }
    for (std::size_t l = 0; l < dims.fc_in.size(); ++l) {
        const int fi = dims.fc_in[l], fo = dims.fc_out[l];
        const double limit = std::sqrt(6.0 / (fi + fo));
        TensorT<S> w({fo, fi});
        for (auto& v : w.data) v = static_cast<S>(rng.uniform(-limit, limit));
        net.params.push_back(std::move(w));
        net.params.emplace_back(std::vector<int>{fo});  // bias, zero
    }
    return net;
}

inline PolicyNet glorot_init(const NetSpec& spec, uint64_t seed) {
    return glorot_init<float>(spec, seed);
}

// Activations kept for the backward pass: input, each post-ReLU conv output,
// each post-ReLU fc hidden, and the raw logits.
template <typename S>
struct ForwardCacheT {
    std::vector<TensorT<S>> acts;
    const TensorT<S>& logits() const { return acts.back(); }
    // Activation feeding the output layer (shared trunk feature for extra heads).
    const TensorT<S>& last_hidden() const { return acts[acts.size() - 2]; }
};

using ForwardCache = ForwardCacheT<float>;

namespace detail {

template <typename S>
void conv_forward(const TensorT<S>& x, const TensorT<S>& w, const TensorT<S>& b, int stride,
                  TensorT<S>& y, bool relu) {
    const int C = x.shape[0], H = x.shape[1], W = x.shape[2];
    const int F = w.shape[0], K = w.shape[2];
    const int OH = (H - K) / stride + 1, OW = (W - K) / stride + 1;
    const S* xp = x.ptr();
    const S* wp = w.ptr();
    S* yp = y.ptr();
    for (int f = 0; f < F; ++f) {
        const S bias = b.data[f];
        for (int oi = 0; oi < OH; ++oi) {
            for (int oj = 0; oj < OW; ++oj) {
                S acc = bias;
                const int i0 = oi * stride, j0 = oj * stride;
                for (int c = 0; c < C; ++c) {
                    const S* xc = xp + (static_cast<int64_t>(c) * H + i0) * W + j0;
                    const S* wc = wp + ((static_cast<int64_t>(f) * C + c) * K) * K;
                    for (int u = 0; u < K; ++u) {
                        const S* xr = xc + static_cast<int64_t>(u) * W;
                        const S* wr = wc + static_cast<int64_t>(u) * K;
                        for (int v = 0; v < K; ++v) acc += xr[v] * wr[v];
                    }
                }
                if (relu && acc < S(0)) acc = S(0);
                yp[(static_cast<int64_t>(f) * OH + oi) * OW + oj] = acc;
            }
        }
    }
}

// dY is the gradient wrt the POST-activation output; the caller has already
// applied the ReLU mask. dX may be null for the bottom layer.
template <typename S>
void conv_backward(const TensorT<S>& x, const TensorT<S>& w, int stride, const TensorT<S>& dy,
                   TensorT<S>& dw, TensorT<S>& db, TensorT<S>* dx) {
    const int C = x.shape[0], H = x.shape[1], W = x.shape[2];
    const int F = w.shape[0], K = w.shape[2];
    const int OH = dy.shape[1], OW = dy.shape[2];
    const S* xp = x.ptr();
    const S* wp = w.ptr();
    const S* dyp = dy.ptr();
    S* dwp = dw.ptr();
    S* dxp = dx ? dx->ptr() : nullptr;
    for (int f = 0; f < F; ++f) {
        S bacc = S(0);
        for (int oi = 0; oi < OH; ++oi) {
            for (int oj = 0; oj < OW; ++oj) {
                const S g = dyp[(static_cast<int64_t>(f) * OH + oi) * OW + oj];
                if (g == S(0)) continue;  // ReLU-masked
                bacc += g;
                const int i0 = oi * stride, j0 = oj * stride;
                for (int c = 0; c < C; ++c) {
                    const S* xc = xp + (static_cast<int64_t>(c) * H + i0) * W + j0;
                    S* dwc = dwp + ((static_cast<int64_t>(f) * C + c) * K) * K;
                    if (dxp) {
                        S* dxc = dxp + (static_cast<int64_t>(c) * H + i0) * W + j0;
                        const S* wc = wp + ((static_cast<int64_t>(f) * C + c) * K) * K;
                        for (int u = 0; u < K; ++u) {
                            const S* xr = xc + static_cast<int64_t>(u) * W;
                            S* dwr = dwc + static_cast<int64_t>(u) * K;
                            S* dxr = dxc + static_cast<int64_t>(u) * W;
                            const S* wr = wc + static_cast<int64_t>(u) * K;
                            for (int v = 0; v < K; ++v) {
                                dwr[v] += g * xr[v];
                                dxr[v] += g * wr[v];
                            }
                        }
                    } else {
                        for (int u = 0; u < K; ++u) {
                            const S* xr = xc + static_cast<int64_t>(u) * W;
                            S* dwr = dwc + static_cast<int64_t>(u) * K;
                            for (int v = 0; v < K; ++v) dwr[v] += g * xr[v];
                        }
                    }
                }
            }
        }
        db.data[f] += bacc;
    }
}

template <typename S>
void fc_forward(const TensorT<S>& x, const TensorT<S>& w, const TensorT<S>& b, TensorT<S>& y,
                bool relu) {
    const int out = w.shape[0], in = w.shape[1];
    const S* xp = x.ptr();
    const S* wp = w.ptr();
    for (int o = 0; o < out; ++o) {
        const S* wr = wp + static_cast<int64_t>(o) * in;
        S acc = b.data[o];
        for (int i = 0; i < in; ++i) acc += wr[i] * xp[i];
        if (relu && acc < S(0)) acc = S(0);
        y.data[o] = acc;
    }
}

template <typename S>
void fc_backward(const TensorT<S>& x, const TensorT<S>& w, const TensorT<S>& dy, TensorT<S>& dw,
                 TensorT<S>& db, TensorT<S>* dx) {
    const int out = w.shape[0], in = w.shape[1];
    const S* xp = x.ptr();
    const S* wp = w.ptr();
    S* dwp = dw.ptr();
    if (dx) dx->fill(S(0));
    S* dxp = dx ? dx->ptr() : nullptr;
    for (int o = 0; o < out; ++o) {
        const S g = dy.data[o];
        db.data[o] += g;
        if (g == S(0)) continue;
        S* dwr = dwp + static_cast<int64_t>(o) * in;
        const S* wr = wp + static_cast<int64_t>(o) * in;
        if (dxp) {
            for (int i = 0; i < in; ++i) {
                dwr[i] += g * xp[i];
                dxp[i] += g * wr[i];
            }
        } else {
            for (int i = 0; i < in; ++i) dwr[i] += g * xp[i];
        }
    }
}

}  // namespace detail

template <typename S>
void check_input_shape(const PolicyNetT<S>& net, const TensorT<S>& obs) {
    const auto& sh = obs.shape;
    const bool ok2 = sh.size() == 2 && net.spec.input_c == 1 && sh[0] == net.spec.input_h &&
                     sh[1] == net.spec.input_w;
    const bool ok3 = sh.size() == 3 && sh[0] == net.spec.input_c && sh[1] == net.spec.input_h &&
                     sh[2] == net.spec.input_w;
    if (!ok2 && !ok3) throw std::invalid_argument("forward: observation shape mismatch");
}

template <typename S>
ForwardCacheT<S> forward_cached(const PolicyNetT<S>& net, const TensorT<S>& obs) {
    check_input_shape(net, obs);
    const LayerDims dims = chain_dims(net.spec);
    ForwardCacheT<S> cache;
    cache.acts.reserve(net.spec.conv.size() + dims.fc_in.size() + 1);

    TensorT<S> x = obs;
    if (x.shape.size() == 2) x.shape = {1, net.spec.input_h, net.spec.input_w};
    cache.acts.push_back(std::move(x));

    std::size_t p = 0;
    for (std::size_t l = 0; l < net.spec.conv.size(); ++l) {
        const auto& od = dims.conv_out[l];
        TensorT<S> y({od[0], od[1], od[2]});
        detail::conv_forward(cache.acts.back(), net.params[p], net.params[p + 1],
                             net.spec.conv[l].stride, y, /*relu=*/true);
        cache.acts.push_back(std::move(y));
        p += 2;
    }
    // Flatten view: fc layers read the data linearly.
    for (std::size_t l = 0; l < dims.fc_in.size(); ++l) {
        const bool last = (l + 1 == dims.fc_in.size());
        TensorT<S> y({dims.fc_out[l]});
        detail::fc_forward(cache.acts.back(), net.params[p], net.params[p + 1], y, !last);
        cache.acts.push_back(std::move(y));
        p += 2;
    }
    return cache;
}

template <typename S>
TensorT<S> forward(const PolicyNetT<S>& net, const TensorT<S>& obs) {
    return forward_cached(net, obs).logits();
}

// Backpropagates dlogits (plus an optional extra gradient on the activation
// feeding the output layer, used by the PPO value head) into parameter
// gradients, accumulated into `grads`.
template <typename S>
void backward_into(const PolicyNetT<S>& net, const ForwardCacheT<S>& cache,
                   const TensorT<S>& dlogits, GradsT<S>& grads,
                   const TensorT<S>* dhidden_extra = nullptr) {
    if (dlogits.size() != net.spec.outputs)
        throw std::invalid_argument("backward: upstream gradient length mismatch");
    const std::size_t n_conv = net.spec.conv.size();
    const std::size_t n_fc = net.spec.fc_hidden.size() + 1;

    TensorT<S> d = dlogits;
    // FC chain, top down.
    for (std::size_t l = n_fc; l-- > 0;) {
        const std::size_t p = 2 * (n_conv + l);
        const TensorT<S>& x = cache.acts[n_conv + l];  // input activation of this fc layer
        const bool bottom = (l == 0 && n_conv == 0);
        TensorT<S> dx_flat;
        TensorT<S>* dxp = nullptr;
        if (!bottom) {
            dx_flat = TensorT<S>(std::vector<int>{static_cast<int>(x.size())});
            dxp = &dx_flat;
        }
        detail::fc_backward(x, net.params[p], d, grads[p], grads[p + 1], dxp);
        if (bottom) return;
        if (l == n_fc - 1 && dhidden_extra != nullptr) {
            if (dhidden_extra->size() != dx_flat.size())
                throw std::invalid_argument("backward: extra hidden gradient mismatch");
            for (int64_t i = 0; i < dx_flat.size(); ++i)
                dx_flat.data[i] += dhidden_extra->data[i];
        }
        if (l > 0 || n_conv > 0) {
            // Input of this layer was ReLU output (fc hidden or conv stack).
            for (int64_t i = 0; i < dx_flat.size(); ++i)
                if (x.data[i] <= S(0)) dx_flat.data[i] = S(0);
        }
        d = std::move(dx_flat);
    }
    // Conv chain, top down. d currently holds the flat gradient of the last
    // conv output (already ReLU-masked above).
    for (std::size_t l = n_conv; l-- > 0;) {
        const std::size_t p = 2 * l;
        const TensorT<S>& x = cache.acts[l];
        const TensorT<S>& y = cache.acts[l + 1];
        d.shape = y.shape;
        TensorT<S> dx;
        TensorT<S>* dxp = nullptr;
        if (l > 0) {
            dx = TensorT<S>(x.shape);
            dxp = &dx;
        }
        detail::conv_backward(x, net.params[p], net.spec.conv[l].stride, d, grads[p],
                              grads[p + 1], dxp);
        if (l == 0) return;
        // Mask by the ReLU of the layer below.
        for (int64_t i = 0; i < dx.size(); ++i)
            if (x.data[i] <= S(0)) dx.data[i] = S(0);
        d = std::move(dx);
    }
}

template <typename S>
GradsT<S> backward(const PolicyNetT<S>& net, const TensorT<S>& obs, const TensorT<S>& dlogits) {
    ForwardCacheT<S> cache = forward_cached(net, obs);
    GradsT<S> grads = zero_grads_like(net.params);
    backward_into(net, cache, dlogits, grads);
    return grads;
}

// Numerically stable softmax (max subtraction, f64 accumulation).
template <typename S>
std::vector<S> softmax(const std::vector<S>& logits) {
    if (logits.empty()) throw std::invalid_argument("softmax: empty input");
    S mx = logits[0];
    for (S v : logits) {
        if (!std::isfinite(static_cast<double>(v)))
            throw std::domain_error("softmax: non-finite logit");
        mx = std::max(mx, v);
    }
    std::vector<S> out(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        const double e = std::exp(static_cast<double>(logits[i] - mx));
        out[i] = static_cast<S>(e);
        sum += e;
    }
    for (auto& v : out) v = static_cast<S>(static_cast<double>(v) / sum);
    return out;
}

template <typename S>
int argmax_index(const std::vector<S>& v) {
    return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

template <typename S>
int sample_index(const std::vector<S>& probs, Rng& rng) {
    const double u = rng.uniform01();
    double cum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        cum += static_cast<double>(probs[i]);
        if (u < cum) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
}

// Global L2-norm clipping across the whole gradient set. Returns the
// pre-clip norm; direction is preserved.
template <typename S>
double clip_grad_norm(GradsT<S>& grads, double max_norm) {
    if (max_norm <= 0) throw std::invalid_argument("clip_grad_norm: max_norm must be positive");
    double sq = 0.0;
    for (const auto& g : grads)
        for (S v : g.data) sq += static_cast<double>(v) * static_cast<double>(v);
    const double norm = std::sqrt(sq);
    if (norm > max_norm) {
        const S scale = static_cast<S>(max_norm / norm);
        for (auto& g : grads)
            for (S& v : g.data) v *= scale;
    }
    return norm;
}

// Step-count based learning-rate decay: multiply by `factor` once per
// `interval` schedule units, stopping past `cutoff` (cutoff < 0 = none).
struct LrSchedule {
    double start = 1e-3;
    double factor = 0.5;
    double interval = 0;  // <= 0: constant lr
    double cutoff = -1;

    double at(double pos) const {
        if (interval <= 0) return start;
        double decays = std::floor(pos / interval);
        if (cutoff >= 0) decays = std::min(decays, std::floor(cutoff / interval));
        if (decays <= 0) return start;
        return start * std::pow(factor, decays);
    }
};

enum class OptimizerKind { adam, momentum };

template <typename S>
struct OptimizerStateT {
    OptimizerKind kind = OptimizerKind::adam;
    LrSchedule schedule;
    double schedule_pos = 0;  // env steps (teacher) or iteration index (student)
    int64_t step = 0;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    double mu = 0.9;
    std::vector<TensorT<S>> m;  // first moment / velocity
    std::vector<TensorT<S>> v;  // second moment (adam only)

    template <typename ParamRange>
    static OptimizerStateT make(OptimizerKind kind, LrSchedule sched, const ParamRange& params) {
        OptimizerStateT st;
        st.kind = kind;
        st.schedule = sched;
        for (const auto* p : params) {
            st.m.emplace_back(p->shape);
            if (kind == OptimizerKind::adam) st.v.emplace_back(p->shape);
        }
        return st;
    }

    double current_lr() const { return schedule.at(schedule_pos); }
};

using OptimizerState = OptimizerStateT<float>;

template <typename S>
void optimizer_step(OptimizerStateT<S>& st, const std::vector<TensorT<S>*>& params,
                    const GradsT<S>& grads) {
    if (params.size() != grads.size() || params.size() != st.m.size())
        throw std::invalid_argument("optimizer_step: parameter/gradient count mismatch");
    const double lr = st.current_lr();
    st.step += 1;
    if (st.kind == OptimizerKind::adam) {
        const double bc1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step));
        const double bc2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step));
        for (std::size_t i = 0; i < params.size(); ++i) {
            S* p = params[i]->ptr();
            const S* g = grads[i].ptr();
            S* m = st.m[i].ptr();
            S* v = st.v[i].ptr();
            const int64_t n = params[i]->size();
            for (int64_t j = 0; j < n; ++j) {
                const double gj = g[j];
                const double mj = st.beta1 * m[j] + (1.0 - st.beta1) * gj;
                const double vj = st.beta2 * v[j] + (1.0 - st.beta2) * gj * gj;
                m[j] = static_cast<S>(mj);
                v[j] = static_cast<S>(vj);
                p[j] -= static_cast<S>(lr * (mj / bc1) / (std::sqrt(vj / bc2) + st.eps));
            }
        }
    } else {
        for (std::size_t i = 0; i < params.size(); ++i) {
            S* p = params[i]->ptr();
            const S* g = grads[i].ptr();
            S* m = st.m[i].ptr();
            const int64_t n = params[i]->size();
            for (int64_t j = 0; j < n; ++j) {
                const double vel = st.mu * m[j] + static_cast<double>(g[j]);
                m[j] = static_cast<S>(vel);
                p[j] -= static_cast<S>(lr * vel);
            }
        }
    }
}

template <typename S>
void optimizer_step(OptimizerStateT<S>& st, PolicyNetT<S>& net, const GradsT<S>& grads) {
    std::vector<TensorT<S>*> ps;
    ps.reserve(net.params.size());
    for (auto& p : net.params) ps.push_back(&p);
    optimizer_step(st, ps, grads);
}

}  // namespace racer

#endif  // RACER_NN_HPP_
