#include "hybran/train.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

#include "hybran/detail/fast_math.hpp"
#include "hybran/errors.hpp"
#include "hybran/rng.hpp"
#include "hybran/threads.hpp"

namespace hybran {

std::string to_string(Optimizer opt) {
    switch (opt) {
        case Optimizer::Adam: return "adam";
        case Optimizer::Sgd: return "sgd";
        case Optimizer::Lm: return "lm";
    }
    throw std::invalid_argument("to_string: unknown optimizer");
}

Optimizer optimizer_from_string(const std::string& name) {
    if (name == "adam") return Optimizer::Adam;
    if (name == "sgd") return Optimizer::Sgd;
    if (name == "lm") return Optimizer::Lm;
    throw std::invalid_argument("unknown optimizer: " + name);
}

std::string to_string(InitScheme scheme) {
    switch (scheme) {
        case InitScheme::Xavier: return "xavier";
        case InitScheme::NguyenWidrow: return "nguyen-widrow";
        case InitScheme::SteepMix: return "steep-mix";
    }
    throw std::invalid_argument("to_string: unknown init scheme");
}

InitScheme init_scheme_from_string(const std::string& name) {
    if (name == "xavier") return InitScheme::Xavier;
    if (name == "nguyen-widrow") return InitScheme::NguyenWidrow;
    if (name == "steep-mix") return InitScheme::SteepMix;
    throw std::invalid_argument("unknown init scheme: " + name);
}

Arch one_hidden(std::size_t in, std::size_t hidden, std::size_t out, Activation act) {
    return Arch{{in, hidden, out}, {act, Activation::Identity}};
}

NeuralNet init_net(const Arch& arch, std::uint64_t seed) {
    if (arch.sizes.size() < 2) throw std::invalid_argument("init_net: need at least one layer");
    if (arch.activations.size() != arch.sizes.size() - 1)
        throw std::invalid_argument("init_net: one activation per layer required");

    Rng rng(seed);
    NeuralNet net;
    net.layers.resize(arch.sizes.size() - 1);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        Layer& layer = net.layers[l];
        layer.in = arch.sizes[l];
        layer.out = arch.sizes[l + 1];
        layer.act = arch.activations[l];
        const double scale = std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
        layer.w.resize(layer.in * layer.out);
        for (double& w : layer.w) w = rng.uniform(-scale, scale);
        layer.b.assign(layer.out, 0.0);
    }
    net.validate();
    return net;
}

namespace {

using detail::fast_tanh;

// First-layer Nguyen-Widrow initialization: random unit directions scaled so
// the active (non-saturated) regions of the hidden units tile the input box,
// with transition centers spread uniformly over it. Deeper layers keep the
// Xavier draw.
NeuralNet nguyen_widrow_init(const Arch& arch, std::uint64_t seed,
                             std::span<const double> in_lo, std::span<const double> in_hi) {
    NeuralNet net = init_net(arch, seed);
    Layer& l0 = net.layers.front();
    Rng rng(seed ^ 0x5bf03635312d212fULL);
    const double beta =
        0.7 * std::pow(static_cast<double>(l0.out), 1.0 / static_cast<double>(l0.in));
    for (std::size_t h = 0; h < l0.out; ++h) {
        std::vector<double> dir(l0.in);
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (double& v : dir) {
                v = rng.uniform(-1.0, 1.0);
                norm2 += v * v;
            }
        } while (norm2 < 1e-12);
        const double inv_norm = 1.0 / std::sqrt(norm2);
        double dot_center = 0.0;
        for (std::size_t j = 0; j < l0.in; ++j) {
            const double range = std::max(in_hi[j] - in_lo[j], 1e-9);
            const double w = beta * dir[j] * inv_norm * 2.0 / range;
            l0.w[h * l0.in + j] = w;
            dot_center += w * rng.uniform(in_lo[j], in_hi[j]);
        }
        l0.b[h] = -dot_center;
    }
    return net;
}

// Half Xavier, half steep axis-aligned ramp candidates: unit h gets a single
// nonzero first-layer weight with a log-spread slope, a transition center
// inside the data range, and zero outgoing weight so it starts inert. Damped
// Gauss-Newton recruits and slides whichever candidates the target needs.
NeuralNet steep_mix_init(const Arch& arch, std::uint64_t seed, std::span<const double> in_lo,
                         std::span<const double> in_hi) {
    NeuralNet net = init_net(arch, seed);
    if (net.layers.size() < 2) return net;
    Layer& l0 = net.layers.front();
    Layer& l1 = net.layers[1];
    Rng rng(seed ^ 0xd1b54a32d192ed03ULL);
    for (std::size_t h = l0.out / 2; h < l0.out; ++h) {
        const std::size_t d = h % l0.in;
        const double range = std::max(in_hi[d] - in_lo[d], 1e-9);
        const double slope_mult = std::pow(10.0, rng.uniform(1.2, 2.2));  // ~16x .. 160x
        const double w = (rng.next_u64() & 1 ? 1.0 : -1.0) * slope_mult * 2.0 / range;
        for (std::size_t j = 0; j < l0.in; ++j) l0.w[h * l0.in + j] = 0.0;
        l0.w[h * l0.in + d] = w;
        l0.b[h] = -w * rng.uniform(in_lo[d], in_hi[d]);
        for (std::size_t o = 0; o < l1.out; ++o) l1.w[o * l1.in + h] = 0.0;
    }
    return net;
}

// MSE of the net on packed data through the public forward pass.
double public_mse_raw(const NeuralNet& net, const double* xs, const double* ys, std::size_t n,
                      std::size_t in_dim, std::size_t out_dim) {
    double sq = 0.0;
    std::vector<double> scratch, out;
    for (std::size_t i = 0; i < n; ++i) {
        forward_into(net, {xs + i * in_dim, in_dim}, scratch, out);
        for (std::size_t o = 0; o < out_dim; ++o) {
            const double diff = out[o] - ys[i * out_dim + o];
            sq += diff * diff;
        }
    }
    return n > 0 ? sq / static_cast<double>(n) : 0.0;
}

double public_mse(const NeuralNet& net, const std::vector<double>& xs,
                  const std::vector<double>& ys, std::size_t n, std::size_t in_dim,
                  std::size_t out_dim) {
    double sq = 0.0;
    std::vector<double> scratch, out;
    for (std::size_t i = 0; i < n; ++i) {
        forward_into(net, {xs.data() + i * in_dim, in_dim}, scratch, out);
        for (std::size_t o = 0; o < out_dim; ++o) {
            const double diff = out[o] - ys[i * out_dim + o];
            sq += diff * diff;
        }
    }
    return sq / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Batched kernels. Matrices are row-major; a batch activation buffer holds
// n rows of `width` values.

void dense_forward(const double* x, std::size_t n, const Layer& l, double* z) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* xi = x + i * l.in;
        double* zi = z + i * l.out;
        for (std::size_t o = 0; o < l.out; ++o) {
            double acc = l.b[o];
            const double* row = l.w.data() + o * l.in;
            for (std::size_t j = 0; j < l.in; ++j) acc += row[j] * xi[j];
            zi[o] = acc;
        }
    }
}

void apply_activation(Activation act, std::span<double> zs) {
    switch (act) {
        case Activation::Tanh:
            detail::fast_tanh_inplace(zs);
            break;
        case Activation::Relu:
            for (double& z : zs) z = z > 0.0 ? z : 0.0;
            break;
        case Activation::Identity:
            break;
    }
}

// Derivative of the activation expressed through its output value.
void scale_by_act_derivative(Activation act, const double* a, std::span<double> dz) {
    switch (act) {
        case Activation::Tanh:
            for (std::size_t i = 0; i < dz.size(); ++i) dz[i] *= 1.0 - a[i] * a[i];
            break;
        case Activation::Relu:
            for (std::size_t i = 0; i < dz.size(); ++i) dz[i] = a[i] > 0.0 ? dz[i] : 0.0;
            break;
        case Activation::Identity:
            break;
    }
}

struct LayerGrads {
    std::vector<double> w;
    std::vector<double> b;
};

// Forward + backward over a packed batch; returns the batch MSE and fills
// per-layer gradients of it.
class BatchWorkspace {
  public:
    explicit BatchWorkspace(const NeuralNet& net) {
        acts_.resize(net.layers.size());
        deltas_.resize(net.layers.size());
        grads_.resize(net.layers.size());
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            grads_[l].w.resize(net.layers[l].w.size());
            grads_[l].b.resize(net.layers[l].b.size());
        }
    }

    double loss_and_gradients(const NeuralNet& net, const double* x, const double* y,
                              std::size_t n) {
        const std::size_t depth = net.layers.size();
        // Forward, keeping every layer's activation.
        const double* prev = x;
        for (std::size_t l = 0; l < depth; ++l) {
            const Layer& layer = net.layers[l];
            acts_[l].resize(n * layer.out);
            dense_forward(prev, n, layer, acts_[l].data());
            apply_activation(layer.act, acts_[l]);
            prev = acts_[l].data();
        }

        // Output error; loss = mean over samples of the squared error norm.
        const Layer& last = net.layers.back();
        const std::size_t out = last.out;
        deltas_[depth - 1].resize(n * out);
        double sq_sum = 0.0;
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < n * out; ++i) {
            const double diff = acts_[depth - 1][i] - y[i];
            sq_sum += diff * diff;
            deltas_[depth - 1][i] = 2.0 * inv_n * diff;
        }
        scale_by_act_derivative(last.act, acts_[depth - 1].data(), deltas_[depth - 1]);

        // Backward.
        for (std::size_t l = depth; l-- > 0;) {
            const Layer& layer = net.layers[l];
            const double* input = l == 0 ? x : acts_[l - 1].data();
            std::vector<double>& dz = deltas_[l];
            LayerGrads& g = grads_[l];
            std::fill(g.w.begin(), g.w.end(), 0.0);
            std::fill(g.b.begin(), g.b.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const double* dzi = dz.data() + i * layer.out;
                const double* xi = input + i * layer.in;
                for (std::size_t o = 0; o < layer.out; ++o) {
                    const double d = dzi[o];
                    g.b[o] += d;
                    double* grow = g.w.data() + o * layer.in;
                    for (std::size_t j = 0; j < layer.in; ++j) grow[j] += d * xi[j];
                }
            }
            if (l > 0) {
                std::vector<double>& dprev = deltas_[l - 1];
                dprev.assign(n * layer.in, 0.0);
                for (std::size_t i = 0; i < n; ++i) {
                    const double* dzi = dz.data() + i * layer.out;
                    double* dpi = dprev.data() + i * layer.in;
                    for (std::size_t o = 0; o < layer.out; ++o) {
                        const double d = dzi[o];
                        const double* row = net.layers[l].w.data() + o * layer.in;
                        for (std::size_t j = 0; j < layer.in; ++j) dpi[j] += d * row[j];
                    }
                }
                scale_by_act_derivative(net.layers[l - 1].act, acts_[l - 1].data(), dprev);
            }
        }
        return sq_sum * inv_n;
    }

    const std::vector<LayerGrads>& grads() const { return grads_; }

  private:
    std::vector<std::vector<double>> acts_;
    std::vector<std::vector<double>> deltas_;
    std::vector<LayerGrads> grads_;
};

struct AdamState {
    std::vector<LayerGrads> m;
    std::vector<LayerGrads> v;
    long step = 0;

    explicit AdamState(const NeuralNet& net) {
        m.resize(net.layers.size());
        v.resize(net.layers.size());
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            m[l].w.assign(net.layers[l].w.size(), 0.0);
            m[l].b.assign(net.layers[l].b.size(), 0.0);
            v[l].w.assign(net.layers[l].w.size(), 0.0);
            v[l].b.assign(net.layers[l].b.size(), 0.0);
        }
    }
};

void adam_update(std::vector<double>& params, const std::vector<double>& grads,
                 std::vector<double>& m, std::vector<double>& v, const TrainConfig& cfg,
                 double lr, double bc1, double bc2) {
    for (std::size_t i = 0; i < params.size(); ++i) {
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grads[i];
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + cfg.epsilon);
    }
}

void sgd_update(std::vector<double>& params, const std::vector<double>& grads, double lr) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grads[i];
}

// Cosine schedule from learning_rate to final_learning_rate (constant when
// final_learning_rate is unset).
double scheduled_lr(const TrainConfig& cfg, int epoch) {
    if (!(cfg.final_learning_rate > 0.0) || cfg.epochs <= 1) return cfg.learning_rate;
    const double t = static_cast<double>(epoch) / static_cast<double>(cfg.epochs - 1);
    const double w = 0.5 * (1.0 + std::cos(t * 3.14159265358979323846));
    return cfg.final_learning_rate + (cfg.learning_rate - cfg.final_learning_rate) * w;
}

void apply_gradients(NeuralNet& net, const std::vector<LayerGrads>& grads, AdamState* adam,
                     const TrainConfig& cfg, double lr) {
    if (cfg.optimizer == Optimizer::Adam) {
        ++adam->step;
        const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(adam->step));
        const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(adam->step));
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            adam_update(net.layers[l].w, grads[l].w, adam->m[l].w, adam->v[l].w, cfg, lr, bc1, bc2);
            adam_update(net.layers[l].b, grads[l].b, adam->m[l].b, adam->v[l].b, cfg, lr, bc1, bc2);
        }
    } else {
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            sgd_update(net.layers[l].w, grads[l].w, lr);
            sgd_update(net.layers[l].b, grads[l].b, lr);
        }
    }
}

// ---------------------------------------------------------------------------
// Levenberg-Marquardt: damped Gauss-Newton on the stacked residuals
// r[(i,o)] = Phi(x_i)[o] - y_i[o]. The normal matrix J^T J is accumulated in
// row panels so the (params x params) matrix is streamed once per panel.

std::size_t flat_param_count(const NeuralNet& net) {
    std::size_t p = 0;
    for (const Layer& l : net.layers) p += l.w.size() + l.b.size();
    return p;
}

void params_to_flat(const NeuralNet& net, std::vector<double>& flat) {
    flat.clear();
    for (const Layer& l : net.layers) {
        flat.insert(flat.end(), l.w.begin(), l.w.end());
        flat.insert(flat.end(), l.b.begin(), l.b.end());
    }
}

void flat_to_params(const std::vector<double>& flat, NeuralNet& net) {
    std::size_t at = 0;
    for (Layer& l : net.layers) {
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(at), l.w.size(), l.w.begin());
        at += l.w.size();
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(at), l.b.size(), l.b.begin());
        at += l.b.size();
    }
}

class LmWorkspace {
  public:
    LmWorkspace(const NeuralNet& net, std::size_t n) : n_(n), p_(flat_param_count(net)) {
        acts_.resize(net.layers.size());
        deltas_.resize(net.layers.size());
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            acts_[l].resize(n * net.layers[l].out);
            deltas_[l].resize(net.layers[l].out);
        }
        jtj_.assign(p_ * p_, 0.0);
        g_.assign(p_, 0.0);
        panel_.assign(kPanel * p_, 0.0);
        residual_.assign(kPanel, 0.0);
    }

    std::size_t params() const { return p_; }

    double forward_sse(const NeuralNet& net, const double* x, const double* y) {
        const double* prev = x;
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            const Layer& layer = net.layers[l];
            dense_forward(prev, n_, layer, acts_[l].data());
            apply_activation(layer.act, acts_[l]);
            prev = acts_[l].data();
        }
        const std::size_t out = net.layers.back().out;
        double sse = 0.0;
        for (std::size_t i = 0; i < n_ * out; ++i) {
            const double diff = acts_.back()[i] - y[i];
            sse += diff * diff;
        }
        return sse;
    }

    // Builds J^T J (upper triangle) and g = J^T r at the current parameters;
    // requires forward_sse to have been called at those parameters.
    void accumulate_normal_equations(const NeuralNet& net, const double* x, const double* y) {
        std::fill(jtj_.begin(), jtj_.end(), 0.0);
        std::fill(g_.begin(), g_.end(), 0.0);
        const std::size_t out = net.layers.back().out;

        std::size_t rows_in_panel = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t o = 0; o < out; ++o) {
                jacobian_row(net, x, i, o, panel_.data() + rows_in_panel * p_);
                residual_[rows_in_panel] = acts_.back()[i * out + o] - y[i * out + o];
                if (++rows_in_panel == kPanel) {
                    flush_panel(rows_in_panel);
                    rows_in_panel = 0;
                }
            }
        }
        if (rows_in_panel > 0) flush_panel(rows_in_panel);
    }

    const std::vector<double>& jtj() const { return jtj_; }
    const std::vector<double>& gradient() const { return g_; }

  private:
    static constexpr std::size_t kPanel = 128;

    // d Phi_o(x_i) / d theta into `row` (flattened (w, b) per layer).
    void jacobian_row(const NeuralNet& net, const double* x, std::size_t i, std::size_t o,
                      double* row) {
        const std::size_t depth = net.layers.size();
        // Seed at the output, walking activation derivatives backwards.
        {
            const Layer& last = net.layers[depth - 1];
            auto& d = deltas_[depth - 1];
            std::fill(d.begin(), d.end(), 0.0);
            d[o] = 1.0;
            scale_by_act_derivative(last.act, acts_[depth - 1].data() + i * last.out, d);
        }
        for (std::size_t l = depth; l-- > 0;) {
            const Layer& layer = net.layers[l];
            if (l > 0) {
                const Layer& below = net.layers[l - 1];
                auto& dprev = deltas_[l - 1];
                std::fill(dprev.begin(), dprev.end(), 0.0);
                for (std::size_t oo = 0; oo < layer.out; ++oo) {
                    const double d = deltas_[l][oo];
                    if (d == 0.0) continue;
                    const double* wrow = layer.w.data() + oo * layer.in;
                    for (std::size_t j = 0; j < layer.in; ++j) dprev[j] += d * wrow[j];
                }
                scale_by_act_derivative(below.act, acts_[l - 1].data() + i * below.out, dprev);
            }
        }
        // Fill the flat row: dW_l = delta_l outer a_{l-1}, db_l = delta_l.
        std::size_t at = 0;
        for (std::size_t l = 0; l < depth; ++l) {
            const Layer& layer = net.layers[l];
            const double* input = l == 0 ? x + i * layer.in : acts_[l - 1].data() + i * layer.in;
            const auto& d = deltas_[l];
            for (std::size_t oo = 0; oo < layer.out; ++oo) {
                double* wrow = row + at + oo * layer.in;
                const double dv = d[oo];
                for (std::size_t j = 0; j < layer.in; ++j) wrow[j] = dv * input[j];
            }
            at += layer.w.size();
            for (std::size_t oo = 0; oo < layer.out; ++oo) row[at + oo] = d[oo];
            at += layer.b.size();
        }
    }

    // jtj (upper) += panel^T panel; g += panel^T residual. Two destination
    // rows share each panel-row load and the panel rows are unrolled by four,
    // which keeps the update compute-bound.
    void flush_panel(std::size_t rows) {
        std::size_t p = 0;
        for (; p + 2 <= p_; p += 2) {
            double* __restrict dst0 = jtj_.data() + p * p_;
            double* __restrict dst1 = jtj_.data() + (p + 1) * p_;
            for (std::size_t r = 0; r < rows; ++r) {
                const double c = panel_[r * p_ + p];
                dst0[p] += c * c;
            }
            std::size_t r = 0;
            for (; r + 4 <= rows; r += 4) {
                const double* __restrict j0 = panel_.data() + (r + 0) * p_;
                const double* __restrict j1 = panel_.data() + (r + 1) * p_;
                const double* __restrict j2 = panel_.data() + (r + 2) * p_;
                const double* __restrict j3 = panel_.data() + (r + 3) * p_;
                const double a0 = j0[p], a1 = j1[p], a2 = j2[p], a3 = j3[p];
                const double b0 = j0[p + 1], b1 = j1[p + 1], b2 = j2[p + 1], b3 = j3[p + 1];
                for (std::size_t q = p + 1; q < p_; ++q) {
                    const double v0 = j0[q], v1 = j1[q], v2 = j2[q], v3 = j3[q];
                    dst0[q] += a0 * v0 + a1 * v1 + a2 * v2 + a3 * v3;
                    dst1[q] += b0 * v0 + b1 * v1 + b2 * v2 + b3 * v3;
                }
            }
            for (; r < rows; ++r) {
                const double* __restrict jr = panel_.data() + r * p_;
                const double a = jr[p], b = jr[p + 1];
                for (std::size_t q = p + 1; q < p_; ++q) {
                    dst0[q] += a * jr[q];
                    dst1[q] += b * jr[q];
                }
            }
        }
        if (p < p_) {
            double* __restrict dst = jtj_.data() + p * p_;
            for (std::size_t r = 0; r < rows; ++r) {
                const double* __restrict jr = panel_.data() + r * p_;
                const double c = jr[p];
                dst[p] += c * jr[p];
            }
            (void)dst;
        }
        for (std::size_t r = 0; r < rows; ++r) {
            const double* __restrict jr = panel_.data() + r * p_;
            const double res = residual_[r];
            for (std::size_t q = 0; q < p_; ++q) g_[q] += res * jr[q];
        }
    }

    std::size_t n_;
    std::size_t p_;
    std::vector<std::vector<double>> acts_;
    std::vector<std::vector<double>> deltas_;
    std::vector<double> jtj_;
    std::vector<double> g_;
    std::vector<double> panel_;
    std::vector<double> residual_;
};

// In-place lower Cholesky; returns false when the matrix is not positive
// definite at working precision.
bool cholesky_solve(std::vector<double>& a, std::size_t p, std::vector<double>& rhs) {
    for (std::size_t k = 0; k < p; ++k) {
        double diag = a[k * p + k];
        for (std::size_t j = 0; j < k; ++j) diag -= a[k * p + j] * a[k * p + j];
        if (!(diag > 0.0)) return false;
        const double lkk = std::sqrt(diag);
        a[k * p + k] = lkk;
        for (std::size_t i = k + 1; i < p; ++i) {
            double v = a[i * p + k];
            const double* ri = a.data() + i * p;
            const double* rk = a.data() + k * p;
            for (std::size_t j = 0; j < k; ++j) v -= ri[j] * rk[j];
            a[i * p + k] = v / lkk;
        }
    }
    // forward substitution L z = rhs
    for (std::size_t i = 0; i < p; ++i) {
        double v = rhs[i];
        const double* ri = a.data() + i * p;
        for (std::size_t j = 0; j < i; ++j) v -= ri[j] * rhs[j];
        rhs[i] = v / ri[i];
    }
    // backward substitution L^T x = z
    for (std::size_t i = p; i-- > 0;) {
        double v = rhs[i];
        for (std::size_t j = i + 1; j < p; ++j) v -= a[j * p + i] * rhs[j];
        rhs[i] = v / a[i * p + i];
    }
    return true;
}

void lm_optimize(NeuralNet& net, const double* xs, const double* ys, std::size_t n,
                 const TrainConfig& cfg, std::vector<double>* history) {
    LmWorkspace ws(net, n);
    const std::size_t p = ws.params();

    std::vector<double> flat, candidate_flat, damped, delta, diag(p);
    params_to_flat(net, flat);
    NeuralNet candidate = net;

    double sse = ws.forward_sse(net, xs, ys);
    if (!std::isfinite(sse)) throw TrainingDivergedError("lm: non-finite loss at initialization");
    double lambda = 1e-3;
    // Converged when five consecutive accepted steps each improve the SSE by
    // less than 0.3% relative.
    constexpr double kRelStop = 3e-3;
    constexpr int kStopWindow = 5;
    // With a restart target set, stop grinding once the fit is comfortably
    // below it and per-step progress has slowed; fast-plunging fits keep
    // going to full convergence.
    const double good_enough =
        cfg.restart_target > 0.0 ? 0.8 * cfg.restart_target : 0.0;
    int stall = 0;
    double last_rel_drop = 1.0;

    for (int iter = 0; iter < cfg.epochs; ++iter) {
        ws.accumulate_normal_equations(net, xs, ys);
        const auto& jtj = ws.jtj();
        const auto& g = ws.gradient();
        for (std::size_t i = 0; i < p; ++i) diag[i] = std::max(jtj[i * p + i], 1e-12);

        bool accepted = false;
        for (int attempt = 0; attempt < 60; ++attempt) {
            // Damped normal matrix from the upper triangle.
            damped.assign(p * p, 0.0);
            for (std::size_t i = 0; i < p; ++i) {
                for (std::size_t j = i; j < p; ++j) {
                    const double v = jtj[i * p + j];
                    damped[i * p + j] = v;
                    damped[j * p + i] = v;
                }
                damped[i * p + i] = jtj[i * p + i] + lambda * diag[i];
            }
            delta = g;
            if (!cholesky_solve(damped, p, delta)) {
                lambda *= 10.0;
                continue;
            }
            candidate_flat = flat;
            for (std::size_t i = 0; i < p; ++i) candidate_flat[i] -= delta[i];
            flat_to_params(candidate_flat, candidate);

            const double candidate_sse = ws.forward_sse(candidate, xs, ys);
            if (std::isfinite(candidate_sse) && candidate_sse < sse) {
                const double rel_drop = (sse - candidate_sse) / std::max(sse, 1e-300);
                flat.swap(candidate_flat);
                net = candidate;
                sse = candidate_sse;
                lambda = std::max(lambda / 3.0, 1e-12);
                stall = rel_drop < kRelStop ? stall + 1 : 0;
                last_rel_drop = rel_drop;
                accepted = true;
                break;
            }
            lambda *= 4.0;
            if (lambda > 1e14) break;
        }
        if (history) history->push_back(sse / static_cast<double>(n));
        if (!accepted || stall >= kStopWindow || sse == 0.0) break;
        if (good_enough > 0.0 && sse / static_cast<double>(n) <= good_enough &&
            last_rel_drop < 3e-2)
            break;
        // Re-sync the stored activations with the accepted parameters for the
        // next Jacobian pass.
        ws.forward_sse(net, xs, ys);
    }
}

void gd_optimize(NeuralNet& net, const double* xs, const double* ys, std::size_t n,
                 std::size_t in_dim, std::size_t out_dim, const TrainConfig& cfg,
                 std::vector<double>* history) {
    BatchWorkspace ws(net);
    AdamState adam(net);

    const std::size_t batch = cfg.batch > 0 ? std::min(static_cast<std::size_t>(cfg.batch), n) : n;
    std::vector<std::size_t> order;
    std::vector<double> xb, yb;
    Rng shuffle_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    if (batch < n) {
        order.resize(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        xb.resize(batch * in_dim);
        yb.resize(batch * out_dim);
    }

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double lr = scheduled_lr(cfg, epoch);
        double epoch_loss = 0.0;
        if (batch == n) {
            epoch_loss = ws.loss_and_gradients(net, xs, ys, n);
            apply_gradients(net, ws.grads(), &adam, cfg, lr);
        } else {
            // Fisher-Yates reshuffle, then sequential minibatches.
            for (std::size_t i = n - 1; i > 0; --i) {
                const auto j = static_cast<std::size_t>(shuffle_rng.next_u64() % (i + 1));
                std::swap(order[i], order[j]);
            }
            double weighted = 0.0;
            for (std::size_t start = 0; start < n; start += batch) {
                const std::size_t m = std::min(batch, n - start);
                for (std::size_t i = 0; i < m; ++i) {
                    const std::size_t src = order[start + i];
                    std::copy_n(xs + src * in_dim, in_dim, xb.data() + i * in_dim);
                    std::copy_n(ys + src * out_dim, out_dim, yb.data() + i * out_dim);
                }
                const double batch_loss = ws.loss_and_gradients(net, xb.data(), yb.data(), m);
                apply_gradients(net, ws.grads(), &adam, cfg, lr);
                weighted += batch_loss * static_cast<double>(m);
            }
            epoch_loss = weighted / static_cast<double>(n);
        }
        if (!std::isfinite(epoch_loss))
            throw TrainingDivergedError("train: loss became non-finite at epoch " +
                                        std::to_string(epoch));
        if (history) history->push_back(epoch_loss);
    }
}

}  // namespace

TrainResult train(const CellDataset& dataset, const Arch& arch, const TrainConfig& cfg) {
    if (dataset.empty()) throw EmptyDatasetError("train: dataset has no pairs");
    if (cfg.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
    if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("train: learning rate must be > 0");
    if (cfg.restarts < 1) throw std::invalid_argument("train: restarts must be >= 1");

    const std::size_t n = dataset.size();
    const std::size_t in_dim = arch.sizes.front();
    const std::size_t out_dim = arch.sizes.back();
    if (dataset.pairs.front().first.size() != in_dim)
        throw std::invalid_argument("train: arch input size != pair input size");
    if (dataset.pairs.front().second.size() != out_dim)
        throw std::invalid_argument("train: arch output size != pair target size");

    const auto t0 = std::chrono::steady_clock::now();

    // Pack the dataset once.
    std::vector<double> xs(n * in_dim), ys(n * out_dim);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& [in, out] = dataset.pairs[i];
        if (in.size() != in_dim || out.size() != out_dim)
            throw std::invalid_argument("train: inconsistent pair dimensions");
        std::copy(in.begin(), in.end(), xs.begin() + static_cast<std::ptrdiff_t>(i * in_dim));
        std::copy(out.begin(), out.end(), ys.begin() + static_cast<std::ptrdiff_t>(i * out_dim));
    }

    // Input ranges drive the Nguyen-Widrow and SteepMix placements.
    std::vector<double> in_lo(in_dim), in_hi(in_dim);
    if (cfg.init != InitScheme::Xavier) {
        for (std::size_t j = 0; j < in_dim; ++j) in_lo[j] = in_hi[j] = xs[j];
        for (std::size_t i = 1; i < n; ++i) {
            for (std::size_t j = 0; j < in_dim; ++j) {
                in_lo[j] = std::min(in_lo[j], xs[i * in_dim + j]);
                in_hi[j] = std::max(in_hi[j], xs[i * in_dim + j]);
            }
        }
    }

    // Optional held-out rows for restart selection: seeded shuffle, last
    // chunk becomes the validation block.
    if (!(cfg.validation_fraction >= 0.0 && cfg.validation_fraction < 1.0))
        throw std::invalid_argument("train: validation_fraction must be in [0, 1)");
    std::size_t n_fit = n;
    std::vector<double> xs_fit, ys_fit, xs_val, ys_val;
    const double* fit_x = xs.data();
    const double* fit_y = ys.data();
    if (cfg.validation_fraction > 0.0) {
        const auto n_val = static_cast<std::size_t>(cfg.validation_fraction *
                                                    static_cast<double>(n));
        if (n_val > 0) {
            std::vector<std::size_t> order(n);
            for (std::size_t i = 0; i < n; ++i) order[i] = i;
            Rng rng(cfg.seed ^ 0x94d049bb133111ebULL);
            for (std::size_t i = n - 1; i > 0; --i) {
                const auto j = static_cast<std::size_t>(rng.next_u64() % (i + 1));
                std::swap(order[i], order[j]);
            }
            n_fit = n - n_val;
            xs_fit.resize(n_fit * in_dim);
            ys_fit.resize(n_fit * out_dim);
            xs_val.resize(n_val * in_dim);
            ys_val.resize(n_val * out_dim);
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t src = order[i];
                double* dx = i < n_fit ? xs_fit.data() + i * in_dim
                                       : xs_val.data() + (i - n_fit) * in_dim;
                double* dy = i < n_fit ? ys_fit.data() + i * out_dim
                                       : ys_val.data() + (i - n_fit) * out_dim;
                std::copy_n(xs.data() + src * in_dim, in_dim, dx);
                std::copy_n(ys.data() + src * out_dim, out_dim, dy);
            }
            fit_x = xs_fit.data();
            fit_y = ys_fit.data();
        }
    }
    const bool has_val = n_fit < n;

    TrainResult best;
    double best_score = 0.0;
    bool have_best = false;
    for (int restart = 0; restart < cfg.restarts; ++restart) {
        const std::uint64_t restart_seed =
            cfg.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(restart);

        TrainResult current;
        switch (cfg.init) {
            case InitScheme::Xavier: current.net = init_net(arch, restart_seed); break;
            case InitScheme::NguyenWidrow:
                current.net = nguyen_widrow_init(arch, restart_seed, in_lo, in_hi);
                break;
            case InitScheme::SteepMix:
                current.net = steep_mix_init(arch, restart_seed, in_lo, in_hi);
                break;
        }
        auto* history = cfg.record_history ? &current.loss_history : nullptr;
        if (cfg.optimizer == Optimizer::Lm) {
            lm_optimize(current.net, fit_x, fit_y, n_fit, cfg, history);
        } else {
            gd_optimize(current.net, fit_x, fit_y, n_fit, in_dim, out_dim, cfg, history);
        }
        current.final_loss = public_mse(current.net, xs, ys, n, in_dim, out_dim);
        const double score = has_val
                                 ? public_mse_raw(current.net, xs_val.data(), ys_val.data(),
                                                  xs_val.size() / in_dim, in_dim, out_dim)
                                 : current.final_loss;

        if (!have_best || score < best_score) {
            best = std::move(current);
            best_score = score;
            have_best = true;
        }
        if (cfg.restart_target > 0.0 && best_score <= cfg.restart_target) break;
    }
    best.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return best;
}

TrainAllResult train_all(std::span<const CellDataset> datasets, const Arch& arch,
                         const TrainConfig& cfg, unsigned threads) {
    if (datasets.empty()) throw std::invalid_argument("train_all: no datasets");
    const unsigned workers =
        std::max(1u, std::min(threads == 0 ? worker_threads() : threads,
                              static_cast<unsigned>(datasets.size())));

    TrainAllResult result;
    result.nets.resize(datasets.size());
    result.losses.assign(datasets.size(), 0.0);
    result.cell_seconds.assign(datasets.size(), 0.0);

    const auto t0 = std::chrono::steady_clock::now();
    std::atomic<std::size_t> cursor{0};
    std::vector<std::exception_ptr> errors(datasets.size());

    auto worker = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= datasets.size()) return;
            try {
                TrainConfig cell_cfg = cfg;
                cell_cfg.seed = cfg.seed ^ static_cast<std::uint64_t>(datasets[i].cell);
                TrainResult r = train(datasets[i], arch, cell_cfg);
                result.nets[i] = std::move(r.net);
                result.losses[i] = r.final_loss;
                result.cell_seconds[i] = r.seconds;
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    for (std::size_t i = 0; i < datasets.size(); ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const EmptyDatasetError& e) {
            throw EmptyDatasetError("cell " + std::to_string(datasets[i].cell) + ": " + e.what());
        } catch (const std::exception& e) {
            throw std::runtime_error("cell " + std::to_string(datasets[i].cell) + ": " + e.what());
        }
    }
    return result;
}

double gradient_check(const NeuralNet& net,
                      const std::pair<std::vector<double>, std::vector<double>>& pair) {
    CellDataset single;
    single.pairs.push_back(pair);

    NeuralNet work = net;
    BatchWorkspace ws(work);
    ws.loss_and_gradients(work, pair.first.data(), pair.second.data(), 1);

    // Flatten analytic gradients in (layer, w then b) order.
    std::vector<double> analytic;
    for (const auto& g : ws.grads()) {
        analytic.insert(analytic.end(), g.w.begin(), g.w.end());
        analytic.insert(analytic.end(), g.b.begin(), g.b.end());
    }

    const double h = 1e-5;
    BatchWorkspace fd_ws(work);
    auto loss_at = [&]() {
        return fd_ws.loss_and_gradients(work, pair.first.data(), pair.second.data(), 1);
    };

    double max_rel = 0.0;
    std::size_t flat = 0;
    for (Layer& layer : work.layers) {
        for (auto* params : {&layer.w, &layer.b}) {
            for (double& p : *params) {
                const double saved = p;
                p = saved + h;
                const double up = loss_at();
                p = saved - h;
                const double down = loss_at();
                p = saved;
                const double numeric = (up - down) / (2.0 * h);
                const double denom = std::max(std::fabs(analytic[flat]) + std::fabs(numeric), 1e-6);
                max_rel = std::max(max_rel, std::fabs(analytic[flat] - numeric) / denom);
                ++flat;
            }
        }
    }
    return max_rel;
}

}  // namespace hybran
