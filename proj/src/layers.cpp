#include "awa/layers.hpp"

#include <cmath>
#include <vector>

#include <nlohmann/json.hpp>

namespace awa {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using json = nlohmann::json;

namespace {

constexpr double kBnEpsilon = 1e-3;

void check_positive(int v, const char* name) {
    if (v < 1) throw ShapeError(std::string(name) + " must be positive");
}

// "Same" padding geometry for a strided window over length n producing
// ceil(n/s) outputs; the extra padding slot goes to the right.
struct SamePad {
    int out_len;
    int pad_left;

    SamePad(int n, int kernel, int stride) {
        out_len = (n + stride - 1) / stride;
        int total = std::max((out_len - 1) * stride + kernel - n, 0);
        pad_left = total / 2;
    }
};

double glorot_limit(int fan_in, int fan_out) {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

void glorot_fill(std::span<double> w, int fan_in, int fan_out, Rng& rng) {
    double lim = glorot_limit(fan_in, fan_out);
    for (double& v : w) v = rng.uniform(-lim, lim);
}

// ---------------------------------------------------------------------------

struct Conv1dCache : LayerCache {
    MatrixXd col; // (C*k) x (B*M)
    int batch = 0;
};

class Conv1d final : public Layer {
public:
    Conv1d(Shape in, int filters, int kernel, int stride)
        : in_(in), filters_(filters), kernel_(kernel), stride_(stride),
          pad_(in.length, kernel, stride) {
        check_positive(filters, "filters");
        check_positive(kernel, "kernel_size");
        check_positive(stride, "strides");
    }

    std::string kind() const override { return "conv1d"; }
    Shape out_shape() const override { return {filters_, pad_.out_len}; }
    int param_count() const override { return filters_ * in_.channels * kernel_ + filters_; }

    void init_params(std::span<double> w, Rng& rng) const override {
        int wn = filters_ * in_.channels * kernel_;
        glorot_fill(w.subspan(0, static_cast<size_t>(wn)), in_.channels * kernel_,
                    filters_ * kernel_, rng);
        for (int f = 0; f < filters_; ++f) w[static_cast<size_t>(wn + f)] = 0.0;
    }

    Tensor forward(std::span<const double> w, std::span<double>, const Tensor& x,
                   Mode, CachePtr* cache) const override {
        const int B = x.batch(), C = in_.channels, N = in_.length;
        const int F = filters_, k = kernel_, M = pad_.out_len;

        MatrixXd col = MatrixXd::Zero(C * k, static_cast<Eigen::Index>(B) * M);
        for (int b = 0; b < B; ++b)
            for (int j = 0; j < M; ++j) {
                Eigen::Index cc = static_cast<Eigen::Index>(b) * M + j;
                int base = j * stride_ - pad_.pad_left;
                for (int u = 0; u < k; ++u) {
                    int i = base + u;
                    if (i < 0 || i >= N) continue;
                    for (int c = 0; c < C; ++c)
                        col(c * k + u, cc) = x.m(b, c * N + i);
                }
            }

        Eigen::Map<const MatrixXd> wm(w.data(), F, C * k);
        Eigen::Map<const VectorXd> bias(w.data() + F * C * k, F);
        MatrixXd y = wm * col; // F x (B*M)

        Tensor out = Tensor::zeros(B, out_shape());
        for (int b = 0; b < B; ++b)
            for (int f = 0; f < F; ++f)
                for (int j = 0; j < M; ++j)
                    out.m(b, f * M + j) = y(f, static_cast<Eigen::Index>(b) * M + j) + bias(f);

        if (cache) {
            auto c = std::make_unique<Conv1dCache>();
            c->col = std::move(col);
            c->batch = B;
            *cache = std::move(c);
        }
        return out;
    }

    Tensor backward(std::span<const double> w, const LayerCache& cache, const Tensor& dy,
                    std::span<double> gw) const override {
        const auto& c = static_cast<const Conv1dCache&>(cache);
        const int B = c.batch, C = in_.channels, N = in_.length;
        const int F = filters_, k = kernel_, M = pad_.out_len;

        MatrixXd dym(F, static_cast<Eigen::Index>(B) * M);
        for (int b = 0; b < B; ++b)
            for (int f = 0; f < F; ++f)
                for (int j = 0; j < M; ++j)
                    dym(f, static_cast<Eigen::Index>(b) * M + j) = dy.m(b, f * M + j);

        Eigen::Map<const MatrixXd> wm(w.data(), F, C * k);
        if (!gw.empty()) {
            Eigen::Map<MatrixXd> gwm(gw.data(), F, C * k);
            Eigen::Map<VectorXd> gb(gw.data() + F * C * k, F);
            gwm.noalias() += dym * c.col.transpose();
            gb.noalias() += dym.rowwise().sum();
        }

        MatrixXd dcol = wm.transpose() * dym; // (C*k) x (B*M)
        Tensor dx = Tensor::zeros(B, in_);
        for (int b = 0; b < B; ++b)
            for (int j = 0; j < M; ++j) {
                Eigen::Index cc = static_cast<Eigen::Index>(b) * M + j;
                int base = j * stride_ - pad_.pad_left;
                for (int u = 0; u < k; ++u) {
                    int i = base + u;
                    if (i < 0 || i >= N) continue;
                    for (int ch = 0; ch < C; ++ch)
                        dx.m(b, ch * N + i) += dcol(ch * k + u, cc);
                }
            }
        return dx;
    }

    json spec() const override {
        return {{"kind", "conv1d"}, {"filters", filters_}, {"kernel_size", kernel_},
                {"strides", stride_}, {"padding", "same"}};
    }

private:
    Shape in_;
    int filters_, kernel_, stride_;
    SamePad pad_;
};

// ---------------------------------------------------------------------------

struct TConv1dCache : LayerCache {
    MatrixXd z; // C x (B*M), reshaped input
    int batch = 0;
};

// Transposed convolution as the adjoint of a same-padded strided convolution;
// output length is exactly input length times stride.
class TransposedConv1d final : public Layer {
public:
    TransposedConv1d(Shape in, int filters, int kernel, int stride)
        : in_(in), filters_(filters), kernel_(kernel), stride_(stride),
          out_len_(in.length * stride), pad_(out_len_, kernel, stride) {
        check_positive(filters, "filters");
        check_positive(kernel, "kernel_size");
        check_positive(stride, "strides");
        if (pad_.out_len != in.length)
            throw ShapeError("transposed_conv1d: inconsistent geometry");
    }

    std::string kind() const override { return "transposed_conv1d"; }
    Shape out_shape() const override { return {filters_, out_len_}; }
    int param_count() const override { return in_.channels * filters_ * kernel_ + filters_; }

    void init_params(std::span<double> w, Rng& rng) const override {
        int wn = in_.channels * filters_ * kernel_;
        glorot_fill(w.subspan(0, static_cast<size_t>(wn)), in_.channels * kernel_,
                    filters_ * kernel_, rng);
        for (int f = 0; f < filters_; ++f) w[static_cast<size_t>(wn + f)] = 0.0;
    }

    Tensor forward(std::span<const double> w, std::span<double>, const Tensor& x,
                   Mode, CachePtr* cache) const override {
        const int B = x.batch(), C = in_.channels, M = in_.length;
        const int F = filters_, k = kernel_, N = out_len_;

        MatrixXd z(C, static_cast<Eigen::Index>(B) * M);
        for (int b = 0; b < B; ++b)
            for (int ch = 0; ch < C; ++ch)
                for (int j = 0; j < M; ++j)
                    z(ch, static_cast<Eigen::Index>(b) * M + j) = x.m(b, ch * M + j);

        Eigen::Map<const MatrixXd> wm(w.data(), C, F * k);
        Eigen::Map<const VectorXd> bias(w.data() + C * F * k, F);
        MatrixXd tmp = wm.transpose() * z; // (F*k) x (B*M)

        Tensor out = Tensor::zeros(B, out_shape());
        for (int b = 0; b < B; ++b) {
            for (int j = 0; j < M; ++j) {
                Eigen::Index cc = static_cast<Eigen::Index>(b) * M + j;
                int base = j * stride_ - pad_.pad_left;
                for (int u = 0; u < k; ++u) {
                    int i = base + u;
                    if (i < 0 || i >= N) continue;
                    for (int f = 0; f < F; ++f)
                        out.m(b, f * N + i) += tmp(f * k + u, cc);
                }
            }
            for (int f = 0; f < F; ++f)
                for (int i = 0; i < N; ++i) out.m(b, f * N + i) += bias(f);
        }

        if (cache) {
            auto c = std::make_unique<TConv1dCache>();
            c->z = std::move(z);
            c->batch = B;
            *cache = std::move(c);
        }
        return out;
    }

    Tensor backward(std::span<const double> w, const LayerCache& cache, const Tensor& dy,
                    std::span<double> gw) const override {
        const auto& c = static_cast<const TConv1dCache&>(cache);
        const int B = c.batch, C = in_.channels, M = in_.length;
        const int F = filters_, k = kernel_, N = out_len_;

        // im2col over the output gradient, mirroring the forward scatter.
        MatrixXd col = MatrixXd::Zero(static_cast<Eigen::Index>(F) * k,
                                      static_cast<Eigen::Index>(B) * M);
        for (int b = 0; b < B; ++b)
            for (int j = 0; j < M; ++j) {
                Eigen::Index cc = static_cast<Eigen::Index>(b) * M + j;
                int base = j * stride_ - pad_.pad_left;
                for (int u = 0; u < k; ++u) {
                    int i = base + u;
                    if (i < 0 || i >= N) continue;
                    for (int f = 0; f < F; ++f)
                        col(f * k + u, cc) = dy.m(b, f * N + i);
                }
            }

        Eigen::Map<const MatrixXd> wm(w.data(), C, F * k);
        if (!gw.empty()) {
            Eigen::Map<MatrixXd> gwm(gw.data(), C, F * k);
            Eigen::Map<VectorXd> gb(gw.data() + C * F * k, F);
            gwm.noalias() += c.z * col.transpose();
            for (int b = 0; b < B; ++b)
                for (int f = 0; f < F; ++f)
                    for (int i = 0; i < N; ++i) gb(f) += dy.m(b, f * N + i);
        }

        MatrixXd dz = wm * col; // C x (B*M)
        Tensor dx = Tensor::zeros(B, in_);
        for (int b = 0; b < B; ++b)
            for (int ch = 0; ch < C; ++ch)
                for (int j = 0; j < M; ++j)
                    dx.m(b, ch * M + j) = dz(ch, static_cast<Eigen::Index>(b) * M + j);
        return dx;
    }

    json spec() const override {
        return {{"kind", "transposed_conv1d"}, {"filters", filters_},
                {"kernel_size", kernel_}, {"strides", stride_}, {"padding", "same"}};
    }

private:
    Shape in_;
    int filters_, kernel_, stride_, out_len_;
    SamePad pad_;
};

// ---------------------------------------------------------------------------

struct BatchNormTrainCache : LayerCache {
    MatrixXd xhat;   // B x (C*N)
    VectorXd invstd; // C
};

struct BatchNormInferCache : LayerCache {
    VectorXd scale;  // C: gamma / sqrt(run_var + eps)
    MatrixXd xhat;   // normalized by running stats, for parameter gradients
};

class BatchNorm final : public Layer {
public:
    BatchNorm(Shape in, double momentum) : in_(in), momentum_(momentum) {
        if (!(momentum >= 0.0 && momentum < 1.0))
            throw ShapeError("batch_norm momentum must be in [0,1)");
    }

    std::string kind() const override { return "batch_norm"; }
    Shape out_shape() const override { return in_; }
    int param_count() const override { return 2 * in_.channels; }
    int state_count() const override { return 2 * in_.channels; }

    void init_params(std::span<double> w, Rng&) const override {
        for (int c = 0; c < in_.channels; ++c) {
            w[static_cast<size_t>(c)] = 1.0;                 // gamma
            w[static_cast<size_t>(in_.channels + c)] = 0.0;  // beta
        }
    }

    void init_state(std::span<double> s) const override {
        for (int c = 0; c < in_.channels; ++c) {
            s[static_cast<size_t>(c)] = 0.0;                 // running mean
            s[static_cast<size_t>(in_.channels + c)] = 1.0;  // running var
        }
    }

    Tensor forward(std::span<const double> w, std::span<double> state, const Tensor& x,
                   Mode mode, CachePtr* cache) const override {
        const int B = x.batch(), C = in_.channels, N = in_.length;
        Eigen::Map<const VectorXd> gamma(w.data(), C);
        Eigen::Map<const VectorXd> beta(w.data() + C, C);
        Tensor out = Tensor::zeros(B, in_);

        if (mode == Mode::Train) {
            const double n = static_cast<double>(B) * N;
            VectorXd mean = VectorXd::Zero(C), var = VectorXd::Zero(C);
            for (int b = 0; b < B; ++b)
                for (int c = 0; c < C; ++c)
                    for (int i = 0; i < N; ++i) mean(c) += x.m(b, c * N + i);
            mean /= n;
            for (int b = 0; b < B; ++b)
                for (int c = 0; c < C; ++c)
                    for (int i = 0; i < N; ++i) {
                        double d = x.m(b, c * N + i) - mean(c);
                        var(c) += d * d;
                    }
            var /= n;

            VectorXd invstd(C);
            for (int c = 0; c < C; ++c) invstd(c) = 1.0 / std::sqrt(var(c) + kBnEpsilon);

            MatrixXd xhat(B, static_cast<Eigen::Index>(C) * N);
            for (int b = 0; b < B; ++b)
                for (int c = 0; c < C; ++c)
                    for (int i = 0; i < N; ++i) {
                        double xh = (x.m(b, c * N + i) - mean(c)) * invstd(c);
                        xhat(b, c * N + i) = xh;
                        out.m(b, c * N + i) = gamma(c) * xh + beta(c);
                    }

            for (int c = 0; c < C; ++c) {
                state[static_cast<size_t>(c)] =
                    momentum_ * state[static_cast<size_t>(c)] + (1.0 - momentum_) * mean(c);
                state[static_cast<size_t>(C + c)] =
                    momentum_ * state[static_cast<size_t>(C + c)] + (1.0 - momentum_) * var(c);
            }

            if (cache) {
                auto cch = std::make_unique<BatchNormTrainCache>();
                cch->xhat = std::move(xhat);
                cch->invstd = std::move(invstd);
                *cache = std::move(cch);
            }
        } else {
            VectorXd scale(C), shift(C);
            for (int c = 0; c < C; ++c) {
                double inv = 1.0 / std::sqrt(state[static_cast<size_t>(C + c)] + kBnEpsilon);
                scale(c) = gamma(c) * inv;
                shift(c) = beta(c) - state[static_cast<size_t>(c)] * scale(c);
            }
            std::unique_ptr<BatchNormInferCache> cch;
            if (cache) {
                cch = std::make_unique<BatchNormInferCache>();
                cch->scale = scale;
                cch->xhat.resize(B, static_cast<Eigen::Index>(C) * N);
            }
            for (int b = 0; b < B; ++b)
                for (int c = 0; c < C; ++c) {
                    double inv = 1.0 / std::sqrt(state[static_cast<size_t>(C + c)] + kBnEpsilon);
                    for (int i = 0; i < N; ++i) {
                        double v = x.m(b, c * N + i);
                        out.m(b, c * N + i) = v * scale(c) + shift(c);
                        if (cch) cch->xhat(b, c * N + i) = (v - state[static_cast<size_t>(c)]) * inv;
                    }
                }
            if (cache) *cache = std::move(cch);
        }
        return out;
    }

    Tensor backward(std::span<const double> w, const LayerCache& cache, const Tensor& dy,
                    std::span<double> gw) const override {
        const int B = dy.batch(), C = in_.channels, N = in_.length;
        Eigen::Map<const VectorXd> gamma(w.data(), C);
        Tensor dx = Tensor::zeros(B, in_);

        if (const auto* tc = dynamic_cast<const BatchNormTrainCache*>(&cache)) {
            const double n = static_cast<double>(B) * N;
            VectorXd sum_dxhat = VectorXd::Zero(C), sum_dxhat_xhat = VectorXd::Zero(C);
            VectorXd dgamma = VectorXd::Zero(C), dbeta = VectorXd::Zero(C);
            for (int b = 0; b < B; ++b)
                for (int c = 0; c < C; ++c)
                    for (int i = 0; i < N; ++i) {
                        double g = dy.m(b, c * N + i);
                        double xh = tc->xhat(b, c * N + i);
                        sum_dxhat(c) += g * gamma(c);
                        sum_dxhat_xhat(c) += g * gamma(c) * xh;
                        dgamma(c) += g * xh;
                        dbeta(c) += g;
                    }
            for (int b = 0; b < B; ++b)
                for (int c = 0; c < C; ++c)
                    for (int i = 0; i < N; ++i) {
                        double dxhat = dy.m(b, c * N + i) * gamma(c);
                        double xh = tc->xhat(b, c * N + i);
                        dx.m(b, c * N + i) = tc->invstd(c) / n *
                            (n * dxhat - sum_dxhat(c) - xh * sum_dxhat_xhat(c));
                    }
            if (!gw.empty()) {
                for (int c = 0; c < C; ++c) {
                    gw[static_cast<size_t>(c)] += dgamma(c);
                    gw[static_cast<size_t>(C + c)] += dbeta(c);
                }
            }
        } else {
            const auto& ic = static_cast<const BatchNormInferCache&>(cache);
            for (int b = 0; b < B; ++b)
                for (int c = 0; c < C; ++c)
                    for (int i = 0; i < N; ++i)
                        dx.m(b, c * N + i) = dy.m(b, c * N + i) * ic.scale(c);
            if (!gw.empty()) {
                for (int b = 0; b < B; ++b)
                    for (int c = 0; c < C; ++c)
                        for (int i = 0; i < N; ++i) {
                            gw[static_cast<size_t>(c)] += dy.m(b, c * N + i) * ic.xhat(b, c * N + i);
                            gw[static_cast<size_t>(C + c)] += dy.m(b, c * N + i);
                        }
            }
        }
        return dx;
    }

    json spec() const override { return {{"kind", "batch_norm"}, {"momentum", momentum_}}; }

private:
    Shape in_;
    double momentum_;
};

// ---------------------------------------------------------------------------

struct InputCache : LayerCache {
    MatrixXd x;
};

class Elu final : public Layer {
public:
    Elu(Shape in, double alpha) : in_(in), alpha_(alpha) {}

    std::string kind() const override { return "elu"; }
    Shape out_shape() const override { return in_; }

    Tensor forward(std::span<const double>, std::span<double>, const Tensor& x, Mode,
                   CachePtr* cache) const override {
        Tensor out = x;
        out.m = x.m.unaryExpr([a = alpha_](double v) {
            return v > 0.0 ? v : a * std::expm1(v);
        });
        if (cache) {
            auto c = std::make_unique<InputCache>();
            c->x = x.m;
            *cache = std::move(c);
        }
        return out;
    }

    Tensor backward(std::span<const double>, const LayerCache& cache, const Tensor& dy,
                    std::span<double>) const override {
        const auto& c = static_cast<const InputCache&>(cache);
        Tensor dx = dy;
        dx.m = dy.m.cwiseProduct(c.x.unaryExpr([a = alpha_](double v) {
            return v > 0.0 ? 1.0 : a * std::exp(v);
        }));
        return dx;
    }

    json spec() const override { return {{"kind", "elu"}, {"alpha", alpha_}}; }

private:
    Shape in_;
    double alpha_;
};

class Relu final : public Layer {
public:
    explicit Relu(Shape in) : in_(in) {}

    std::string kind() const override { return "relu"; }
    Shape out_shape() const override { return in_; }

    Tensor forward(std::span<const double>, std::span<double>, const Tensor& x, Mode,
                   CachePtr* cache) const override {
        Tensor out = x;
        out.m = x.m.cwiseMax(0.0);
        if (cache) {
            auto c = std::make_unique<InputCache>();
            c->x = x.m;
            *cache = std::move(c);
        }
        return out;
    }

    Tensor backward(std::span<const double>, const LayerCache& cache, const Tensor& dy,
                    std::span<double>) const override {
        const auto& c = static_cast<const InputCache&>(cache);
        Tensor dx = dy;
        dx.m = dy.m.cwiseProduct(
            c.x.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; }));
        return dx;
    }

    json spec() const override { return {{"kind", "relu"}}; }

private:
    Shape in_;
};

// ---------------------------------------------------------------------------

struct MaxPoolCache : LayerCache {
    std::vector<int> argmax; // flattened (b, c, j) -> input position
    int batch = 0;
};

class MaxPool1d final : public Layer {
public:
    MaxPool1d(Shape in, int pool, int stride)
        : in_(in), pool_(pool), stride_(stride), pad_(in.length, pool, stride) {
        check_positive(pool, "pool_size");
        check_positive(stride, "strides");
    }

    std::string kind() const override { return "max_pool1d"; }
    Shape out_shape() const override { return {in_.channels, pad_.out_len}; }

    Tensor forward(std::span<const double>, std::span<double>, const Tensor& x, Mode,
                   CachePtr* cache) const override {
        const int B = x.batch(), C = in_.channels, N = in_.length, M = pad_.out_len;
        Tensor out = Tensor::zeros(B, out_shape());
        auto c = std::make_unique<MaxPoolCache>();
        c->argmax.assign(static_cast<size_t>(B) * C * M, -1);
        c->batch = B;
        for (int b = 0; b < B; ++b)
            for (int ch = 0; ch < C; ++ch)
                for (int j = 0; j < M; ++j) {
                    int base = j * stride_ - pad_.pad_left;
                    double best = 0.0;
                    int best_i = -1;
                    for (int u = 0; u < pool_; ++u) {
                        int i = base + u;
                        if (i < 0 || i >= N) continue;
                        double v = x.m(b, ch * N + i);
                        if (best_i < 0 || v > best) {
                            best = v;
                            best_i = i;
                        }
                    }
                    out.m(b, ch * M + j) = best;
                    c->argmax[(static_cast<size_t>(b) * C + ch) * M + j] = best_i;
                }
        if (cache) *cache = std::move(c);
        return out;
    }

    Tensor backward(std::span<const double>, const LayerCache& cache, const Tensor& dy,
                    std::span<double>) const override {
        const auto& c = static_cast<const MaxPoolCache&>(cache);
        const int B = c.batch, C = in_.channels, N = in_.length, M = pad_.out_len;
        Tensor dx = Tensor::zeros(B, in_);
        for (int b = 0; b < B; ++b)
            for (int ch = 0; ch < C; ++ch)
                for (int j = 0; j < M; ++j) {
                    int i = c.argmax[(static_cast<size_t>(b) * C + ch) * M + j];
                    if (i >= 0) dx.m(b, ch * N + i) += dy.m(b, ch * M + j);
                }
        return dx;
    }

    json spec() const override {
        return {{"kind", "max_pool1d"}, {"pool_size", pool_}, {"strides", stride_},
                {"padding", "same"}};
    }

private:
    Shape in_;
    int pool_, stride_;
    SamePad pad_;
};

// ---------------------------------------------------------------------------

class Dense final : public Layer {
public:
    Dense(Shape in, int units) : in_(in), units_(units) {
        check_positive(units, "units");
    }

    std::string kind() const override { return "dense"; }
    Shape out_shape() const override { return {units_, 1}; }
    int param_count() const override { return in_.features() * units_ + units_; }

    void init_params(std::span<double> w, Rng& rng) const override {
        int d = in_.features();
        glorot_fill(w.subspan(0, static_cast<size_t>(d) * units_), d, units_, rng);
        for (int u = 0; u < units_; ++u) w[static_cast<size_t>(d) * units_ + u] = 0.0;
    }

    Tensor forward(std::span<const double> w, std::span<double>, const Tensor& x, Mode,
                   CachePtr* cache) const override {
        int d = in_.features();
        Eigen::Map<const MatrixXd> wt(w.data(), d, units_);
        Eigen::Map<const VectorXd> bias(w.data() + static_cast<size_t>(d) * units_, units_);
        Tensor out(MatrixXd((x.m * wt).rowwise() + bias.transpose()), out_shape());
        if (cache) {
            auto c = std::make_unique<InputCache>();
            c->x = x.m;
            *cache = std::move(c);
        }
        return out;
    }

    Tensor backward(std::span<const double> w, const LayerCache& cache, const Tensor& dy,
                    std::span<double> gw) const override {
        const auto& c = static_cast<const InputCache&>(cache);
        int d = in_.features();
        Eigen::Map<const MatrixXd> wt(w.data(), d, units_);
        if (!gw.empty()) {
            Eigen::Map<MatrixXd> gwt(gw.data(), d, units_);
            Eigen::Map<VectorXd> gb(gw.data() + static_cast<size_t>(d) * units_, units_);
            gwt.noalias() += c.x.transpose() * dy.m;
            gb.noalias() += dy.m.colwise().sum().transpose();
        }
        return Tensor(MatrixXd(dy.m * wt.transpose()), in_);
    }

    json spec() const override { return {{"kind", "dense"}, {"units", units_}}; }

private:
    Shape in_;
    int units_;
};

// ---------------------------------------------------------------------------

struct OutputCache : LayerCache {
    MatrixXd y;
};

class Softmax final : public Layer {
public:
    explicit Softmax(Shape in) : in_(in) {}

    std::string kind() const override { return "softmax"; }
    Shape out_shape() const override { return in_; }
    bool is_prob_head() const override { return true; }

    Tensor forward(std::span<const double>, std::span<double>, const Tensor& x, Mode,
                   CachePtr* cache) const override {
        Tensor out = x;
        for (int b = 0; b < x.batch(); ++b) {
            double mx = x.m.row(b).maxCoeff();
            Eigen::ArrayXd e = (x.m.row(b).array() - mx).exp();
            out.m.row(b) = (e / e.sum()).matrix();
        }
        if (cache) {
            auto c = std::make_unique<OutputCache>();
            c->y = out.m;
            *cache = std::move(c);
        }
        return out;
    }

    Tensor backward(std::span<const double>, const LayerCache& cache, const Tensor& dy,
                    std::span<double>) const override {
        const auto& c = static_cast<const OutputCache&>(cache);
        Tensor dx = dy;
        for (int b = 0; b < dy.batch(); ++b) {
            double dot = dy.m.row(b).dot(c.y.row(b));
            dx.m.row(b) = c.y.row(b).cwiseProduct(dy.m.row(b).array().matrix() -
                                                  Eigen::RowVectorXd::Constant(dy.m.cols(), dot));
        }
        return dx;
    }

    json spec() const override { return {{"kind", "softmax"}}; }

private:
    Shape in_;
};

class Sigmoid final : public Layer {
public:
    explicit Sigmoid(Shape in) : in_(in) {}

    std::string kind() const override { return "sigmoid"; }
    Shape out_shape() const override { return in_; }
    bool is_prob_head() const override { return true; }

    Tensor forward(std::span<const double>, std::span<double>, const Tensor& x, Mode,
                   CachePtr* cache) const override {
        Tensor out = x;
        // Clamp away from exact 0/1: the true sigmoid never reaches them,
        // only floating-point rounding does.
        out.m = x.m.unaryExpr([](double v) {
            double s = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v))
                                : std::exp(v) / (1.0 + std::exp(v));
            return std::min(std::max(s, 1e-12), 1.0 - 1e-12);
        });
        if (cache) {
            auto c = std::make_unique<OutputCache>();
            c->y = out.m;
            *cache = std::move(c);
        }
        return out;
    }

    Tensor backward(std::span<const double>, const LayerCache& cache, const Tensor& dy,
                    std::span<double>) const override {
        const auto& c = static_cast<const OutputCache&>(cache);
        Tensor dx = dy;
        dx.m = dy.m.cwiseProduct(c.y.cwiseProduct(
            (MatrixXd::Ones(c.y.rows(), c.y.cols()) - c.y)));
        return dx;
    }

    json spec() const override { return {{"kind", "sigmoid"}}; }

private:
    Shape in_;
};

} // namespace

LayerPtr make_conv1d(Shape in, int filters, int kernel_size, int stride) {
    return std::make_unique<Conv1d>(in, filters, kernel_size, stride);
}
LayerPtr make_transposed_conv1d(Shape in, int filters, int kernel_size, int stride) {
    return std::make_unique<TransposedConv1d>(in, filters, kernel_size, stride);
}
LayerPtr make_batch_norm(Shape in, double momentum) {
    return std::make_unique<BatchNorm>(in, momentum);
}
LayerPtr make_elu(Shape in, double alpha) { return std::make_unique<Elu>(in, alpha); }
LayerPtr make_relu(Shape in) { return std::make_unique<Relu>(in); }
LayerPtr make_max_pool1d(Shape in, int pool_size, int stride) {
    return std::make_unique<MaxPool1d>(in, pool_size, stride);
}
LayerPtr make_dense(Shape in, int units) { return std::make_unique<Dense>(in, units); }
LayerPtr make_softmax(Shape in) { return std::make_unique<Softmax>(in); }
LayerPtr make_sigmoid(Shape in) { return std::make_unique<Sigmoid>(in); }

LayerPtr layer_from_spec(const json& spec, Shape in) {
    const std::string kind = spec.at("kind").get<std::string>();
    if (kind == "conv1d")
        return make_conv1d(in, spec.at("filters"), spec.at("kernel_size"), spec.at("strides"));
    if (kind == "transposed_conv1d")
        return make_transposed_conv1d(in, spec.at("filters"), spec.at("kernel_size"),
                                      spec.at("strides"));
    if (kind == "batch_norm") return make_batch_norm(in, spec.at("momentum"));
    if (kind == "elu") return make_elu(in, spec.at("alpha"));
    if (kind == "relu") return make_relu(in);
    if (kind == "max_pool1d")
        return make_max_pool1d(in, spec.at("pool_size"), spec.at("strides"));
    if (kind == "dense") return make_dense(in, spec.at("units"));
    if (kind == "softmax") return make_softmax(in);
    if (kind == "sigmoid") return make_sigmoid(in);
    throw IoError("unknown layer kind '" + kind + "'");
}

} // namespace awa
