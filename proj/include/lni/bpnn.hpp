#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "lni/error.hpp"
#include "lni/rng.hpp"

namespace lni {

/// Training parameters for one network (Table-style defaults: MSE loss, SGD).
struct TrainConfig {
    std::size_t epochs = 1;
    double learning_rate = 0.01;
    std::size_t batch_size = 256;
    double target_error = 1e-12;
    double min_gradient = 1e-12;
    std::uint64_t seed = 0;

    void validate() const {
        if (epochs < 1) throw ConfigError("epochs must be >= 1");
        // learning_rate == 0 is allowed as a degenerate probe (no-op training).
        if (learning_rate < 0) throw ConfigError("learning rate must be >= 0");
        if (batch_size < 1) throw ConfigError("batch size must be >= 1");
        if (target_error < 0) throw ConfigError("target error must be >= 0");
        if (min_gradient < 0) throw ConfigError("min gradient must be >= 0");
    }
};

/// Contiguous set of (input vector, scalar label) training rows.
struct SampleSet {
    std::size_t dim = 0;
    std::vector<double> xs;      // row-major, size() * dim
    std::vector<double> labels;

    std::size_t size() const { return labels.size(); }

    void add(std::span<const double> x, double y) {
        if (dim == 0) dim = x.size();
        if (x.size() != dim) throw ConfigError("sample dimension mismatch");
        xs.insert(xs.end(), x.begin(), x.end());
        labels.push_back(y);
    }

    std::span<const double> x(std::size_t i) const { return {xs.data() + i * dim, dim}; }
};

/// Fixed-topology feed-forward network: one tanh hidden layer, linear output.
/// Weights are Glorot-uniform per seed, biases zero.
class Bpnn {
  public:
    Bpnn(std::size_t input_dim, std::size_t hidden_dim, std::size_t output_dim,
         std::uint64_t seed)
        : in_(input_dim), hid_(hidden_dim), out_(output_dim),
          w1_(hidden_dim * input_dim), b1_(hidden_dim),
          w2_(output_dim * hidden_dim), b2_(output_dim) {
        if (in_ < 1 || hid_ < 1 || out_ < 1) throw ConfigError("network dims must be >= 1");
        detail::Rng rng(seed);
        const double a1 = std::sqrt(6.0 / static_cast<double>(in_ + hid_));
        for (auto& w : w1_) w = rng.symmetric(a1);
        const double a2 = std::sqrt(6.0 / static_cast<double>(hid_ + out_));
        for (auto& w : w2_) w = rng.symmetric(a2);
    }

    std::size_t input_dim() const { return in_; }
    std::size_t hidden_dim() const { return hid_; }
    std::size_t output_dim() const { return out_; }

    std::span<const double> w1() const { return w1_; }
    std::span<const double> b1() const { return b1_; }
    std::span<const double> w2() const { return w2_; }
    std::span<const double> b2() const { return b2_; }
    std::span<double> w1() { return w1_; }
    std::span<double> b1() { return b1_; }
    std::span<double> w2() { return w2_; }
    std::span<double> b2() { return b2_; }

    std::size_t parameter_count() const {
        return w1_.size() + b1_.size() + w2_.size() + b2_.size();
    }

    /// Size of the stored parameters: every value is an 8-byte double.
    std::uint64_t size_bytes() const { return parameter_count() * 8; }

    /// Scalar forward pass (requires output_dim == 1): w2 . tanh(w1 x + b1) + b2.
    double forward(std::span<const double> x) const {
        if (x.size() != in_) throw ConfigError("forward input dimension mismatch");
        if (out_ != 1) throw ConfigError("scalar forward requires one output neuron");
        return forward_raw(x.data());
    }

    /// As forward(), without dimension checks; `x` must hold input_dim values.
    double forward_raw(const double* x) const {
        double acc = b2_[0];
        const double* w2p = w2_.data();
        for (std::size_t j = 0; j < hid_; ++j) {
            const double* row = w1_.data() + j * in_;
            double pre = b1_[j];
            for (std::size_t i = 0; i < in_; ++i) pre += row[i] * x[i];
            acc += w2p[j] * std::tanh(pre);
        }
        return acc;
    }

    /// Forward pass that also exposes the hidden activations (training path).
    double forward_hidden(const double* x, double* hidden) const {
        for (std::size_t j = 0; j < hid_; ++j) {
            const double* row = w1_.data() + j * in_;
            double pre = b1_[j];
            for (std::size_t i = 0; i < in_; ++i) pre += row[i] * x[i];
            hidden[j] = std::tanh(pre);
        }
        double acc = b2_[0];
        for (std::size_t j = 0; j < hid_; ++j) acc += w2_[j] * hidden[j];
        return acc;
    }

    bool parameters_finite() const {
        auto ok = [](const std::vector<double>& v) {
            return std::all_of(v.begin(), v.end(), [](double w) { return std::isfinite(w); });
        };
        return ok(w1_) && ok(b1_) && ok(w2_) && ok(b2_);
    }

  private:
    std::size_t in_, hid_, out_;
    std::vector<double> w1_;  // hidden x input, row-major
    std::vector<double> b1_;
    std::vector<double> w2_;  // output x hidden, row-major
    std::vector<double> b2_;
};

enum class StopReason { epochs, target_error, min_gradient };

struct TrainResult {
    double final_mse = 0;
    std::size_t epochs_run = 0;
    StopReason stop = StopReason::epochs;
};

namespace detail {

/// Gradient buffers matching a network's parameter layout.
struct Gradients {
    std::vector<double> w1, b1, w2, b2;

    explicit Gradients(const Bpnn& net)
        : w1(net.w1().size()), b1(net.b1().size()), w2(net.w2().size()), b2(net.b2().size()) {}

    void clear() {
        std::fill(w1.begin(), w1.end(), 0.0);
        std::fill(b1.begin(), b1.end(), 0.0);
        std::fill(w2.begin(), w2.end(), 0.0);
        std::fill(b2.begin(), b2.end(), 0.0);
    }

    double max_abs() const {
        auto m = [](const std::vector<double>& v) {
            double r = 0;
            for (double g : v) r = std::max(r, std::fabs(g));
            return r;
        };
        return std::max(std::max(m(w1), m(b1)), std::max(m(w2), m(b2)));
    }
};

/// Accumulates dLoss/dparam for one sample into `g`, where the per-sample loss
/// contribution is scale * (out - y)^2. Returns the unscaled squared error.
inline double backprop_accumulate(const Bpnn& net, const double* x, double y, double scale,
                                  Gradients& g, double* hidden_scratch) {
    const std::size_t in = net.input_dim();
    const std::size_t hid = net.hidden_dim();
    const double out = net.forward_hidden(x, hidden_scratch);
    const double err = out - y;
    const double dout = scale * 2.0 * err;
    g.b2[0] += dout;
    const auto w2 = net.w2();
    for (std::size_t j = 0; j < hid; ++j) {
        const double h = hidden_scratch[j];
        g.w2[j] += dout * h;
        const double dpre = dout * w2[j] * (1.0 - h * h);
        g.b1[j] += dpre;
        double* grow = g.w1.data() + j * in;
        for (std::size_t i = 0; i < in; ++i) grow[i] += dpre * x[i];
    }
    return err * err;
}

inline void apply_update(Bpnn& net, const Gradients& g, double lr) {
    auto step = [lr](std::span<double> p, const std::vector<double>& grad) {
        for (std::size_t i = 0; i < grad.size(); ++i) p[i] -= lr * grad[i];
    };
    step(net.w1(), g.w1);
    step(net.b1(), g.b1);
    step(net.w2(), g.w2);
    step(net.b2(), g.b2);
}

}  // namespace detail

/// Mean squared error of the network over a sample set.
inline double evaluate_mse(const Bpnn& net, const SampleSet& samples) {
    if (samples.size() == 0) throw ConfigError("empty sample set");
    double sum = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double e = net.forward_raw(samples.xs.data() + i * samples.dim) - samples.labels[i];
        sum += e * e;
    }
    return sum / static_cast<double>(samples.size());
}

/// Mini-batch SGD on MSE. Stops at cfg.epochs, or when the epoch MSE drops to
/// target_error, or when the largest gradient component seen in an epoch falls
/// to min_gradient. Deterministic per (net, samples, cfg).
/// Throws TrainingDiverged when a non-finite loss or parameter appears.
inline TrainResult train(Bpnn& net, const SampleSet& samples, const TrainConfig& cfg) {
    cfg.validate();
    if (samples.size() == 0) throw ConfigError("cannot train on an empty sample set");
    if (samples.dim != net.input_dim()) throw ConfigError("sample dimension mismatch");
    for (double y : samples.labels)
        if (!std::isfinite(y)) throw ConfigError("non-finite training label");

    const std::size_t n = samples.size();
    detail::Rng rng(cfg.seed);
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    detail::Gradients grads(net);
    std::vector<double> hidden(net.hidden_dim());

    TrainResult result;
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        // Fisher-Yates with our own bounded draw keeps the order reproducible.
        for (std::size_t i = n - 1; i > 0; --i)
            std::swap(order[i], order[rng.bounded(i + 1)]);

        double epoch_max_grad = 0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t bsz = std::min(cfg.batch_size, n - start);
            grads.clear();
            const double scale = 1.0 / static_cast<double>(bsz);
            double batch_loss = 0;
            for (std::size_t k = 0; k < bsz; ++k) {
                const std::uint32_t idx = order[start + k];
                batch_loss += detail::backprop_accumulate(
                    net, samples.xs.data() + idx * samples.dim, samples.labels[idx], scale,
                    grads, hidden.data());
            }
            if (!std::isfinite(batch_loss))
                throw TrainingDiverged("non-finite training loss", epoch);
            epoch_max_grad = std::max(epoch_max_grad, grads.max_abs());
            detail::apply_update(net, grads, cfg.learning_rate);
        }

        result.epochs_run = epoch;
        result.final_mse = evaluate_mse(net, samples);
        if (!std::isfinite(result.final_mse) || !net.parameters_finite())
            throw TrainingDiverged("non-finite parameters after update", epoch);
        if (result.final_mse <= cfg.target_error) {
            result.stop = StopReason::target_error;
            return result;
        }
        if (epoch_max_grad <= cfg.min_gradient) {
            result.stop = StopReason::min_gradient;
            return result;
        }
    }
    result.stop = StopReason::epochs;
    return result;
}

/// Max over parameters of |g_bp - g_fd| / max(1e-12, |g_bp| + |g_fd|), where
/// g_fd is the central finite difference of the squared-error loss at eps.
inline double gradient_check(const Bpnn& net, std::span<const double> x, double y, double eps) {
    if (!(eps > 0) || eps > 1e-3) throw ConfigError("eps must be in (0, 1e-3]");
    if (x.size() != net.input_dim()) throw ConfigError("sample dimension mismatch");

    Bpnn probe = net;
    detail::Gradients g(probe);
    std::vector<double> hidden(probe.hidden_dim());
    detail::backprop_accumulate(probe, x.data(), y, 1.0, g, hidden.data());

    auto loss = [&](const Bpnn& m) {
        const double e = m.forward_raw(x.data()) - y;
        return e * e;
    };

    double worst = 0;
    auto check_block = [&](std::span<double> params, const std::vector<double>& bp) {
        for (std::size_t i = 0; i < params.size(); ++i) {
            const double keep = params[i];
            params[i] = keep + eps;
            const double up = loss(probe);
            params[i] = keep - eps;
            const double down = loss(probe);
            params[i] = keep;
            const double fd = (up - down) / (2.0 * eps);
            const double rel =
                std::fabs(bp[i] - fd) / std::max(1e-12, std::fabs(bp[i]) + std::fabs(fd));
            worst = std::max(worst, rel);
        }
    };
    check_block(probe.w1(), g.w1);
    check_block(probe.b1(), g.b1);
    check_block(probe.w2(), g.w2);
    check_block(probe.b2(), g.b2);
    return worst;
}

}  // namespace lni
