#ifndef SIGCLASS_DNN_HPP
#define SIGCLASS_DNN_HPP

// Three-layer fully connected network trained with Adam.
//
//   a1     = sigmoid(W1 x  + b1)      d -> d
//   a2     = sigmoid(W2 a1 + b2)      d -> d
//   logits =         W3 a2 + b3       d -> c
//
// Batches are column-major: one sample per column. The loss is the mean
// per-element sigmoid cross-entropy over batch x classes, so each output is
// an independent yes/no detector and "no detector fired" or "several fired"
// are possible outcomes (see predict()).

#include "sigclass/common.hpp"

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <random>

namespace sigclass {

template <typename Scalar>
using MatrixT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using VectorT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct LayerParams {
    MatrixT<Scalar> weight; // n x m
    VectorT<Scalar> bias;   // n

    Eigen::Index inputs() const { return weight.cols(); }
    Eigen::Index outputs() const { return weight.rows(); }
};

template <typename Scalar>
struct DnnParams {
    std::array<LayerParams<Scalar>, 3> layers;

    Eigen::Index input_dim() const { return layers[0].weight.cols(); }
    Eigen::Index num_classes() const { return layers[2].weight.rows(); }

    /// Same shapes, all zero. Also serves as the gradient container.
    DnnParams zeros_like() const {
        DnnParams z;
        for (std::size_t l = 0; l < 3; ++l) {
            z.layers[l].weight = MatrixT<Scalar>::Zero(layers[l].weight.rows(), layers[l].weight.cols());
            z.layers[l].bias = VectorT<Scalar>::Zero(layers[l].bias.size());
        }
        return z;
    }

    bool same_shape(const DnnParams& o) const {
        for (std::size_t l = 0; l < 3; ++l) {
            if (layers[l].weight.rows() != o.layers[l].weight.rows() ||
                layers[l].weight.cols() != o.layers[l].weight.cols() ||
                layers[l].bias.size() != o.layers[l].bias.size())
                return false;
        }
        return true;
    }

    bool operator==(const DnnParams& o) const {
        if (!same_shape(o)) return false;
        for (std::size_t l = 0; l < 3; ++l)
            if (layers[l].weight != o.layers[l].weight || layers[l].bias != o.layers[l].bias) return false;
        return true;
    }
};

template <typename Scalar>
using Gradients = DnnParams<Scalar>;

template <typename Scalar>
struct AdamState {
    DnnParams<Scalar> m;
    DnnParams<Scalar> v;
    long t = 0;
    Scalar alpha = Scalar(0.005);
    Scalar beta1 = Scalar(0.9);
    Scalar beta2 = Scalar(0.999);
    Scalar epsilon = Scalar(1e-8);

    static AdamState fresh(const DnnParams<Scalar>& p, Scalar learn_rate = Scalar(0.005)) {
        AdamState s;
        s.m = p.zeros_like();
        s.v = p.zeros_like();
        s.alpha = learn_rate;
        return s;
    }
};

/// Activations cached by forward() for backward().
template <typename Scalar>
struct ForwardTrace {
    MatrixT<Scalar> input;  // d x B
    MatrixT<Scalar> a1;     // d x B
    MatrixT<Scalar> a2;     // d x B
    MatrixT<Scalar> logits; // c x B
};

inline constexpr int kUnclassified = -1;

template <std::floating_point Scalar>
Scalar sigmoid(Scalar z) {
    if (z >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-z));
    const Scalar e = std::exp(z);
    return e / (Scalar(1) + e);
}

template <typename Derived>
auto sigmoid(const Eigen::MatrixBase<Derived>& z) {
    using Scalar = typename Derived::Scalar;
    return z.unaryExpr([](Scalar v) { return sigmoid(v); });
}

/// max(z,0) - z*y + log(1 + exp(-|z|)); finite for every finite z.
template <std::floating_point Scalar>
Scalar sigmoid_cross_entropy(Scalar z, Scalar y) {
    return std::max(z, Scalar(0)) - z * y + std::log1p(std::exp(-std::abs(z)));
}

/// Glorot-uniform weights, zero biases.
template <typename Scalar = double>
DnnParams<Scalar> init_network(Eigen::Index d, Eigen::Index c, std::uint64_t seed) {
    if (d < 1) throw ValidationError("init_network: input dimension must be >= 1");
    if (c < 2) throw ValidationError("init_network: need at least 2 classes");
    std::mt19937_64 rng(seed);
    const std::array<std::pair<Eigen::Index, Eigen::Index>, 3> shapes{{{d, d}, {d, d}, {c, d}}};
    DnnParams<Scalar> p;
    for (std::size_t l = 0; l < 3; ++l) {
        const auto [rows, cols] = shapes[l];
        const Scalar r = std::sqrt(Scalar(6) / static_cast<Scalar>(rows + cols));
        std::uniform_real_distribution<Scalar> dist(-r, r);
        auto& layer = p.layers[l];
        layer.weight.resize(rows, cols);
        // Row-major fill so the draw order matches the checkpoint layout.
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) layer.weight(i, j) = dist(rng);
        layer.bias = VectorT<Scalar>::Zero(rows);
    }
    return p;
}

template <typename Scalar, typename Derived>
ForwardTrace<Scalar> forward(const DnnParams<Scalar>& p, const Eigen::MatrixBase<Derived>& x) {
    if (x.rows() != p.input_dim())
        throw ValidationError("forward: input has " + std::to_string(x.rows()) + " features, network expects " +
                              std::to_string(p.input_dim()));
    if (!x.allFinite()) throw ValidationError("forward: non-finite input");
    const auto& [l1, l2, l3] = p.layers;
    ForwardTrace<Scalar> tr;
    tr.input = x;
    tr.a1 = sigmoid(MatrixT<Scalar>((l1.weight * tr.input).colwise() + l1.bias));
    tr.a2 = sigmoid(MatrixT<Scalar>((l2.weight * tr.a1).colwise() + l2.bias));
    tr.logits = (l3.weight * tr.a2).colwise() + l3.bias;
    return tr;
}

/// Mean sigmoid cross-entropy over every (class, sample) element.
template <typename Scalar>
Scalar loss(const MatrixT<Scalar>& logits, const MatrixT<Scalar>& targets) {
    if (logits.rows() != targets.rows() || logits.cols() != targets.cols())
        throw ValidationError("loss: logits and targets differ in shape");
    if (logits.size() == 0) throw ValidationError("loss: empty batch");
    if (!logits.allFinite()) throw NumericalError("loss: non-finite logits");
    Scalar sum(0);
    for (Eigen::Index j = 0; j < logits.cols(); ++j)
        for (Eigen::Index i = 0; i < logits.rows(); ++i) sum += sigmoid_cross_entropy(logits(i, j), targets(i, j));
    return sum / static_cast<Scalar>(logits.size());
}

/// Gradients of loss(forward(p, x).logits, targets) with respect to every parameter.
template <typename Scalar>
Gradients<Scalar> backward(const DnnParams<Scalar>& p, const ForwardTrace<Scalar>& tr,
                           const MatrixT<Scalar>& targets) {
    if (targets.rows() != tr.logits.rows() || targets.cols() != tr.logits.cols())
        throw ValidationError("backward: targets do not match the traced batch");
    const Scalar scale = Scalar(1) / static_cast<Scalar>(tr.logits.size());
    Gradients<Scalar> g;

    MatrixT<Scalar> delta = (sigmoid(tr.logits) - targets) * scale;
    g.layers[2].weight = delta * tr.a2.transpose();
    g.layers[2].bias = delta.rowwise().sum();

    delta = (p.layers[2].weight.transpose() * delta).cwiseProduct(tr.a2.cwiseProduct(
        (Scalar(1) - tr.a2.array()).matrix()));
    g.layers[1].weight = delta * tr.a1.transpose();
    g.layers[1].bias = delta.rowwise().sum();

    delta = (p.layers[1].weight.transpose() * delta).cwiseProduct(tr.a1.cwiseProduct(
        (Scalar(1) - tr.a1.array()).matrix()));
    g.layers[0].weight = delta * tr.input.transpose();
    g.layers[0].bias = delta.rowwise().sum();
    return g;
}

/// Bias-corrected Adam update of one parameter block. `t` is the step
/// number after incrementing (first step is 1).
template <typename Derived, typename G, typename M, typename V, typename Scalar>
void adam_update(Eigen::MatrixBase<Derived>& theta, const G& g, M& m, V& v, long t, Scalar alpha,
                 Scalar beta1 = Scalar(0.9), Scalar beta2 = Scalar(0.999), Scalar eps = Scalar(1e-8)) {
    const Scalar bias1 = Scalar(1) - std::pow(beta1, static_cast<Scalar>(t));
    const Scalar bias2 = Scalar(1) - std::pow(beta2, static_cast<Scalar>(t));
    m = beta1 * m + (Scalar(1) - beta1) * g;
    v = beta2 * v + (Scalar(1) - beta2) * g.cwiseAbs2();
    theta -= (alpha * (m.array() / bias1) / ((v.array() / bias2).sqrt() + eps)).matrix();
}

/// One bias-corrected Adam update of `p` in place; advances s.t.
template <typename Scalar>
void adam_step(DnnParams<Scalar>& p, const Gradients<Scalar>& g, AdamState<Scalar>& s) {
    if (!p.same_shape(g) || !p.same_shape(s.m) || !p.same_shape(s.v))
        throw ValidationError("adam_step: parameter, gradient and state shapes differ");
    if (s.t < 0) throw ValidationError("adam_step: negative step counter");
    s.t += 1;
    for (std::size_t l = 0; l < 3; ++l) {
        adam_update(p.layers[l].weight, g.layers[l].weight, s.m.layers[l].weight, s.v.layers[l].weight, s.t,
                    s.alpha, s.beta1, s.beta2, s.epsilon);
        adam_update(p.layers[l].bias, g.layers[l].bias, s.m.layers[l].bias, s.v.layers[l].bias, s.t, s.alpha,
                    s.beta1, s.beta2, s.epsilon);
    }
}

/// Class index whose rounded sigmoid output is the only 1, else kUnclassified.
template <typename Derived>
int decide(const Eigen::MatrixBase<Derived>& logits) {
    int hit = kUnclassified;
    for (Eigen::Index k = 0; k < logits.size(); ++k) {
        // sigmoid(z) >= 0.5 exactly when z >= 0
        if (logits[k] >= 0) {
            if (hit != kUnclassified) return kUnclassified;
            hit = static_cast<int>(k);
        }
    }
    return hit;
}

template <typename Scalar, typename Derived>
int predict(const DnnParams<Scalar>& p, const Eigen::MatrixBase<Derived>& x) {
    const auto tr = forward(p, x);
    return decide(tr.logits.col(0));
}

} // namespace sigclass

#endif // SIGCLASS_DNN_HPP
