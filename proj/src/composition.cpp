#include "ptranse/composition.hpp"

#include <cmath>
#include <random>
#include <string>

#include "ptranse/types.hpp"

namespace ptranse {

std::string_view to_string(CompositionKind kind) {
    switch (kind) {
        case CompositionKind::add: return "add";
        case CompositionKind::mul: return "mul";
        case CompositionKind::rnn: return "rnn";
    }
    return "?";
}

std::string_view to_string(Activation activation) {
    return activation == Activation::tanh ? "tanh" : "identity";
}

CompositionKind parse_composition_kind(std::string_view text) {
    if (text == "add") return CompositionKind::add;
    if (text == "mul") return CompositionKind::mul;
    if (text == "rnn") return CompositionKind::rnn;
    throw Error("unknown composition operator: " + std::string(text));
}

Activation parse_activation(std::string_view text) {
    if (text == "identity") return Activation::identity;
    if (text == "tanh") return Activation::tanh;
    throw Error("unknown activation: " + std::string(text));
}

CompositionOp CompositionOp::rnn(std::size_t dim, Activation activation, std::uint64_t seed,
                                 double noise) {
    if (dim == 0) throw Error("RNN composition needs a positive dimension");
    DenseMatrix w(dim, 2 * dim);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-noise, noise);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < 2 * dim; ++j) {
            const double base = (j == i || j == i + dim) ? 1.0 : 0.0;
            w(i, j) = base + (noise > 0.0 ? jitter(rng) : 0.0);
        }
    }
    return rnn(std::move(w), activation);
}

CompositionOp CompositionOp::rnn(DenseMatrix weight, Activation activation) {
    if (weight.rows() == 0 || weight.cols() != 2 * weight.rows())
        throw Error("RNN weight must have shape k x 2k");
    CompositionOp op(CompositionKind::rnn);
    op.activation_ = activation;
    op.weight_ = std::move(weight);
    return op;
}

CompositionOp CompositionOp::make(CompositionKind kind, std::size_t dim, std::uint64_t seed,
                                  Activation activation) {
    switch (kind) {
        case CompositionKind::add: return add();
        case CompositionKind::mul: return mul();
        case CompositionKind::rnn: return rnn(dim, activation, seed);
    }
    throw Error("unknown composition operator");
}

const DenseMatrix& CompositionOp::weight() const {
    if (!has_weight()) throw Error("composition operator has no weight matrix");
    return weight_;
}

DenseMatrix& CompositionOp::weight() {
    if (!has_weight()) throw Error("composition operator has no weight matrix");
    return weight_;
}

namespace {

std::size_t check_shapes(const CompositionOp& op, std::span<const VectorView> relations) {
    if (relations.empty()) throw Error("cannot compose an empty path");
    const std::size_t k = relations.front().size();
    for (const auto& r : relations)
        if (r.size() != k) throw Error("relation vectors differ in dimension");
    if (op.has_weight() && op.weight().rows() != k)
        throw Error("RNN weight does not match relation dimension");
    return k;
}

// z = W [c; r]
std::vector<double> rnn_preactivation(const DenseMatrix& w, VectorView c, VectorView r) {
    const std::size_t k = c.size();
    std::vector<double> z(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        auto row = w.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < k; ++j) acc += row[j] * c[j];
        for (std::size_t j = 0; j < k; ++j) acc += row[k + j] * r[j];
        z[i] = acc;
    }
    return z;
}

void activate(Activation f, std::vector<double>& z) {
    if (f == Activation::tanh)
        for (auto& v : z) v = std::tanh(v);
}

// Hidden states c_1..c_l and pre-activations z_2..z_l (index-aligned with c).
struct RnnTrace {
    std::vector<std::vector<double>> hidden;
    std::vector<std::vector<double>> pre;
};

RnnTrace rnn_forward(const CompositionOp& op, std::span<const VectorView> relations) {
    RnnTrace trace;
    trace.hidden.emplace_back(relations[0].begin(), relations[0].end());
    trace.pre.emplace_back();
    for (std::size_t i = 1; i < relations.size(); ++i) {
        auto z = rnn_preactivation(op.weight(), trace.hidden.back(), relations[i]);
        auto c = z;
        activate(op.activation(), c);
        trace.pre.push_back(std::move(z));
        trace.hidden.push_back(std::move(c));
    }
    return trace;
}

}  // namespace

std::vector<double> compose(const CompositionOp& op, std::span<const VectorView> relations) {
    const std::size_t k = check_shapes(op, relations);
    switch (op.kind()) {
        case CompositionKind::add: {
            std::vector<double> p(k, 0.0);
            for (const auto& r : relations)
                for (std::size_t j = 0; j < k; ++j) p[j] += r[j];
            return p;
        }
        case CompositionKind::mul: {
            std::vector<double> p(relations[0].begin(), relations[0].end());
            for (std::size_t i = 1; i < relations.size(); ++i)
                for (std::size_t j = 0; j < k; ++j) p[j] *= relations[i][j];
            return p;
        }
        case CompositionKind::rnn: return rnn_forward(op, relations).hidden.back();
    }
    throw Error("unknown composition operator");
}

CompositionGradient compose_gradient(const CompositionOp& op,
                                     std::span<const VectorView> relations,
                                     VectorView upstream) {
    const std::size_t k = check_shapes(op, relations);
    if (upstream.size() != k) throw Error("upstream gradient has wrong dimension");
    const std::size_t n = relations.size();

    CompositionGradient grad;
    grad.relations.assign(n, std::vector<double>(k, 0.0));

    switch (op.kind()) {
        case CompositionKind::add:
            for (auto& g : grad.relations) g.assign(upstream.begin(), upstream.end());
            break;
        case CompositionKind::mul:
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < k; ++j) {
                    double others = upstream[j];
                    for (std::size_t m = 0; m < n; ++m)
                        if (m != i) others *= relations[m][j];
                    grad.relations[i][j] = others;
                }
            }
            break;
        case CompositionKind::rnn: {
            const auto& w = op.weight();
            auto trace = rnn_forward(op, relations);
            DenseMatrix dw(k, 2 * k);
            std::vector<double> dc(upstream.begin(), upstream.end());
            for (std::size_t i = n - 1; i >= 1; --i) {
                std::vector<double> dz = dc;
                if (op.activation() == Activation::tanh)
                    for (std::size_t j = 0; j < k; ++j)
                        dz[j] *= 1.0 - trace.hidden[i][j] * trace.hidden[i][j];
                const auto& prev = trace.hidden[i - 1];
                const auto& r = relations[i];
                std::vector<double> dprev(k, 0.0);
                for (std::size_t a = 0; a < k; ++a) {
                    if (dz[a] == 0.0) continue;
                    auto wrow = w.row(a);
                    auto grow = dw.row(a);
                    for (std::size_t b = 0; b < k; ++b) {
                        grow[b] += dz[a] * prev[b];
                        grow[k + b] += dz[a] * r[b];
                        dprev[b] += wrow[b] * dz[a];
                        grad.relations[i][b] += wrow[k + b] * dz[a];
                    }
                }
                dc = std::move(dprev);
            }
            for (std::size_t j = 0; j < k; ++j) grad.relations[0][j] += dc[j];
            grad.weight = std::move(dw);
            break;
        }
    }
    return grad;
}

}  // namespace ptranse
