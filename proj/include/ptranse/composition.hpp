#pragma once
// Path composition operators: p = r_1 o ... o r_l.
//
//   ADD  p = r_1 + ... + r_l
//   MUL  p = r_1 * ... * r_l           (elementwise)
//   RNN  c_1 = r_1, c_i = f(W [c_{i-1}; r_i]), p = c_l   with W of shape k x 2k

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ptranse/dense.hpp"

namespace ptranse {

enum class CompositionKind { add, mul, rnn };
enum class Activation { identity, tanh };

std::string_view to_string(CompositionKind kind);
std::string_view to_string(Activation activation);
CompositionKind parse_composition_kind(std::string_view text);
Activation parse_activation(std::string_view text);

class CompositionOp {
public:
    static CompositionOp add() { return CompositionOp(CompositionKind::add); }
    static CompositionOp mul() { return CompositionOp(CompositionKind::mul); }
    // W = [I | I] plus uniform noise in [-noise, noise].
    static CompositionOp rnn(std::size_t dim, Activation activation, std::uint64_t seed,
                             double noise = 0.01);
    static CompositionOp rnn(DenseMatrix weight, Activation activation);
    // ADD/MUL directly, RNN with its default initialization.
    static CompositionOp make(CompositionKind kind, std::size_t dim, std::uint64_t seed,
                              Activation activation = Activation::identity);

    CompositionKind kind() const noexcept { return kind_; }
    Activation activation() const noexcept { return activation_; }
    bool has_weight() const noexcept { return kind_ == CompositionKind::rnn; }

    const DenseMatrix& weight() const;
    DenseMatrix& weight();

    friend bool operator==(const CompositionOp&, const CompositionOp&) = default;

private:
    explicit CompositionOp(CompositionKind kind) : kind_(kind) {}

    CompositionKind kind_ = CompositionKind::add;
    Activation activation_ = Activation::identity;
    DenseMatrix weight_;
};

std::vector<double> compose(const CompositionOp& op, std::span<const VectorView> relations);

struct CompositionGradient {
    std::vector<std::vector<double>> relations;  // one per input vector
    std::optional<DenseMatrix> weight;           // RNN only
};

// Vector-Jacobian product of compose() with `upstream`.
CompositionGradient compose_gradient(const CompositionOp& op,
                                     std::span<const VectorView> relations,
                                     VectorView upstream);

}  // namespace ptranse
