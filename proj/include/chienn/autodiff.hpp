#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace chienn::ad {

// Dense row-major tensor. Every op checks its output for NaN/Inf.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::vector<std::size_t> s, std::vector<double> d);

    static Tensor vec(std::size_t n, double fill = 0.0);
    static Tensor mat(std::size_t rows, std::size_t cols, double fill = 0.0);

    std::size_t size() const { return data.size(); }
    std::size_t rows() const { return shape.at(0); }
    std::size_t cols() const { return shape.at(1); }
    double& operator[](std::size_t i) { return data[i]; }
    double operator[](std::size_t i) const { return data[i]; }
};

// Reverse-mode tape. Single-owner: one tape per forward/backward pass.
// Records values in evaluation order; backward() runs the recorded adjoint
// closures in reverse.
class Tape {
  public:
    using Var = int;

    Var leaf(Tensor t);

    // W [m,n] * x [n] + b [m]
    Var linear(Var W, Var b, Var x);
    Var elu(Var x);  // alpha = 1
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var scale(Var a, double s);
    Var sum(const std::vector<Var>& vs);       // elementwise, same shapes
    Var mean(const std::vector<Var>& vs);      // elementwise mean
    Var concat(const std::vector<Var>& vs);    // 1-D concatenation
    Var mul(Var a, Var b);                     // elementwise

    // log-sum-exp stabilized softmax cross-entropy, scalar output
    Var softmax_cross_entropy(Var logits, int label);
    // mean absolute error against a constant target, scalar output
    Var l1_loss(Var pred, const std::vector<double>& target);
    // layer normalization with learnable gain/bias, eps = 1e-5
    Var layer_norm(Var x, Var gain, Var bias);

    // Accumulates gradients of `out` (a scalar) into every recorded value.
    void backward(Var out);

    const Tensor& value(Var v) const;
    const Tensor& grad(Var v) const;
    std::size_t num_records() const { return nodes_.size(); }

  private:
    struct Node {
        Tensor value;
        Tensor grad;
        std::function<void(Tape&)> backprop;  // empty for leaves
    };
    std::vector<Node> nodes_;

    Var record(Tensor value, std::function<void(Tape&)> backprop);
    void check(Var v);
    Tensor& grad_mut(Var v) { return nodes_[v].grad; }
};

// Max relative error between reverse-mode gradients and central finite
// differences over all coordinates of `params`. `f` evaluates the scalar
// objective from the current parameter values; `analytic` holds the
// reverse-mode gradient per parameter, in the same layout.
double grad_check(const std::function<double()>& f, std::vector<Tensor*> params,
                  const std::vector<Tensor>& analytic, double h);

}  // namespace chienn::ad
