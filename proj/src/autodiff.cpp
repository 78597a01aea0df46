#include "chienn/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace chienn::ad {

Tensor::Tensor(std::vector<std::size_t> s, std::vector<double> d)
    : shape(std::move(s)), data(std::move(d)) {
    std::size_t n = 1;
    for (auto dim : shape) n *= dim;
    if (n != data.size()) throw std::invalid_argument("Tensor: shape does not match data length");
}

Tensor Tensor::vec(std::size_t n, double fill) { return Tensor({n}, std::vector<double>(n, fill)); }
Tensor Tensor::mat(std::size_t rows, std::size_t cols, double fill) {
    return Tensor({rows, cols}, std::vector<double>(rows * cols, fill));
}

Tape::Var Tape::record(Tensor value, std::function<void(Tape&)> backprop) {
    Node n;
    n.grad = Tensor(value.shape, std::vector<double>(value.size(), 0.0));
    n.value = std::move(value);
    n.backprop = std::move(backprop);
    nodes_.push_back(std::move(n));
    Var v = static_cast<Var>(nodes_.size()) - 1;
    check(v);
    return v;
}

void Tape::check(Var v) {
    for (double x : nodes_[v].value.data)
        if (!std::isfinite(x))
            throw std::runtime_error("non-finite value produced at tape record " +
                                     std::to_string(v));
}

Tape::Var Tape::leaf(Tensor t) { return record(std::move(t), nullptr); }

const Tensor& Tape::value(Var v) const { return nodes_.at(v).value; }
const Tensor& Tape::grad(Var v) const { return nodes_.at(v).grad; }

Tape::Var Tape::linear(Var W, Var b, Var x) {
    const Tensor& w = value(W);
    const Tensor& bv = value(b);
    const Tensor& xv = value(x);
    if (w.shape.size() != 2 || w.cols() != xv.size() || w.rows() != bv.size())
        throw std::invalid_argument("linear: shape mismatch");
    std::size_t m = w.rows(), n = w.cols();
    Tensor out = Tensor::vec(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double* row = &w.data[i * n];
        double s = bv[i];
        for (std::size_t j = 0; j < n; ++j) s += row[j] * xv[j];
        out[i] = s;
    }
    Var self = static_cast<Var>(nodes_.size());
    return record(std::move(out), [self, W, b, x, m, n](Tape& t) {
        const auto& dy = t.grad(self).data;
        const auto& wv = t.value(W).data;
        const auto& xv2 = t.value(x).data;
        auto& dW = t.grad_mut(W).data;
        auto& db = t.grad_mut(b).data;
        auto& dx = t.grad_mut(x).data;
        for (std::size_t i = 0; i < m; ++i) {
            double g = dy[i];
            db[i] += g;
            const double* row = &wv[i * n];
            double* drow = &dW[i * n];
            for (std::size_t j = 0; j < n; ++j) {
                drow[j] += g * xv2[j];
                dx[j] += g * row[j];
            }
        }
    });
}

Tape::Var Tape::elu(Var x) {
    const Tensor& xv = value(x);
    Tensor out = xv;
    for (double& v : out.data) v = v >= 0 ? v : std::expm1(v);
    Var self = static_cast<Var>(nodes_.size());
    return record(std::move(out), [self, x](Tape& t) {
        const auto& dy = t.grad(self).data;
        const auto& xv2 = t.value(x).data;
        auto& dx = t.grad_mut(x).data;
        for (std::size_t i = 0; i < dx.size(); ++i)
            dx[i] += dy[i] * (xv2[i] >= 0 ? 1.0 : std::exp(xv2[i]));
    });
}

Tape::Var Tape::add(Var a, Var b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    if (av.shape != bv.shape) throw std::invalid_argument("add: shape mismatch");
    Tensor out = av;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
    Var self = static_cast<Var>(nodes_.size());
    return record(std::move(out), [self, a, b](Tape& t) {
        const auto& dy = t.grad(self).data;
        auto& da = t.grad_mut(a).data;
        auto& db = t.grad_mut(b).data;
        for (std::size_t i = 0; i < dy.size(); ++i) {
            da[i] += dy[i];
            db[i] += dy[i];
        }
    });
}

Tape::Var Tape::sub(Var a, Var b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    if (av.shape != bv.shape) throw std::invalid_argument("sub: shape mismatch");
    Tensor out = av;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
    Var self = static_cast<Var>(nodes_.size());
    return record(std::move(out), [self, a, b](Tape& t) {
        const auto& dy = t.grad(self).data;
        auto& da = t.grad_mut(a).data;
        auto& db = t.grad_mut(b).data;
        for (std::size_t i = 0; i < dy.size(); ++i) {
            da[i] += dy[i];
            db[i] -= dy[i];
        }
    });
}

Tape::Var Tape::scale(Var a, double s) {
    Tensor out = value(a);
    for (double& v : out.data) v *= s;
    Var self = static_cast<Var>(nodes_.size());
    return record(std::move(out), [self, a, s](Tape& t) {
        const auto& dy = t.grad(self).data;
        auto& da = t.grad_mut(a).data;
        for (std::size_t i = 0; i < dy.size(); ++i) da[i] += s * dy[i];
    });
}

Tape::Var Tape::mul(Var a, Var b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    if (av.shape != bv.shape) throw std::invalid_argument("mul: shape mismatch");
    Tensor out = av;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
    Var self = static_cast<Var>(nodes_.size());
    return record(std::move(out), [self, a, b](Tape& t) {
        const auto& dy = t.grad(self).data;
        const auto& av2 = t.value(a).data;
        const auto& bv2 = t.value(b).data;
        auto& da = t.grad_mut(a).data;
        auto& db = t.grad_mut(b).data;
        for (std::size_t i = 0; i < dy.size(); ++i) {
            da[i] += dy[i] * bv2[i];
            db[i] += dy[i] * av2[i];
        }
    });
}

Tape::Var Tape::sum(const std::vector<Var>& vs) {
    if (vs.empty()) throw std::invalid_argument("sum: empty operand list");
    Tensor out = value(vs[0]);
    for (std::size_t k = 1; k < vs.size(); ++k) {
        const Tensor& v = value(vs[k]);
        if (v.shape != out.shape) throw std::invalid_argument("sum: shape mismatch");
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i];
    }
    Var self = static_cast<Var>(nodes_.size());
    return record(std::move(out), [self, vs](Tape& t) {
        const auto& dy = t.grad(self).data;
        for (Var v : vs) {
            auto& dv = t.grad_mut(v).data;
            for (std::size_t i = 0; i < dy.size(); ++i) dv[i] += dy[i];
        }
    });
}

Tape::Var Tape::mean(const std::vector<Var>& vs) {
    return scale(sum(vs), 1.0 / static_cast<double>(vs.size()));
}

Tape::Var Tape::concat(const std::vector<Var>& vs) {
    std::size_t n = 0;
    for (Var v : vs) n += value(v).size();
    Tensor out = Tensor::vec(n);
    std::size_t off = 0;
    for (Var v : vs) {
        const auto& d = value(v).data;
        std::copy(d.begin(), d.end(), out.data.begin() + off);
        off += d.size();
    }
    Var self = static_cast<Var>(nodes_.size());
    return record(std::move(out), [self, vs](Tape& t) {
        const auto& dy = t.grad(self).data;
        std::size_t off2 = 0;
        for (Var v : vs) {
            auto& dv = t.grad_mut(v).data;
            for (std::size_t i = 0; i < dv.size(); ++i) dv[i] += dy[off2 + i];
            off2 += dv.size();
        }
    });
}

Tape::Var Tape::softmax_cross_entropy(Var logits, int label) {
    const Tensor& z = value(logits);
    if (label < 0 || label >= static_cast<int>(z.size()))
        throw std::invalid_argument("softmax_cross_entropy: label out of range");
    double zmax = *std::max_element(z.data.begin(), z.data.end());
    double lse = 0;
    for (double v : z.data) lse += std::exp(v - zmax);
    lse = zmax + std::log(lse);
    Tensor out = Tensor::vec(1, lse - z[label]);
    Var self = static_cast<Var>(nodes_.size());
    return record(std::move(out), [self, logits, label, zmax, lse](Tape& t) {
        double g = t.grad(self).data[0];
        const auto& z2 = t.value(logits).data;
        auto& dz = t.grad_mut(logits).data;
        for (std::size_t i = 0; i < z2.size(); ++i) {
            double p = std::exp(z2[i] - lse);
            dz[i] += g * (p - (static_cast<int>(i) == label ? 1.0 : 0.0));
        }
        (void)zmax;
    });
}

Tape::Var Tape::l1_loss(Var pred, const std::vector<double>& target) {
    const Tensor& p = value(pred);
    if (p.size() != target.size()) throw std::invalid_argument("l1_loss: shape mismatch");
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - target[i]);
    Tensor out = Tensor::vec(1, s / static_cast<double>(p.size()));
    Var self = static_cast<Var>(nodes_.size());
    return record(std::move(out), [self, pred, target](Tape& t) {
        double g = t.grad(self).data[0] / static_cast<double>(target.size());
        const auto& p2 = t.value(pred).data;
        auto& dp = t.grad_mut(pred).data;
        for (std::size_t i = 0; i < p2.size(); ++i) {
            double d = p2[i] - target[i];
            dp[i] += g * (d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0));
        }
    });
}

Tape::Var Tape::layer_norm(Var x, Var gain, Var bias) {
    const Tensor& xv = value(x);
    std::size_t n = xv.size();
    if (value(gain).size() != n || value(bias).size() != n)
        throw std::invalid_argument("layer_norm: shape mismatch");
    constexpr double eps = 1e-5;
    double mu = std::accumulate(xv.data.begin(), xv.data.end(), 0.0) / n;
    double var = 0;
    for (double v : xv.data) var += (v - mu) * (v - mu);
    var /= n;
    double inv = 1.0 / std::sqrt(var + eps);
    Tensor out = Tensor::vec(n);
    const auto& gv = value(gain).data;
    const auto& bv = value(bias).data;
    for (std::size_t i = 0; i < n; ++i) out[i] = gv[i] * (xv[i] - mu) * inv + bv[i];
    Var self = static_cast<Var>(nodes_.size());
    return record(std::move(out), [self, x, gain, bias, mu, inv, n](Tape& t) {
        const auto& dy = t.grad(self).data;
        const auto& xv2 = t.value(x).data;
        const auto& gv2 = t.value(gain).data;
        auto& dx = t.grad_mut(x).data;
        auto& dg = t.grad_mut(gain).data;
        auto& db = t.grad_mut(bias).data;
        // dxhat_i = dy_i * g_i; standard layer-norm adjoint
        double sum_dxhat = 0, sum_dxhat_xhat = 0;
        std::vector<double> xhat(n), dxhat(n);
        for (std::size_t i = 0; i < n; ++i) {
            xhat[i] = (xv2[i] - mu) * inv;
            dxhat[i] = dy[i] * gv2[i];
            sum_dxhat += dxhat[i];
            sum_dxhat_xhat += dxhat[i] * xhat[i];
            dg[i] += dy[i] * xhat[i];
            db[i] += dy[i];
        }
        for (std::size_t i = 0; i < n; ++i)
            dx[i] += inv * (dxhat[i] - sum_dxhat / n - xhat[i] * sum_dxhat_xhat / n);
    });
}

void Tape::backward(Var out) {
    if (out < 0 || out >= static_cast<Var>(nodes_.size()))
        throw std::invalid_argument("backward: unrecorded value");
    if (nodes_[out].value.size() != 1)
        throw std::invalid_argument("backward: output must be a scalar");
    nodes_[out].grad.data[0] = 1.0;
    for (Var v = out; v >= 0; --v)
        if (nodes_[v].backprop) nodes_[v].backprop(*this);
    for (const auto& n : nodes_)
        for (double g : n.grad.data)
            if (!std::isfinite(g)) throw std::runtime_error("non-finite gradient");
}

double grad_check(const std::function<double()>& f, std::vector<Tensor*> params,
                  const std::vector<Tensor>& analytic, double h) {
    if (h < 1e-6 || h > 1e-3) throw std::invalid_argument("grad_check: h outside [1e-6, 1e-3]");
    if (params.size() != analytic.size())
        throw std::invalid_argument("grad_check: parameter/gradient count mismatch");
    double max_rel = 0;
    for (std::size_t p = 0; p < params.size(); ++p) {
        Tensor& t = *params[p];
        for (std::size_t i = 0; i < t.size(); ++i) {
            double saved = t[i];
            t[i] = saved + h;
            double fp = f();
            t[i] = saved - h;
            double fm = f();
            t[i] = saved;
            if (!std::isfinite(fp) || !std::isfinite(fm))
                throw std::runtime_error("grad_check: non-finite function value");
            double numeric = (fp - fm) / (2 * h);
            double a = analytic[p][i];
            double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
            max_rel = std::max(max_rel, std::abs(a - numeric) / denom);
        }
    }
    return max_rel;
}

}  // namespace chienn::ad
