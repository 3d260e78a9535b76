// Dense tensors with tape-based reverse-mode autodiff.
//
// Tensors are shared_ptr graph nodes. Ops record themselves on the
// thread-local active Tape (if any input wants gradients); Tape::backward
// replays the recorded ops in reverse execution order, which is a reverse
// topological order by construction. GEMM inner kernels are Eigen maps over
// the tensors' own contiguous buffers; everything else is plain loops.
//
// Instantiated with S = double (training, tests) or S = float (speed mode).
#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "matter/error.hpp"
#include "matter/rng.hpp"

namespace matter {

template <class S>
struct TensorNode;

template <class S>
using TensorPtr = std::shared_ptr<TensorNode<S>>;

template <class S>
using GradMap = std::unordered_map<std::string, std::vector<S>>;

template <class S>
struct TensorNode {
    std::vector<int> shape;   // empty shape == scalar
    std::vector<S> value;
    std::vector<S> grad;      // allocated on first accumulation
    bool requires_grad = false;
    std::string name;         // set for named parameters only

    std::vector<TensorPtr<S>> parents;
    std::function<void(TensorNode<S>&, GradMap<S>*)> backward_fn;

    int64_t numel() const {
        int64_t n = 1;
        for (int d : shape) n *= d;
        return n;
    }
    bool is_scalar() const { return shape.empty(); }
    int rows() const { return shape.size() == 2 ? shape[0] : (shape.size() == 1 ? 1 : -1); }
    int cols() const { return shape.size() == 2 ? shape[1] : (shape.size() == 1 ? shape[0] : -1); }
    S scalar() const { return value[0]; }
    bool is_leaf() const { return !backward_fn; }
};

template <class S>
class Tape {
  public:
    void record(const TensorPtr<S>& node) { nodes_.push_back(node); }
    size_t size() const { return nodes_.size(); }

    // Seeds d(loss)/d(loss) = seed and pulls gradients back through every
    // recorded op exactly once. Leaf gradients go into `sink` (keyed by
    // parameter name) when given, else into each leaf's grad buffer.
    void backward(const TensorPtr<S>& loss, S seed = S(1), GradMap<S>* sink = nullptr) {
        if (!loss->is_scalar())
            throw InputError("backward: loss must be a scalar tensor");
        if (loss->grad.empty()) loss->grad.assign(1, S(0));
        loss->grad[0] += seed;
        for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
            TensorNode<S>& n = **it;
            if (n.backward_fn && !n.grad.empty()) n.backward_fn(n, sink);
        }
    }

    static Tape<S>*& current() {
        thread_local Tape<S>* tape = nullptr;
        return tape;
    }

  private:
    std::vector<TensorPtr<S>> nodes_;
};

// RAII activation of a tape on the current thread.
template <class S>
class TapeScope {
  public:
    explicit TapeScope(Tape<S>& tape) : prev_(Tape<S>::current()) { Tape<S>::current() = &tape; }
    ~TapeScope() { Tape<S>::current() = prev_; }
    TapeScope(const TapeScope&) = delete;
    TapeScope& operator=(const TapeScope&) = delete;

  private:
    Tape<S>* prev_;
};

namespace detail {

template <class S>
using EMat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class S>
using EMap = Eigen::Map<EMat<S>>;
template <class S>
using ECMap = Eigen::Map<const EMat<S>>;

template <class S>
EMap<S> as_mat(std::vector<S>& buf, int r, int c) {
    return EMap<S>(buf.data(), r, c);
}
template <class S>
ECMap<S> as_mat(const std::vector<S>& buf, int r, int c) {
    return ECMap<S>(buf.data(), r, c);
}

// Gradient buffer for `t`: routes named-leaf gradients into the sink when
// one is active so parameter tensors can stay read-only across worker tapes.
template <class S>
std::vector<S>& grad_buf(TensorNode<S>& t, GradMap<S>* sink) {
    if (sink && t.is_leaf() && !t.name.empty()) {
        auto& g = (*sink)[t.name];
        if (g.empty()) g.assign(static_cast<size_t>(t.numel()), S(0));
        return g;
    }
    if (t.grad.empty()) t.grad.assign(static_cast<size_t>(t.numel()), S(0));
    return t.grad;
}

template <class S>
void require_rank2(const TensorPtr<S>& t, const char* op) {
    if (t->shape.size() != 2) throw ShapeError(std::string(op) + ": expected a rank-2 tensor");
}

}  // namespace detail

template <class S>
TensorPtr<S> make_tensor(std::vector<int> shape, std::vector<S> data, bool requires_grad = false) {
    auto t = std::make_shared<TensorNode<S>>();
    int64_t n = 1;
    for (int d : shape) {
        if (d < 0) throw ShapeError("make_tensor: negative dimension");
        n *= d;
    }
    if (n != static_cast<int64_t>(data.size()))
        throw ShapeError("make_tensor: shape/data size mismatch");
    t->shape = std::move(shape);
    t->value = std::move(data);
    t->requires_grad = requires_grad;
    return t;
}

template <class S>
TensorPtr<S> zeros(std::vector<int> shape, bool requires_grad = false) {
    int64_t n = 1;
    for (int d : shape) n *= d;
    return make_tensor<S>(std::move(shape), std::vector<S>(n, S(0)), requires_grad);
}

template <class S>
TensorPtr<S> full(std::vector<int> shape, S v, bool requires_grad = false) {
    int64_t n = 1;
    for (int d : shape) n *= d;
    return make_tensor<S>(std::move(shape), std::vector<S>(n, v), requires_grad);
}

template <class S>
TensorPtr<S> scalar_tensor(S v, bool requires_grad = false) {
    return make_tensor<S>({}, std::vector<S>{v}, requires_grad);
}

template <class S>
TensorPtr<S> randn(std::vector<int> shape, Rng& rng, double stddev, bool requires_grad = false) {
    int64_t n = 1;
    for (int d : shape) n *= d;
    std::vector<S> data(n);
    for (auto& x : data) x = static_cast<S>(rng.next_normal() * stddev);
    return make_tensor<S>(std::move(shape), std::move(data), requires_grad);
}

namespace detail {

// Finalizes an op node: records it on the active tape when gradients are
// wanted, otherwise drops the graph edges so inference carries no overhead.
template <class S>
void finish_op(const TensorPtr<S>& out, std::vector<TensorPtr<S>> parents,
               std::function<void(TensorNode<S>&, GradMap<S>*)> backward) {
    Tape<S>* tape = Tape<S>::current();
    bool need = false;
    if (tape)
        for (const auto& p : parents)
            if (p->requires_grad) need = true;
    if (!need) return;
    out->requires_grad = true;
    out->parents = std::move(parents);
    out->backward_fn = std::move(backward);
    tape->record(out);
}

}  // namespace detail

// out[m,n] = a[m,k] * b[k,n]
template <class S>
TensorPtr<S> matmul(const TensorPtr<S>& a, const TensorPtr<S>& b) {
    detail::require_rank2(a, "matmul");
    detail::require_rank2(b, "matmul");
    int m = a->shape[0], k = a->shape[1], k2 = b->shape[0], n = b->shape[1];
    if (k != k2)
        throw ShapeError("matmul: inner dimensions differ (" + std::to_string(k) + " vs " +
                         std::to_string(k2) + ")");
    auto out = zeros<S>({m, n});
    detail::as_mat(out->value, m, n).noalias() =
        detail::as_mat(a->value, m, k) * detail::as_mat(b->value, k, n);
    detail::finish_op<S>(out, {a, b}, [a, b, m, k, n](TensorNode<S>& self, GradMap<S>* sink) {
        auto g = detail::as_mat(self.grad, m, n);
        if (a->requires_grad)
            detail::as_mat(detail::grad_buf(*a, sink), m, k).noalias() +=
                g * detail::as_mat(b->value, k, n).transpose();
        if (b->requires_grad)
            detail::as_mat(detail::grad_buf(*b, sink), k, n).noalias() +=
                detail::as_mat(a->value, m, k).transpose() * g;
    });
    return out;
}

// out[m,n] = a[m,k] * b[n,k]^T  (attention scores)
template <class S>
TensorPtr<S> matmul_nt(const TensorPtr<S>& a, const TensorPtr<S>& b) {
    detail::require_rank2(a, "matmul_nt");
    detail::require_rank2(b, "matmul_nt");
    int m = a->shape[0], k = a->shape[1], n = b->shape[0];
    if (k != b->shape[1]) throw ShapeError("matmul_nt: inner dimensions differ");
    auto out = zeros<S>({m, n});
    detail::as_mat(out->value, m, n).noalias() =
        detail::as_mat(a->value, m, k) * detail::as_mat(b->value, n, k).transpose();
    detail::finish_op<S>(out, {a, b}, [a, b, m, k, n](TensorNode<S>& self, GradMap<S>* sink) {
        auto g = detail::as_mat(self.grad, m, n);
        if (a->requires_grad)
            detail::as_mat(detail::grad_buf(*a, sink), m, k).noalias() +=
                g * detail::as_mat(b->value, n, k);
        if (b->requires_grad)
            detail::as_mat(detail::grad_buf(*b, sink), n, k).noalias() +=
                g.transpose() * detail::as_mat(a->value, m, k);
    });
    return out;
}

template <class S>
TensorPtr<S> add(const TensorPtr<S>& a, const TensorPtr<S>& b) {
    if (a->shape != b->shape) throw ShapeError("add: shape mismatch");
    auto out = zeros<S>(a->shape);
    const size_t n = a->value.size();
    for (size_t i = 0; i < n; ++i) out->value[i] = a->value[i] + b->value[i];
    detail::finish_op<S>(out, {a, b}, [a, b](TensorNode<S>& self, GradMap<S>* sink) {
        for (const auto& p : {a, b}) {
            if (!p->requires_grad) continue;
            auto& g = detail::grad_buf(*p, sink);
            for (size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
        }
    });
    return out;
}

template <class S>
TensorPtr<S> scale(const TensorPtr<S>& a, S s) {
    auto out = zeros<S>(a->shape);
    for (size_t i = 0; i < a->value.size(); ++i) out->value[i] = a->value[i] * s;
    detail::finish_op<S>(out, {a}, [a, s](TensorNode<S>& self, GradMap<S>* sink) {
        if (!a->requires_grad) return;
        auto& g = detail::grad_buf(*a, sink);
        for (size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * s;
    });
    return out;
}

// Hadamard product.
template <class S>
TensorPtr<S> mul(const TensorPtr<S>& a, const TensorPtr<S>& b) {
    if (a->shape != b->shape) throw ShapeError("mul: shape mismatch");
    auto out = zeros<S>(a->shape);
    for (size_t i = 0; i < a->value.size(); ++i) out->value[i] = a->value[i] * b->value[i];
    detail::finish_op<S>(out, {a, b}, [a, b](TensorNode<S>& self, GradMap<S>* sink) {
        if (a->requires_grad) {
            auto& g = detail::grad_buf(*a, sink);
            for (size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * b->value[i];
        }
        if (b->requires_grad) {
            auto& g = detail::grad_buf(*b, sink);
            for (size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * a->value[i];
        }
    });
    return out;
}

template <class S>
TensorPtr<S> relu(const TensorPtr<S>& a) {
    auto out = zeros<S>(a->shape);
    for (size_t i = 0; i < a->value.size(); ++i)
        out->value[i] = a->value[i] > S(0) ? a->value[i] : S(0);
    detail::finish_op<S>(out, {a}, [a](TensorNode<S>& self, GradMap<S>* sink) {
        if (!a->requires_grad) return;
        auto& g = detail::grad_buf(*a, sink);
        for (size_t i = 0; i < self.grad.size(); ++i)
            if (a->value[i] > S(0)) g[i] += self.grad[i];
    });
    return out;
}

template <class S>
TensorPtr<S> sum(const TensorPtr<S>& a) {
    S acc = S(0);
    for (S v : a->value) acc += v;
    auto out = scalar_tensor<S>(acc);
    detail::finish_op<S>(out, {a}, [a](TensorNode<S>& self, GradMap<S>* sink) {
        if (!a->requires_grad) return;
        auto& g = detail::grad_buf(*a, sink);
        for (size_t i = 0; i < g.size(); ++i) g[i] += self.grad[0];
    });
    return out;
}

// Softmax along `axis`, stabilized by max-subtraction. Slices sum to 1.
template <class S>
TensorPtr<S> softmax(const TensorPtr<S>& a, int axis) {
    const int rank = static_cast<int>(a->shape.size());
    if (axis < 0) axis += rank;
    if (rank == 0 || axis < 0 || axis >= rank) throw ShapeError("softmax: invalid axis");
    for (S v : a->value)
        if (std::isnan(v)) throw NumericError("softmax: NaN in input");

    int64_t outer = 1, inner = 1;
    const int n = a->shape[axis];
    for (int i = 0; i < axis; ++i) outer *= a->shape[i];
    for (int i = axis + 1; i < rank; ++i) inner *= a->shape[i];

    auto out = zeros<S>(a->shape);
    for (int64_t o = 0; o < outer; ++o) {
        for (int64_t in = 0; in < inner; ++in) {
            const int64_t base = o * n * inner + in;
            S mx = a->value[base];
            for (int i = 1; i < n; ++i) mx = std::max(mx, a->value[base + i * inner]);
            S z = S(0);
            for (int i = 0; i < n; ++i) {
                S e = std::exp(a->value[base + i * inner] - mx);
                out->value[base + i * inner] = e;
                z += e;
            }
            for (int i = 0; i < n; ++i) out->value[base + i * inner] /= z;
        }
    }
    detail::finish_op<S>(out, {a}, [a, outer, inner, n](TensorNode<S>& self, GradMap<S>* sink) {
        if (!a->requires_grad) return;
        auto& g = detail::grad_buf(*a, sink);
        for (int64_t o = 0; o < outer; ++o) {
            for (int64_t in = 0; in < inner; ++in) {
                const int64_t base = o * n * inner + in;
                S dot = S(0);
                for (int i = 0; i < n; ++i)
                    dot += self.grad[base + i * inner] * self.value[base + i * inner];
                for (int i = 0; i < n; ++i) {
                    const int64_t ix = base + i * inner;
                    g[ix] += self.value[ix] * (self.grad[ix] - dot);
                }
            }
        }
    });
    return out;
}

inline constexpr double kRmsNormEps = 1e-6;

// y = x / sqrt(mean(x^2) + eps) * gain, per last-axis slice.
template <class S>
TensorPtr<S> rms_norm(const TensorPtr<S>& x, const TensorPtr<S>& gain) {
    if (x->shape.empty()) throw ShapeError("rms_norm: scalar input");
    const int d = x->shape.back();
    if (gain->shape.size() != 1 || gain->shape[0] != d)
        throw ShapeError("rms_norm: gain length must equal last dim");
    const int64_t rows = x->numel() / d;
    auto out = zeros<S>(x->shape);
    std::vector<S> inv_rms(rows);
    for (int64_t r = 0; r < rows; ++r) {
        const S* xr = x->value.data() + r * d;
        S ms = S(0);
        for (int i = 0; i < d; ++i) ms += xr[i] * xr[i];
        ms /= static_cast<S>(d);
        const S inv = S(1) / std::sqrt(ms + static_cast<S>(kRmsNormEps));
        inv_rms[r] = inv;
        for (int i = 0; i < d; ++i) out->value[r * d + i] = xr[i] * inv * gain->value[i];
    }
    detail::finish_op<S>(
        out, {x, gain},
        [x, gain, rows, d, inv_rms = std::move(inv_rms)](TensorNode<S>& self, GradMap<S>* sink) {
            for (int64_t r = 0; r < rows; ++r) {
                const S* xr = x->value.data() + r * d;
                const S* gr = self.grad.data() + r * d;
                const S inv = inv_rms[r];
                if (x->requires_grad) {
                    S dot = S(0);  // sum_j G_j * gain_j * x_j
                    for (int i = 0; i < d; ++i) dot += gr[i] * gain->value[i] * xr[i];
                    auto& gx = detail::grad_buf(*x, sink);
                    const S c = inv * inv * inv * dot / static_cast<S>(d);
                    for (int i = 0; i < d; ++i)
                        gx[r * d + i] += gr[i] * gain->value[i] * inv - xr[i] * c;
                }
                if (gain->requires_grad) {
                    auto& gg = detail::grad_buf(*gain, sink);
                    for (int i = 0; i < d; ++i) gg[i] += gr[i] * xr[i] * inv;
                }
            }
        });
    return out;
}

// Mean negative log-likelihood over non-ignored targets. logits: [T x V].
template <class S>
TensorPtr<S> cross_entropy(const TensorPtr<S>& logits, const std::vector<int>& targets,
                           int ignore_id) {
    detail::require_rank2(logits, "cross_entropy");
    const int t_len = logits->shape[0], v = logits->shape[1];
    if (static_cast<int>(targets.size()) != t_len)
        throw ShapeError("cross_entropy: targets length must match logits rows");
    int kept = 0;
    for (int tk : targets) {
        if (tk == ignore_id) continue;
        if (tk < 0 || tk >= v) throw InputError("cross_entropy: target id out of vocabulary");
        ++kept;
    }
    if (kept == 0) throw InputError("cross_entropy: degenerate batch, every position ignored");

    S loss = S(0);
    for (int t = 0; t < t_len; ++t) {
        if (targets[t] == ignore_id) continue;
        const S* row = logits->value.data() + static_cast<int64_t>(t) * v;
        S mx = row[0];
        for (int i = 1; i < v; ++i) mx = std::max(mx, row[i]);
        S z = S(0);
        for (int i = 0; i < v; ++i) z += std::exp(row[i] - mx);
        loss += (std::log(z) + mx) - row[targets[t]];
    }
    loss /= static_cast<S>(kept);
    auto out = scalar_tensor<S>(loss);
    detail::finish_op<S>(
        out, {logits}, [logits, targets, ignore_id, kept, t_len, v](TensorNode<S>& self, GradMap<S>* sink) {
            if (!logits->requires_grad) return;
            auto& g = detail::grad_buf(*logits, sink);
            const S w = self.grad[0] / static_cast<S>(kept);
            for (int t = 0; t < t_len; ++t) {
                if (targets[t] == ignore_id) continue;
                const S* row = logits->value.data() + static_cast<int64_t>(t) * v;
                S mx = row[0];
                for (int i = 1; i < v; ++i) mx = std::max(mx, row[i]);
                S z = S(0);
                for (int i = 0; i < v; ++i) z += std::exp(row[i] - mx);
                for (int i = 0; i < v; ++i) {
                    S p = std::exp(row[i] - mx) / z;
                    g[static_cast<int64_t>(t) * v + i] += w * (p - (i == targets[t] ? S(1) : S(0)));
                }
            }
        });
    return out;
}

// Row gather: out[i, :] = table[ids[i], :].
template <class S>
TensorPtr<S> embed_rows(const TensorPtr<S>& table, const std::vector<int>& ids) {
    detail::require_rank2(table, "embed_rows");
    const int v = table->shape[0], d = table->shape[1];
    const int n = static_cast<int>(ids.size());
    auto out = zeros<S>({n, d});
    for (int i = 0; i < n; ++i) {
        if (ids[i] < 0 || ids[i] >= v) throw InputError("embed_rows: id out of range");
        std::copy_n(table->value.data() + static_cast<int64_t>(ids[i]) * d, d,
                    out->value.data() + static_cast<int64_t>(i) * d);
    }
    detail::finish_op<S>(out, {table}, [table, ids, d](TensorNode<S>& self, GradMap<S>* sink) {
        if (!table->requires_grad) return;
        auto& g = detail::grad_buf(*table, sink);
        for (size_t i = 0; i < ids.size(); ++i)
            for (int j = 0; j < d; ++j)
                g[static_cast<int64_t>(ids[i]) * d + j] += self.grad[i * d + j];
    });
    return out;
}

// Row slice [begin, end) of a rank-2 tensor.
template <class S>
TensorPtr<S> slice_rows(const TensorPtr<S>& a, int begin, int end) {
    detail::require_rank2(a, "slice_rows");
    const int r = a->shape[0], c = a->shape[1];
    if (begin < 0 || end > r || begin > end) throw ShapeError("slice_rows: range out of bounds");
    auto out = zeros<S>({end - begin, c});
    std::copy_n(a->value.data() + static_cast<int64_t>(begin) * c,
                static_cast<int64_t>(end - begin) * c, out->value.data());
    detail::finish_op<S>(out, {a}, [a, begin, c](TensorNode<S>& self, GradMap<S>* sink) {
        if (!a->requires_grad) return;
        auto& g = detail::grad_buf(*a, sink);
        for (size_t i = 0; i < self.grad.size(); ++i)
            g[static_cast<int64_t>(begin) * c + i] += self.grad[i];
    });
    return out;
}

template <class S>
TensorPtr<S> slice_cols(const TensorPtr<S>& a, int begin, int end) {
    detail::require_rank2(a, "slice_cols");
    const int r = a->shape[0], c = a->shape[1];
    if (begin < 0 || end > c || begin > end) throw ShapeError("slice_cols: range out of bounds");
    const int w = end - begin;
    auto out = zeros<S>({r, w});
    for (int i = 0; i < r; ++i)
        std::copy_n(a->value.data() + static_cast<int64_t>(i) * c + begin, w,
                    out->value.data() + static_cast<int64_t>(i) * w);
    detail::finish_op<S>(out, {a}, [a, begin, c, w, r](TensorNode<S>& self, GradMap<S>* sink) {
        if (!a->requires_grad) return;
        auto& g = detail::grad_buf(*a, sink);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < w; ++j)
                g[static_cast<int64_t>(i) * c + begin + j] += self.grad[static_cast<int64_t>(i) * w + j];
    });
    return out;
}

template <class S>
TensorPtr<S> concat_rows(const std::vector<TensorPtr<S>>& parts) {
    if (parts.empty()) throw ShapeError("concat_rows: no parts");
    const int c = parts[0]->shape.size() == 2 ? parts[0]->shape[1] : -1;
    int total = 0;
    for (const auto& p : parts) {
        detail::require_rank2(p, "concat_rows");
        if (p->shape[1] != c) throw ShapeError("concat_rows: column mismatch");
        total += p->shape[0];
    }
    auto out = zeros<S>({total, c});
    int64_t off = 0;
    for (const auto& p : parts) {
        std::copy_n(p->value.data(), p->value.size(), out->value.data() + off);
        off += static_cast<int64_t>(p->value.size());
    }
    detail::finish_op<S>(out, parts, [parts](TensorNode<S>& self, GradMap<S>* sink) {
        int64_t off = 0;
        for (const auto& p : parts) {
            const int64_t n = p->numel();
            if (p->requires_grad) {
                auto& g = detail::grad_buf(*p, sink);
                for (int64_t i = 0; i < n; ++i) g[i] += self.grad[off + i];
            }
            off += n;
        }
    });
    return out;
}

template <class S>
TensorPtr<S> concat_cols(const std::vector<TensorPtr<S>>& parts) {
    if (parts.empty()) throw ShapeError("concat_cols: no parts");
    const int r = parts[0]->shape.size() == 2 ? parts[0]->shape[0] : -1;
    int total = 0;
    for (const auto& p : parts) {
        detail::require_rank2(p, "concat_cols");
        if (p->shape[0] != r) throw ShapeError("concat_cols: row mismatch");
        total += p->shape[1];
    }
    auto out = zeros<S>({r, total});
    int off = 0;
    for (const auto& p : parts) {
        const int w = p->shape[1];
        for (int i = 0; i < r; ++i)
            std::copy_n(p->value.data() + static_cast<int64_t>(i) * w, w,
                        out->value.data() + static_cast<int64_t>(i) * total + off);
        off += w;
    }
    detail::finish_op<S>(out, parts, [parts, r, total](TensorNode<S>& self, GradMap<S>* sink) {
        int off = 0;
        for (const auto& p : parts) {
            const int w = p->shape[1];
            if (p->requires_grad) {
                auto& g = detail::grad_buf(*p, sink);
                for (int i = 0; i < r; ++i)
                    for (int j = 0; j < w; ++j)
                        g[static_cast<int64_t>(i) * w + j] +=
                            self.grad[static_cast<int64_t>(i) * total + off + j];
            }
            off += w;
        }
    });
    return out;
}

// Named parameter registry. std::map keeps iteration deterministic.
template <class S>
struct ParamsT {
    std::map<std::string, TensorPtr<S>> by_name;

    TensorPtr<S> add(const std::string& name, TensorPtr<S> t) {
        t->requires_grad = true;
        t->name = name;
        auto [it, fresh] = by_name.emplace(name, std::move(t));
        if (!fresh) throw ConfigError("duplicate parameter: " + name);
        return it->second;
    }
    const TensorPtr<S>& at(const std::string& name) const {
        auto it = by_name.find(name);
        if (it == by_name.end()) throw ConfigError("unknown parameter: " + name);
        return it->second;
    }
    void zero_grad() {
        for (auto& [_, t] : by_name) t->grad.clear();
    }
    int64_t count_scalars() const {
        int64_t n = 0;
        for (const auto& [_, t] : by_name) n += t->numel();
        return n;
    }
    // Deep copy (values only).
    ParamsT<S> clone() const {
        ParamsT<S> out;
        for (const auto& [k, t] : by_name)
            out.add(k, make_tensor<S>(t->shape, t->value));
        return out;
    }
    template <class T>
    ParamsT<T> cast() const {
        ParamsT<T> out;
        for (const auto& [k, t] : by_name) {
            std::vector<T> v(t->value.begin(), t->value.end());
            out.add(k, make_tensor<T>(t->shape, std::move(v)));
        }
        return out;
    }
};

using Tensor = TensorPtr<double>;
using Params = ParamsT<double>;

}  // namespace matter
