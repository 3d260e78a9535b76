// Adam optimizer over named parameters.
#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "matter/error.hpp"
#include "matter/tensor.hpp"

namespace matter {

template <class S>
struct AdamStateT {
    int64_t step = 0;
    std::map<std::string, std::vector<S>> m, v;
};

using AdamState = AdamStateT<double>;

// One Adam update, beta = (0.9, 0.999), eps = 1e-8. Parameters without an
// entry in `grads` are left untouched (their moments stay zero).
template <class S>
void adam_step(ParamsT<S>& params, const GradMap<S>& grads, AdamStateT<S>& state, double lr,
               double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8) {
    state.step += 1;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
    for (auto& [name, p] : params.by_name) {
        auto git = grads.find(name);
        if (git == grads.end()) continue;
        const std::vector<S>& g = git->second;
        if (g.size() != p->value.size())
            throw ShapeError("adam_step: gradient shape mismatch for " + name);
        auto& m = state.m[name];
        auto& v = state.v[name];
        if (m.empty()) m.assign(g.size(), S(0));
        if (v.empty()) v.assign(g.size(), S(0));
        for (size_t i = 0; i < g.size(); ++i) {
            const double gi = static_cast<double>(g[i]);
            if (std::isnan(gi)) throw NumericError("adam_step: NaN gradient in " + name);
            m[i] = static_cast<S>(beta1 * m[i] + (1.0 - beta1) * gi);
            v[i] = static_cast<S>(beta2 * v[i] + (1.0 - beta2) * gi * gi);
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            p->value[i] -= static_cast<S>(lr * mhat / (std::sqrt(vhat) + eps));
        }
    }
}

// Convenience for single-tape runs: pulls gradients straight off the
// parameter tensors populated by Tape::backward.
template <class S>
GradMap<S> grads_from_params(const ParamsT<S>& params) {
    GradMap<S> out;
    for (const auto& [name, p] : params.by_name)
        if (!p->grad.empty()) out[name] = p->grad;
    return out;
}

}  // namespace matter
