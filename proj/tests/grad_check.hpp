// Central finite-difference gradient oracle for tests. Independent of the
// tape: it only re-evaluates a forward closure under perturbed values.
#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "matter/tensor.hpp"

namespace matter::testing {

struct GradCheckResult {
    double max_rel_err = 0.0;
    std::string worst;  // "<name>[i]" of the worst entry
};

inline double rel_err(double analytic, double numeric) {
    const double denom = std::max({1e-8, std::fabs(analytic), std::fabs(numeric)});
    return std::fabs(analytic - numeric) / denom;
}

// `forward` must recompute the scalar loss from current tensor values.
// `analytic` holds the gradient to verify for each checked tensor.
inline GradCheckResult check_gradients(
    const std::function<double()>& forward,
    const std::vector<std::pair<std::string, matter::Tensor>>& tensors,
    const std::function<const std::vector<double>&(const matter::Tensor&)>& analytic,
    double h = 1e-5) {
    GradCheckResult res;
    for (const auto& [name, t] : tensors) {
        const std::vector<double>& grad = analytic(t);
        for (size_t i = 0; i < t->value.size(); ++i) {
            const double keep = t->value[i];
            t->value[i] = keep + h;
            const double up = forward();
            t->value[i] = keep - h;
            const double down = forward();
            t->value[i] = keep;
            const double fd = (up - down) / (2.0 * h);
            const double an = grad.empty() ? 0.0 : grad[i];
            const double e = rel_err(an, fd);
            if (e > res.max_rel_err) {
                res.max_rel_err = e;
                res.worst = name + "[" + std::to_string(i) + "]";
            }
        }
    }
    return res;
}

}  // namespace matter::testing
