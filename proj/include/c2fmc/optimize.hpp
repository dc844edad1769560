#pragma once

#include <functional>
#include <vector>

namespace c2f {

struct Objective {
    double value = 0.0;
    std::vector<double> gradient;
};

using ObjectiveFn = std::function<Objective(const std::vector<double> &)>;

struct DescentOptions {
    int max_iters = 50;
    double initial_step = 0.5;
    // Scale each coordinate by a running RMS of its gradient. Otherwise the
    // direction is the gradient divided by its largest magnitude.
    bool rms_precondition = false;
    // Stop once an accepted step lowers the loss by less than this fraction.
    double tolerance = 1e-6;
};

struct DescentResult {
    std::vector<double> params;
    std::vector<double> losses;  // initial loss followed by every accepted step
};

// Gradient descent with Armijo backtracking. The step halves on rejection and
// grows by 1.5x after each accepted move, so accepted losses never increase.
DescentResult descend(std::vector<double> params, const ObjectiveFn &fn, const DescentOptions &opt);

}  // namespace c2f
