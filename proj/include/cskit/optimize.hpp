#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace cskit {

struct GdOptions {
  std::size_t max_epochs = 200;
  double tol = 1e-7;      // relative objective improvement
  double armijo_c1 = 1e-4;
  double init_step = 1.0;
  double min_step = 1e-12;
};

struct GdTrace {
  std::size_t epochs = 0;
  double final_value = 0.0;
  bool converged = false;
};

// Full-batch gradient descent with backtracking (Armijo) line search.
// `objective(theta, grad)` writes the gradient into `grad` and returns the
// value. Accepted steps never increase the objective.
inline GdTrace minimize_batch_gd(
    std::vector<double>& theta,
    const std::function<double(const std::vector<double>&, std::vector<double>&)>&
        objective,
    const GdOptions& opt = {}) {
  const std::size_t dim = theta.size();
  std::vector<double> grad(dim, 0.0), trial(dim, 0.0);
  GdTrace trace;
  double value = objective(theta, grad);
  double step = opt.init_step;
  for (std::size_t epoch = 0; epoch < opt.max_epochs; ++epoch) {
    trace.epochs = epoch + 1;
    double gnorm2 = 0.0;
    for (double g : grad) gnorm2 += g * g;
    if (gnorm2 == 0.0) {
      trace.converged = true;
      break;
    }
    std::vector<double> next_grad(dim, 0.0);
    double next_value = value;
    bool accepted = false;
    while (step >= opt.min_step) {
      for (std::size_t i = 0; i < dim; ++i) trial[i] = theta[i] - step * grad[i];
      next_value = objective(trial, next_grad);
      if (std::isfinite(next_value) &&
          next_value <= value - opt.armijo_c1 * step * gnorm2) {
        accepted = true;
        break;
      }
      step *= 0.5;
      std::fill(next_grad.begin(), next_grad.end(), 0.0);
    }
    if (!accepted) break;  // no descent step left at this resolution
    theta.swap(trial);
    grad.swap(next_grad);
    const double improvement = value - next_value;
    value = next_value;
    if (improvement <= opt.tol * (1.0 + std::abs(value))) {
      trace.converged = true;
      break;
    }
    step = std::min(step * 2.0, 1e4);  // let the step grow back
  }
  trace.final_value = value;
  return trace;
}

}  // namespace cskit
