#pragma once

#include <functional>

namespace shavlab::quad {

// Adaptive Gauss-Kronrod integration on a finite interval. The tolerance is a
// relative target passed to the adaptive refinement; integrands are expected
// to be finite on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-11, unsigned max_depth = 18);

// Integral over (0, infinity) for integrands with (super)exponential decay.
double integrate_half_line(const std::function<double(double)>& f,
                           double tol = 1e-11);

}  // namespace shavlab::quad
