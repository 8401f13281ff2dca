#pragma once

#include <functional>
#include <vector>

namespace shavlab::wiener {

// Function values sampled at the uniform grid t_i = i/m, i = 0..m.
struct GridFunction {
    std::vector<double> v;

    int m() const { return static_cast<int>(v.size()) - 1; }
    double at(int i) const { return v[static_cast<std::size_t>(i)]; }

    // Linear interpolation between nodes, clamped to [0,1].
    double value(double t) const;
};

// Increasing diffeomorphism of [0,1] sampled on the uniform grid. Carries
// both the node values and the node derivatives; the derivatives are the
// primary data, the values are their cumulative trapezoid integral.
struct SampledDiffeo {
    std::vector<double> q;    // q[0] = 0, q[m] = 1, strictly increasing
    std::vector<double> qp;   // node derivatives, positive

    int m() const { return static_cast<int>(q.size()) - 1; }

    // Linear interpolation between nodes, clamped to [0,1].
    double value(double t) const;
    double derivative(double t) const;
};

// Trapezoid quadrature over [0,1] of values on the uniform grid.
double trapz(const std::vector<double>& v);

// Log-derivative coordinates of a sampled diffeomorphism, pinned to zero
// at the left endpoint: t -> log q'(t) - log q'(0).
GridFunction map_A(const SampledDiffeo& q);

// Diffeomorphism whose derivative is proportional to e^{x(t)}, normalized
// so the right endpoint lands at one. Node derivatives use the closed form
// e^{x(t)} / integral rather than differencing the values.
SampledDiffeo map_B(const GridFunction& x);

// Sampled diffeomorphism whose derivative is proportional to the supplied
// positive profile. Values come from the same cumulative trapezoid rule
// map_B uses, so the log-derivative round trip is tight.
SampledDiffeo sampled_from_derivative(int m_grid,
                                      const std::function<double(double)>& p);

// t -> x(1-t) - x(1). Involution on grid functions vanishing at zero.
GridFunction time_reverse(const GridFunction& x);

}  // namespace shavlab::wiener
