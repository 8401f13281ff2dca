#include "shavlab/quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace shavlab::quad {

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol, unsigned max_depth) {
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, max_depth, tol);
}

double integrate_half_line(const std::function<double(double)>& f, double tol) {
    static thread_local boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate(f, tol);
}

}  // namespace shavlab::quad
