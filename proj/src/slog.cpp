#include "shavlab/slog.hpp"

#include <cmath>

namespace shavlab {

double log_cosh(double u) {
    const double a = std::abs(u);
    return a + std::log1p(std::exp(-2 * a)) - std::log(2.0);
}

}  // namespace shavlab
