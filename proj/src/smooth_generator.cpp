#include "shavlab/smooth_generator.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "shavlab/errors.hpp"

namespace shavlab::embed {

namespace {

constexpr int kCells = 4096;

using GL7 = boost::math::quadrature::gauss<double, 7>;

// Seam-centered finite-difference stencils: phi is read through its periodic
// extension, so smoothness of f at the integers is exactly smoothness of
// these symmetric differences at 0.
double seam_d1(const std::function<double(double)>& p, double h) {
    return (-p(2 * h) + 8 * p(h) - 8 * p(1 - h) + p(1 - 2 * h)) / (12 * h);
}

double seam_d2(const std::function<double(double)>& p, double h) {
    return (-p(2 * h) + 16 * p(h) - 15 * p(0.0) - 15 * p(1.0) +
            16 * p(1 - h) - p(1 - 2 * h)) /
           (12 * h * h);
}

double seam_d3(const std::function<double(double)>& p, double h) {
    return (p(2 * h) - 2 * p(h) + 2 * p(1 - h) - p(1 - 2 * h)) /
           (2 * h * h * h);
}

}  // namespace

SmoothGenerator::SmoothGenerator(std::function<double(double)> profile,
                                 int order, bool require_fixed_point,
                                 std::string name)
    : phi_(std::move(profile)), order_(order), name_(std::move(name)) {
    if (order_ < 1)
        throw ProfileInvalid("smoothness order must be at least 1");

    // Dense cumulative table; each cell integrated with fixed-order Gauss.
    cum_.resize(kCells + 1);
    cum_[0] = 0.0;
    double min_phi = phi_(0.5);
    for (int i = 0; i < kCells; ++i) {
        const double a = static_cast<double>(i) / kCells;
        const double b = static_cast<double>(i + 1) / kCells;
        cum_[i + 1] = cum_[i] + GL7::integrate(phi_, a, b);
        min_phi = std::min(min_phi, std::min(phi_(a), phi_((a + b) / 2)));
    }
    if (!(min_phi > 0))
        throw ProfileInvalid("profile must be strictly positive");
    if (std::abs(cum_[kCells] - 2.0) > 1e-9)
        throw ProfileInvalid("profile must integrate to 2");
    cum_[kCells] = 2.0;

    // Derivative conditions at the seam: f'(0) = 1 and vanishing higher
    // derivatives up to the requested order (spot checks stop at f'''').
    const double h = 1.0 / 256;
    const double tol = 1e-5;
    if (std::abs(phi_(0.0) - 1.0) > tol || std::abs(phi_(1.0) - 1.0) > tol)
        throw ProfileInvalid("profile must equal 1 at both endpoints");
    if (order_ >= 2 && std::abs(seam_d1(phi_, h)) > tol)
        throw ProfileInvalid("first profile derivative must vanish at the seam");
    if (order_ >= 3 && std::abs(seam_d2(phi_, h)) > tol)
        throw ProfileInvalid("second profile derivative must vanish at the seam");
    if (order_ >= 4 && std::abs(seam_d3(phi_, h)) > tol)
        throw ProfileInvalid("third profile derivative must vanish at the seam");

    // Largest interior fixed point of f with the diagonal crossed upward.
    // Scan cells from the right; f(t) - t changes sign from - to + there.
    for (int i = kCells - 1; i > 0; --i) {
        const double t_lo = static_cast<double>(i - 1) / kCells;
        const double t_hi = static_cast<double>(i) / kCells;
        const double g_lo = cum_[i - 1] - t_lo;
        const double g_hi = cum_[i] - t_hi;
        if (g_lo < 0 && g_hi >= 0) {
            double lo = t_lo;
            double hi = t_hi;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                (fwd_unit(mid) - mid < 0 ? lo : hi) = mid;
            }
            z_ = 0.5 * (lo + hi);
            has_z_ = true;
            log_slope_ = std::log(phi_(z_));
            break;
        }
    }
    if (has_z_ && !(phi_(z_) > 1))
        has_z_ = false;
    if (require_fixed_point && !has_z_)
        throw NoInteriorFixedPoint("profile has no interior repelling fixed point");
}

double SmoothGenerator::fwd_unit(double t) const {
    const int i = std::min(kCells - 1,
                           std::max(0, static_cast<int>(t * kCells)));
    const double a = static_cast<double>(i) / kCells;
    return cum_[i] + GL7::integrate(phi_, a, t);
}

double SmoothGenerator::fwd(double x) const {
    const double k = std::floor(x);
    const double frac = x - k;
    return fwd_unit(frac) + 2 * k;
}

double SmoothGenerator::inv_unit(double y) const {
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        (fwd_unit(mid) < y ? lo : hi) = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 3; ++it) {
        const double step = (fwd_unit(x) - y) / phi_(x);
        x -= step;
        x = std::min(1.0, std::max(0.0, x));
    }
    return x;
}

double SmoothGenerator::inv(double y) const {
    const double k = std::floor(y / 2);
    return inv_unit(y - 2 * k) + k;
}

double SmoothGenerator::deriv(double x) const {
    return phi_(x - std::floor(x));
}

double SmoothGenerator::iterate(double x, long n) const {
    for (long k = 0; k < n; ++k)
        x = fwd(x);
    for (long k = 0; k > n; --k)
        x = inv(x);
    return x;
}

double SmoothGenerator::fixed_point() const {
    if (!has_z_)
        throw NoInteriorFixedPoint("generator has no interior fixed point");
    return z_;
}

double SmoothGenerator::log_slope() const {
    fixed_point();
    return log_slope_;
}

namespace {

// Peak-normalized flat bump on (u, v): value 1 at the midpoint, all
// derivatives vanish at both ends.
double bump(double x, double u, double v) {
    if (x <= u || x >= v)
        return 0.0;
    const double w = v - u;
    return std::exp(4.0 / (w * w) - 1.0 / ((x - u) * (v - x)));
}

double bump_integral(double u, double v) {
    return boost::math::quadrature::gauss<double, 30>::integrate(
        [u, v](double x) { return bump(x, u, v); }, u, v);
}

}  // namespace

SmoothGenerator build_generator(const std::string& profile, int order,
                                bool require_fixed_point) {
    if (profile == "trig") {
        constexpr double two_pi = 6.283185307179586476925286766559;
        return SmoothGenerator(
            [](double x) { return 2.0 - std::cos(two_pi * x); }, order,
            require_fixed_point, profile);
    }
    if (profile == "flat-bump") {
        const double beta = 1.0 / bump_integral(0.0, 1.0);
        return SmoothGenerator(
            [beta](double x) { return 1.0 + beta * bump(x, 0.0, 1.0); }, order,
            require_fixed_point, profile);
    }
    if (profile == "two-bump") {
        // Dip of depth 1/2 on (0, 0.4), then a spike on (0.5, 1) scaled so
        // the profile integrates to 2. The dip pushes f below the diagonal,
        // the spike brings it back across with slope above 1.
        const double dip = 0.5;
        const double spike =
            (1.0 + dip * bump_integral(0.0, 0.4)) / bump_integral(0.5, 1.0);
        return SmoothGenerator(
            [dip, spike](double x) {
                return 1.0 - dip * bump(x, 0.0, 0.4) +
                       spike * bump(x, 0.5, 1.0);
            },
            order, require_fixed_point, profile);
    }
    throw ProfileInvalid("unknown profile name: " + profile);
}

}  // namespace shavlab::embed
