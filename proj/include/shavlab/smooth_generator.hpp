#pragma once

#include <functional>
#include <string>
#include <vector>

namespace shavlab::embed {

// A smooth circle-doubling generator f: R -> R with f(0) = 0 and
// f(x+1) = f(x) + 2, stored through its derivative profile phi on [0,1]
// (f' is the 1-periodic extension of phi, so the commutation law holds by
// construction). Profiles must be positive with integral exactly 2. The
// generator caches an interior repelling fixed point z (largest solution of
// f(z) = z in (0,1)) when one exists, together with C = log f'(z).
class SmoothGenerator {
public:
    // Builds and validates. order is the requested smoothness class at the
    // integers (derivative conditions are spot-checked by seam-centered
    // finite differences up to the fourth derivative); pass kInfiniteOrder
    // for a fully flat seam. require_fixed_point controls whether a missing
    // interior fixed point is an error or merely recorded.
    static constexpr int kInfiniteOrder = 1 << 20;
    SmoothGenerator(std::function<double(double)> profile, int order,
                    bool require_fixed_point, std::string name);

    double fwd(double x) const;              // f
    double inv(double y) const;              // f^{-1}
    double deriv(double x) const;            // f'
    double iterate(double x, long n) const;  // f^n for any sign of n

    bool has_interior_fixed_point() const { return has_z_; }
    double fixed_point() const;              // z, throws without one
    double log_slope() const;                // C = log f'(z)
    int order() const { return order_; }
    const std::string& name() const { return name_; }

private:
    double fwd_unit(double t) const;   // f on [0,1]
    double inv_unit(double y) const;   // f^{-1} on [0,2]

    std::function<double(double)> phi_;
    std::vector<double> cum_;          // cumulative integral of phi at i/N
    int order_ = 0;
    bool has_z_ = false;
    double z_ = 0.0;
    double log_slope_ = 0.0;
    std::string name_;
};

// Named profiles: "two-bump" (default; dip then spike, has the interior
// repelling fixed point), "trig" (2 - cos(2 pi x), class C^2 at the seam),
// "flat-bump" (single bump, f > x on (0,1], no interior fixed point).
SmoothGenerator build_generator(const std::string& profile, int order,
                                bool require_fixed_point = false);

}  // namespace shavlab::embed
