#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "shavlab/plmap.hpp"
#include "shavlab/sampled_diffeo.hpp"
#include "shavlab/smooth_generator.hpp"

namespace shavlab::holder {

using wiener::SampledDiffeo;

struct HolderProfile {
    double delta = 0;
    // Supremum over grid pairs of |d(t2) - d(t1)| / |t2 - t1|^delta where
    // d are the node derivative values.
    double quotient_sup = 0;
    // |d(t0)| + quotient_sup.
    double norm = 0;
    // Same functional restricted to every second node; never exceeds norm.
    double coarse_norm = 0;
};

// Profile of a function on a uniform grid over an interval of the given
// length, described by its node derivative values.
HolderProfile profile_from_derivs(const std::vector<double>& deriv,
                                  double delta, double interval_length = 1.0);

// Norm of a sampled diffeomorphism of the unit interval.
HolderProfile norm_1_delta(const SampledDiffeo& f, double delta);

// Derivative Hölder quotient supremum alone.
double n_delta(const SampledDiffeo& f, double delta);

// |log f'(0)| plus the grid supremum of the log-derivative quotients.
double p_delta(const SampledDiffeo& f, double delta);

// Upper bound on the derivative quotient of the inverse of a map with
// quotient c and minimum slope min_slope.
double inverse_holder_constant(double c, double min_slope, double delta);

// Upper bound on the derivative quotient of f composed after g, from the
// quotients and the maximum slopes of the factors.
double compose_holder_constant(double c_f, double c_g, double max_f,
                               double max_g, double delta);

// Admissible change of p_delta when moving distance eps from a base map
// with derivative range [min0, max0] and norm norm0; valid for
// eps < min0 / 2.
double p_delta_continuity_bound(double min0, double max0, double norm0,
                                double eps);

struct DiscontinuityRow {
    double eps = 0;
    double diff_norm = 0;            // distance of the perturbed map from base
    double composed_diff_norm = 0;   // same distance after composing outside
    double chord = 0;                // quotient over the pair (0, eps)
    double displayed_chord = 0;      // closed-form value of that quotient
};

// Sweep of the composition-discontinuity example on [-1,1] at exponent 2/3:
// the first distance shrinks linearly while the composed distance stays
// bounded away from zero.
std::vector<DiscontinuityRow> discontinuity_demo(
    const std::vector<double>& eps_grid);

struct BallElement {
    std::string key;          // canonical serialization of the group word
    int word_length = 0;      // level of first appearance in the search
    exact::PLMap word;
    SampledDiffeo diffeo;     // embedded image sampled on the grid
};

// Breadth-first word ball of the embedded group over both generators and
// their inverses, deduplicated by exact normal form.
std::vector<BallElement> build_theta_ball(const embed::SmoothGenerator& gen,
                                          int radius, int m_grid);

// h^{-1} composed after f, sampled on f's grid through the embedded
// evaluators rather than grid interpolation.
SampledDiffeo pull_back(const exact::PLMap& h,
                        const embed::SmoothGenerator& gen,
                        const SampledDiffeo& f);

struct RDeltaReport {
    double value = 0;
    std::size_t argmin_index = 0;
    int argmin_length = 0;
    int radius = 0;
};

// Minimum of p_delta(h^{-1} o f) over the ball. Rejects a minimizer on the
// outermost shell, since the true infimum could then live outside the ball.
RDeltaReport r_delta(const SampledDiffeo& f,
                     const std::vector<BallElement>& ball,
                     const embed::SmoothGenerator& gen, double delta);

struct PiDeltaReport {
    double value = 0;
    double r_value = 0;
    double weight_sum = 0;           // before normalization
    std::vector<double> weights;     // per ball element, before normalization
    std::size_t active_count = 0;
};

// Weighted average of F over ball elements with tent weights in the
// p_delta distance from the minimum. Every element carrying weight must be
// interior to the ball.
PiDeltaReport pi_delta(const std::function<double(const BallElement&)>& F,
                       const SampledDiffeo& f,
                       const std::vector<BallElement>& ball,
                       const embed::SmoothGenerator& gen, double delta);

}  // namespace shavlab::holder
