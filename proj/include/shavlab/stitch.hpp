#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "shavlab/holder.hpp"
#include "shavlab/partition.hpp"
#include "shavlab/sampled_diffeo.hpp"
#include "shavlab/schwarzian.hpp"
#include "shavlab/smooth_generator.hpp"

namespace shavlab::stitch {

// One affinely distorted copy of a sampled diffeomorphism: the unit-square
// source phi is rescaled so that it carries J = [x, x+j] onto K = [y, y+k].
struct DistortedPiece {
    wiener::SampledDiffeo phi;
    double x = 0;
    double j = 1;
    double y = 0;
    double k = 1;

    double value(double t) const;       // y + k * phi((t - x) / j)
    double derivative(double t) const;  // (k / j) * phi'((t - x) / j)
    double left_slope() const;          // one-sided derivative at x
    double right_slope() const;         // one-sided derivative at x + j
};

// Piecewise assembly of distorted pieces over matching domain and range
// partitions. Continuous by construction; the stitching recurrence makes
// the one-sided derivatives agree at every interior knot, so the map is a
// C^1 diffeomorphism of [0,1] with positive derivative. Smoothness-ball
// membership is measured downstream by the Hoelder seminorms, not asserted
// here.
struct StitchedDiffeo {
    meas::Partition domain;
    meas::Partition range;
    std::vector<DistortedPiece> pieces;

    double value(double t) const;
    double derivative(double t) const;
};

// Solves the derivative-matching recurrence for the unique domain
// partition stitching the given sources over the range partition y: the
// first domain length is provisional, each successive length is forced by
// equality of one-sided slopes at the knot, and the whole vector is then
// rescaled to sum to one. Uniqueness follows because the final endpoint is
// linear in the provisional choice; the provisional log-length is exposed
// so that independence from it can be demonstrated. Throws DomainError
// when the piece count does not match the partition, when an end slope of
// a source is not positive, or when the resulting domain cuts collide at
// double resolution.
StitchedDiffeo stitch(const meas::Partition& y,
                      const std::vector<wiener::SampledDiffeo>& phis,
                      double provisional_log_first = 0.0);

// Same construction from log block lengths (normalized internally).
// Accepts range partitions whose smallest blocks are far below double
// resolution in absolute coordinates: those pieces collapse to zero width
// and the evaluator steps over them, which is exact to well under machine
// epsilon since a block's range mass bounds its contribution. C^1 knot
// matching is a statement about the representable knots.
StitchedDiffeo stitch_log(const std::vector<double>& log_lengths,
                          const std::vector<wiener::SampledDiffeo>& phis,
                          double provisional_log_first = 0.0);

// Grid restriction of a stitched map onto the uniform m-point grid, with
// the endpoints pinned to 0 and 1.
wiener::SampledDiffeo to_sampled(const StitchedDiffeo& f, int m_grid);

// Point evaluator handed to functionals; callers wrap whatever map they
// hold into one of these.
using MapEval = std::function<double(double)>;

// Bounded functional of a map on [0,1] together with its certified bound.
// Every functional in this file is continuous for uniform convergence, so
// it is continuous in the graded norms the sampling measure lives in.
struct Functional {
    std::function<double(const MapEval&)> apply;
    double bound = 1;
};

Functional constant_functional(double c);
// min(1, scale * max_i |f(t_i) - t_i|) over the uniform grid with
// `grid` + 1 nodes.
Functional sup_clamp_functional(double scale, int grid);
// f(1/2) clamped to [0,1].
Functional midpoint_functional();
// The left translate F_g(f) = F(g^{-1} o f). The inverse of the smooth
// test map is solved pointwise by bisection refined with Newton steps; an
// identity test map passes arguments through unchanged.
Functional translate_functional(const Functional& base,
                                const schw::SmoothTestMap& g);

// Sampling plan shared by the stitched-map Monte Carlo estimators. The
// range partition stream comes from the chain-measure sampler, the block
// sources are independent path images on the m-point grid. Identical
// (seed, stream_base) means identical samples at any worker count.
struct SampleConfig {
    std::uint64_t seed = 1;
    std::uint64_t stream_base = 0;
    int m_grid = 256;
    int workers = 1;
    std::size_t burn_in = 8192;
    std::size_t partition_pool_per_chain = 0;  // 0 sizes it from count
};

// Draws up to `count` stitched maps with n blocks, going through the
// log-coordinate form of the partition sampler so that no draw is lost to
// double resolution. Shorter than requested only when the configured
// partition pool is smaller than count; callers report the size they
// actually used.
std::vector<StitchedDiffeo> sample_stitched(int n, std::size_t count,
                                            const SampleConfig& cfg);

struct McEstimate {
    double estimate = 0;
    double stderr_value = 0;
    std::size_t n_samples = 0;
};

// Monte Carlo value of the finite-n approximate functional: the mean of F
// over stitched maps built from a chain-measure range partition and
// independent path-image blocks. Plain probability sampling, so a constant
// functional is reproduced exactly with zero spread.
McEstimate L_delta_n(const Functional& F, int n, std::size_t count,
                     const SampleConfig& cfg);

struct S3Row {
    int n = 0;
    double estimate_f = 0;
    double estimate_fg = 0;
    double paired_diff = 0;      // mean of F_g(f) - F(f), common samples
    double stderr_value = 0;     // standard error of the paired mean
    std::size_t n_samples = 0;
};

struct S3Report {
    std::vector<S3Row> rows;
};

// Convergence table for the translation defect: for each n the same
// stitched sample set is pushed through F and through its g-translate, and
// the paired difference is averaged. Common random numbers keep the
// difference estimate far tighter than either column alone.
S3Report check_S3(const Functional& F, const schw::SmoothTestMap& g,
                  const std::vector<int>& ns, std::size_t count,
                  const SampleConfig& cfg);

// Mean of the ball-averaged cutoff of F over caller-supplied map samples:
// each sample is projected onto the word ball by the tent-weighted average
// in the graded distance, and the results are averaged. The value lies
// between the extremes of F over the ball. Propagates BallTooSmall when a
// sample's nearest ball element sits on the outermost shell.
McEstimate mean_on_group(
    const std::function<double(const holder::BallElement&)>& F,
    const std::vector<wiener::SampledDiffeo>& f_samples,
    const std::vector<holder::BallElement>& ball,
    const embed::SmoothGenerator& gen, double delta);

}  // namespace shavlab::stitch
