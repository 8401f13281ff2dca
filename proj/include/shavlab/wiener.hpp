#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "shavlab/rng.hpp"
#include "shavlab/sampled_diffeo.hpp"

namespace shavlab::wiener {

// Path on m+1 nodes started at zero with independent centered Gaussian
// increments of variance 1/m.
GridFunction sample_path(int m_grid, Rng& rng);

// Probability that the increments x(t_k) - x(t_{k-1}) land in the given
// intervals, for strictly increasing times in (0,1]. The event factors
// through the independent increments, so the value is a product of
// error-function differences. Infinite bounds are allowed; an empty
// interval contributes zero.
double cylinder_probability(const std::vector<double>& times,
                            const std::vector<std::pair<double, double>>& box);

struct Estimate {
    double value = 0;
    double stderr_value = 0;
    double skewness = 0;
    long long n = 0;
};

// E[(q'(side))^l] where q is the diffeomorphism image of a sampled path
// and side is 0 or 1. Identical (seed, stream_base) means identical paths,
// so calls for the two sides are paired sample by sample.
Estimate moment_Ml(int l, int side, long long npaths, int m_grid,
                   std::uint64_t seed, std::uint64_t stream_base, int workers);

struct PairedMoments {
    Estimate side0;
    Estimate side1;
    // Statistics of the per-path difference (q'(1))^l - (q'(0))^l.
    double diff_mean = 0;
    double diff_stderr = 0;
    // Largest relative gap between (q'(1))^l on a path and (q'(0))^l on its
    // time reversal; the two agree exactly apart from rounding.
    double reversal_gap = 0;
};

// Both endpoint moments on one path sample, with the paired difference.
PairedMoments moment_Ml_paired(int l, long long npaths, int m_grid,
                               std::uint64_t seed, std::uint64_t stream_base,
                               int workers);

// E[e^{-l x(s)}] for a grid-aligned time s. Only the first ceil(s*m)
// increments are sampled.
Estimate exp_moment(double s, int l, long long npaths, int m_grid,
                    std::uint64_t seed, std::uint64_t stream_base, int workers);

// E of the trapezoid integral of (q'(t))^2 over the unit interval.
Estimate I_energy(long long npaths, int m_grid, std::uint64_t seed,
                  std::uint64_t stream_base, int workers);

struct C4Report {
    Estimate m1;
    Estimate m2;
    Estimate energy;
    double c4 = 0;
    double c4_stderr = 0;
};

// Assembles 1 + M_1 + M_2 + I from one shared path sample.
C4Report c4_constant(long long npaths, int m_grid, std::uint64_t seed,
                     std::uint64_t stream_base, int workers);

struct HolderReport {
    double delta = 0;
    std::vector<int> resolutions;
    // Median over paths of the finest-scale increment quotient
    // max_i |x(t_{i+1}) - x(t_i)| * m^delta at each resolution.
    std::vector<double> median_single_scale;
    // Fraction of paths whose quotient maximized over every dyadic scale
    // of the finest grid stays at or below the cap.
    double bounded_fraction = 0;
    double cap = 0;
};

// Grid regularity diagnostic under dyadic refinement. Paths are sampled at
// the finest resolution and subsampled, so the resolutions are nested.
HolderReport holder_support_check(double delta, long long npaths,
                                  std::uint64_t seed,
                                  std::uint64_t stream_base, int workers);

// Writes npaths sampled paths to stem + ".bin" as little-endian 64-bit
// floats, row major with m+1 values per path, plus stem + ".json" metadata.
void dump_paths(const std::string& stem, int m_grid, long long npaths,
                std::uint64_t seed, std::uint64_t stream_base);

}  // namespace shavlab::wiener
