#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "shavlab/partition.hpp"
#include "shavlab/sampled_diffeo.hpp"
#include "shavlab/wiener.hpp"

namespace shavlab::schw {

// Closed-form test diffeomorphism of [0,1] carrying three derivatives.
struct SmoothTestMap {
    std::function<double(double)> g;
    std::function<double(double)> gp;
    std::function<double(double)> gpp;
    std::function<double(double)> gppp;
    // Average of g' - 1 over [x, x + l], in closed form. Called with l = 0
    // it returns the pointwise limit g'(x) - 1, which is what blocks far
    // below double resolution need.
    std::function<double(double, double)> avg_slope_excess;
    bool fixes_ends = true;
    bool unit_end_slopes = true;
};

SmoothTestMap identity_test_map();
// t + (a / 2 pi)(1 - cos 2 pi t); increasing for |a| < 1.
SmoothTestMap sine_test_map(double a);
// slope * t + offset; for derivative tests only, ends are not fixed.
SmoothTestMap affine_test_map(double slope, double offset);

// g'''/g' - (3/2)(g''/g')^2.
double schwarzian(const SmoothTestMap& g, double t);

// (g''/g')' - (1/2)(g''/g')^2 with the outer derivative taken by a five
// point stencil of width h. Agreement with the closed form is an oracle.
double schwarzian_fd(const SmoothTestMap& g, double t, double h);

// 1 + max over t of |g''/g'| + (g''/g')^2 + |g'''/g'|. The Schwarzian is
// bounded in magnitude by (3/2) of this value.
double curvature_budget(const SmoothTestMap& g);

// max |g''(t1)| / min g'(t2) over the square, the two-point derivative
// quotient that sets the ratio comparison constants.
double slope_contrast(const SmoothTestMap& g);

struct F12 {
    double f1 = 0;
    double f2 = 0;
};

// Boundary term of block k: l_k (h(x_{k-1}) q'(0) - h(x_k) q'(1)) with
// h = g''/g'.
double term_x(const SmoothTestMap& g, double x0, double x1,
              const wiener::SampledDiffeo& q);

// Curvature term of block k: l_k^2 times the trapezoid integral of
// S_g(x_{k-1} + l_k q(t)) q'(t)^2.
double term_y(const SmoothTestMap& g, double x0, double x1,
              const wiener::SampledDiffeo& q);

// Sums of the block terms over a partition with one sampled map per block.
F12 f1_f2_sample(const SmoothTestMap& g, const meas::Partition& x,
                 const std::vector<wiener::SampledDiffeo>& q);

struct ConcentrationReport {
    double eps = 0;
    int n = 0;
    long long trials = 0;
    double c4 = 0;
    double budget = 0;      // curvature budget of g
    double threshold = 0;   // 4 c4 budget eps^{1/3}
    double bound = 0;       // 2 eps^{1/3}
    double frequency = 0;   // fraction of trials with |f1+f2| > threshold
    double freq_stderr = 0;
    double var_f1 = 0;
    double var_f1_stderr = 0;
    double var_bound = 0;        // 4 eps budget M2
    double mean_abs_f2 = 0;
    double mean_abs_f2_stderr = 0;
    double abs_bound = 0;        // (3/2) c4 budget eps
};

// Tail frequency of |f1 + f2| over independent block samples on the
// uniform n-block partition, against the cube-root threshold.
ConcentrationReport concentration_check(const SmoothTestMap& g, double eps,
                                        int n, long long trials, int m_grid,
                                        const wiener::C4Report& c4,
                                        std::uint64_t seed,
                                        std::uint64_t stream_base,
                                        int workers);

struct RatioTerm {
    double log_a = 0;      // log length of block k
    double log_b = 0;      // log length of block k-1 (cyclic)
    double d = 0;          // a + b in double, may underflow to 0
    double log_R = 0;      // log of (a+b)/(2 sqrt(ab))
    double log_Rg = 0;     // same for the image lengths
    double alpha = 0;      // R^g/R - 1
    double tau = 0;        // log(R + sqrt(R^2-1)); equals |log(a/b)|/2
    double tau_g = 0;
    double beta = 0;       // tau_g - tau
    double omega = 0;      // (v_ratio - 1) log(R) / d, 0 when v_ratio = 1
    double v_ratio = 0;    // v1(tau_g) / v1(tau)
    // True where the mesh premise behind the per-term estimates holds,
    // i.e. (5/2) C d < 1/80.
    bool proof_zone = false;
};

struct RatioChainRun {
    int n = 0;
    double eps = 0;
    double contrast = 0;   // C
    double delta1 = 0;     // 1 / (400 (C+1))
    double log_r = 0;      // 8000 (C+1) / eps
    double mesh = 0;       // max block length in double
    bool mesh_ok = false;  // mesh < delta1
    double min_log_R = 0;
    std::vector<RatioTerm> terms;
    double sigma = 0;         // sum of log v_ratio
    double product_gap = 0;   // |e^sigma - 1|
};

// Evaluate the full ratio chain of a partition given by log lengths
// (normalized to sum to one), entirely in log space.
RatioChainRun ratio_chain(const SmoothTestMap& g,
                          const std::vector<double>& log_lengths, double eps);

// Build the doubly-exponential log-length ladder that pushes every R above
// the proof-grade floor exp(log_r) and evaluate its chain.
RatioChainRun ratio_chain_extreme(const SmoothTestMap& g, double eps, int n);

struct ModerateRow {
    int n = 0;
    double max_quotient = 0;  // max_k |log v_ratio| / (400 C d_k / log r)
};

struct ModerateReport {
    double r = 0;
    double contrast = 0;
    std::vector<ModerateRow> rows;
    double max_quotient = 0;
    bool all_pass = false;
};

// Random partitions whose cyclic log-length gaps keep every R above r,
// checked against the per-block logarithmic ratio bound.
ModerateReport ratio_chain_moderate(const SmoothTestMap& g, double r,
                                    int count, std::uint64_t seed);

// The closed form whose sum with log(t + sqrt(t^2-1)) gives the same
// expression at t(1+alpha); the shift identity is an oracle target.
double beta_closed_form(double t, double alpha);

struct LogEstimatesReport {
    double max_log1p_quotient = 0;   // |log(1+y)| / (2|y|) on |y| <= 1/2
    double max_log3_quotient = 0;    // |log(1+3y)| / (4|y|) on |y| <= 0.1
    double max_expm1_quotient = 0;   // |e^x - 1| / (2|x|) on [-1, 1]
    int grid = 0;
};

// Grid verification of the three elementary estimates used by the ratio
// chain; throws BoundViolated if any quotient exceeds one.
LogEstimatesReport log_estimates_check();

}  // namespace shavlab::schw
