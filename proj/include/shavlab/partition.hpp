#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace shavlab::meas {

// Ordered subdivision of [0, 1] into n blocks, stored by its n - 1 interior
// cut points. The boundary conventions x_0 = 0, x_n = 1 are implicit, the
// left phantom point sits at x_{n-1} - 1, so block 0 wraps around and has
// the same length as block n.
struct Partition {
    std::vector<double> interior;

    int n() const { return static_cast<int>(interior.size()) + 1; }
};

void validate_partition(const Partition& x);

// Coordinate systems layered on a partition: block lengths l (n entries,
// summing to 1), length ratios y_k = l_k / l_n (n entries, y_n = 1), and
// half-log ratios z_k = log(y_k) / 2 (n entries, z_n = 0). Jacobians of the
// three changes of variables are reported alongside: x -> l is volume
// preserving, x -> y scales by (1 - x_{n-1})^{-n}, and z -> y scales by
// 2^{n-1} prod y_k.
struct TransformReport {
    std::vector<double> l;
    std::vector<double> y;
    std::vector<double> z;
    double jac_A;
    double jac_B;
    double jac_C_inv;
};

TransformReport transforms(const Partition& x);
Partition partition_from_l(const std::vector<double>& l);
Partition partition_from_y(const std::vector<double>& y);
// Takes the n - 1 free half-log ratios (the final entry is pinned to 0).
Partition partition_from_z(const std::vector<double>& z_free);

double mesh(const Partition& x);
// Smallest half-log length ratio |log(l_k / l_{k-1})| / 2 over adjacent
// blocks, including the wrap pair (l_n, l_1). The neighbor ratio
// (l_k + l_{k-1}) / (2 sqrt(l_k l_{k-1})) equals cosh of this quantity.
double min_half_log_ratio(const Partition& x);

// The same two observables computed directly from the free half-log ratio
// vector, stable for draws whose blocks underflow double resolution.
double mesh_from_z(const std::vector<double>& z_free);
double min_half_log_ratio_from_z(const std::vector<double>& z_free);

// Interpolated evaluator for the convolution kernel, accurate to ~1e-10
// absolute for |tau| <= 1e6 and falling back to direct quadrature beyond.
// Several orders of magnitude faster than the quadrature route; safe to call
// concurrently after the first call has returned.
double v1_cached(double tau);

// Chain density over the blocks: the product of 1/l_k times the kernel at
// the neighbor ratio of (l_k, l_{k-1}), k = 1..n with the wrap convention.
// log_u1n evaluates in log space through the half-log ratios and never forms
// the ratios in floating point; u1n_direct evaluates the defining product
// verbatim in long double as an independent route.
double log_u1n(const Partition& x);
double u1n(const Partition& x);
double u1n_direct(const Partition& x);

// Normalizer of the chain density over the ordered simplex, computed by the
// one-dimensional moment reduction: 2^{n-1} times the (2n-1)-link chain
// moment. Valid for 1 <= n <= 15.
double Jn(int n);
// Jn divided by 2^{3n-1} (2n)!; converges to the same limit as the moment
// ratios.
double Jn_ratio(int n);

struct MCEstimate {
    double value;
    double stderr_value;
    std::size_t n_samples;
};

// Importance-sampling estimate of Jn for n in {2, 3} over the half-log
// coordinates, using stratified Cauchy proposals (for n = 3 a two-component
// mixture following the near-diagonal ridge). Deterministic for a fixed
// (seed, stream_base) regardless of worker count.
MCEstimate direct_Jn_mc(int n, std::size_t samples, std::uint64_t seed,
                        std::uint64_t stream_base, int workers);

// Self-normalized importance-sampling estimate of the expectation of g under
// the normalized chain density, same proposals as direct_Jn_mc; n in {2, 3}.
MCEstimate direct_expectation_mc(
    int n, const std::function<double(const std::vector<double>& z)>& g,
    std::size_t samples, std::uint64_t seed, std::uint64_t stream_base,
    int workers);

// Random-walk Metropolis over the full chain coordinates (t_1..t_{2n-1},
// endpoints pinned at 0) targeting the unnormalized chain law
// prod (1 + (t_k - t_{k-1})^2)^{-1/2}. Componentwise Gaussian steps; per
// coordinate step sizes adapt to a 30-45% acceptance window during burn-in
// and freeze afterwards; thinning is chosen per chain from an integrated
// autocorrelation estimate on a pilot segment.
struct McmcConfig {
    std::uint64_t seed = 1;
    std::uint64_t stream_base = 0;
    int chains = 4;
    std::size_t burn_in = 10000;
    std::size_t samples_per_chain = 20000;
    int workers = 1;
};

struct McmcEstimate {
    double value;
    double stderr_value;
    double ess;
    double acceptance;
    int thin_max;
};

// Estimates the expectation of g, evaluated on the free half-log ratio
// vector (the even chain coordinates), under the normalized chain density.
// Batch-means standard error across chains.
McmcEstimate mcmc_expectation(
    int n, const std::function<double(const std::vector<double>& z)>& g,
    const McmcConfig& cfg);

// Draws a reproducible stream of partitions (all chains concatenated in
// chain order). Same config, same stream, regardless of worker count.
// Draws whose blocks collide at double resolution are dropped.
std::vector<Partition> sample_un(int n, const McmcConfig& cfg);

// The same chain draws as log block lengths (n entries per draw, summing
// to one after exponentiation). Nothing is dropped: the chain measure
// concentrates on partitions whose smallest blocks are far below double
// resolution in absolute coordinates, and this form keeps every draw
// exactly. Same streams as sample_un, so the two agree draw for draw
// where both exist.
std::vector<std::vector<double>> sample_un_log(int n, const McmcConfig& cfg);

struct DecayRow {
    int n;
    double estimate;
    double stderr_value;
    double ess;
    double scaled;
};

// Tail probabilities under the normalized chain density. check_mesh_decay
// estimates P(mesh > eps) for each n (exact 0 when eps >= 1);
// check_ratio_decay estimates P(min neighbor ratio <= r), reported with the
// n-scaled column n * estimate (exact 0 when r <= 1).
std::vector<DecayRow> check_mesh_decay(const std::vector<int>& ns, double eps,
                                       const McmcConfig& cfg);
std::vector<DecayRow> check_ratio_decay(const std::vector<int>& ns, double r,
                                        const McmcConfig& cfg);

}  // namespace shavlab::meas
