#include "shavlab/partition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "shavlab/errors.hpp"
#include "shavlab/kernels.hpp"
#include "shavlab/parallel.hpp"
#include "shavlab/rng.hpp"

namespace shavlab::meas {

namespace {

constexpr double kPi = kern::kPi;

std::vector<double> lengths_of(const Partition& x) {
    const int n = x.n();
    std::vector<double> l(static_cast<std::size_t>(n));
    double prev = 0.0;
    for (int k = 1; k < n; ++k) {
        l[static_cast<std::size_t>(k - 1)] =
            x.interior[static_cast<std::size_t>(k - 1)] - prev;
        prev = x.interior[static_cast<std::size_t>(k - 1)];
    }
    l[static_cast<std::size_t>(n - 1)] = 1.0 - prev;
    return l;
}

}  // namespace

void validate_partition(const Partition& x) {
    double prev = 0.0;
    for (double c : x.interior) {
        if (!(c > prev && c < 1.0))
            throw DomainError("partition cut points must increase in (0, 1)");
        prev = c;
    }
}

TransformReport transforms(const Partition& x) {
    validate_partition(x);
    const int n = x.n();
    TransformReport rep;
    rep.l = lengths_of(x);
    rep.y.resize(static_cast<std::size_t>(n));
    rep.z.resize(static_cast<std::size_t>(n));
    const double ln = rep.l.back();
    double prod_y = 1.0;
    for (int k = 0; k < n; ++k) {
        rep.y[static_cast<std::size_t>(k)] = rep.l[static_cast<std::size_t>(k)] / ln;
        rep.z[static_cast<std::size_t>(k)] =
            0.5 * std::log(rep.y[static_cast<std::size_t>(k)]);
        prod_y *= rep.y[static_cast<std::size_t>(k)];
    }
    rep.y.back() = 1.0;
    rep.z.back() = 0.0;
    rep.jac_A = 1.0;
    rep.jac_B = std::pow(ln, -static_cast<double>(n));
    rep.jac_C_inv = std::ldexp(prod_y, n - 1);
    return rep;
}

Partition partition_from_l(const std::vector<double>& l) {
    if (l.empty())
        throw DomainError("need at least one block length");
    double total = 0.0;
    for (double v : l) {
        if (!(v > 0.0))
            throw DomainError("block lengths must be positive");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw DomainError("block lengths must sum to 1");
    Partition x;
    x.interior.resize(l.size() - 1);
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < l.size(); ++k) {
        acc += l[k] / total;
        x.interior[k] = acc;
    }
    validate_partition(x);
    return x;
}

Partition partition_from_y(const std::vector<double>& y) {
    if (y.empty() || std::abs(y.back() - 1.0) > 1e-12)
        throw DomainError("ratio coordinates must end with 1");
    double total = 0.0;
    for (double v : y) {
        if (!(v > 0.0))
            throw DomainError("ratio coordinates must be positive");
        total += v;
    }
    std::vector<double> l(y.size());
    for (std::size_t k = 0; k < y.size(); ++k)
        l[k] = y[k] / total;
    return partition_from_l(l);
}

Partition partition_from_z(const std::vector<double>& z_free) {
    std::vector<double> y(z_free.size() + 1);
    for (std::size_t k = 0; k < z_free.size(); ++k)
        y[k] = std::exp(2.0 * z_free[k]);
    y.back() = 1.0;
    return partition_from_y(y);
}

double mesh(const Partition& x) {
    validate_partition(x);
    const std::vector<double> l = lengths_of(x);
    return *std::max_element(l.begin(), l.end());
}

double min_half_log_ratio(const Partition& x) {
    validate_partition(x);
    const std::vector<double> l = lengths_of(x);
    const int n = static_cast<int>(l.size());
    double best = std::abs(std::log(l[0]) - std::log(l.back())) / 2;
    for (int k = 1; k < n; ++k)
        best = std::min(best, std::abs(std::log(l[static_cast<std::size_t>(k)]) -
                                       std::log(l[static_cast<std::size_t>(k - 1)])) /
                                  2);
    return best;
}

namespace {

// Hermite-cubic table for the kernel in the variable u = asinh(tau); the
// derivative data makes the interpolant quartic-accurate, ~1e-10 absolute at
// this node count.
struct KernelTable {
    static constexpr double kTauMax = 1e6;
    static constexpr int kNodes = 4096;
    double u_max;
    double h;
    std::vector<double> f;
    std::vector<double> d;

    KernelTable() : u_max(std::asinh(kTauMax)), h(u_max / kNodes) {
        f.resize(kNodes + 1);
        d.resize(kNodes + 1);
        for (int i = 0; i <= kNodes; ++i) {
            const double u = i * h;
            const double tau = std::sinh(u);
            f[static_cast<std::size_t>(i)] = kern::v1(tau);
            d[static_cast<std::size_t>(i)] =
                kern::v1_prime(tau) * std::cosh(u);
        }
    }

    double eval(double u) const {
        int i = static_cast<int>(u / h);
        i = std::min(std::max(i, 0), kNodes - 1);
        const double s = (u - i * h) / h;
        const double f0 = f[static_cast<std::size_t>(i)];
        const double f1 = f[static_cast<std::size_t>(i + 1)];
        const double d0 = d[static_cast<std::size_t>(i)] * h;
        const double d1 = d[static_cast<std::size_t>(i + 1)] * h;
        const double s2 = s * s;
        const double s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * f0 + (s3 - 2 * s2 + s) * d0 +
               (-2 * s3 + 3 * s2) * f1 + (s3 - s2) * d1;
    }
};

}  // namespace

double v1_cached(double tau) {
    static const KernelTable table;
    const double s = std::abs(tau);
    if (s > KernelTable::kTauMax)
        return kern::v1(s);
    return table.eval(std::asinh(s));
}

double log_u1n(const Partition& x) {
    validate_partition(x);
    const std::vector<double> l = lengths_of(x);
    const int n = static_cast<int>(l.size());
    std::vector<double> lg(l.size());
    for (std::size_t k = 0; k < l.size(); ++k)
        lg[k] = std::log(l[k]);
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
        const double prev = (k == 0) ? lg.back() : lg[static_cast<std::size_t>(k - 1)];
        const double gap = std::abs(lg[static_cast<std::size_t>(k)] - prev) / 2;
        acc += std::log(v1_cached(gap)) - lg[static_cast<std::size_t>(k)];
    }
    return acc;
}

double u1n(const Partition& x) { return std::exp(log_u1n(x)); }

double u1n_direct(const Partition& x) {
    validate_partition(x);
    const int n = x.n();
    // Verbatim product over the cut points, with the phantom left point one
    // unit below the last interior cut; long double keeps the dynamic range.
    std::vector<double> pts(static_cast<std::size_t>(n) + 2);
    pts[0] = (n == 1 ? 0.0 : x.interior.back()) - 1.0;
    pts[1] = 0.0;
    for (int k = 1; k < n; ++k)
        pts[static_cast<std::size_t>(k + 1)] =
            x.interior[static_cast<std::size_t>(k - 1)];
    pts[static_cast<std::size_t>(n + 1)] = 1.0;
    long double prod = 1.0L;
    for (int k = 1; k <= n; ++k) {
        const double lk = pts[static_cast<std::size_t>(k + 1)] -
                          pts[static_cast<std::size_t>(k)];
        const double lprev = pts[static_cast<std::size_t>(k)] -
                             pts[static_cast<std::size_t>(k - 1)];
        const double span = pts[static_cast<std::size_t>(k + 1)] -
                            pts[static_cast<std::size_t>(k - 1)];
        const double ratio =
            std::max(1.0, span / (2.0 * std::sqrt(lk * lprev)));
        prod *= static_cast<long double>(kern::v_arg(ratio)) / lk;
    }
    return static_cast<double>(prod);
}

double Jn(int n) {
    if (n < 1 || n > 15)
        throw DomainError("Jn supports 1 <= n <= 15");
    return std::ldexp(kern::moment_Tn(2 * n - 1), n - 1);
}

double Jn_ratio(int n) {
    if (n < 1 || n > 15)
        throw DomainError("Jn_ratio supports 1 <= n <= 15");
    return kern::moment_ratio(2 * n - 1);
}

namespace {

constexpr std::size_t kBatch = 4096;

double cauchy_density(double z) { return 1.0 / (kPi * (1.0 + z * z)); }

double cauchy_quantile(double u) { return std::tan(kPi * (u - 0.5)); }

struct WeightedSums {
    long double sw = 0, swg = 0, sww = 0, swwg = 0, swwgg = 0;
    std::size_t count = 0;

    void add(double w, double g) {
        const long double lw = w;
        const long double lg = g;
        sw += lw;
        swg += lw * lg;
        sww += lw * lw;
        swwg += lw * lw * lg;
        swwgg += lw * lw * lg * lg;
        ++count;
    }

    void merge(const WeightedSums& o) {
        sw += o.sw;
        swg += o.swg;
        sww += o.sww;
        swwg += o.swwg;
        swwgg += o.swwgg;
        count += o.count;
    }
};

// Draws one proposal point in the free half-log coordinates and returns the
// importance weight of the unnormalized chain density against the proposal.
// The first uniform is stratified by global sample index.
void propose(int n, std::size_t index, std::size_t total, Rng& rng,
             std::vector<double>& z, double& weight) {
    const double u1 = (static_cast<double>(index) + rng.next_unit()) /
                      static_cast<double>(total);
    if (n == 2) {
        const double z1 = cauchy_quantile(u1);
        z.assign(1, z1);
        const double v = v1_cached(z1);
        weight = 2.0 * v * v / cauchy_density(z1);
        return;
    }
    const double z1 = cauchy_quantile(u1);
    const bool ridge = rng.next_unit() < 0.5;
    const double step = cauchy_quantile(rng.next_unit());
    const double z2 = ridge ? z1 + step : step;
    z.assign({z1, z2});
    const double q = 0.5 * cauchy_density(z1) * cauchy_density(z2) +
                     0.5 * cauchy_density(z1) * cauchy_density(z2 - z1);
    weight = 4.0 * v1_cached(z1) * v1_cached(z2 - z1) * v1_cached(z2) / q;
}

WeightedSums run_weighted(
    int n, std::size_t samples, std::uint64_t seed, std::uint64_t stream_base,
    int workers,
    const std::function<double(const std::vector<double>&)>& g) {
    if (n != 2 && n != 3)
        throw DomainError("direct estimates support n in {2, 3}");
    if (samples == 0)
        throw DomainError("need at least one sample");
    const std::size_t batches = (samples + kBatch - 1) / kBatch;
    std::vector<WeightedSums> parts(batches);
    parallel_batches(batches, static_cast<unsigned>(std::max(workers, 1)),
                     [&](std::size_t b) {
                         static thread_local std::vector<double> z;
                         const std::size_t lo = b * kBatch;
                         const std::size_t hi = std::min(samples, lo + kBatch);
                         WeightedSums acc;
                         for (std::size_t i = lo; i < hi; ++i) {
                             Rng rng(seed, stream_base + i);
                             double w = 0;
                             propose(n, i, samples, rng, z, w);
                             acc.add(w, g ? g(z) : 0.0);
                         }
                         parts[b] = acc;
                     });
    WeightedSums total;
    for (const WeightedSums& p : parts)
        total.merge(p);
    return total;
}

}  // namespace

MCEstimate direct_Jn_mc(int n, std::size_t samples, std::uint64_t seed,
                        std::uint64_t stream_base, int workers) {
    const WeightedSums s =
        run_weighted(n, samples, seed, stream_base, workers, nullptr);
    const long double cnt = static_cast<long double>(s.count);
    const long double mean = s.sw / cnt;
    const long double var = (s.sww - cnt * mean * mean) / (cnt - 1);
    MCEstimate est;
    est.value = static_cast<double>(mean);
    est.stderr_value = std::sqrt(static_cast<double>(var / cnt));
    est.n_samples = s.count;
    return est;
}

MCEstimate direct_expectation_mc(
    int n, const std::function<double(const std::vector<double>& z)>& g,
    std::size_t samples, std::uint64_t seed, std::uint64_t stream_base,
    int workers) {
    if (!g)
        throw DomainError("need a statistic to estimate");
    const WeightedSums s = run_weighted(n, samples, seed, stream_base, workers, g);
    const long double ghat = s.swg / s.sw;
    // Delta-method variance of the self-normalized ratio estimator.
    const long double num = s.swwgg - 2 * ghat * s.swwg + ghat * ghat * s.sww;
    MCEstimate est;
    est.value = static_cast<double>(ghat);
    est.stderr_value =
        std::sqrt(std::max(0.0, static_cast<double>(num / (s.sw * s.sw))));
    est.n_samples = s.count;
    return est;
}

}  // namespace shavlab::meas
