#include "shavlab/wiener.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <fstream>

#include <nlohmann/json.hpp>

#include "shavlab/errors.hpp"
#include "shavlab/parallel.hpp"

namespace shavlab::wiener {

namespace {

static_assert(std::endian::native == std::endian::little,
              "path dumps are written in native byte order");

unsigned resolve_workers(int workers) {
    return workers > 0 ? static_cast<unsigned>(workers) : default_workers();
}

// Raw power sums of a stream of values, enough for mean, standard error,
// and skewness.
struct Moments3 {
    long double s1 = 0, s2 = 0, s3 = 0;
    long long n = 0;

    void add(double x) {
        const long double v = x;
        s1 += v;
        s2 += v * v;
        s3 += v * v * v;
        ++n;
    }
    void merge(const Moments3& o) {
        s1 += o.s1;
        s2 += o.s2;
        s3 += o.s3;
        n += o.n;
    }
};

Estimate to_estimate(const Moments3& m) {
    Estimate e;
    e.n = m.n;
    if (m.n == 0)
        return e;
    const long double mean = m.s1 / m.n;
    e.value = static_cast<double>(mean);
    if (m.n < 2)
        return e;
    const long double var =
        std::max<long double>(0, (m.s2 - m.s1 * m.s1 / m.n) / (m.n - 1));
    e.stderr_value = static_cast<double>(std::sqrt(var / m.n));
    const long double m2c = m.s2 / m.n - mean * mean;
    if (m2c > 0) {
        const long double m3c =
            m.s3 / m.n - 3 * mean * (m.s2 / m.n) + 2 * mean * mean * mean;
        e.skewness = static_cast<double>(m3c / std::pow(m2c, 1.5L));
    }
    return e;
}

// Runs per_path over path indices with one RNG stream per path and batch
// partials reduced in index order, so results do not depend on the worker
// count. per_path returns K values; the helper also tracks the running
// maximum of each component's absolute value.
template <int K>
struct BatchPartial {
    std::array<Moments3, K> mom{};
    std::array<double, K> maxabs{};
};

template <int K, typename Fn>
void run_paths(long long npaths, std::uint64_t seed, std::uint64_t stream_base,
               int workers, Fn&& per_path, std::array<Moments3, K>& mom_out,
               std::array<double, K>& maxabs_out) {
    if (npaths <= 0)
        throw DomainError("need a positive number of paths");
    const long long bs = 4096;
    const std::size_t nb = static_cast<std::size_t>((npaths + bs - 1) / bs);
    std::vector<BatchPartial<K>> parts(nb);
    parallel_batches(nb, resolve_workers(workers), [&](std::size_t b) {
        BatchPartial<K> acc;
        const long long lo = static_cast<long long>(b) * bs;
        const long long hi = std::min(npaths, lo + bs);
        for (long long j = lo; j < hi; ++j) {
            Rng rng(seed, stream_base + static_cast<std::uint64_t>(j));
            const std::array<double, K> vals = per_path(j, rng);
            for (int k = 0; k < K; ++k) {
                acc.mom[static_cast<std::size_t>(k)].add(vals[static_cast<std::size_t>(k)]);
                acc.maxabs[static_cast<std::size_t>(k)] =
                    std::max(acc.maxabs[static_cast<std::size_t>(k)],
                             std::abs(vals[static_cast<std::size_t>(k)]));
            }
        }
        parts[b] = acc;
    });
    mom_out = {};
    maxabs_out = {};
    for (const auto& p : parts)
        for (int k = 0; k < K; ++k) {
            mom_out[static_cast<std::size_t>(k)].merge(p.mom[static_cast<std::size_t>(k)]);
            maxabs_out[static_cast<std::size_t>(k)] =
                std::max(maxabs_out[static_cast<std::size_t>(k)],
                         p.maxabs[static_cast<std::size_t>(k)]);
        }
}

void require_grid_size(int m_grid) {
    if (m_grid < 2 || m_grid > (1 << 24))
        throw DomainError("grid size out of range");
}

// Exponentials of the path values and their trapezoid integral. x(0) = 0,
// so the first weight is always one.
struct ExpIntegral {
    double last = 1;   // e^{x(1)}
    double total = 1;  // trapezoid integral of e^{x}
};

ExpIntegral exp_integral(const std::vector<double>& x) {
    const std::size_t m = x.size() - 1;
    double sum = 0.5;  // half weight for e^{x(0)} = 1
    double e = 1;
    for (std::size_t i = 1; i <= m; ++i) {
        e = std::exp(x[i]);
        sum += (i == m) ? e / 2 : e;
    }
    return {e, sum / static_cast<double>(m)};
}

void fill_path(std::vector<double>& x, int m_grid, Rng& rng) {
    x.resize(static_cast<std::size_t>(m_grid) + 1);
    x[0] = 0.0;
    const double sd = 1.0 / std::sqrt(static_cast<double>(m_grid));
    for (int i = 1; i <= m_grid; ++i)
        x[static_cast<std::size_t>(i)] =
            x[static_cast<std::size_t>(i) - 1] + sd * rng.next_normal();
}

double phi_cdf(double z) {
    if (std::isnan(z))
        throw DomainError("cylinder bound is NaN");
    return std::erfc(-z / std::sqrt(2.0)) / 2;
}

}  // namespace

GridFunction sample_path(int m_grid, Rng& rng) {
    require_grid_size(m_grid);
    GridFunction x;
    fill_path(x.v, m_grid, rng);
    return x;
}

double cylinder_probability(const std::vector<double>& times,
                            const std::vector<std::pair<double, double>>& box) {
    if (times.empty() || times.size() != box.size())
        throw DomainError("need matching nonempty time and box lists");
    double prev = 0.0;
    double prob = 1.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double t = times[k];
        if (!(t > prev) || !(t <= 1.0))
            throw DomainError("times must be strictly increasing in (0,1]");
        const double sd = std::sqrt(t - prev);
        const double lo = box[k].first;
        const double hi = box[k].second;
        const double p = phi_cdf(hi / sd) - phi_cdf(lo / sd);
        prob *= std::clamp(p, 0.0, 1.0);
        prev = t;
    }
    return prob;
}

Estimate moment_Ml(int l, int side, long long npaths, int m_grid,
                   std::uint64_t seed, std::uint64_t stream_base, int workers) {
    if (l < 1 || l > 6)
        throw DomainError("moment order must be in 1..6");
    if (side != 0 && side != 1)
        throw DomainError("side must be 0 or 1");
    require_grid_size(m_grid);
    std::array<Moments3, 1> mom;
    std::array<double, 1> maxabs;
    run_paths<1>(
        npaths, seed, stream_base, workers,
        [&](long long, Rng& rng) -> std::array<double, 1> {
            static thread_local std::vector<double> buf;
            fill_path(buf, m_grid, rng);
            const ExpIntegral e = exp_integral(buf);
            const double qp = (side == 0) ? 1.0 / e.total : e.last / e.total;
            return {std::pow(qp, l)};
        },
        mom, maxabs);
    return to_estimate(mom[0]);
}

PairedMoments moment_Ml_paired(int l, long long npaths, int m_grid,
                               std::uint64_t seed, std::uint64_t stream_base,
                               int workers) {
    if (l < 1 || l > 6)
        throw DomainError("moment order must be in 1..6");
    require_grid_size(m_grid);
    std::array<Moments3, 4> mom;
    std::array<double, 4> maxabs;
    run_paths<4>(
        npaths, seed, stream_base, workers,
        [&](long long, Rng& rng) -> std::array<double, 4> {
            static thread_local std::vector<double> buf;
            static thread_local std::vector<double> rev;
            fill_path(buf, m_grid, rng);
            const ExpIntegral e = exp_integral(buf);
            const double v0 = std::pow(1.0 / e.total, l);
            const double v1 = std::pow(e.last / e.total, l);
            // Left derivative of the reversed path's diffeomorphism; equal
            // to v1 apart from the summation order inside the integral.
            rev.resize(buf.size());
            const std::size_t m = buf.size() - 1;
            for (std::size_t i = 0; i <= m; ++i)
                rev[i] = buf[m - i] - buf[m];
            const ExpIntegral er = exp_integral(rev);
            const double v1r = std::pow(1.0 / er.total, l);
            const double gap = std::abs(v1 - v1r) / std::max(v1, v1r);
            return {v0, v1, v1 - v0, gap};
        },
        mom, maxabs);
    PairedMoments out;
    out.side0 = to_estimate(mom[0]);
    out.side1 = to_estimate(mom[1]);
    const Estimate d = to_estimate(mom[2]);
    out.diff_mean = d.value;
    out.diff_stderr = d.stderr_value;
    out.reversal_gap = maxabs[3];
    return out;
}

Estimate exp_moment(double s, int l, long long npaths, int m_grid,
                    std::uint64_t seed, std::uint64_t stream_base, int workers) {
    require_grid_size(m_grid);
    if (l < 0 || l > 12)
        throw DomainError("exponent factor must be in 0..12");
    const double pos = s * m_grid;
    const long long idx = std::llround(pos);
    if (std::abs(pos - static_cast<double>(idx)) > 1e-9 || idx < 1 ||
        idx > m_grid)
        throw DomainError("time must be grid aligned in (0,1]");
    std::array<Moments3, 1> mom;
    std::array<double, 1> maxabs;
    run_paths<1>(
        npaths, seed, stream_base, workers,
        [&](long long, Rng& rng) -> std::array<double, 1> {
            const double sd = 1.0 / std::sqrt(static_cast<double>(m_grid));
            double x = 0;
            for (long long i = 0; i < idx; ++i)
                x += sd * rng.next_normal();
            return {std::exp(-l * x)};
        },
        mom, maxabs);
    return to_estimate(mom[0]);
}

Estimate I_energy(long long npaths, int m_grid, std::uint64_t seed,
                  std::uint64_t stream_base, int workers) {
    require_grid_size(m_grid);
    std::array<Moments3, 1> mom;
    std::array<double, 1> maxabs;
    run_paths<1>(
        npaths, seed, stream_base, workers,
        [&](long long, Rng& rng) -> std::array<double, 1> {
            static thread_local std::vector<double> buf;
            fill_path(buf, m_grid, rng);
            const ExpIntegral e = exp_integral(buf);
            // Trapezoid integral of (e^{x}/total)^2 over the unit interval.
            const std::size_t m = buf.size() - 1;
            double sum = 0.5;
            for (std::size_t i = 1; i <= m; ++i) {
                const double w = std::exp(2 * buf[i]);
                sum += (i == m) ? w / 2 : w;
            }
            const double integral = sum / static_cast<double>(m);
            return {integral / (e.total * e.total)};
        },
        mom, maxabs);
    return to_estimate(mom[0]);
}

C4Report c4_constant(long long npaths, int m_grid, std::uint64_t seed,
                     std::uint64_t stream_base, int workers) {
    require_grid_size(m_grid);
    std::array<Moments3, 3> mom;
    std::array<double, 3> maxabs;
    run_paths<3>(
        npaths, seed, stream_base, workers,
        [&](long long, Rng& rng) -> std::array<double, 3> {
            static thread_local std::vector<double> buf;
            fill_path(buf, m_grid, rng);
            const ExpIntegral e = exp_integral(buf);
            const double qp1 = e.last / e.total;
            const std::size_t m = buf.size() - 1;
            double sum = 0.5;
            for (std::size_t i = 1; i <= m; ++i) {
                const double w = std::exp(2 * buf[i]);
                sum += (i == m) ? w / 2 : w;
            }
            const double integral = sum / static_cast<double>(m);
            return {qp1, qp1 * qp1, integral / (e.total * e.total)};
        },
        mom, maxabs);
    C4Report out;
    out.m1 = to_estimate(mom[0]);
    out.m2 = to_estimate(mom[1]);
    out.energy = to_estimate(mom[2]);
    out.c4 = 1 + out.m1.value + out.m2.value + out.energy.value;
    out.c4_stderr = std::sqrt(out.m1.stderr_value * out.m1.stderr_value +
                              out.m2.stderr_value * out.m2.stderr_value +
                              out.energy.stderr_value * out.energy.stderr_value);
    return out;
}

HolderReport holder_support_check(double delta, long long npaths,
                                  std::uint64_t seed,
                                  std::uint64_t stream_base, int workers) {
    if (!(delta >= 0) || !(delta < 1))
        throw DomainError("exponent must be in [0,1)");
    if (npaths <= 0)
        throw DomainError("need a positive number of paths");
    constexpr int kLevels = 12;           // finest grid 2^12
    constexpr int kCoarsest = 8;          // sweep starts at 2^8
    const int fine = 1 << kLevels;
    HolderReport out;
    out.delta = delta;
    out.cap = 8.0;
    for (int k = kCoarsest; k <= kLevels; ++k)
        out.resolutions.push_back(1 << k);
    const std::size_t nres = out.resolutions.size();
    std::vector<std::vector<double>> single(nres);
    for (auto& col : single)
        col.resize(static_cast<std::size_t>(npaths));
    std::vector<double> all_scale(static_cast<std::size_t>(npaths));

    const long long bs = 64;
    const std::size_t nb = static_cast<std::size_t>((npaths + bs - 1) / bs);
    parallel_batches(nb, resolve_workers(workers), [&](std::size_t b) {
        std::vector<double> x;
        const long long lo = static_cast<long long>(b) * bs;
        const long long hi = std::min(npaths, lo + bs);
        for (long long j = lo; j < hi; ++j) {
            Rng rng(seed, stream_base + static_cast<std::uint64_t>(j));
            fill_path(x, fine, rng);
            double qall = 0;
            for (int k = 0; k <= kLevels; ++k) {
                const int mk = 1 << k;
                const int stride = fine / mk;
                double biggest = 0;
                for (int i = 0; i < mk; ++i)
                    biggest = std::max(
                        biggest,
                        std::abs(x[static_cast<std::size_t>((i + 1) * stride)] -
                                 x[static_cast<std::size_t>(i * stride)]));
                const double quot =
                    biggest * std::pow(static_cast<double>(mk), delta);
                qall = std::max(qall, quot);
                if (k >= kCoarsest)
                    single[static_cast<std::size_t>(k - kCoarsest)]
                          [static_cast<std::size_t>(j)] = quot;
            }
            all_scale[static_cast<std::size_t>(j)] = qall;
        }
    });

    long long bounded = 0;
    for (double q : all_scale)
        if (q <= out.cap)
            ++bounded;
    out.bounded_fraction =
        static_cast<double>(bounded) / static_cast<double>(npaths);
    for (auto& col : single) {
        std::sort(col.begin(), col.end());
        const std::size_t n = col.size();
        const double med = (n % 2 == 1)
                               ? col[n / 2]
                               : (col[n / 2 - 1] + col[n / 2]) / 2;
        out.median_single_scale.push_back(med);
    }
    return out;
}

void dump_paths(const std::string& stem, int m_grid, long long npaths,
                std::uint64_t seed, std::uint64_t stream_base) {
    require_grid_size(m_grid);
    if (npaths <= 0)
        throw DomainError("need a positive number of paths");
    const std::string bin_name = stem + ".bin";
    std::ofstream bin(bin_name, std::ios::binary | std::ios::trunc);
    if (!bin)
        throw Error("cannot open " + bin_name + " for writing");
    std::vector<double> x;
    for (long long j = 0; j < npaths; ++j) {
        Rng rng(seed, stream_base + static_cast<std::uint64_t>(j));
        fill_path(x, m_grid, rng);
        bin.write(reinterpret_cast<const char*>(x.data()),
                  static_cast<std::streamsize>(x.size() * sizeof(double)));
    }
    bin.close();
    if (!bin)
        throw Error("failed writing " + bin_name);

    nlohmann::json meta;
    meta["format"] = "float64-le";
    meta["layout"] = "row-major";
    meta["m"] = m_grid;
    meta["npaths"] = npaths;
    meta["seed"] = seed;
    meta["stream_base"] = stream_base;
    meta["values_per_path"] = m_grid + 1;
    const std::string json_name = stem + ".json";
    std::ofstream js(json_name, std::ios::trunc);
    if (!js)
        throw Error("cannot open " + json_name + " for writing");
    js << meta.dump(2) << "\n";
    js.close();
    if (!js)
        throw Error("failed writing " + json_name);
}

}  // namespace shavlab::wiener
