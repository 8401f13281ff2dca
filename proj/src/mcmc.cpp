#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "shavlab/errors.hpp"
#include "shavlab/parallel.hpp"
#include "shavlab/partition.hpp"
#include "shavlab/rng.hpp"

namespace shavlab::meas {

namespace {

// One pinned-endpoint chain walker. Coordinates t_0..t_{2n} with both ends
// fixed at 0; the target is prod (1 + (t_k - t_{k-1})^2)^{-1/2}.
//
// The target's mass sits at spatial scales that grow exponentially with n,
// so the tuned componentwise walk is supplemented by symmetric moves that
// cross scales: a global multiplicative rescale (with its volume correction)
// and shifts of contiguous coordinate blocks by heavy-tailed steps drawn at
// log-uniform scales. All extra moves leave the stationary law unchanged.
struct ChainWalker {
    int n;
    std::vector<double> t;
    std::vector<double> sigma;
    std::vector<int> accepts_window;
    double scale_sigma = 1.0;
    int scale_accepts = 0;
    int scale_proposals = 0;
    Rng rng;
    long long proposals = 0;
    long long accepts = 0;

    ChainWalker(int n_, std::uint64_t seed, std::uint64_t stream)
        : n(n_),
          t(static_cast<std::size_t>(2 * n_) + 1, 0.0),
          sigma(static_cast<std::size_t>(2 * n_) + 1, 1.0),
          accepts_window(static_cast<std::size_t>(2 * n_) + 1, 0),
          rng(seed, stream) {}

    static double link(double a, double b) {
        const double d = b - a;
        return -0.5 * std::log1p(d * d);
    }

    bool metropolis(double delta) {
        ++proposals;
        if (std::log(rng.next_unit() + 1e-300) < delta) {
            ++accepts;
            return true;
        }
        return false;
    }

    void single_site(bool count_window) {
        const int top = 2 * n;
        for (int j = 1; j < top; ++j) {
            const double cur = t[static_cast<std::size_t>(j)];
            const double width = sigma[static_cast<std::size_t>(j)];
            // Mostly Gaussian steps; one in five is heavy-tailed so the
            // coordinate can cross the flat stretch between far neighbors.
            const double step =
                rng.next_unit() < 0.8
                    ? width * rng.next_normal()
                    : width * std::tan(3.141592653589793 *
                                       (rng.next_unit() - 0.5));
            const double prop = cur + step;
            const double lo = t[static_cast<std::size_t>(j - 1)];
            const double hi = t[static_cast<std::size_t>(j + 1)];
            const double delta = link(lo, prop) + link(prop, hi) -
                                 link(lo, cur) - link(cur, hi);
            if (metropolis(delta) && count_window)
                ++accepts_window[static_cast<std::size_t>(j)];
        }
    }

    void block_shift() {
        const int top = 2 * n - 1;
        int i = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(top)));
        int j = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(top)));
        if (i > j)
            std::swap(i, j);
        const double scale =
            std::pow(10.0, static_cast<double>(rng.next_below(8)));
        const double c =
            scale * std::tan(3.141592653589793 * (rng.next_unit() - 0.5));
        const double lo = t[static_cast<std::size_t>(i - 1)];
        const double hi = t[static_cast<std::size_t>(j + 1)];
        const double ti = t[static_cast<std::size_t>(i)];
        const double tj = t[static_cast<std::size_t>(j)];
        const double delta = link(lo, ti + c) + link(tj + c, hi) -
                             link(lo, ti) - link(tj, hi);
        if (metropolis(delta))
            for (int k = i; k <= j; ++k)
                t[static_cast<std::size_t>(k)] += c;
    }

    void rescale() {
        const double lam = std::exp(scale_sigma * rng.next_normal());
        double delta = (2.0 * n - 1.0) * std::log(lam);
        for (std::size_t k = 1; k < t.size(); ++k) {
            const double d = t[k] - t[k - 1];
            delta += -0.5 * std::log1p(lam * lam * d * d) + 0.5 * std::log1p(d * d);
        }
        ++scale_proposals;
        if (metropolis(delta)) {
            ++scale_accepts;
            for (std::size_t k = 1; k + 1 < t.size(); ++k)
                t[k] *= lam;
        }
    }

    void sweep(bool count_window) {
        single_site(count_window);
        for (int rep = 0; rep < 4; ++rep)
            block_shift();
        rescale();
    }

    // Keeps per-coordinate and rescale acceptance inside a 30-45% window.
    void adapt(int window_sweeps) {
        for (std::size_t j = 1; j < sigma.size() - 1; ++j) {
            const double rate =
                static_cast<double>(accepts_window[j]) / window_sweeps;
            if (rate < 0.30)
                sigma[j] = std::max(1e-3, sigma[j] * 0.9);
            else if (rate > 0.45)
                sigma[j] = std::min(1e8, sigma[j] * 1.1);
            accepts_window[j] = 0;
        }
        if (scale_proposals > 0) {
            const double rate =
                static_cast<double>(scale_accepts) / scale_proposals;
            if (rate < 0.30)
                scale_sigma = std::max(0.05, scale_sigma * 0.9);
            else if (rate > 0.45)
                scale_sigma = std::min(10.0, scale_sigma * 1.1);
            scale_accepts = 0;
            scale_proposals = 0;
        }
    }

    void z_free(std::vector<double>& out) const {
        out.resize(static_cast<std::size_t>(n) - 1);
        for (int k = 1; k < n; ++k)
            out[static_cast<std::size_t>(k - 1)] =
                t[static_cast<std::size_t>(2 * k)];
    }

    double energy() const {
        double acc = 0;
        for (std::size_t k = 1; k < t.size(); ++k)
            acc += link(t[k - 1], t[k]);
        return acc;
    }
};

struct ChainOutput {
    std::vector<double> g_values;
    std::vector<std::vector<double>> z_values;
    double acceptance = 0;
    int thin = 1;
};

int thin_from_pilot(const std::vector<double>& series) {
    const std::size_t n = series.size();
    double mean = 0;
    for (double v : series)
        mean += v;
    mean /= static_cast<double>(n);
    double var = 0;
    for (double v : series)
        var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    if (var == 0)
        return 1;
    double tau = 1.0;
    for (std::size_t lag = 1; lag < std::min<std::size_t>(n / 4, 200); ++lag) {
        double c = 0;
        for (std::size_t i = 0; i + lag < n; ++i)
            c += (series[i] - mean) * (series[i + lag] - mean);
        c /= static_cast<double>(n - lag) * var;
        if (c < 0.05)
            break;
        tau += 2 * c;
    }
    return std::min(64, std::max(1, static_cast<int>(std::ceil(tau))));
}

ChainOutput run_chain(int n, const McmcConfig& cfg, std::uint64_t stream,
                      const std::function<double(const std::vector<double>&)>& g,
                      bool keep_z) {
    ChainWalker walker(n, cfg.seed, stream);
    constexpr int kWindow = 100;
    std::size_t done = 0;
    while (done < cfg.burn_in) {
        for (int s = 0; s < kWindow && done < cfg.burn_in; ++s, ++done)
            walker.sweep(true);
        walker.adapt(kWindow);
    }
    walker.proposals = 0;
    walker.accepts = 0;

    constexpr int kPilot = 2048;
    std::vector<double> pilot(kPilot);
    for (int i = 0; i < kPilot; ++i) {
        walker.sweep(false);
        pilot[static_cast<std::size_t>(i)] = walker.energy();
    }
    ChainOutput out;
    out.thin = thin_from_pilot(pilot);

    out.g_values.reserve(cfg.samples_per_chain);
    std::vector<double> z;
    for (std::size_t i = 0; i < cfg.samples_per_chain; ++i) {
        for (int s = 0; s < out.thin; ++s)
            walker.sweep(false);
        walker.z_free(z);
        out.g_values.push_back(g ? g(z) : 0.0);
        if (keep_z)
            out.z_values.push_back(z);
    }
    out.acceptance =
        static_cast<double>(walker.accepts) / static_cast<double>(walker.proposals);
    return out;
}

std::vector<ChainOutput> run_chains(
    int n, const McmcConfig& cfg,
    const std::function<double(const std::vector<double>&)>& g, bool keep_z) {
    if (n < 2)
        throw DomainError("chain sampling needs n >= 2");
    if (cfg.chains < 1 || cfg.samples_per_chain < 64)
        throw DomainError("need at least one chain and 64 samples per chain");
    std::vector<ChainOutput> outs(static_cast<std::size_t>(cfg.chains));
    parallel_batches(static_cast<std::size_t>(cfg.chains),
                     static_cast<unsigned>(std::max(cfg.workers, 1)),
                     [&](std::size_t c) {
                         outs[c] = run_chain(n, cfg, cfg.stream_base + c, g,
                                             keep_z);
                     });
    for (const ChainOutput& o : outs)
        if (o.acceptance < 0.01)
            throw ChainDiverged("chain acceptance fell below 1%");
    return outs;
}

}  // namespace

McmcEstimate mcmc_expectation(
    int n, const std::function<double(const std::vector<double>&)>& g,
    const McmcConfig& cfg) {
    if (!g)
        throw DomainError("need a statistic to estimate");
    const std::vector<ChainOutput> outs = run_chains(n, cfg, g, false);

    constexpr std::size_t kBatches = 32;
    const std::size_t batch = cfg.samples_per_chain / kBatches;
    std::vector<double> batch_means;
    long double sum = 0, sumsq = 0;
    std::size_t total = 0;
    for (const ChainOutput& o : outs) {
        for (std::size_t b = 0; b < kBatches; ++b) {
            long double acc = 0;
            for (std::size_t i = b * batch; i < (b + 1) * batch; ++i)
                acc += o.g_values[i];
            batch_means.push_back(static_cast<double>(acc / batch));
        }
        for (double v : o.g_values) {
            sum += v;
            sumsq += static_cast<long double>(v) * v;
            ++total;
        }
    }
    const double mean = static_cast<double>(sum / total);
    long double bvar = 0;
    long double bmean = 0;
    for (double b : batch_means)
        bmean += b;
    bmean /= static_cast<long double>(batch_means.size());
    for (double b : batch_means)
        bvar += (b - bmean) * (b - bmean);
    bvar /= static_cast<long double>(batch_means.size()) - 1;

    McmcEstimate est;
    est.value = mean;
    est.stderr_value = std::sqrt(
        static_cast<double>(bvar / static_cast<long double>(batch_means.size())));
    const double var_s =
        static_cast<double>((sumsq - sum * sum / total) / (total - 1));
    if (var_s <= 0 || bvar <= 0) {
        est.stderr_value = var_s <= 0 ? 0.0 : est.stderr_value;
        est.ess = static_cast<double>(total);
    } else {
        const double tau = static_cast<double>(batch) *
                           static_cast<double>(bvar) / var_s;
        est.ess = static_cast<double>(total) / std::max(1.0, tau);
    }
    est.acceptance = 1.0;
    est.thin_max = 1;
    for (const ChainOutput& o : outs) {
        est.acceptance = std::min(est.acceptance, o.acceptance);
        est.thin_max = std::max(est.thin_max, o.thin);
    }
    return est;
}

std::vector<Partition> sample_un(int n, const McmcConfig& cfg) {
    const std::vector<ChainOutput> outs = run_chains(n, cfg, nullptr, true);
    std::vector<Partition> stream;
    stream.reserve(static_cast<std::size_t>(cfg.chains) * cfg.samples_per_chain);
    for (const ChainOutput& o : outs)
        for (const std::vector<double>& z : o.z_values) {
            try {
                stream.push_back(partition_from_z(z));
            } catch (const DomainError&) {
                // A cut collision below double resolution; drop the sample.
            }
        }
    return stream;
}

std::vector<std::vector<double>> sample_un_log(int n, const McmcConfig& cfg) {
    const std::vector<ChainOutput> outs = run_chains(n, cfg, nullptr, true);
    std::vector<std::vector<double>> stream;
    stream.reserve(static_cast<std::size_t>(cfg.chains) * cfg.samples_per_chain);
    for (const ChainOutput& o : outs)
        for (const std::vector<double>& z : o.z_values) {
            std::vector<double> lk(z.size() + 1);
            double top = 0.0;
            for (std::size_t i = 0; i < z.size(); ++i) {
                lk[i] = 2.0 * z[i];
                top = std::max(top, lk[i]);
            }
            lk.back() = 0.0;
            double acc = 0.0;
            for (double v : lk) acc += std::exp(v - top);
            const double lse = top + std::log(acc);
            for (double& v : lk) v -= lse;
            stream.push_back(std::move(lk));
        }
    return stream;
}

double mesh_from_z(const std::vector<double>& z_free) {
    double top = 0.0;
    for (double z : z_free)
        top = std::max(top, 2 * z);
    double denom = std::exp(-top);
    for (double z : z_free)
        denom += std::exp(2 * z - top);
    return 1.0 / denom;
}

double min_half_log_ratio_from_z(const std::vector<double>& z_free) {
    double prev = 0.0;
    double best = 1e300;
    for (double z : z_free) {
        best = std::min(best, std::abs(z - prev));
        prev = z;
    }
    return std::min(best, std::abs(prev));
}

std::vector<DecayRow> check_mesh_decay(const std::vector<int>& ns, double eps,
                                       const McmcConfig& cfg) {
    if (!(eps > 0))
        throw DomainError("mesh threshold must be positive");
    std::vector<DecayRow> rows;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const int n = ns[i];
        DecayRow row;
        row.n = n;
        if (eps >= 1.0) {
            // The mesh never exceeds 1.
            row.estimate = 0.0;
            row.stderr_value = 0.0;
            row.ess = 0.0;
        } else {
            McmcConfig local = cfg;
            local.stream_base = cfg.stream_base + 1024 * i;
            const McmcEstimate est = mcmc_expectation(
                n,
                [eps](const std::vector<double>& z) {
                    return mesh_from_z(z) > eps ? 1.0 : 0.0;
                },
                local);
            row.estimate = est.value;
            row.stderr_value = est.stderr_value;
            row.ess = est.ess;
        }
        row.scaled = n * row.estimate;
        rows.push_back(row);
    }
    return rows;
}

std::vector<DecayRow> check_ratio_decay(const std::vector<int>& ns, double r,
                                        const McmcConfig& cfg) {
    std::vector<DecayRow> rows;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const int n = ns[i];
        DecayRow row;
        row.n = n;
        if (r <= 1.0) {
            // Neighbor ratios are at least 1 by the mean inequality, and the
            // boundary value has probability zero.
            row.estimate = 0.0;
            row.stderr_value = 0.0;
            row.ess = 0.0;
        } else {
            const double gap = std::acosh(r);
            McmcConfig local = cfg;
            local.stream_base = cfg.stream_base + 1024 * i;
            const McmcEstimate est = mcmc_expectation(
                n,
                [gap](const std::vector<double>& z) {
                    return min_half_log_ratio_from_z(z) <= gap ? 1.0 : 0.0;
                },
                local);
            row.estimate = est.value;
            row.stderr_value = est.stderr_value;
            row.ess = est.ess;
        }
        row.scaled = n * row.estimate;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace shavlab::meas
