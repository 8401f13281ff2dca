#include "shavlab/stitch.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "shavlab/errors.hpp"
#include "shavlab/parallel.hpp"
#include "shavlab/rng.hpp"
#include "shavlab/wiener.hpp"

namespace shavlab::stitch {

namespace {

// Keeps the chain-sampler streams (one per chain) clear of the block
// source streams.
constexpr std::uint64_t kPhiStreamOffset = 1u << 20;
constexpr std::size_t kStreamsPerSample = 32;

double logsumexp(const std::vector<double>& v) {
    double top = v.front();
    for (double x : v) top = std::max(top, x);
    double acc = 0.0;
    for (double x : v) acc += std::exp(x - top);
    return top + std::log(acc);
}

double clamp01(double t) { return std::min(1.0, std::max(0.0, t)); }

// Monotone inverse of the smooth test map on [0,1]: bisection bracket with
// Newton steps inside it. Returns the argument unchanged as soon as the
// residual vanishes, so an identity map passes values through bitwise.
double invert_map(const schw::SmoothTestMap& g, double u) {
    u = clamp01(u);
    double lo = 0.0;
    double hi = 1.0;
    double s = u;
    for (int it = 0; it < 100; ++it) {
        const double r = g.g(s) - u;
        if (r == 0.0) return s;
        if (r > 0.0)
            hi = s;
        else
            lo = s;
        double next = s - r / g.gp(s);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == s) return s;
        s = next;
    }
    return s;
}

}  // namespace

double DistortedPiece::value(double t) const {
    const double u = clamp01((t - x) / j);
    return y + k * phi.value(u);
}

double DistortedPiece::derivative(double t) const {
    const double u = clamp01((t - x) / j);
    return (k / j) * phi.derivative(u);
}

double DistortedPiece::left_slope() const { return (k / j) * phi.qp.front(); }

double DistortedPiece::right_slope() const { return (k / j) * phi.qp.back(); }

namespace {

// Pieces whose domain width underflowed to zero are stepped over; by
// continuity their neighbors carry the value.
std::size_t piece_index(const StitchedDiffeo& f, double t) {
    const std::vector<double>& cuts = f.domain.interior;
    std::size_t idx = static_cast<std::size_t>(
        std::upper_bound(cuts.begin(), cuts.end(), t) - cuts.begin());
    while (idx + 1 < f.pieces.size() && !(f.pieces[idx].j > 0.0)) ++idx;
    while (idx > 0 && !(f.pieces[idx].j > 0.0)) --idx;
    return idx;
}

}  // namespace

double StitchedDiffeo::value(double t) const {
    return pieces[piece_index(*this, t)].value(t);
}

double StitchedDiffeo::derivative(double t) const {
    return pieces[piece_index(*this, t)].derivative(t);
}

namespace {

// Shared assembly. lk holds the normalized log range lengths, range_cuts
// the interior range knots. The derivative-matching recurrence forces
//   j_{i+1} = j_i * (k_{i+1} phi_{i+1}'(0)) / (k_i phi_i'(1)),
// and normalizing removes the provisional first length, up to rounding.
// Logs keep the running product in range even when block lengths span
// thousands of orders of magnitude.
StitchedDiffeo assemble(const std::vector<double>& lk,
                        const std::vector<double>& range_cuts,
                        const std::vector<wiener::SampledDiffeo>& phis,
                        double provisional_log_first, bool strict) {
    const std::size_t n = lk.size();
    if (phis.size() != n)
        throw DomainError("piece count must match the range partition");
    if (!std::isfinite(provisional_log_first))
        throw DomainError("provisional first length must be finite");
    for (const wiener::SampledDiffeo& phi : phis) {
        if (!(phi.qp.front() > 0.0) || !(phi.qp.back() > 0.0))
            throw DomainError("piece sources need positive end slopes");
    }

    std::vector<double> lj(n);
    lj[0] = provisional_log_first;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        lj[i + 1] = lj[i] + lk[i + 1] - lk[i] +
                    std::log(phis[i + 1].qp.front()) -
                    std::log(phis[i].qp.back());
    }
    const double total = logsumexp(lj);
    std::vector<double> cuts(n - 1);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        acc += std::exp(lj[i] - total);
        cuts[i] = std::min(acc, 1.0);
    }

    StitchedDiffeo out;
    out.range.interior = range_cuts;
    out.domain.interior = cuts;
    if (strict) meas::validate_partition(out.domain);

    out.pieces.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        DistortedPiece& p = out.pieces[i];
        p.phi = phis[i];
        p.x = i == 0 ? 0.0 : cuts[i - 1];
        p.j = (i + 1 == n ? 1.0 : cuts[i]) - p.x;
        p.y = i == 0 ? 0.0 : range_cuts[i - 1];
        p.k = (i + 1 == n ? 1.0 : range_cuts[i]) - p.y;
    }
    return out;
}

}  // namespace

StitchedDiffeo stitch(const meas::Partition& y,
                      const std::vector<wiener::SampledDiffeo>& phis,
                      double provisional_log_first) {
    meas::validate_partition(y);
    const std::size_t n = static_cast<std::size_t>(y.n());
    std::vector<double> lk(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = i == 0 ? 0.0 : y.interior[i - 1];
        const double hi = i + 1 == n ? 1.0 : y.interior[i];
        lk[i] = std::log(hi - lo);
    }
    return assemble(lk, y.interior, phis, provisional_log_first, true);
}

StitchedDiffeo stitch_log(const std::vector<double>& log_lengths,
                          const std::vector<wiener::SampledDiffeo>& phis,
                          double provisional_log_first) {
    if (log_lengths.size() < 2)
        throw DomainError("stitching needs at least two blocks");
    for (double v : log_lengths)
        if (!std::isfinite(v))
            throw DomainError("log lengths must be finite");
    std::vector<double> lk = log_lengths;
    const double total = logsumexp(lk);
    for (double& v : lk) v -= total;
    std::vector<double> range_cuts(lk.size() - 1);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < lk.size(); ++i) {
        acc += std::exp(lk[i]);
        range_cuts[i] = std::min(acc, 1.0);
    }
    return assemble(lk, range_cuts, phis, provisional_log_first, false);
}

wiener::SampledDiffeo to_sampled(const StitchedDiffeo& f, int m_grid) {
    if (m_grid < 2) throw DomainError("grid needs at least two cells");
    wiener::SampledDiffeo q;
    q.q.resize(static_cast<std::size_t>(m_grid) + 1);
    q.qp.resize(static_cast<std::size_t>(m_grid) + 1);
    for (int i = 0; i <= m_grid; ++i) {
        const double t = static_cast<double>(i) / m_grid;
        q.q[static_cast<std::size_t>(i)] = f.value(t);
        q.qp[static_cast<std::size_t>(i)] = f.derivative(t);
    }
    q.q.front() = 0.0;
    q.q.back() = 1.0;
    return q;
}

Functional constant_functional(double c) {
    return {[c](const MapEval&) { return c; }, std::abs(c)};
}

Functional sup_clamp_functional(double scale, int grid) {
    if (!(scale > 0) || grid < 2)
        throw DomainError("clamp needs a positive scale and a real grid");
    return {[scale, grid](const MapEval& f) {
                double worst = 0.0;
                for (int i = 0; i <= grid; ++i) {
                    const double t = static_cast<double>(i) / grid;
                    worst = std::max(worst, std::abs(f(t) - t));
                }
                return std::min(1.0, scale * worst);
            },
            1.0};
}

Functional midpoint_functional() {
    return {[](const MapEval& f) { return clamp01(f(0.5)); }, 1.0};
}

Functional translate_functional(const Functional& base,
                                const schw::SmoothTestMap& g) {
    auto apply = base.apply;
    return {[apply, g](const MapEval& f) {
                return apply([&](double t) { return invert_map(g, f(t)); });
            },
            base.bound};
}

std::vector<StitchedDiffeo> sample_stitched(int n, std::size_t count,
                                            const SampleConfig& cfg) {
    if (n < 2) throw DomainError("stitching needs at least two blocks");
    if (count < 1) throw DomainError("sample count must be positive");
    if (static_cast<std::size_t>(n) >= kStreamsPerSample)
        throw DomainError("block count exceeds the stream budget");

    meas::McmcConfig mc;
    mc.seed = cfg.seed;
    mc.stream_base = cfg.stream_base;
    mc.chains = 4;
    mc.burn_in = cfg.burn_in;
    mc.workers = cfg.workers;
    mc.samples_per_chain =
        cfg.partition_pool_per_chain != 0
            ? cfg.partition_pool_per_chain
            : std::max<std::size_t>(64, count / 4 + 16);
    // Log coordinates keep every chain draw: the chain measure routinely
    // produces blocks far below double resolution in absolute coordinates.
    const std::vector<std::vector<double>> ys = meas::sample_un_log(n, mc);

    const std::size_t have = std::min(count, ys.size());
    std::vector<StitchedDiffeo> slots(have);
    parallel_batches(have, static_cast<unsigned>(std::max(1, cfg.workers)),
                     [&](std::size_t s) {
                         std::vector<wiener::SampledDiffeo> phis(
                             static_cast<std::size_t>(n));
                         for (int i = 0; i < n; ++i) {
                             Rng rng(cfg.seed,
                                     cfg.stream_base + kPhiStreamOffset +
                                         s * kStreamsPerSample +
                                         static_cast<std::size_t>(i));
                             phis[static_cast<std::size_t>(i)] =
                                 wiener::map_B(
                                     wiener::sample_path(cfg.m_grid, rng));
                         }
                         slots[s] = stitch_log(ys[s], phis);
                     });
    return slots;
}

namespace {

struct Welford {
    std::size_t count = 0;
    double mean = 0;
    double m2 = 0;

    void add(double x) {
        ++count;
        const double d = x - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (x - mean);
    }

    double stderr_value() const {
        if (count < 2) return 0.0;
        const double var = m2 / static_cast<double>(count - 1);
        return std::sqrt(std::max(var, 0.0) / static_cast<double>(count));
    }
};

}  // namespace

McEstimate L_delta_n(const Functional& F, int n, std::size_t count,
                     const SampleConfig& cfg) {
    const std::vector<StitchedDiffeo> fs = sample_stitched(n, count, cfg);
    if (fs.empty()) throw DomainError("no usable stitched samples");
    Welford w;
    for (const StitchedDiffeo& f : fs)
        w.add(F.apply([&](double t) { return f.value(t); }));
    return {w.mean, w.stderr_value(), w.count};
}

S3Report check_S3(const Functional& F, const schw::SmoothTestMap& g,
                  const std::vector<int>& ns, std::size_t count,
                  const SampleConfig& cfg) {
    if (ns.empty()) throw DomainError("need at least one block count");
    const Functional Fg = translate_functional(F, g);
    S3Report rep;
    for (int n : ns) {
        const std::vector<StitchedDiffeo> fs = sample_stitched(n, count, cfg);
        if (fs.empty()) throw DomainError("no usable stitched samples");
        Welford base;
        Welford translated;
        Welford diff;
        for (const StitchedDiffeo& f : fs) {
            const MapEval ev = [&](double t) { return f.value(t); };
            const double v = F.apply(ev);
            const double vg = Fg.apply(ev);
            base.add(v);
            translated.add(vg);
            diff.add(vg - v);
        }
        rep.rows.push_back({n, base.mean, translated.mean, diff.mean,
                            diff.stderr_value(), diff.count});
    }
    return rep;
}

McEstimate mean_on_group(
    const std::function<double(const holder::BallElement&)>& F,
    const std::vector<wiener::SampledDiffeo>& f_samples,
    const std::vector<holder::BallElement>& ball,
    const embed::SmoothGenerator& gen, double delta) {
    if (f_samples.empty()) throw DomainError("need at least one map sample");
    Welford w;
    for (const wiener::SampledDiffeo& f : f_samples)
        w.add(holder::pi_delta(F, f, ball, gen, delta).value);
    return {w.mean, w.stderr_value(), w.count};
}

}  // namespace shavlab::stitch
