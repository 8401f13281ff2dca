#include "shavlab/schwarzian.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "shavlab/errors.hpp"
#include "shavlab/kernels.hpp"
#include "shavlab/parallel.hpp"
#include "shavlab/rng.hpp"
#include "shavlab/slog.hpp"

namespace shavlab::schw {

namespace {

double refine_max(const std::function<double(double)>& f, double lo,
                  double hi) {
    for (int i = 0; i < 200; ++i) {
        const double m1 = lo + (hi - lo) / 3;
        const double m2 = hi - (hi - lo) / 3;
        if (f(m1) < f(m2))
            lo = m1;
        else
            hi = m2;
    }
    return f((lo + hi) / 2);
}

double grid_max(const std::function<double(double)>& f, int nodes) {
    double best = f(0.0);
    int arg = 0;
    for (int i = 1; i <= nodes; ++i) {
        const double v = f(static_cast<double>(i) / nodes);
        if (v > best) {
            best = v;
            arg = i;
        }
    }
    const double lo = std::max(0.0, static_cast<double>(arg - 1) / nodes);
    const double hi = std::min(1.0, static_cast<double>(arg + 1) / nodes);
    return std::max(best, refine_max(f, lo, hi));
}

double logsumexp(const std::vector<double>& v) {
    double top = v[0];
    for (double x : v)
        top = std::max(top, x);
    double s = 0;
    for (double x : v)
        s += std::exp(x - top);
    return top + std::log(s);
}

}  // namespace

SmoothTestMap identity_test_map() {
    SmoothTestMap m;
    m.g = [](double t) { return t; };
    m.gp = [](double) { return 1.0; };
    m.gpp = [](double) { return 0.0; };
    m.gppp = [](double) { return 0.0; };
    m.avg_slope_excess = [](double, double) { return 0.0; };
    return m;
}

SmoothTestMap sine_test_map(double a) {
    if (std::abs(a) >= 1)
        throw DomainError("sine test map needs |a| < 1 to stay increasing");
    const double pi = kern::kPi;
    SmoothTestMap m;
    m.g = [a, pi](double t) {
        return t + a / (2 * pi) * (1 - std::cos(2 * pi * t));
    };
    m.gp = [a, pi](double t) { return 1 + a * std::sin(2 * pi * t); };
    m.gpp = [a, pi](double t) { return 2 * pi * a * std::cos(2 * pi * t); };
    m.gppp = [a, pi](double t) {
        return -4 * pi * pi * a * std::sin(2 * pi * t);
    };
    m.avg_slope_excess = [a, pi](double x, double l) {
        if (l == 0)
            return a * std::sin(2 * pi * x);
        return a / (pi * l) * std::sin(pi * l) * std::sin(pi * (2 * x + l));
    };
    return m;
}

SmoothTestMap affine_test_map(double slope, double offset) {
    if (slope <= 0)
        throw DomainError("affine test map needs a positive slope");
    SmoothTestMap m;
    m.g = [slope, offset](double t) { return slope * t + offset; };
    m.gp = [slope](double) { return slope; };
    m.gpp = [](double) { return 0.0; };
    m.gppp = [](double) { return 0.0; };
    m.avg_slope_excess = [slope](double, double) { return slope - 1; };
    m.fixes_ends = false;
    m.unit_end_slopes = false;
    return m;
}

double schwarzian(const SmoothTestMap& g, double t) {
    const double r = g.gpp(t) / g.gp(t);
    return g.gppp(t) / g.gp(t) - 1.5 * r * r;
}

double schwarzian_fd(const SmoothTestMap& g, double t, double h) {
    const auto ratio = [&g](double s) { return g.gpp(s) / g.gp(s); };
    const double d = (ratio(t - 2 * h) - 8 * ratio(t - h) + 8 * ratio(t + h) -
                      ratio(t + 2 * h)) /
                     (12 * h);
    const double r = ratio(t);
    return d - 0.5 * r * r;
}

double curvature_budget(const SmoothTestMap& g) {
    const auto phi = [&g](double t) {
        const double r = g.gpp(t) / g.gp(t);
        return std::abs(r) + r * r + std::abs(g.gppp(t) / g.gp(t));
    };
    return 1 + grid_max(phi, 16384);
}

double slope_contrast(const SmoothTestMap& g) {
    const double top = grid_max([&g](double t) { return std::abs(g.gpp(t)); },
                                16384);
    const double bottom =
        -grid_max([&g](double t) { return -g.gp(t); }, 16384);
    return top / bottom;
}

double term_x(const SmoothTestMap& g, double x0, double x1,
              const wiener::SampledDiffeo& q) {
    const double l = x1 - x0;
    const double h0 = g.gpp(x0) / g.gp(x0);
    const double h1 = g.gpp(x1) / g.gp(x1);
    return l * (h0 * q.qp.front() - h1 * q.qp.back());
}

double term_y(const SmoothTestMap& g, double x0, double x1,
              const wiener::SampledDiffeo& q) {
    const double l = x1 - x0;
    const std::size_t nodes = q.q.size();
    std::vector<double> vals(nodes);
    for (std::size_t i = 0; i < nodes; ++i)
        vals[i] = schwarzian(g, x0 + l * q.q[i]) * q.qp[i] * q.qp[i];
    return l * l * wiener::trapz(vals);
}

F12 f1_f2_sample(const SmoothTestMap& g, const meas::Partition& x,
                 const std::vector<wiener::SampledDiffeo>& q) {
    const int n = x.n();
    if (static_cast<int>(q.size()) != n)
        throw DomainError("need exactly one sampled map per block");
    F12 out;
    double left = 0;
    for (int k = 0; k < n; ++k) {
        const double right =
            k + 1 < n ? x.interior[static_cast<std::size_t>(k)] : 1.0;
        out.f1 += term_x(g, left, right, q[static_cast<std::size_t>(k)]);
        out.f2 += term_y(g, left, right, q[static_cast<std::size_t>(k)]);
        left = right;
    }
    return out;
}

namespace {

struct TrialSums {
    long long count = 0;
    long long exceed = 0;
    long double s1 = 0;
    long double s2 = 0;
    long double s3 = 0;
    long double s4 = 0;
    long double abs2 = 0;
    long double sq2 = 0;

    void merge(const TrialSums& o) {
        count += o.count;
        exceed += o.exceed;
        s1 += o.s1;
        s2 += o.s2;
        s3 += o.s3;
        s4 += o.s4;
        abs2 += o.abs2;
        sq2 += o.sq2;
    }
};

constexpr long long kTrialBatch = 16;

}  // namespace

ConcentrationReport concentration_check(const SmoothTestMap& g, double eps,
                                        int n, long long trials, int m_grid,
                                        const wiener::C4Report& c4,
                                        std::uint64_t seed,
                                        std::uint64_t stream_base,
                                        int workers) {
    if (!(eps > 0) || eps >= 1)
        throw DomainError("mesh bound must lie in (0, 1)");
    if (n < 1 || trials < 1 || m_grid < 2)
        throw DomainError("need at least one block, one trial, two cells");

    ConcentrationReport rep;
    rep.eps = eps;
    rep.n = n;
    rep.trials = trials;
    rep.c4 = c4.c4;
    rep.budget = curvature_budget(g);
    rep.threshold = 4 * c4.c4 * rep.budget * std::cbrt(eps);
    rep.bound = 2 * std::cbrt(eps);
    rep.var_bound = 4 * eps * rep.budget * c4.m2.value;
    rep.abs_bound = 1.5 * c4.c4 * rep.budget * eps;

    std::vector<double> pos(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k)
        pos[static_cast<std::size_t>(k)] = static_cast<double>(k) / n;

    const std::size_t batches =
        static_cast<std::size_t>((trials + kTrialBatch - 1) / kTrialBatch);
    std::vector<TrialSums> slot(batches);
    parallel_batches(batches, static_cast<unsigned>(std::max(1, workers)),
                     [&](std::size_t b) {
        TrialSums acc;
        const long long lo = static_cast<long long>(b) * kTrialBatch;
        const long long hi = std::min(trials, lo + kTrialBatch);
        for (long long t = lo; t < hi; ++t) {
            Rng rng(seed, stream_base + static_cast<std::uint64_t>(t));
            double f1 = 0;
            double f2 = 0;
            for (int k = 0; k < n; ++k) {
                const wiener::SampledDiffeo q =
                    wiener::map_B(wiener::sample_path(m_grid, rng));
                f1 += term_x(g, pos[static_cast<std::size_t>(k)],
                             pos[static_cast<std::size_t>(k) + 1], q);
                f2 += term_y(g, pos[static_cast<std::size_t>(k)],
                             pos[static_cast<std::size_t>(k) + 1], q);
            }
            acc.count += 1;
            if (std::abs(f1 + f2) > rep.threshold)
                acc.exceed += 1;
            const long double v = f1;
            acc.s1 += v;
            acc.s2 += v * v;
            acc.s3 += v * v * v;
            acc.s4 += v * v * v * v;
            acc.abs2 += std::abs(static_cast<long double>(f2));
            acc.sq2 += static_cast<long double>(f2) * f2;
        }
        slot[b] = acc;
    });

    TrialSums all;
    for (const TrialSums& s : slot)
        all.merge(s);

    const long double t_count = all.count;
    rep.frequency = static_cast<double>(all.exceed) / static_cast<double>(t_count);
    rep.freq_stderr = std::sqrt(
        std::max(0.0, rep.frequency * (1 - rep.frequency)) /
        static_cast<double>(t_count));

    const long double mu = all.s1 / t_count;
    const long double m2 = all.s2 / t_count;
    const long double m3 = all.s3 / t_count;
    const long double m4 = all.s4 / t_count;
    const long double m2c = m2 - mu * mu;
    const long double m4c =
        m4 - 4 * mu * m3 + 6 * mu * mu * m2 - 3 * mu * mu * mu * mu;
    rep.var_f1 = static_cast<double>(m2c);
    rep.var_f1_stderr = std::sqrt(
        std::max(0.0, static_cast<double>((m4c - m2c * m2c) / t_count)));

    const long double amean = all.abs2 / t_count;
    const long double avar = all.sq2 / t_count - amean * amean;
    rep.mean_abs_f2 = static_cast<double>(amean);
    rep.mean_abs_f2_stderr =
        std::sqrt(std::max(0.0, static_cast<double>(avar / t_count)));
    return rep;
}

namespace {

struct ChainCore {
    double mesh = 0;
    double min_log_R = 0;
    std::vector<RatioTerm> terms;
    double sigma = 0;
    double product_gap = 0;
};

ChainCore chain_terms(const SmoothTestMap& g,
                      const std::vector<double>& log_lengths,
                      double contrast) {
    const std::size_t n = log_lengths.size();
    if (n < 2)
        throw DomainError("ratio chain needs at least two blocks");

    std::vector<double> len(n);
    std::vector<double> pos(n + 1);
    pos[0] = 0;
    for (std::size_t k = 0; k < n; ++k) {
        len[k] = std::exp(log_lengths[k]);
        pos[k + 1] = std::min(1.0, pos[k] + len[k]);
    }
    pos[n] = 1;

    // Image block lengths in log form; the average slope excess stays exact
    // even when the length itself underflows.
    std::vector<double> gll(n);
    for (std::size_t k = 0; k < n; ++k)
        gll[k] = log_lengths[k] + std::log1p(g.avg_slope_excess(pos[k], len[k]));

    ChainCore core;
    core.terms.resize(n);
    core.min_log_R = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        core.mesh = std::max(core.mesh, len[k]);
        const std::size_t prev = (k + n - 1) % n;
        RatioTerm& t = core.terms[k];
        t.log_a = log_lengths[k];
        t.log_b = log_lengths[prev];
        t.d = len[k] + len[prev];
        const double w = (t.log_a - t.log_b) / 2;
        const double wg = (gll[k] - gll[prev]) / 2;
        t.tau = std::abs(w);
        t.tau_g = std::abs(wg);
        t.beta = t.tau_g - t.tau;
        t.log_R = log_cosh(w);
        t.log_Rg = log_cosh(wg);
        t.alpha = std::expm1(t.log_Rg - t.log_R);
        t.v_ratio = meas::v1_cached(t.tau_g) / meas::v1_cached(t.tau);
        t.omega = t.v_ratio == 1 ? 0.0 : (t.v_ratio - 1) * t.log_R / t.d;
        t.proof_zone = 2.5 * contrast * t.d < 1.0 / 80;
        core.min_log_R = std::min(core.min_log_R, t.log_R);
        core.sigma += std::log(t.v_ratio);
    }
    core.product_gap = std::abs(std::expm1(core.sigma));
    return core;
}

}  // namespace

RatioChainRun ratio_chain(const SmoothTestMap& g,
                          const std::vector<double>& log_lengths, double eps) {
    if (!(eps > 0) || eps >= 10)
        throw DomainError("ratio tolerance must lie in (0, 10)");
    RatioChainRun run;
    run.n = static_cast<int>(log_lengths.size());
    run.eps = eps;
    run.contrast = slope_contrast(g);
    run.delta1 = 1.0 / (400 * (run.contrast + 1));
    run.log_r = 8000 * (run.contrast + 1) / eps;
    ChainCore core = chain_terms(g, log_lengths, run.contrast);
    run.mesh = core.mesh;
    run.mesh_ok = core.mesh < run.delta1;
    run.min_log_R = core.min_log_R;
    run.terms = std::move(core.terms);
    run.sigma = core.sigma;
    run.product_gap = core.product_gap;
    return run;
}

RatioChainRun ratio_chain_extreme(const SmoothTestMap& g, double eps, int n) {
    if (n < 2)
        throw DomainError("ratio chain needs at least two blocks");
    if (!(eps > 0) || eps >= 10)
        throw DomainError("ratio tolerance must lie in (0, 10)");
    const double contrast = slope_contrast(g);
    const double log_r = 8000 * (contrast + 1) / eps;
    const double step = 2.05 * log_r;
    // The widest log gap is the wrap-around one. Past this budget the
    // kernel arguments leave the range the quadrature is validated on.
    if ((n - 1) * step > 1e7)
        throw ConstructionImpossible(
            "log-length ladder exceeds the validated kernel range");
    std::vector<double> ll(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        ll[static_cast<std::size_t>(k)] = -step * k;
    const double lse = logsumexp(ll);
    for (double& v : ll)
        v -= lse;
    return ratio_chain(g, ll, eps);
}

ModerateReport ratio_chain_moderate(const SmoothTestMap& g, double r,
                                    int count, std::uint64_t seed) {
    if (!(r > 1))
        throw DomainError("ratio floor must exceed one");
    if (count < 1)
        throw DomainError("need at least one partition");
    ModerateReport rep;
    rep.r = r;
    rep.contrast = slope_contrast(g);
    const double gap_unit = std::acosh(r);
    const double log_r = std::log(r);
    Rng rng(seed, 0);
    for (int p = 0; p < count; ++p) {
        const int n = 3 + static_cast<int>(rng.next_below(6));
        std::vector<double> ll(static_cast<std::size_t>(n));
        for (;;) {
            double run_sum = 0;
            ll[0] = 0;
            for (int k = 1; k < n; ++k) {
                const double mag = (2.02 + 0.48 * rng.next_unit()) * gap_unit;
                const double gap = rng.next_unit() < 0.5 ? mag : -mag;
                run_sum += gap;
                ll[static_cast<std::size_t>(k)] = run_sum;
            }
            // The wrap-around gap is forced by the others; reject tuples
            // whose forced gap drops a ratio below the floor.
            if (std::abs(run_sum) >= 2.02 * gap_unit)
                break;
        }
        const double lse = logsumexp(ll);
        for (double& v : ll)
            v -= lse;
        const ChainCore core = chain_terms(g, ll, rep.contrast);
        ModerateRow row;
        row.n = n;
        for (const RatioTerm& t : core.terms) {
            const double cap = 400 * rep.contrast * t.d / log_r;
            row.max_quotient =
                std::max(row.max_quotient, std::abs(std::log(t.v_ratio)) / cap);
        }
        rep.max_quotient = std::max(rep.max_quotient, row.max_quotient);
        rep.rows.push_back(row);
    }
    rep.all_pass = rep.max_quotient <= 1;
    return rep;
}

double beta_closed_form(double t, double alpha) {
    const double root = std::sqrt(t * t - 1);
    const double root_g = std::sqrt(t * t * (1 + alpha) * (1 + alpha) - 1);
    const double inner =
        alpha * (t / (t + root)) * (1 + (2 + alpha) * t / (root + root_g));
    return std::log1p(inner);
}

LogEstimatesReport log_estimates_check() {
    LogEstimatesReport rep;
    rep.grid = 10001;
    for (int i = 0; i < rep.grid; ++i) {
        const double u = static_cast<double>(i) / (rep.grid - 1);
        const double y = -0.5 + u;
        if (y != 0)
            rep.max_log1p_quotient = std::max(
                rep.max_log1p_quotient,
                std::abs(std::log1p(y)) / (2 * std::abs(y)));
        const double y3 = -0.1 + 0.2 * u;
        if (y3 != 0)
            rep.max_log3_quotient = std::max(
                rep.max_log3_quotient,
                std::abs(std::log1p(3 * y3)) / (4 * std::abs(y3)));
        const double x = -1 + 2 * u;
        if (x != 0)
            rep.max_expm1_quotient = std::max(
                rep.max_expm1_quotient,
                std::abs(std::expm1(x)) / (2 * std::abs(x)));
    }
    if (rep.max_log1p_quotient > 1 || rep.max_log3_quotient > 1 ||
        rep.max_expm1_quotient > 1)
        throw BoundViolated("an elementary log or exp estimate failed");
    return rep;
}

}  // namespace shavlab::schw
