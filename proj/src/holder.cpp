#include "shavlab/holder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "shavlab/errors.hpp"
#include "shavlab/theta.hpp"

namespace shavlab::holder {

namespace {

void require_delta(double delta) {
    if (!(delta > 0) || !(delta < 1))
        throw DomainError("exponent must be in (0,1)");
}

// Base-plus-quotient functional over an explicit point set.
double norm_over_points(const std::vector<double>& ts,
                        const std::vector<double>& ds, double delta) {
    double sup = 0;
    for (std::size_t i = 0; i + 1 < ts.size(); ++i)
        for (std::size_t j = i + 1; j < ts.size(); ++j)
            sup = std::max(sup, std::abs(ds[j] - ds[i]) /
                                    std::pow(ts[j] - ts[i], delta));
    return std::abs(ds.front()) + sup;
}

double quotient_sup_uniform(const std::vector<double>& d, double delta,
                            double length, std::size_t stride) {
    const std::size_t m = d.size() - 1;
    const double h = length / static_cast<double>(m);
    double sup = 0;
    for (std::size_t i = 0; i < m; i += stride)
        for (std::size_t j = i + stride; j <= m; j += stride)
            sup = std::max(sup,
                           std::abs(d[j] - d[i]) /
                               std::pow(static_cast<double>(j - i) * h, delta));
    return sup;
}

}  // namespace

HolderProfile profile_from_derivs(const std::vector<double>& deriv,
                                  double delta, double interval_length) {
    require_delta(delta);
    if (deriv.size() < 2)
        throw DomainError("need at least two nodes");
    if (!(interval_length > 0))
        throw DomainError("interval length must be positive");
    HolderProfile out;
    out.delta = delta;
    out.quotient_sup = quotient_sup_uniform(deriv, delta, interval_length, 1);
    out.norm = std::abs(deriv.front()) + out.quotient_sup;
    out.coarse_norm =
        std::abs(deriv.front()) +
        quotient_sup_uniform(deriv, delta, interval_length,
                             deriv.size() > 2 ? 2 : 1);
    return out;
}

HolderProfile norm_1_delta(const SampledDiffeo& f, double delta) {
    return profile_from_derivs(f.qp, delta, 1.0);
}

double n_delta(const SampledDiffeo& f, double delta) {
    require_delta(delta);
    return quotient_sup_uniform(f.qp, delta, 1.0, 1);
}

double p_delta(const SampledDiffeo& f, double delta) {
    require_delta(delta);
    std::vector<double> logs(f.qp.size());
    for (std::size_t i = 0; i < f.qp.size(); ++i) {
        if (!(f.qp[i] > 0))
            throw DomainError("derivative must be positive");
        logs[i] = std::log(f.qp[i]);
    }
    return std::abs(logs.front()) + quotient_sup_uniform(logs, delta, 1.0, 1);
}

double inverse_holder_constant(double c, double min_slope, double delta) {
    require_delta(delta);
    if (!(min_slope > 0))
        throw DomainError("minimum slope must be positive");
    return c / std::pow(min_slope, 2 + delta);
}

double compose_holder_constant(double c_f, double c_g, double max_f,
                               double max_g, double delta) {
    require_delta(delta);
    if (!(max_f > 0) || !(max_g > 0))
        throw DomainError("maximum slopes must be positive");
    return c_g * max_f + c_f * std::pow(max_g, 1 + delta);
}

double p_delta_continuity_bound(double min0, double max0, double norm0,
                                double eps) {
    if (!(min0 > 0) || !(max0 >= min0) || !(eps > 0) || !(eps < min0 / 2))
        throw DomainError("bound needs 0 < eps < min0/2 and a valid range");
    return (2 / min0 + 2 * max0 * (min0 + norm0) / (min0 * min0 * min0)) * eps;
}

std::vector<DiscontinuityRow> discontinuity_demo(
    const std::vector<double>& eps_grid) {
    const double delta = 2.0 / 3.0;
    std::vector<DiscontinuityRow> rows;
    for (double eps : eps_grid) {
        if (!(eps > 0) || !(eps < 0.5))
            throw DomainError("perturbation size must be in (0, 1/2)");
        // Point set on [-1,1] clustered at the origin, where the chord pair
        // (0, eps) witnesses the jump.
        std::vector<double> ts;
        for (double t = -1.0; t <= 1.0 + 1e-12; t += 0.125)
            ts.push_back(t);
        for (int k = 1; k <= 10; ++k) {
            ts.push_back(std::pow(10.0, -k));
            ts.push_back(-std::pow(10.0, -k));
        }
        ts.push_back(eps);
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

        // Perturbation x -> x - eps + eps x^2 of the identity, and the same
        // pair composed with g(x) = (x + x^{5/3})/2 on the outside.
        const auto d1p = [eps](double x) { return 2 * eps * x; };
        const auto gp = [](double y) {
            return (1 + (5.0 / 3.0) * std::cbrt(y * y)) / 2;
        };
        const auto dcp = [&](double x) {
            const double fx = x - eps + eps * x * x;
            return gp(fx) * (1 + 2 * eps * x) - gp(x);
        };
        std::vector<double> ds1(ts.size()), dsc(ts.size());
        for (std::size_t i = 0; i < ts.size(); ++i) {
            ds1[i] = d1p(ts[i]);
            dsc[i] = dcp(ts[i]);
        }
        DiscontinuityRow row;
        row.eps = eps;
        row.diff_norm = norm_over_points(ts, ds1, delta);
        row.composed_diff_norm = norm_over_points(ts, dsc, delta);
        row.chord = (dcp(eps) - dcp(0.0)) / std::pow(eps, delta);
        row.displayed_chord = -5.0 / 3.0 +
                              (11.0 / 6.0) * std::pow(eps, 4.0 / 3.0) +
                              (5.0 / 6.0) * std::pow(eps, 10.0 / 3.0);
        rows.push_back(row);
    }
    return rows;
}

namespace {

SampledDiffeo sample_theta(const exact::PLMap& w,
                           const embed::SmoothGenerator& gen, int m_grid) {
    const embed::ThetaImage th(w, gen);
    SampledDiffeo out;
    out.q.resize(static_cast<std::size_t>(m_grid) + 1);
    out.qp.resize(static_cast<std::size_t>(m_grid) + 1);
    for (int i = 0; i <= m_grid; ++i) {
        const double t = static_cast<double>(i) / m_grid;
        out.q[static_cast<std::size_t>(i)] = th.apply(t);
        out.qp[static_cast<std::size_t>(i)] = th.derivative(t);
    }
    out.q.front() = 0.0;
    out.q.back() = 1.0;
    return out;
}

}  // namespace

std::vector<BallElement> build_theta_ball(const embed::SmoothGenerator& gen,
                                          int radius, int m_grid) {
    if (radius < 0 || radius > 8)
        throw DomainError("ball radius out of range");
    if (m_grid < 2)
        throw DomainError("grid needs at least two cells");
    const std::vector<exact::PLMap> gens = {
        exact::generator_x0(), exact::generator_x0().inverse(),
        exact::generator_x1(), exact::generator_x1().inverse()};
    std::vector<BallElement> ball;
    std::unordered_set<std::string> seen;
    std::vector<exact::PLMap> level = {exact::PLMap::identity()};
    {
        BallElement root;
        root.word = exact::PLMap::identity();
        root.key = root.word.to_json().dump();
        root.word_length = 0;
        root.diffeo = sample_theta(root.word, gen, m_grid);
        seen.insert(root.key);
        ball.push_back(std::move(root));
    }
    for (int len = 1; len <= radius; ++len) {
        std::vector<exact::PLMap> next;
        for (const exact::PLMap& w : level)
            for (const exact::PLMap& g : gens) {
                exact::PLMap prod = w.after(g);
                const std::string key = prod.to_json().dump();
                if (!seen.insert(key).second)
                    continue;
                BallElement el;
                el.key = key;
                el.word_length = len;
                el.diffeo = sample_theta(prod, gen, m_grid);
                el.word = prod;
                next.push_back(std::move(prod));
                ball.push_back(std::move(el));
            }
        level = std::move(next);
    }
    return ball;
}

SampledDiffeo pull_back(const exact::PLMap& h,
                        const embed::SmoothGenerator& gen,
                        const SampledDiffeo& f) {
    const embed::ThetaImage inv(h.inverse(), gen);
    SampledDiffeo out;
    out.q.resize(f.q.size());
    out.qp.resize(f.q.size());
    for (std::size_t i = 0; i < f.q.size(); ++i) {
        out.q[i] = inv.apply(f.q[i]);
        out.qp[i] = inv.derivative(f.q[i]) * f.qp[i];
    }
    out.q.front() = 0.0;
    out.q.back() = 1.0;
    return out;
}

RDeltaReport r_delta(const SampledDiffeo& f,
                     const std::vector<BallElement>& ball,
                     const embed::SmoothGenerator& gen, double delta) {
    require_delta(delta);
    if (ball.empty())
        throw BallTooSmall("empty word ball");
    RDeltaReport out;
    out.value = std::numeric_limits<double>::infinity();
    for (const BallElement& el : ball)
        out.radius = std::max(out.radius, el.word_length);
    for (std::size_t i = 0; i < ball.size(); ++i) {
        const double p = p_delta(pull_back(ball[i].word, gen, f), delta);
        if (p < out.value) {
            out.value = p;
            out.argmin_index = i;
            out.argmin_length = ball[i].word_length;
        }
    }
    if (out.argmin_length >= out.radius)
        throw BallTooSmall("p_delta minimizer sits on the ball boundary");
    return out;
}

PiDeltaReport pi_delta(const std::function<double(const BallElement&)>& F,
                       const SampledDiffeo& f,
                       const std::vector<BallElement>& ball,
                       const embed::SmoothGenerator& gen, double delta) {
    const RDeltaReport r = r_delta(f, ball, gen, delta);
    PiDeltaReport out;
    out.r_value = r.value;
    out.weights.resize(ball.size(), 0.0);
    double weighted = 0;
    for (std::size_t i = 0; i < ball.size(); ++i) {
        const double p = p_delta(pull_back(ball[i].word, gen, f), delta);
        const double t = p - r.value;
        if (t >= 1.0)
            continue;
        const double w = 1.0 - t;
        if (ball[i].word_length >= r.radius)
            throw BallTooSmall("active element sits on the ball boundary");
        out.weights[i] = w;
        out.weight_sum += w;
        weighted += w * F(ball[i]);
        ++out.active_count;
    }
    out.value = weighted / out.weight_sum;
    return out;
}

}  // namespace shavlab::holder
