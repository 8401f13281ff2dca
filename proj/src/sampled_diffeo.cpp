#include "shavlab/sampled_diffeo.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "shavlab/errors.hpp"

namespace shavlab::wiener {

namespace {

double interp(const std::vector<double>& v, double t) {
    const int m = static_cast<int>(v.size()) - 1;
    const double s = std::clamp(t, 0.0, 1.0) * m;
    const int i = std::min(static_cast<int>(s), m - 1);
    const double frac = s - i;
    return v[static_cast<std::size_t>(i)] * (1 - frac) +
           v[static_cast<std::size_t>(i) + 1] * frac;
}

void require_grid(std::size_t n) {
    if (n < 3)
        throw DomainError("grid needs at least two cells");
}

}  // namespace

double GridFunction::value(double t) const { return interp(v, t); }

double SampledDiffeo::value(double t) const { return interp(q, t); }

double SampledDiffeo::derivative(double t) const { return interp(qp, t); }

double trapz(const std::vector<double>& v) {
    require_grid(v.size());
    const std::size_t m = v.size() - 1;
    double sum = (v.front() + v.back()) / 2;
    for (std::size_t i = 1; i < m; ++i)
        sum += v[i];
    return sum / static_cast<double>(m);
}

GridFunction map_A(const SampledDiffeo& q) {
    require_grid(q.qp.size());
    if (q.q.size() != q.qp.size())
        throw DomainError("value and derivative grids differ in size");
    GridFunction x;
    x.v.resize(q.qp.size());
    for (double d : q.qp)
        if (!(d > 0) || !std::isfinite(d))
            throw DomainError("diffeomorphism derivative must be positive");
    const double base = std::log(q.qp.front());
    for (std::size_t i = 0; i < q.qp.size(); ++i)
        x.v[i] = std::log(q.qp[i]) - base;
    x.v.front() = 0.0;
    return x;
}

namespace {

SampledDiffeo normalize_from_weights(const std::vector<double>& e) {
    const std::size_t m = e.size() - 1;
    SampledDiffeo out;
    out.q.resize(e.size());
    out.qp.resize(e.size());
    std::vector<double> cum(e.size());
    cum[0] = 0.0;
    for (std::size_t i = 1; i <= m; ++i)
        cum[i] = cum[i - 1] + (e[i - 1] + e[i]) / (2.0 * static_cast<double>(m));
    const double total = cum[m];
    if (!(total > 0) || !std::isfinite(total))
        throw DomainError("derivative profile must integrate to a positive value");
    for (std::size_t i = 0; i <= m; ++i) {
        out.q[i] = cum[i] / total;
        out.qp[i] = e[i] / total;
    }
    out.q[0] = 0.0;
    out.q[m] = 1.0;
    return out;
}

}  // namespace

SampledDiffeo map_B(const GridFunction& x) {
    require_grid(x.v.size());
    std::vector<double> e(x.v.size());
    for (std::size_t i = 0; i < x.v.size(); ++i) {
        if (!std::isfinite(x.v[i]))
            throw DomainError("path values must be finite");
        e[i] = std::exp(x.v[i]);
    }
    return normalize_from_weights(e);
}

SampledDiffeo sampled_from_derivative(int m_grid,
                                      const std::function<double(double)>& p) {
    if (m_grid < 2)
        throw DomainError("grid needs at least two cells");
    std::vector<double> e(static_cast<std::size_t>(m_grid) + 1);
    for (int i = 0; i <= m_grid; ++i) {
        const double d = p(static_cast<double>(i) / m_grid);
        if (!(d > 0) || !std::isfinite(d))
            throw DomainError("derivative profile must be positive");
        e[static_cast<std::size_t>(i)] = d;
    }
    return normalize_from_weights(e);
}

GridFunction time_reverse(const GridFunction& x) {
    require_grid(x.v.size());
    const std::size_t m = x.v.size() - 1;
    GridFunction out;
    out.v.resize(x.v.size());
    const double last = x.v[m];
    for (std::size_t i = 0; i <= m; ++i)
        out.v[i] = x.v[m - i] - last;
    return out;
}

}  // namespace shavlab::wiener
