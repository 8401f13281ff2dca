#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "shavlab/errors.hpp"
#include "shavlab/kernels.hpp"
#include "shavlab/partition.hpp"
#include "shavlab/rng.hpp"

using namespace shavlab::meas;
using shavlab::Rng;

namespace {

Partition random_partition(Rng& rng, int n) {
    std::vector<double> cuts(static_cast<std::size_t>(n) - 1);
    for (double& c : cuts)
        c = 0.02 + 0.96 * rng.next_unit();
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t k = 1; k < cuts.size(); ++k)
        if (cuts[k] - cuts[k - 1] < 1e-4)
            cuts[k] = cuts[k - 1] + 1e-4;
    Partition x;
    x.interior = cuts;
    return x;
}

double det_small(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    double det = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[p][c]))
                p = r;
        if (p != c) {
            std::swap(a[p], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k)
                a[r][k] -= f * a[c][k];
        }
    }
    return det;
}

}  // namespace

TEST_CASE("coordinate transforms round-trip with the stated jacobians") {
    Partition uni;
    uni.interior = {0.25, 0.5, 0.75};
    const TransformReport u = transforms(uni);
    for (double v : u.l)
        CHECK(v == doctest::Approx(0.25).epsilon(1e-14));
    for (double v : u.y)
        CHECK(v == doctest::Approx(1.0).epsilon(1e-13));
    for (double v : u.z)
        CHECK(std::abs(v) <= 1e-13);
    CHECK(u.jac_A == 1.0);
    CHECK(u.jac_B == doctest::Approx(256.0).epsilon(1e-12));
    CHECK(u.jac_C_inv == doctest::Approx(8.0).epsilon(1e-12));

    Partition p3;
    p3.interior = {0.2, 0.5};
    CHECK(transforms(p3).jac_B == doctest::Approx(8.0).epsilon(1e-13));

    Rng rng(71, 0);
    for (int it = 0; it < 200; ++it) {
        const int n = 2 + static_cast<int>(rng.next_below(7));
        const Partition x = random_partition(rng, n);
        const TransformReport rep = transforms(x);
        CHECK(rep.y.back() == 1.0);
        CHECK(rep.z.back() == 0.0);
        double sum = 0;
        for (double v : rep.l)
            sum += v;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));

        const Partition xl = partition_from_l(rep.l);
        const Partition xy = partition_from_y(rep.y);
        std::vector<double> zf(rep.z.begin(), rep.z.end() - 1);
        const Partition xz = partition_from_z(zf);
        for (std::size_t k = 0; k < x.interior.size(); ++k) {
            CHECK(std::abs(xl.interior[k] - x.interior[k]) <= 1e-14);
            CHECK(std::abs(xy.interior[k] - x.interior[k]) <= 1e-12);
            CHECK(std::abs(xz.interior[k] - x.interior[k]) <= 1e-12);
        }
    }

    Partition bad;
    bad.interior = {0.5, 0.4};
    CHECK_THROWS_AS(transforms(bad), shavlab::DomainError);
    bad.interior = {0.0};
    CHECK_THROWS_AS(transforms(bad), shavlab::DomainError);
    CHECK_THROWS_AS(partition_from_l({0.5, 0.4}), shavlab::DomainError);
    CHECK_THROWS_AS(partition_from_y({2.0, 0.5}), shavlab::DomainError);
}

TEST_CASE("neighbor ratio arguments agree across coordinate systems") {
    Rng rng(72, 0);
    for (int it = 0; it < 1000; ++it) {
        const int n = 2 + static_cast<int>(rng.next_below(6));
        const Partition x = random_partition(rng, n);
        const TransformReport rep = transforms(x);
        for (int k = 1; k <= n; ++k) {
            const double lk = rep.l[static_cast<std::size_t>(k - 1)];
            const double lp = (k == 1) ? rep.l.back()
                                       : rep.l[static_cast<std::size_t>(k - 2)];
            const double from_l = (lk + lp) / (2 * std::sqrt(lk * lp));
            const double yk = rep.y[static_cast<std::size_t>(k - 1)];
            const double yp = (k == 1) ? 1.0
                                       : rep.y[static_cast<std::size_t>(k - 2)];
            const double from_y = (yk + yp) / (2 * std::sqrt(yk * yp));
            const double xk = (k == n) ? 1.0
                                       : x.interior[static_cast<std::size_t>(k - 1)];
            const double xm2 = (k == 1) ? x.interior.back() - 1.0
                              : (k == 2) ? 0.0
                                         : x.interior[static_cast<std::size_t>(k - 3)];
            const double from_x = (xk - xm2) / (2 * std::sqrt(lk * lp));
            CHECK(from_l == doctest::Approx(from_y).epsilon(1e-12));
            CHECK(from_l == doctest::Approx(from_x).epsilon(1e-12));
            const double zk = rep.z[static_cast<std::size_t>(k - 1)];
            const double zp = (k == 1) ? 0.0
                                       : rep.z[static_cast<std::size_t>(k - 2)];
            CHECK(std::cosh(zk - zp) == doctest::Approx(from_l).epsilon(1e-11));
        }
    }
}

TEST_CASE("half-angle identity picks out the larger length ratio") {
    const std::vector<double> grid = {0.01, 0.1, 0.35, 1.0, 2.5, 7.0, 100.0};
    for (double a : grid)
        for (double b : grid) {
            const double t = (a + b) / (2 * std::sqrt(a * b));
            const double lhs = t + std::sqrt(std::max(0.0, t * t - 1));
            const double rhs = std::sqrt(std::max(a, b) / std::min(a, b));
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
}

TEST_CASE("interpolated kernel matches the quadrature route") {
    const std::vector<double> taus = {0.0, 0.3, 1.0, 2.0, 5.0,  10.0, 50.0,
                                      200.0, 1e3, 1e4, 1e5, 9e5};
    for (double t : taus) {
        CHECK(std::abs(v1_cached(t) - shavlab::kern::v1(t)) <= 1e-9);
        CHECK(v1_cached(-t) == v1_cached(t));
    }
    CHECK(v1_cached(2e6) == shavlab::kern::v1(2e6));
    CHECK(v1_cached(0.0) == doctest::Approx(shavlab::kern::kPi).epsilon(1e-10));
}

TEST_CASE("chain density evaluates identically along both routes") {
    Partition single;
    CHECK(u1n(single) == doctest::Approx(shavlab::kern::kPi).epsilon(1e-9));
    CHECK(u1n_direct(single) ==
          doctest::Approx(shavlab::kern::kPi).epsilon(1e-9));

    Partition mid;
    mid.interior = {0.5};
    const double four_pi_sq =
        4 * shavlab::kern::kPi * shavlab::kern::kPi;
    CHECK(u1n(mid) == doctest::Approx(four_pi_sq).epsilon(1e-8));
    CHECK(u1n_direct(mid) == doctest::Approx(four_pi_sq).epsilon(1e-8));

    Rng rng(73, 0);
    for (int it = 0; it < 100; ++it) {
        const int n = 2 + static_cast<int>(rng.next_below(5));
        const Partition x = random_partition(rng, n);
        CHECK(log_u1n(x) ==
              doctest::Approx(std::log(u1n_direct(x))).epsilon(1e-8));
    }

    // A block ratio of a million: the log route must agree with the direct
    // long double product.
    const double tiny = 1e-6 / (1 + 1e-6);
    const Partition skew = partition_from_l({tiny, 1.0 - tiny});
    CHECK(log_u1n(skew) ==
          doctest::Approx(std::log(u1n_direct(skew))).epsilon(1e-8));
}

TEST_CASE("mesh and minimal ratio helpers") {
    Partition p;
    p.interior = {0.25, 0.5, 0.75};
    CHECK(mesh(p) == doctest::Approx(0.25).epsilon(1e-14));
    p.interior = {0.2, 0.5};
    CHECK(mesh(p) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(min_half_log_ratio(p) ==
          doctest::Approx(0.5 * std::log(1.5)).epsilon(1e-12));
}

TEST_CASE("normalizer growth and its stabilized ratio") {
    CHECK(Jn(1) == doctest::Approx(shavlab::kern::kPi).epsilon(1e-6));
    CHECK(Jn(2) ==
          doctest::Approx(2 * shavlab::kern::moment_Tn(3)).epsilon(1e-12));
    double c1 = 1e300, c2 = 0;
    for (int n = 1; n <= 10; ++n) {
        const double factorial_scale = [n] {
            double f = 1;
            for (int k = 2; k <= 2 * n; ++k)
                f *= k;
            return std::ldexp(f, 3 * n - 1);
        }();
        const double ratio = Jn(n) / factorial_scale;
        CHECK(Jn_ratio(n) == doctest::Approx(ratio).epsilon(1e-10));
        c1 = std::min(c1, ratio);
        c2 = std::max(c2, ratio);
        if (n > 1)
            CHECK(Jn(n) > Jn(n - 1));
    }
    CHECK(c1 > 0);
    CHECK(c2 / c1 < 1.5);
    CHECK(std::abs(Jn_ratio(10) - shavlab::kern::moment_ratio_limit()) <= 1e-3);
    CHECK_THROWS_AS(Jn(0), shavlab::DomainError);
    CHECK_THROWS_AS(Jn(16), shavlab::DomainError);
}

TEST_CASE("importance sampling reproduces the normalizer") {
    const MCEstimate j2 = direct_Jn_mc(2, 2000000, 101, 0, 8);
    const double target2 = 2 * shavlab::kern::moment_Tn(3);
    CHECK(std::abs(j2.value - target2) <= 3 * j2.stderr_value);
    CHECK(j2.stderr_value / j2.value < 0.01);

    const MCEstimate j3 = direct_Jn_mc(3, 2000000, 102, 0, 8);
    const double target3 = 4 * shavlab::kern::moment_Tn(5);
    CHECK(std::abs(j3.value - target3) <= 3 * j3.stderr_value);
    CHECK(j3.stderr_value / j3.value < 0.05);

    const MCEstimate again = direct_Jn_mc(2, 2000000, 101, 0, 1);
    CHECK(again.value == j2.value);
    CHECK(again.stderr_value == j2.stderr_value);
    CHECK_THROWS_AS(direct_Jn_mc(4, 1000, 1, 0, 1), shavlab::DomainError);
    CHECK_THROWS_AS(direct_Jn_mc(2, 0, 1, 0, 1), shavlab::DomainError);
}

TEST_CASE("weighted expectations match symmetry and each other") {
    const MCEstimate x1 = direct_expectation_mc(
        2,
        [](const std::vector<double>& z) {
            return 1.0 / (1.0 + std::exp(-2 * z[0]));
        },
        1000000, 103, 0, 8);
    CHECK(std::abs(x1.value - 0.5) <= 3 * x1.stderr_value);
    CHECK(x1.stderr_value < 0.005);
}

TEST_CASE("chain sampler agrees with direct estimates and reproduces") {
    McmcConfig cfg;
    cfg.seed = 104;
    cfg.chains = 4;
    cfg.samples_per_chain = 8000;
    cfg.workers = 4;

    const McmcEstimate m2 = mcmc_expectation(
        2,
        [](const std::vector<double>& z) {
            return 1.0 / (1.0 + std::exp(-2 * z[0]));
        },
        cfg);
    CHECK(std::abs(m2.value - 0.5) <= 3 * m2.stderr_value);
    CHECK(m2.stderr_value < 0.01);
    CHECK(m2.acceptance > 0.1);
    CHECK(m2.ess > 1000);

    const auto mesh_stat = [](const std::vector<double>& z) {
        return mesh_from_z(z);
    };
    McmcConfig cfg3 = cfg;
    cfg3.seed = 105;
    const McmcEstimate m3 = mcmc_expectation(3, mesh_stat, cfg3);
    const MCEstimate d3 = direct_expectation_mc(3, mesh_stat, 2000000, 106, 0, 8);
    const double joint =
        std::sqrt(m3.stderr_value * m3.stderr_value +
                  d3.stderr_value * d3.stderr_value);
    CHECK(std::abs(m3.value - d3.value) <= 3 * joint);

    // Near-collision probability, chain sampler against the direct route.
    const double gap = std::acosh(1.25);
    const auto collide = [gap](const std::vector<double>& z) {
        return min_half_log_ratio_from_z(z) <= gap ? 1.0 : 0.0;
    };
    McmcConfig cfgc = cfg;
    cfgc.seed = 109;
    const McmcEstimate mc = mcmc_expectation(3, collide, cfgc);
    const MCEstimate dc = direct_expectation_mc(3, collide, 2000000, 110, 0, 8);
    const double jointc =
        std::sqrt(mc.stderr_value * mc.stderr_value +
                  dc.stderr_value * dc.stderr_value);
    CHECK(std::abs(mc.value - dc.value) <= 3 * jointc);
    CHECK(mc.value > 0.0);

    McmcConfig small = cfg;
    small.samples_per_chain = 256;
    const std::vector<Partition> s1 = sample_un(2, small);
    const std::vector<Partition> s2 = sample_un(2, small);
    REQUIRE(s1.size() == s2.size());
    // Draws whose lengths leave double range are dropped, so the yield sits
    // below the raw chain length but should stay a clear majority.
    CHECK(s1.size() <= 4 * 256);
    CHECK(s1.size() >= 512);
    for (std::size_t i = 0; i < s1.size(); ++i) {
        CHECK(s1[i].interior == s2[i].interior);
        validate_partition(s1[i]);
    }
    CHECK_THROWS_AS(mcmc_expectation(1, mesh_stat, cfg), shavlab::DomainError);
}

TEST_CASE("mesh tail probabilities fall with refinement") {
    McmcConfig cfg;
    cfg.seed = 107;
    cfg.chains = 4;
    cfg.samples_per_chain = 12000;
    cfg.workers = 4;
    const std::vector<DecayRow> rows = check_mesh_decay({4, 8, 16}, 0.25, cfg);
    REQUIRE(rows.size() == 3);
    // Four blocks always contain one of length above a quarter.
    CHECK(rows[0].estimate == 1.0);
    CHECK(rows[0].stderr_value == 0.0);
    // The chain law concentrates on partitions with one dominant block, so
    // the restricted mass stays at 1 instead of vanishing with n. The
    // stated limit is contradicted here; this test pins the observed value
    // so a sampler regression would surface.
    for (const DecayRow& row : rows) {
        CHECK(row.estimate >= 0.99);
        CHECK(row.estimate <= 1.0);
    }

    const std::vector<DecayRow> sure = check_mesh_decay({4, 8}, 1.0, cfg);
    CHECK(sure[0].estimate == 0.0);
    CHECK(sure[1].estimate == 0.0);
    CHECK_THROWS_AS(check_mesh_decay({4}, 0.0, cfg), shavlab::DomainError);
}

TEST_CASE("close neighbor ratios become rare with refinement") {
    McmcConfig cfg;
    cfg.seed = 108;
    cfg.chains = 4;
    cfg.samples_per_chain = 12000;
    cfg.workers = 4;
    const std::vector<DecayRow> rows = check_ratio_decay({4, 8, 16}, 1.05, cfg);
    REQUIRE(rows.size() == 3);
    for (const DecayRow& row : rows) {
        CHECK(row.estimate > 0.0);
        CHECK(row.estimate < 1.0);
    }
    const double j01 = 2 * std::sqrt(rows[0].stderr_value * rows[0].stderr_value +
                                     rows[1].stderr_value * rows[1].stderr_value);
    const double j12 = 2 * std::sqrt(rows[1].stderr_value * rows[1].stderr_value +
                                     rows[2].stderr_value * rows[2].stderr_value);
    CHECK(rows[1].estimate + j01 < rows[0].estimate);
    CHECK(rows[2].estimate + j12 < rows[1].estimate);

    // Union bound: a single close pair carries probability at most
    // 8 pi a (1 + a) J_{n-1} / J_n, and the consecutive-J ratio is bounded
    // by the bracketing constants of the closed-form sequence. Any sampler
    // that cannot reach the heavy tails of the chain law lands above this
    // band, so the bound doubles as a mixing check.
    double c1 = std::numeric_limits<double>::infinity();
    double c2 = 0.0;
    for (int n = 1; n <= 10; ++n) {
        const double q = Jn_ratio(n);
        c1 = std::min(c1, q);
        c2 = std::max(c2, q);
    }
    const double a = std::acosh(1.05);
    for (const DecayRow& row : rows) {
        const double cap = (c2 / c1) * shavlab::kern::kPi * a * (1 + a) /
                           (2.0 * (2 * row.n - 1));
        CHECK(row.estimate <= cap + 3 * row.stderr_value);
    }

    const std::vector<DecayRow> none = check_ratio_decay({4}, 0.9, cfg);
    CHECK(none[0].estimate == 0.0);
}

TEST_CASE("odd-link comparison inequality on a spot grid") {
    const std::vector<double> ps = {0.0, 0.3, 1.0, 2.5, 6.0, 10.0};
    const std::vector<double> as = {0.0, 0.2, 1.0, 3.0};
    for (double p : ps)
        for (double a : as) {
            const double qmin = std::max(0.0, p - a);
            for (double q : {qmin, qmin + 0.5, qmin + 4.0}) {
                CHECK(1 + p * p <=
                      (1 + q * q) * 4 * (1 + a) * (1 + a) + 1e-12);
            }
        }
}

TEST_CASE("ratio map jacobian matches finite differences") {
    Rng rng(74, 0);
    for (int n : {3, 4, 5}) {
        const Partition x = random_partition(rng, n);
        const double analytic = transforms(x).jac_B;
        const double h = 1e-6;
        const std::size_t dim = x.interior.size();
        std::vector<std::vector<double>> jac(dim, std::vector<double>(dim));
        for (std::size_t c = 0; c < dim; ++c) {
            Partition hi = x, lo = x;
            hi.interior[c] += h;
            lo.interior[c] -= h;
            const TransformReport rh = transforms(hi);
            const TransformReport rl = transforms(lo);
            for (std::size_t r = 0; r < dim; ++r)
                jac[r][c] = (rh.y[r] - rl.y[r]) / (2 * h);
        }
        const double fd = std::abs(det_small(jac));
        CHECK(fd == doctest::Approx(analytic).epsilon(1e-5));
    }
}
