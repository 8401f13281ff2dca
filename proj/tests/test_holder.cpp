#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "shavlab/errors.hpp"
#include "shavlab/holder.hpp"
#include "shavlab/plmap.hpp"
#include "shavlab/rng.hpp"
#include "shavlab/sampled_diffeo.hpp"
#include "shavlab/smooth_generator.hpp"
#include "shavlab/theta.hpp"

using namespace shavlab::holder;
using namespace shavlab::wiener;
using namespace shavlab::exact;
using shavlab::Rng;

namespace {

const shavlab::embed::SmoothGenerator& two_bump() {
    static const shavlab::embed::SmoothGenerator f =
        shavlab::embed::build_generator("two-bump", 6, true);
    return f;
}

// Diffeomorphism whose log-derivative is an affine function with slope a.
SampledDiffeo exp_map(double a, int m) {
    return sampled_from_derivative(m, [a](double t) { return std::exp(a * t); });
}

SampledDiffeo random_smooth(Rng& rng, int m) {
    const double a = 1.5 * (2 * rng.next_unit() - 1);
    const double b = 1.5 * (2 * rng.next_unit() - 1);
    const double ph = 6.283185307179586 * rng.next_unit();
    return sampled_from_derivative(m, [=](double t) {
        return std::exp(a * std::sin(6.283185307179586 * t + ph) + b * t);
    });
}

SampledDiffeo sample_word(const std::string& w, int m) {
    const shavlab::embed::ThetaImage th(compose_generator_word(w), two_bump());
    SampledDiffeo out;
    out.q.resize(static_cast<std::size_t>(m) + 1);
    out.qp.resize(static_cast<std::size_t>(m) + 1);
    for (int i = 0; i <= m; ++i) {
        const double t = static_cast<double>(i) / m;
        out.q[static_cast<std::size_t>(i)] = th.apply(t);
        out.qp[static_cast<std::size_t>(i)] = th.derivative(t);
    }
    out.q.front() = 0.0;
    out.q.back() = 1.0;
    return out;
}

// Bounded functional of the group element alone, computed from its
// embedded image on a fixed coarse grid.
double deviation_functional(const PLMap& w) {
    const shavlab::embed::ThetaImage th(w, two_bump());
    double dev = 0;
    for (int i = 0; i <= 32; ++i) {
        const double t = static_cast<double>(i) / 32;
        const double d = th.apply(t) - t;
        if (std::abs(d) > std::abs(dev))
            dev = d;
    }
    return dev;
}

}  // namespace

TEST_CASE("norm and log functionals on flat and exponential maps") {
    const SampledDiffeo id = sampled_from_derivative(128, [](double) {
        return 1.0;
    });
    const HolderProfile flat = norm_1_delta(id, 1.0 / 3);
    CHECK(flat.norm == 1.0);
    CHECK(flat.quotient_sup == 0.0);
    CHECK(flat.coarse_norm == 1.0);
    CHECK(p_delta(id, 1.0 / 3) == 0.0);

    const double e = std::exp(1.0);
    const SampledDiffeo f = exp_map(1.0, 1024);
    const HolderProfile prof = norm_1_delta(f, 1.0 / 3);
    CHECK(prof.norm == doctest::Approx(1 / (e - 1) + 1).epsilon(1e-6));
    CHECK(p_delta(f, 1.0 / 3) ==
          doctest::Approx(std::log(e - 1) + 1).epsilon(1e-6));
    const SampledDiffeo f2 = exp_map(2.0, 1024);
    CHECK(p_delta(f2, 1.0 / 3) ==
          doctest::Approx(std::abs(std::log(2 / (e * e - 1))) + 2)
              .epsilon(1e-6));
    CHECK(p_delta(f2, 1.0 / 3) > 0.0);
    CHECK_THROWS_AS(p_delta(f, 0.0), shavlab::DomainError);
    CHECK_THROWS_AS(norm_1_delta(f, 1.0), shavlab::DomainError);
}

TEST_CASE("the norm dominates the uniform norms of map and derivative") {
    Rng rng(61, 0);
    for (int it = 0; it < 30; ++it) {
        const SampledDiffeo f = random_smooth(rng, 200);
        const HolderProfile prof = norm_1_delta(f, 1.0 / 3);
        double max_val = 0, max_slope = 0;
        for (std::size_t i = 0; i < f.q.size(); ++i) {
            max_val = std::max(max_val, std::abs(f.q[i]));
            max_slope = std::max(max_slope, f.qp[i]);
        }
        CHECK(max_val <= prof.norm + 1e-12);
        CHECK(max_slope <= prof.norm + 1e-12);
        CHECK(prof.coarse_norm <= prof.norm + 1e-15);
    }
}

TEST_CASE("inverse and composition constants bound the measured quotients") {
    CHECK(inverse_holder_constant(0.0, 0.5, 0.25) == 0.0);
    CHECK(inverse_holder_constant(1.0, 1.0, 0.77) == 1.0);
    Rng rng(62, 0);
    const int m = 512;
    for (int it = 0; it < 100; ++it) {
        const double delta = (it % 2 == 0) ? 1.0 / 3 : 2.0 / 3;
        double a = 2.5 * (2 * rng.next_unit() - 1);
        double b = 2.5 * (2 * rng.next_unit() - 1);
        if (std::abs(a) < 0.05)
            a = 0.4;
        if (std::abs(b) < 0.05)
            b = -0.3;
        const double ea = std::expm1(a);
        const double eb = std::expm1(b);
        const auto fp = [&](double u) { return a * std::exp(a * u) / ea; };
        const auto gv = [&](double t) { return std::expm1(b * t) / eb; };
        const auto gp = [&](double t) { return b * std::exp(b * t) / eb; };

        std::vector<double> fd(m + 1), gd(m + 1), comp(m + 1), invd(m + 1);
        for (int i = 0; i <= m; ++i) {
            const double t = static_cast<double>(i) / m;
            fd[static_cast<std::size_t>(i)] = fp(t);
            gd[static_cast<std::size_t>(i)] = gp(t);
            comp[static_cast<std::size_t>(i)] = fp(gv(t)) * gp(t);
            const double finv = std::log1p(t * ea) / a;
            invd[static_cast<std::size_t>(i)] = 1.0 / fp(finv);
        }
        const double cf = profile_from_derivs(fd, delta).quotient_sup;
        const double cg = profile_from_derivs(gd, delta).quotient_sup;
        const double mf = *std::min_element(fd.begin(), fd.end());
        const double maxf = *std::max_element(fd.begin(), fd.end());
        const double maxg = *std::max_element(gd.begin(), gd.end());

        const double comp_measured = profile_from_derivs(comp, delta).quotient_sup;
        CHECK(comp_measured <=
              compose_holder_constant(cf, cg, maxf, maxg, delta) * (1 + 1e-9));
        const double inv_measured = profile_from_derivs(invd, delta).quotient_sup;
        CHECK(inv_measured <=
              inverse_holder_constant(cf, mf, delta) * (1 + 1e-9));
    }
}

TEST_CASE("perturbation sweep shows the composition discontinuity") {
    const std::vector<double> eps = {0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.001};
    const std::vector<DiscontinuityRow> rows = discontinuity_demo(eps);
    REQUIRE(rows.size() == eps.size());
    const double slope = 2 + std::pow(2.0, 4.0 / 3.0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].eps == eps[i]);
        // Distance from the base map shrinks exactly linearly.
        CHECK(rows[i].diff_norm ==
              doctest::Approx(slope * eps[i]).epsilon(1e-12));
        // The chord pair matches its closed form; the recorded display has a
        // smaller coefficient on the negligible highest-order term.
        const double exact_chord = -5.0 / 3.0 +
                                   (11.0 / 6.0) * std::pow(eps[i], 4.0 / 3.0) +
                                   (5.0 / 3.0) * std::pow(eps[i], 10.0 / 3.0);
        CHECK(rows[i].chord == doctest::Approx(exact_chord).epsilon(1e-10));
        CHECK(std::abs(rows[i].chord - rows[i].displayed_chord) <= 0.02);
        CHECK(rows[i].composed_diff_norm >= std::abs(rows[i].chord));
        if (i > 0)
            CHECK(rows[i].diff_norm < rows[i - 1].diff_norm);
    }
    // The composed distance survives the limit.
    CHECK(std::abs(std::abs(rows.back().chord) - 5.0 / 3.0) <= 0.05);
    CHECK(rows.back().composed_diff_norm >= 1.6);
    CHECK_THROWS_AS(discontinuity_demo({0.0}), shavlab::DomainError);
    CHECK_THROWS_AS(discontinuity_demo({0.5}), shavlab::DomainError);
}

TEST_CASE("log functional moves continuously with the map") {
    Rng rng(63, 0);
    const int m = 256;
    int tested = 0;
    for (int it = 0; it < 20; ++it) {
        const double a = 1.2 * (2 * rng.next_unit() - 1);
        const double ph = 6.283185307179586 * rng.next_unit();
        const double eta = 0.002 + 0.004 * rng.next_unit();
        const auto base = [&](double t) {
            return std::exp(a * std::sin(6.283185307179586 * t + ph));
        };
        const SampledDiffeo f0 = sampled_from_derivative(m, base);
        const SampledDiffeo f = sampled_from_derivative(m, [&](double t) {
            return base(t) * std::exp(eta * std::cos(6.283185307179586 * t));
        });
        std::vector<double> dd(f.qp.size());
        for (std::size_t i = 0; i < dd.size(); ++i)
            dd[i] = f.qp[i] - f0.qp[i];
        const double dist = profile_from_derivs(dd, 1.0 / 3).norm;
        const double min0 = *std::min_element(f0.qp.begin(), f0.qp.end());
        const double max0 = *std::max_element(f0.qp.begin(), f0.qp.end());
        if (!(dist < min0 / 2))
            continue;
        const double bound = p_delta_continuity_bound(
            min0, max0, norm_1_delta(f0, 1.0 / 3).norm, dist * (1 + 1e-9));
        CHECK(std::abs(p_delta(f, 1.0 / 3) - p_delta(f0, 1.0 / 3)) <= bound);
        ++tested;
    }
    CHECK(tested >= 15);
    CHECK_THROWS_AS(p_delta_continuity_bound(1.0, 2.0, 3.0, 0.6),
                    shavlab::DomainError);
}

TEST_CASE("word balls enumerate distinct embedded elements") {
    const std::vector<BallElement> ball = build_theta_ball(two_bump(), 2, 96);
    std::size_t len0 = 0, len1 = 0;
    for (const BallElement& el : ball) {
        if (el.word_length == 0)
            ++len0;
        if (el.word_length == 1)
            ++len1;
        CHECK(el.diffeo.q.front() == 0.0);
        CHECK(el.diffeo.q.back() == 1.0);
        for (std::size_t i = 1; i < el.diffeo.q.size(); ++i)
            CHECK(el.diffeo.q[i] > el.diffeo.q[i - 1]);
        for (double d : el.diffeo.qp)
            CHECK(d > 0.0);
    }
    CHECK(len0 == 1);
    CHECK(len1 == 4);
    CHECK(ball.size() >= 17);
}

TEST_CASE("ball minimization finds the matching group element") {
    const int m = 96;
    const std::vector<BallElement> ball = build_theta_ball(two_bump(), 3, m);

    SampledDiffeo id;
    id.q.resize(m + 1);
    id.qp.assign(m + 1, 1.0);
    for (int i = 0; i <= m; ++i)
        id.q[static_cast<std::size_t>(i)] = static_cast<double>(i) / m;
    const RDeltaReport rid = r_delta(id, ball, two_bump(), 1.0 / 3);
    CHECK(rid.value == 0.0);
    CHECK(rid.argmin_length == 0);

    const SampledDiffeo fab = sample_word("ab", m);
    const RDeltaReport rab = r_delta(fab, ball, two_bump(), 1.0 / 3);
    CHECK(rab.value <= 1e-8);
    CHECK(rab.argmin_length == 2);
    CHECK(ball[rab.argmin_index].key ==
          compose_generator_word("ab").to_json().dump());

    // A length-3 input pushes the minimizer onto the outermost shell.
    const SampledDiffeo f3 = sample_word("aab", m);
    CHECK_THROWS_AS(r_delta(f3, ball, two_bump(), 1.0 / 3),
                    shavlab::BallTooSmall);
    CHECK_THROWS_AS(r_delta(id, {}, two_bump(), 1.0 / 3),
                    shavlab::BallTooSmall);
}

TEST_CASE("weighted group averages normalize and respect bounds") {
    const int m = 96;
    const std::vector<BallElement> ball = build_theta_ball(two_bump(), 2, m);

    SampledDiffeo id;
    id.q.resize(m + 1);
    id.qp.assign(m + 1, 1.0);
    for (int i = 0; i <= m; ++i)
        id.q[static_cast<std::size_t>(i)] = static_cast<double>(i) / m;
    const PiDeltaReport at_id = pi_delta(
        [](const BallElement& el) {
            return el.word_length == 0 ? 7.5 : -3.0;
        },
        id, ball, two_bump(), 1.0 / 3);
    CHECK(at_id.active_count == 1);
    CHECK(at_id.value == 7.5);

    // Constant functionals average to the constant on any input.
    const SampledDiffeo fa = sample_word("a", m);
    const PiDeltaReport constant = pi_delta(
        [](const BallElement&) { return 3.25; }, fa, ball, two_bump(),
        1.0 / 3);
    CHECK(constant.value == doctest::Approx(3.25).epsilon(1e-12));

    // A generic nearby diffeomorphism: weights lie in [0,1], the identity
    // atom carries full weight, and the average respects the active range.
    const SampledDiffeo gen = sampled_from_derivative(m, [](double t) {
        return std::exp(0.35 * std::sin(6.283185307179586 * t));
    });
    const PiDeltaReport rep = pi_delta(
        [](const BallElement& el) { return deviation_functional(el.word); },
        gen, ball, two_bump(), 1.0 / 3);
    CHECK(rep.weight_sum >= 1.0);
    double lo = 1e30, hi = -1e30;
    double wsum = 0;
    for (std::size_t i = 0; i < ball.size(); ++i) {
        const double w = rep.weights[i];
        CHECK(w >= 0.0);
        CHECK(w <= 1.0);
        wsum += w;
        if (w > 0) {
            const double fv = deviation_functional(ball[i].word);
            lo = std::min(lo, fv);
            hi = std::max(hi, fv);
        }
    }
    CHECK(wsum == doctest::Approx(rep.weight_sum).epsilon(1e-12));
    CHECK(rep.value >= lo - 1e-12);
    CHECK(rep.value <= hi + 1e-12);
}

TEST_CASE("group translation of the functional commutes with the average") {
    const int m = 96;
    const std::vector<BallElement> small = build_theta_ball(two_bump(), 2, m);
    const std::vector<BallElement> large = build_theta_ball(two_bump(), 3, m);
    const SampledDiffeo f = sample_word("a", m);
    const PLMap g = compose_generator_word("b");
    const PLMap ginv = g.inverse();

    const PiDeltaReport lhs = pi_delta(
        [&](const BallElement& el) {
            return deviation_functional(ginv.after(el.word));
        },
        f, small, two_bump(), 1.0 / 3);
    const PiDeltaReport rhs = pi_delta(
        [&](const BallElement& el) { return deviation_functional(el.word); },
        pull_back(g, two_bump(), f), large, two_bump(), 1.0 / 3);
    CHECK(std::abs(lhs.value - rhs.value) <= 1e-9);
    CHECK(std::abs(lhs.r_value - rhs.r_value) <= 1e-8);
}
