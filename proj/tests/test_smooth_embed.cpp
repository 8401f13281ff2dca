#include <doctest.h>

#include <cmath>
#include <string>

#include "shavlab/errors.hpp"
#include "shavlab/plmap.hpp"
#include "shavlab/rng.hpp"
#include "shavlab/smooth_generator.hpp"
#include "shavlab/theta.hpp"

using namespace shavlab::embed;
using namespace shavlab::exact;
using shavlab::Rng;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

const SmoothGenerator& two_bump() {
    static const SmoothGenerator f = build_generator("two-bump", 6, true);
    return f;
}

std::string random_word(Rng& rng, std::size_t len) {
    static const char letters[] = {'a', 'A', 'b', 'B'};
    std::string w;
    for (std::size_t k = 0; k < len; ++k)
        w += letters[rng.next_below(4)];
    return w;
}

}  // namespace

TEST_CASE("trig generator matches its closed form") {
    const SmoothGenerator f = build_generator("trig", 2);
    for (int i = 0; i <= 64; ++i) {
        const double t = static_cast<double>(i) / 64;
        const double exact_val = 2 * t - std::sin(kTwoPi * t) / kTwoPi;
        CHECK(f.fwd(t) == doctest::Approx(exact_val).epsilon(1e-12));
        CHECK(f.deriv(t) ==
              doctest::Approx(2 - std::cos(kTwoPi * t)).epsilon(1e-12));
    }
    // Commutation with the integer lattice, and inversion round trip.
    for (double x : {-1.7, -0.3, 0.4, 2.9}) {
        CHECK(f.fwd(x + 1) == doctest::Approx(f.fwd(x) + 2).epsilon(1e-13));
        CHECK(f.inv(f.fwd(x)) == doctest::Approx(x).epsilon(1e-12));
    }
    CHECK(f.fwd(0.0) == 0.0);
    CHECK(f.fwd(1.0) == doctest::Approx(2.0));
}

TEST_CASE("profile validation accepts and rejects by smoothness order") {
    CHECK_NOTHROW(build_generator("trig", 1));
    CHECK_NOTHROW(build_generator("trig", 2));
    // The second profile derivative at the seam is 4 pi^2, so class 3 fails.
    CHECK_THROWS_AS(build_generator("trig", 3), shavlab::ProfileInvalid);
    CHECK_NOTHROW(build_generator("flat-bump", SmoothGenerator::kInfiniteOrder));
    CHECK_NOTHROW(build_generator("two-bump", SmoothGenerator::kInfiniteOrder));
    CHECK_THROWS_AS(build_generator("nonesuch", 2), shavlab::ProfileInvalid);
    // Bad profiles through the direct constructor.
    CHECK_THROWS_AS(
        SmoothGenerator([](double) { return 1.5; }, 1, false, "flat"),
        shavlab::ProfileInvalid);
    CHECK_THROWS_AS(
        SmoothGenerator([](double x) { return 2 * x; }, 1, false, "ramp"),
        shavlab::ProfileInvalid);
}

TEST_CASE("fixed point structure of the named profiles") {
    // Single bump keeps f above the diagonal: no interior fixed point.
    const SmoothGenerator fb =
        build_generator("flat-bump", SmoothGenerator::kInfiniteOrder);
    CHECK_FALSE(fb.has_interior_fixed_point());
    CHECK_THROWS_AS(fb.fixed_point(), shavlab::NoInteriorFixedPoint);
    CHECK_THROWS_AS(
        build_generator("flat-bump", SmoothGenerator::kInfiniteOrder, true),
        shavlab::NoInteriorFixedPoint);
    // The trig profile also stays above the diagonal on (0,1).
    CHECK_FALSE(build_generator("trig", 2).has_interior_fixed_point());

    const SmoothGenerator& f = two_bump();
    REQUIRE(f.has_interior_fixed_point());
    const double z = f.fixed_point();
    CHECK(z > 0.5);
    CHECK(z < 1.0);
    CHECK(f.fwd(z) == doctest::Approx(z).epsilon(1e-12));
    CHECK(f.deriv(z) > 1.0);
    CHECK(f.log_slope() == doctest::Approx(std::log(f.deriv(z))));
}

TEST_CASE("bar map fixes integers and is monotone") {
    const SmoothGenerator& f = two_bump();
    for (long k : {-3L, -1L, 0L, 1L, 2L, 5L})
        CHECK(bar_map(Dyadic(k), f) == doctest::Approx(double(k)).epsilon(1e-12));
    // Half goes to the preimage of 1.
    const double half_bar = bar_map(Dyadic(Int(1), 1), f);
    CHECK(half_bar > 0.0);
    CHECK(half_bar < 1.0);
    CHECK(f.fwd(half_bar) == doctest::Approx(1.0).epsilon(1e-12));
    // Representation independence: evaluate through a deeper denominator.
    CHECK(f.iterate(2.0, -2) == doctest::Approx(half_bar).epsilon(1e-11));

    Rng rng(21, 0);
    for (int it = 0; it < 1000; ++it) {
        const Dyadic r1(Int(static_cast<long>(rng.next_below(4097)) - 2048), 6);
        const Dyadic r2(Int(static_cast<long>(rng.next_below(4097)) - 2048), 6);
        if (r1 == r2)
            continue;
        const double b1 = bar_map(r1, f);
        const double b2 = bar_map(r2, f);
        CHECK(((r1 < r2) == (b1 < b2)));
    }
    // Commutes with translation by one.
    Rng rng2(22, 0);
    for (int it = 0; it < 50; ++it) {
        const Dyadic r(Int(static_cast<long>(rng2.next_below(513)) - 256), 4);
        CHECK(bar_map(r + Dyadic(1), f) ==
              doctest::Approx(bar_map(r, f) + 1).epsilon(1e-12));
    }
}

TEST_CASE("embedding sends the basic words to the expected maps") {
    const SmoothGenerator& f = two_bump();
    const ThetaImage t1(unit_translation(), f);
    const ThetaImage d0(doubling_on_unit(), f);
    for (int i = 0; i <= 40; ++i) {
        const double t = -0.5 + 2.0 * i / 40;
        CHECK(t1.apply(t) == doctest::Approx(t + 1).epsilon(1e-12));
        if (t < 0)
            CHECK(d0.apply(t) == doctest::Approx(t).epsilon(1e-12));
        else if (t <= 1)
            CHECK(d0.apply(t) == doctest::Approx(f.fwd(t)).epsilon(1e-12));
        else
            CHECK(d0.apply(t) == doctest::Approx(t + 1).epsilon(1e-12));
    }
    // Identity maps to identity, with derivative one.
    const ThetaImage id(PLMap::identity(), f);
    CHECK(id.apply(0.37) == 0.37);
    CHECK(id.derivative(0.37) == doctest::Approx(1.0));
    // Derivative of the doubling image at the fixed point, and of its square.
    const double z = f.fixed_point();
    CHECK(d0.derivative(z) == doctest::Approx(f.deriv(z)).epsilon(1e-10));
    const ThetaImage d0sq(doubling_on_unit().after(doubling_on_unit()), f);
    CHECK(d0sq.derivative(z) ==
          doctest::Approx(f.deriv(z) * f.deriv(z)).epsilon(1e-9));
}

TEST_CASE("embedding is a homomorphism on random words") {
    const SmoothGenerator& f = two_bump();
    Rng rng(23, 0);
    for (int it = 0; it < 40; ++it) {
        const PLMap a = compose_generator_word(random_word(rng, 1 + rng.next_below(6)));
        const PLMap b = compose_generator_word(random_word(rng, 1 + rng.next_below(6)));
        const ThetaImage ta(a, f);
        const ThetaImage tb(b, f);
        const ThetaImage tab(a.after(b), f);
        CHECK(ta.max_seam_gap() <= 1e-9);
        double sup = 0.0;
        for (int i = 0; i <= 200; ++i) {
            const double t = static_cast<double>(i) / 200;
            sup = std::max(sup, std::abs(tab.apply(t) - ta.apply(tb.apply(t))));
        }
        CHECK(sup <= 1e-9);
    }
}

TEST_CASE("embedded maps fix the endpoints with derivative one") {
    const SmoothGenerator& f = two_bump();
    Rng rng(24, 0);
    for (int it = 0; it < 30; ++it) {
        const PLMap h = compose_generator_word(random_word(rng, 1 + rng.next_below(6)));
        const ThetaImage th(h, f);
        CHECK(th.apply(0.0) == doctest::Approx(0.0).epsilon(1e-11));
        CHECK(th.apply(1.0) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(th.derivative(0.0) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(th.derivative(1.0) == doctest::Approx(1.0).epsilon(1e-9));
        // Strictly increasing on a coarse grid.
        double prev = th.apply(0.0);
        for (int i = 1; i <= 64; ++i) {
            const double cur = th.apply(static_cast<double>(i) / 64);
            CHECK(cur > prev);
            prev = cur;
        }
    }
}

TEST_CASE("support transfers through the embedding") {
    const SmoothGenerator& f = two_bump();
    // The second generator is the identity on [0, 1/2]; its image must be
    // the identity on [0, bar(1/2)].
    const ThetaImage tx1(generator_x1(), f);
    const double half_bar = bar_map(Dyadic(Int(1), 1), f);
    for (int i = 0; i <= 50; ++i) {
        const double t = half_bar * i / 50;
        CHECK(tx1.apply(t) == doctest::Approx(t).epsilon(1e-12));
    }
    CHECK(tx1.apply(half_bar + 0.05) > half_bar + 0.05);
}

TEST_CASE("log-derivative gap witness") {
    const SmoothGenerator& f = two_bump();
    const double C = f.log_slope();

    const WitnessReport w0 = verify_condition_b(generator_x0(), f);
    CHECK(w0.value >= C - 1e-6);
    CHECK(w0.witness_value ==
          doctest::Approx(w0.witness_expected).epsilon(1e-6));
    CHECK(w0.C == doctest::Approx(C));

    const WitnessReport wi = verify_condition_b(generator_x0().inverse(), f);
    CHECK(wi.value >= C - 1e-6);
    CHECK(wi.witness_value ==
          doctest::Approx(wi.witness_expected).epsilon(1e-6));

    CHECK_THROWS_AS(verify_condition_b(PLMap::identity(), f),
                    shavlab::DomainError);
    const SmoothGenerator fb =
        build_generator("flat-bump", SmoothGenerator::kInfiniteOrder);
    CHECK_THROWS_AS(verify_condition_b(generator_x0(), fb),
                    shavlab::NoInteriorFixedPoint);

    Rng rng(25, 0);
    for (int it = 0; it < 10; ++it) {
        const PLMap h = compose_generator_word(random_word(rng, 1 + rng.next_below(7)));
        if (h.is_identity())
            continue;
        const WitnessReport w = verify_condition_b(h, f);
        CHECK(w.value >= C - 1e-6);
        CHECK(w.witness_value ==
              doctest::Approx(w.witness_expected).epsilon(1e-5));
    }
}
