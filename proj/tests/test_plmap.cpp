#include <doctest.h>

#include <string>

#include "shavlab/errors.hpp"
#include "shavlab/plmap.hpp"
#include "shavlab/rng.hpp"

using namespace shavlab::exact;
using shavlab::Rng;

namespace {

std::string random_generator_word(Rng& rng, std::size_t len) {
    static const char letters[] = {'a', 'A', 'b', 'B'};
    std::string w;
    for (std::size_t k = 0; k < len; ++k)
        w += letters[rng.next_below(4)];
    return w;
}

}  // namespace

TEST_CASE("first generator acts as expected") {
    const PLMap x0 = generator_x0();
    CHECK(x0.apply(Dyadic(0)) == Dyadic(0));
    CHECK(x0.apply(Dyadic(Int(1), 1)) == Dyadic(Int(1), 2));   // 1/2 -> 1/4
    CHECK(x0.apply(Dyadic(Int(3), 2)) == Dyadic(Int(1), 1));   // 3/4 -> 1/2
    CHECK(x0.apply(Dyadic(1)) == Dyadic(1));
    CHECK(x0.apply(Dyadic(2)) == Dyadic(2));
    CHECK(x0.supported_on_unit_interval());
}

TEST_CASE("second generator is a shrunk copy acting on the right half") {
    const PLMap x1 = generator_x1();
    CHECK(x1.apply(Dyadic(Int(1), 1)) == Dyadic(Int(1), 1));
    CHECK(x1.apply(Dyadic(Int(3), 2)) == Dyadic(Int(5), 3));   // 3/4 -> 5/8
    CHECK(x1.apply(Dyadic(Int(7), 3)) == Dyadic(Int(3), 2));   // 7/8 -> 3/4
    CHECK(x1.supported_on_unit_interval());
    // Below the midpoint it is the identity.
    CHECK(x1.apply(Dyadic(Int(1), 2)) == Dyadic(Int(1), 2));
}

TEST_CASE("doubling map sends the translated origin to two") {
    const PLMap d0 = doubling_on_unit();
    const PLMap t1 = unit_translation();
    const PLMap comp = d0.after(t1);
    CHECK(comp.apply(Dyadic(0)) == Dyadic(2));
    CHECK(d0.apply(Dyadic(Int(1), 1)) == Dyadic(1));
    CHECK(d0.apply(Dyadic(-3)) == Dyadic(-3));
    CHECK(d0.apply(Dyadic(2)) == Dyadic(3));
}

TEST_CASE("composition agrees with pointwise evaluation") {
    Rng rng(11, 0);
    for (int it = 0; it < 150; ++it) {
        const PLMap f = compose_generator_word(random_generator_word(rng, 1 + rng.next_below(8)));
        const PLMap g = compose_generator_word(random_generator_word(rng, 1 + rng.next_below(8)));
        const PLMap fg = f.after(g);
        for (int s = 0; s < 8; ++s) {
            const Dyadic x(Int(static_cast<long>(rng.next_below(257))), 8);
            CHECK(fg.apply(x) == f.apply(g.apply(x)));
        }
    }
}

TEST_CASE("inverse composes to the identity") {
    Rng rng(12, 0);
    for (int it = 0; it < 100; ++it) {
        const PLMap f = compose_generator_word(random_generator_word(rng, 1 + rng.next_below(10)));
        CHECK(f.after(f.inverse()).is_identity());
        CHECK(f.inverse().after(f).is_identity());
    }
}

TEST_CASE("validation rejects broken data") {
    // Discontinuous at the breakpoint.
    CHECK_THROWS_AS(
        PLMap({Dyadic(0)}, {Affine::identity(), Affine{0, Dyadic(1)}}),
        shavlab::InvalidMap);
    // Non-increasing breakpoints.
    CHECK_THROWS_AS(
        PLMap({Dyadic(1), Dyadic(0)},
              {Affine::identity(), Affine::identity(), Affine::identity()}),
        shavlab::InvalidMap);
    // Spurious breakpoints are merged silently.
    const PLMap m({Dyadic(0)}, {Affine::identity(), Affine::identity()});
    CHECK(m.is_identity());
}

TEST_CASE("slope separation of distinct unit-interval maps is at least one") {
    const PLMap x0 = generator_x0();
    const PLMap x1 = generator_x1();
    CHECK(log_slope_separation(x0, PLMap::identity()) == 1);
    CHECK(log_slope_separation(x0.after(x0), PLMap::identity()) == 2);
    CHECK(log_slope_separation(x0, x0) == 0);

    Rng rng(13, 0);
    int distinct_pairs = 0;
    while (distinct_pairs < 60) {
        const PLMap f = compose_generator_word(random_generator_word(rng, 1 + rng.next_below(9)));
        const PLMap g = compose_generator_word(random_generator_word(rng, 1 + rng.next_below(9)));
        if (f == g) {
            CHECK(log_slope_separation(f, g) == 0);
            continue;
        }
        ++distinct_pairs;
        CHECK(log_slope_separation(f, g) >= 1);
    }
    (void)x1;
}

TEST_CASE("serialization round trip is exact") {
    Rng rng(14, 0);
    for (int it = 0; it < 50; ++it) {
        const PLMap f = compose_generator_word(random_generator_word(rng, 1 + rng.next_below(10)));
        const auto j = f.to_json();
        const PLMap back = PLMap::from_json(j);
        CHECK(back == f);
        CHECK(back.to_json().dump() == j.dump());
    }
    CHECK_THROWS_AS(PLMap::from_json(nlohmann::json{{"pieces", 3}}),
                    shavlab::ParseError);
}

TEST_CASE("double evaluation tracks exact evaluation") {
    Rng rng(15, 0);
    for (int it = 0; it < 50; ++it) {
        const PLMap f = compose_generator_word(random_generator_word(rng, 1 + rng.next_below(8)));
        for (int s = 0; s < 8; ++s) {
            const Dyadic x(Int(static_cast<long>(rng.next_below(1025))), 10);
            CHECK(f.apply(x.to_double()) ==
                  doctest::Approx(f.apply(x).to_double()).epsilon(1e-15));
        }
    }
}
