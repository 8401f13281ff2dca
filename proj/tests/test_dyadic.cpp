#include <doctest.h>

#include "shavlab/dyadic.hpp"
#include "shavlab/errors.hpp"
#include "shavlab/rng.hpp"

using shavlab::Rng;
using shavlab::exact::Dyadic;
using shavlab::exact::Int;

TEST_CASE("canonical form strips powers of two") {
    const Dyadic a(Int(6), 3);  // 6/8 = 3/4
    CHECK(a.num() == 3);
    CHECK(a.exp() == 2);

    const Dyadic z(Int(0), 17);
    CHECK(z.is_zero());
    CHECK(z.exp() == 0);

    const Dyadic big(Int(8), 0);  // 8 = 1/2^-3
    CHECK(big.num() == 1);
    CHECK(big.exp() == -3);
    CHECK(big.is_integer());
    CHECK(big.to_double() == 8.0);
}

TEST_CASE("arithmetic is exact") {
    const Dyadic a(Int(1), 1);   // 1/2
    const Dyadic b(Int(3), 2);   // 3/4
    CHECK((a + b) == Dyadic(Int(5), 2));
    CHECK((b - a) == Dyadic(Int(1), 2));
    CHECK((a * b) == Dyadic(Int(3), 3));
    CHECK((-a) == Dyadic(Int(-1), 1));
    CHECK(a.times_pow2(3) == Dyadic(4));
    CHECK(a.times_pow2(-2) == Dyadic(Int(1), 3));
}

TEST_CASE("ordering matches rational value") {
    const Dyadic a(Int(1), 1);    // 1/2
    const Dyadic b(Int(5), 3);    // 5/8
    const Dyadic c(Int(-3), 1);   // -3/2
    CHECK(a < b);
    CHECK(c < a);
    CHECK(b > c);
    CHECK(a <= a);
    CHECK(a >= a);
}

TEST_CASE("random arithmetic agrees with doubles in range") {
    Rng rng(7, 0);
    for (int it = 0; it < 500; ++it) {
        const long na = static_cast<long>(rng.next_below(2001)) - 1000;
        const long nb = static_cast<long>(rng.next_below(2001)) - 1000;
        const long ea = static_cast<long>(rng.next_below(8));
        const long eb = static_cast<long>(rng.next_below(8));
        const Dyadic a(Int(na), ea), b(Int(nb), eb);
        CHECK((a + b).to_double() == doctest::Approx(a.to_double() + b.to_double()).epsilon(1e-14));
        CHECK((a * b).to_double() == doctest::Approx(a.to_double() * b.to_double()).epsilon(1e-14));
        CHECK(((a - b) + b) == a);
    }
}

TEST_CASE("string round trip") {
    const Dyadic a(Int(-13), 5);
    CHECK(Dyadic::parse(a.to_string()) == a);
    CHECK(Dyadic::parse("12") == Dyadic(12));
    CHECK(Dyadic::parse("-8") == Dyadic(-8));
    CHECK_THROWS_AS(Dyadic::parse("nonsense"), shavlab::ParseError);
}
