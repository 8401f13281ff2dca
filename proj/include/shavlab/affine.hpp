#pragma once

#include <string>
#include <vector>

#include "shavlab/dyadic.hpp"

namespace shavlab::exact {

// The affine map x -> 2^n x + offset with dyadic offset. These are exactly
// the orientation-preserving affine maps of the reals that normalize the
// dyadic rationals, and they form the ambient group for the word calculus.
struct Affine {
    long n = 0;       // log2 of the slope
    Dyadic offset;    // translation part

    static Affine identity() { return {}; }

    Dyadic apply(const Dyadic& x) const {
        return x.times_pow2(n) + offset;
    }
    double apply(double x) const {
        return std::ldexp(x, static_cast<int>(n)) + offset.to_double();
    }

    // Function composition: (*this) after o.
    Affine after(const Affine& o) const {
        return {n + o.n, o.offset.times_pow2(n) + offset};
    }
    Affine inverse() const {
        return {-n, (-offset).times_pow2(-n)};
    }

    bool operator==(const Affine& o) const {
        return n == o.n && offset == o.offset;
    }
    bool operator!=(const Affine& o) const { return !(*this == o); }

    bool is_identity() const { return n == 0 && offset.is_zero(); }
    std::string to_string() const;
};

// Generator letters for the two-generator word calculus: t is translation
// by one, d is doubling. Words evaluate left-to-right as compositions:
// the word "td" is the map x -> t(d(x)) = 2x + 1.
enum class Letter : int { T = 0, TInv = 1, D = 2, DInv = 3 };

Letter letter_inverse(Letter l);
char letter_char(Letter l);
std::vector<Letter> parse_word(const std::string& word);  // e.g. "tdT" with
                                                          // capitals = inverses
std::string word_string(const std::vector<Letter>& w);

// Normal form (d^i t^p d^-i) d^n with p odd (or p = 0 and i = 0).
//
// The corresponding affine map has slope 2^n and offset p * 2^i; every
// element of the ambient group has exactly one such expression.
struct BSWord {
    long i = 0;
    Int p = 0;
    long n = 0;

    static BSWord identity() { return {}; }

    Affine to_affine() const;
    static BSWord from_affine(const Affine& a);

    // Right multiplication by one letter, i.e. composition with the letter's
    // map on the inside. Implemented with integer exponent shifts that encode
    // the relation "conjugating a translation by doubling squares it"; the
    // affine route above serves as an independent oracle.
    BSWord times(Letter l) const;

    bool operator==(const BSWord& o) const {
        return i == o.i && p == o.p && n == o.n;
    }
    bool operator!=(const BSWord& o) const { return !(*this == o); }

    std::string to_string() const;
};

// Reduces a free word over {t, t^-1, d, d^-1} to its normal form using only
// the relation-driven right-multiplication updates.
BSWord bs_reduce(const std::vector<Letter>& word);

// Independent evaluation: composes the letters as affine maps.
Affine evaluate_word(const std::vector<Letter>& word);

}  // namespace shavlab::exact
