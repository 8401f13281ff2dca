#include "shavlab/affine.hpp"

#include "shavlab/errors.hpp"

namespace shavlab::exact {

std::string Affine::to_string() const {
    std::string s = "x -> ";
    if (n != 0) s += "2^" + std::to_string(n) + " ";
    s += "x";
    if (!offset.is_zero()) s += " + " + offset.to_string();
    return s;
}

Letter letter_inverse(Letter l) {
    switch (l) {
        case Letter::T: return Letter::TInv;
        case Letter::TInv: return Letter::T;
        case Letter::D: return Letter::DInv;
        case Letter::DInv: return Letter::D;
    }
    throw DomainError("bad letter");
}

char letter_char(Letter l) {
    switch (l) {
        case Letter::T: return 't';
        case Letter::TInv: return 'T';
        case Letter::D: return 'd';
        case Letter::DInv: return 'D';
    }
    throw DomainError("bad letter");
}

std::vector<Letter> parse_word(const std::string& word) {
    std::vector<Letter> out;
    out.reserve(word.size());
    for (char c : word) {
        switch (c) {
            case 't': out.push_back(Letter::T); break;
            case 'T': out.push_back(Letter::TInv); break;
            case 'd': out.push_back(Letter::D); break;
            case 'D': out.push_back(Letter::DInv); break;
            case ' ': break;
            default:
                throw ParseError(std::string("bad word letter: ") + c);
        }
    }
    return out;
}

std::string word_string(const std::vector<Letter>& w) {
    std::string s;
    s.reserve(w.size());
    for (Letter l : w) s += letter_char(l);
    return s;
}

Affine BSWord::to_affine() const {
    // Slope 2^n, offset p * 2^i = p / 2^(-i).
    return {n, Dyadic(p, -i)};
}

BSWord BSWord::from_affine(const Affine& a) {
    BSWord w;
    w.n = a.n;
    if (a.offset.is_zero()) return w;
    w.p = a.offset.num();
    w.i = -a.offset.exp();
    return w;
}

BSWord BSWord::times(Letter l) const {
    BSWord r = *this;
    switch (l) {
        case Letter::D:
            ++r.n;
            return r;
        case Letter::DInv:
            --r.n;
            return r;
        case Letter::T:
        case Letter::TInv: {
            // Appending a unit translation inside the scaling tail adds
            // +-2^n to the offset p * 2^i. Working over the common exponent
            // m = min(i, n) keeps everything integral; stripping factors of
            // two afterwards restores oddness of p. These shifts are the
            // relation "d t d^-1 = t^2" applied |i - n| times.
            const int s = (l == Letter::T) ? 1 : -1;
            if (r.p == 0) {
                r.p = s;
                r.i = n;
                return r;
            }
            const long m = r.i < r.n ? r.i : r.n;
            Int P = (r.p << static_cast<unsigned long>(r.i - m)) +
                    (Int(s) << static_cast<unsigned long>(r.n - m));
            if (P == 0) {
                r.p = 0;
                r.i = 0;
                return r;
            }
            long e = m;
            while ((P & 1) == 0) {
                P >>= 1;
                ++e;
            }
            r.p = std::move(P);
            r.i = e;
            return r;
        }
    }
    throw DomainError("bad letter");
}

std::string BSWord::to_string() const {
    std::string s;
    if (p != 0) {
        s += "(d^" + std::to_string(i) + " t^" + p.str() + " d^" +
             std::to_string(-i) + ") ";
    }
    s += "d^" + std::to_string(n);
    return s;
}

BSWord bs_reduce(const std::vector<Letter>& word) {
    BSWord w;
    for (Letter l : word) w = w.times(l);
    return w;
}

Affine evaluate_word(const std::vector<Letter>& word) {
    Affine a;
    for (Letter l : word) {
        Affine m;
        switch (l) {
            case Letter::T: m = {0, Dyadic(1)}; break;
            case Letter::TInv: m = {0, Dyadic(-1)}; break;
            case Letter::D: m = {1, Dyadic(0)}; break;
            case Letter::DInv: m = {-1, Dyadic(0)}; break;
        }
        // Words act left-to-right as compositions, so each new letter is
        // applied first: a := a ∘ m.
        a = a.after(m);
    }
    return a;
}

}  // namespace shavlab::exact
