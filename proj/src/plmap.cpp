#include "shavlab/plmap.hpp"

#include <algorithm>

#include "shavlab/errors.hpp"

namespace shavlab::exact {

PLMap::PLMap(std::vector<Dyadic> breaks, std::vector<Affine> pieces)
    : breaks_(std::move(breaks)), pieces_(std::move(pieces)) {
    validate_and_normalize();
}

void PLMap::validate_and_normalize() {
    if (pieces_.size() != breaks_.size() + 1)
        throw InvalidMap("piece count must be break count + 1");
    for (std::size_t k = 1; k < breaks_.size(); ++k)
        if (!(breaks_[k - 1] < breaks_[k]))
            throw InvalidMap("breakpoints must be strictly increasing");
    for (std::size_t k = 0; k < breaks_.size(); ++k)
        if (pieces_[k].apply(breaks_[k]) != pieces_[k + 1].apply(breaks_[k]))
            throw InvalidMap("pieces disagree at breakpoint " +
                             breaks_[k].to_string());
    // Merge adjacent equal pieces; the breakpoint between them is spurious.
    std::vector<Dyadic> nb;
    std::vector<Affine> np;
    np.push_back(pieces_[0]);
    for (std::size_t k = 0; k < breaks_.size(); ++k) {
        if (pieces_[k + 1] != np.back()) {
            nb.push_back(breaks_[k]);
            np.push_back(pieces_[k + 1]);
        }
    }
    breaks_ = std::move(nb);
    pieces_ = std::move(np);
}

std::size_t PLMap::piece_index(const Dyadic& x) const {
    // First break >= x bounds the piece on the right; continuity makes the
    // boundary choice immaterial.
    std::size_t lo = 0, hi = breaks_.size();
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (breaks_[mid] < x)
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo;
}

Dyadic PLMap::apply(const Dyadic& x) const {
    return pieces_[piece_index(x)].apply(x);
}

double PLMap::apply(double x) const {
    std::size_t lo = 0, hi = breaks_.size();
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (breaks_[mid].to_double() < x)
            lo = mid + 1;
        else
            hi = mid;
    }
    return pieces_[lo].apply(x);
}

PLMap PLMap::after(const PLMap& o) const {
    // Candidate breakpoints: o's own, plus preimages under o of ours.
    const PLMap o_inv = o.inverse();
    std::vector<Dyadic> cand = o.breaks_;
    for (const auto& b : breaks_) cand.push_back(o_inv.apply(b));
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    std::vector<Affine> pieces;
    pieces.reserve(cand.size() + 1);
    for (std::size_t k = 0; k <= cand.size(); ++k) {
        // A sample point strictly inside the k-th interval; midpoints of
        // dyadic endpoints are dyadic.
        Dyadic s;
        if (cand.empty())
            s = Dyadic(0);
        else if (k == 0)
            s = cand.front() - Dyadic(1);
        else if (k == cand.size())
            s = cand.back() + Dyadic(1);
        else
            s = (cand[k - 1] + cand[k]).times_pow2(-1);
        const Affine& inner = o.pieces_[o.piece_index(s)];
        const Affine& outer = pieces_[piece_index(inner.apply(s))];
        pieces.push_back(outer.after(inner));
    }
    return PLMap(std::move(cand), std::move(pieces));
}

PLMap PLMap::inverse() const {
    std::vector<Dyadic> nb;
    nb.reserve(breaks_.size());
    for (std::size_t k = 0; k < breaks_.size(); ++k)
        nb.push_back(pieces_[k].apply(breaks_[k]));
    std::vector<Affine> np;
    np.reserve(pieces_.size());
    for (const auto& p : pieces_) np.push_back(p.inverse());
    return PLMap(std::move(nb), std::move(np));
}

bool PLMap::supported_on_unit_interval() const {
    if (!pieces_.front().is_identity() || !pieces_.back().is_identity())
        return false;
    const Dyadic zero(0), one(1);
    for (const auto& b : breaks_)
        if (b < zero || b > one) return false;
    return true;
}

nlohmann::ordered_json PLMap::to_json() const {
    nlohmann::ordered_json j;
    j["breakpoints"] = nlohmann::ordered_json::array();
    for (const auto& b : breaks_)
        j["breakpoints"].push_back({b.num().str(), b.exp()});
    j["pieces"] = nlohmann::ordered_json::array();
    for (const auto& p : pieces_) {
        nlohmann::ordered_json piece;
        piece["n"] = p.n;
        piece["p"] = p.offset.num().str();
        piece["q"] = p.offset.exp();
        j["pieces"].push_back(piece);
    }
    return j;
}

PLMap PLMap::from_json(const nlohmann::json& j) {
    try {
        std::vector<Dyadic> breaks;
        for (const auto& b : j.at("breakpoints"))
            breaks.emplace_back(Int(b.at(0).get<std::string>()),
                                b.at(1).get<long>());
        std::vector<Affine> pieces;
        for (const auto& p : j.at("pieces")) {
            Affine a;
            a.n = p.at("n").get<long>();
            a.offset = Dyadic(Int(p.at("p").get<std::string>()),
                              p.at("q").get<long>());
            pieces.push_back(a);
        }
        return PLMap(std::move(breaks), std::move(pieces));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad piecewise map JSON: ") + e.what());
    }
}

std::string PLMap::to_string() const {
    std::string s = "{";
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
        if (k) s += " | " + breaks_[k - 1].to_string() + " | ";
        s += "2^" + std::to_string(pieces_[k].n) + "x+" +
             pieces_[k].offset.to_string();
    }
    return s + "}";
}

long log_slope_separation(const PLMap& a, const PLMap& b) {
    std::vector<Dyadic> cuts = a.breaks();
    cuts.insert(cuts.end(), b.breaks().begin(), b.breaks().end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    long best = 0;
    auto consider = [&](const Dyadic& sample) {
        const long na = a.pieces()[a.piece_index(sample)].n;
        const long nb = b.pieces()[b.piece_index(sample)].n;
        const long d = na > nb ? na - nb : nb - na;
        if (d > best) best = d;
    };
    if (cuts.empty()) {
        consider(Dyadic(0));
    } else {
        consider(cuts.front() - Dyadic(1));
        for (std::size_t k = 1; k < cuts.size(); ++k)
            consider((cuts[k - 1] + cuts[k]).times_pow2(-1));
        consider(cuts.back() + Dyadic(1));
    }
    if (best == 0 && !(a == b)) {
        // Equal slopes on every interval of the refinement but different
        // offsets somewhere. Cannot happen for maps agreeing near -infinity
        // (continuity propagates equality), and in particular not for maps
        // supported on the unit interval; report zero only for equal maps.
        return 0;
    }
    return best;
}

namespace {
Dyadic half() { return Dyadic(1, 1); }
}  // namespace

PLMap generator_x0() {
    // Slopes 1/2, 1, 2 across [0, 1/2], [1/2, 3/4], [3/4, 1].
    std::vector<Dyadic> breaks = {Dyadic(0), half(), Dyadic(3, 2), Dyadic(1)};
    std::vector<Affine> pieces = {
        Affine::identity(),
        {-1, Dyadic(0)},              // x/2
        {0, Dyadic(-1, 2)},           // x - 1/4
        {1, Dyadic(-1)},              // 2x - 1
        Affine::identity(),
    };
    return PLMap(std::move(breaks), std::move(pieces));
}

PLMap generator_x1() {
    // Identity on [0,1/2]; a half-scale copy of x0 on [1/2,1].
    std::vector<Dyadic> breaks = {half(), Dyadic(3, 2), Dyadic(7, 3),
                                  Dyadic(1)};
    std::vector<Affine> pieces = {
        Affine::identity(),
        {-1, Dyadic(1, 2)},           // x/2 + 1/4
        {0, Dyadic(-1, 3)},           // x - 1/8
        {1, Dyadic(-1)},              // 2x - 1
        Affine::identity(),
    };
    return PLMap(std::move(breaks), std::move(pieces));
}

PLMap doubling_on_unit() {
    std::vector<Dyadic> breaks = {Dyadic(0), Dyadic(1)};
    std::vector<Affine> pieces = {
        Affine::identity(),
        {1, Dyadic(0)},               // 2x
        {0, Dyadic(1)},               // x + 1
    };
    return PLMap(std::move(breaks), std::move(pieces));
}

PLMap unit_translation() {
    return PLMap::from_affine({0, Dyadic(1)});
}

PLMap compose_generator_word(const std::string& word) {
    const PLMap a = generator_x0();
    const PLMap b = generator_x1();
    const PLMap ai = a.inverse();
    const PLMap bi = b.inverse();
    PLMap out;
    for (char c : word) {
        const PLMap* g = nullptr;
        switch (c) {
            case 'a': g = &a; break;
            case 'A': g = &ai; break;
            case 'b': g = &b; break;
            case 'B': g = &bi; break;
            case ' ': continue;
            default:
                throw ParseError(std::string("bad generator letter: ") + c);
        }
        out = out.after(*g);
    }
    return out;
}

}  // namespace shavlab::exact
