#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shavlab/affine.hpp"
#include "shavlab/dyadic.hpp"

namespace shavlab::exact {

// Increasing piecewise-affine homeomorphism of the real line with dyadic
// breakpoints and pieces drawn from the affine group above (slopes are powers
// of two, offsets dyadic). Everything is exact.
//
// Representation: breaks b_1 < ... < b_B and pieces a_0, ..., a_B where a_0
// acts on (-inf, b_1], a_k on [b_k, b_{k+1}], a_B on [b_B, +inf). The pieces
// agree at the breakpoints (continuity) and adjacent pieces differ
// (normalization), so equality of maps is structural equality.
class PLMap {
public:
    PLMap() : pieces_{Affine::identity()} {}
    PLMap(std::vector<Dyadic> breaks, std::vector<Affine> pieces);

    static PLMap identity() { return PLMap(); }
    static PLMap from_affine(const Affine& a) { return PLMap({}, {a}); }

    const std::vector<Dyadic>& breaks() const { return breaks_; }
    const std::vector<Affine>& pieces() const { return pieces_; }

    Dyadic apply(const Dyadic& x) const;
    double apply(double x) const;

    // Function composition: (*this) after o.
    PLMap after(const PLMap& o) const;
    PLMap inverse() const;

    bool operator==(const PLMap& o) const {
        return breaks_ == o.breaks_ && pieces_ == o.pieces_;
    }
    bool operator!=(const PLMap& o) const { return !(*this == o); }
    bool is_identity() const {
        return breaks_.empty() && pieces_[0].is_identity();
    }

    // True when the map is the identity outside [0,1] (so it fixes 0 and 1
    // and all breakpoints lie in the unit interval).
    bool supported_on_unit_interval() const;

    // Piece index whose closed interval contains x.
    std::size_t piece_index(const Dyadic& x) const;

    nlohmann::ordered_json to_json() const;
    static PLMap from_json(const nlohmann::json& j);

    std::string to_string() const;

private:
    void validate_and_normalize();

    std::vector<Dyadic> breaks_;
    std::vector<Affine> pieces_;
};

// Maximum over the common refinement of the two maps' pieces of the absolute
// difference of slope exponents. Zero exactly when a == b; at least one for
// distinct maps supported on the unit interval.
long log_slope_separation(const PLMap& a, const PLMap& b);

// Standard generating pair for the group of dyadic piecewise-affine maps
// supported on the unit interval.
PLMap generator_x0();
PLMap generator_x1();

// The one-breakpoint doubling map: x below 0, 2x on [0,1], x+1 above 1.
PLMap doubling_on_unit();

// Unit translation x -> x + 1 as a piecewise map.
PLMap unit_translation();

// Composes a word in x0, x1 and their inverses. Letters: 'a' = x0,
// 'A' = x0^-1, 'b' = x1, 'B' = x1^-1.
PLMap compose_generator_word(const std::string& word);

}  // namespace shavlab::exact
