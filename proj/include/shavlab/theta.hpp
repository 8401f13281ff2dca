#pragma once

#include <vector>

#include "shavlab/plmap.hpp"
#include "shavlab/smooth_generator.hpp"

namespace shavlab::embed {

// Image of a dyadic rational r = num / 2^e under the rescaling attached to
// f: the value f^{-e}(num). Fixes the integers, is strictly increasing, and
// commutes with integer translation.
double bar_map(const exact::Dyadic& r, const SmoothGenerator& f);

// Conjugated translation: the image of t under f^{-e} T_num f^{e}, the
// embedded version of translation by num / 2^e.
double embedded_translation(const exact::Dyadic& x, const SmoothGenerator& f,
                            double t);

// Smooth image of a piecewise-dyadic-affine map: every affine piece
// 2^n t + d with d = num / 2^e maps to the word f^{-e} T_num f^{e+n}, glued
// over the bar images of the original breakpoints.
class ThetaImage {
public:
    ThetaImage(const exact::PLMap& h, const SmoothGenerator& f);

    double apply(double t) const;
    double log_derivative(double t) const;
    double derivative(double t) const;

    // Largest numeric mismatch between adjacent pieces at their shared
    // breakpoint image, recorded at construction.
    double max_seam_gap() const { return max_seam_gap_; }
    const SmoothGenerator& generator() const { return *f_; }

private:
    struct Piece {
        double left;  // bar image of the left breakpoint
        long n;       // doubling exponent of the source piece
        double num;   // translation numerator
        long e;       // translation denominator exponent
    };
    double eval(const Piece& pc, double t, double* logd) const;
    const Piece& piece_at(double t) const;

    const SmoothGenerator* f_;
    std::vector<Piece> pieces_;
    double max_seam_gap_ = 0.0;
};

// Search for a point certifying the uniform log-derivative gap of the
// embedded image of a nontrivial rearrangement h supported on [0,1]. The
// point t_star conjugates the interior fixed point into the first
// non-identity piece of h, where the derivative is exactly a power of
// f'(z); a grid sweep with local refinement is run alongside. Fails with
// SearchFailed when the best value found drops below C - tol.
struct WitnessReport {
    double t_star;            // argmax location
    double value;             // best |log derivative| found
    double witness_value;     // |log derivative| at the constructed point
    double witness_expected;  // |n| * C from the piece exponent
    double C;                 // log f'(z)
    long n;                   // slope exponent of the first active piece
    double x;                 // left edge of the support
};
WitnessReport verify_condition_b(const exact::PLMap& h,
                                 const SmoothGenerator& f, double tol = 1e-6);

}  // namespace shavlab::embed
