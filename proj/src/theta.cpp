#include "shavlab/theta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shavlab/errors.hpp"

namespace shavlab::embed {

namespace {

// Applies f^n to u while accumulating the chain-rule log derivative.
double iterate_logd(const SmoothGenerator& f, double u, long n, double& logd) {
    for (long k = 0; k < n; ++k) {
        logd += std::log(f.deriv(u));
        u = f.fwd(u);
    }
    for (long k = 0; k > n; --k) {
        u = f.inv(u);
        logd -= std::log(f.deriv(u));
    }
    return u;
}

}  // namespace

double bar_map(const exact::Dyadic& r, const SmoothGenerator& f) {
    return f.iterate(r.num().convert_to<double>(), -r.exp());
}

double embedded_translation(const exact::Dyadic& x, const SmoothGenerator& f,
                            double t) {
    const double shifted = f.iterate(t, x.exp()) + x.num().convert_to<double>();
    return f.iterate(shifted, -x.exp());
}

ThetaImage::ThetaImage(const exact::PLMap& h, const SmoothGenerator& f)
    : f_(&f) {
    const auto& breaks = h.breaks();
    const auto& src = h.pieces();
    pieces_.reserve(src.size());
    for (std::size_t k = 0; k < src.size(); ++k) {
        Piece pc;
        pc.left = k == 0 ? -std::numeric_limits<double>::infinity()
                         : bar_map(breaks[k - 1], f);
        pc.n = src[k].n;
        pc.num = src[k].offset.num().convert_to<double>();
        pc.e = src[k].offset.exp();
        pieces_.push_back(pc);
    }
    for (std::size_t k = 1; k < pieces_.size(); ++k) {
        const double b = pieces_[k].left;
        const double lhs = eval(pieces_[k - 1], b, nullptr);
        const double rhs = eval(pieces_[k], b, nullptr);
        max_seam_gap_ = std::max(max_seam_gap_, std::abs(lhs - rhs));
    }
}

double ThetaImage::eval(const Piece& pc, double t, double* logd) const {
    double ld = 0.0;
    double u = iterate_logd(*f_, t, pc.n + pc.e, ld);
    u += pc.num;
    u = iterate_logd(*f_, u, -pc.e, ld);
    if (logd != nullptr)
        *logd = ld;
    return u;
}

const ThetaImage::Piece& ThetaImage::piece_at(double t) const {
    std::size_t k = pieces_.size() - 1;
    while (k > 0 && pieces_[k].left > t)
        --k;
    return pieces_[k];
}

double ThetaImage::apply(double t) const {
    return eval(piece_at(t), t, nullptr);
}

double ThetaImage::log_derivative(double t) const {
    double ld = 0.0;
    eval(piece_at(t), t, &ld);
    return ld;
}

double ThetaImage::derivative(double t) const {
    return std::exp(log_derivative(t));
}

WitnessReport verify_condition_b(const exact::PLMap& h,
                                 const SmoothGenerator& f, double tol) {
    if (h.is_identity())
        throw DomainError("witness search needs a nontrivial map");
    if (!h.supported_on_unit_interval())
        throw DomainError("witness search needs support inside [0,1]");

    // Left edge of the support: the left breakpoint of the first
    // non-identity piece. Pieces are normalized, so that piece has a
    // nonzero slope exponent.
    const auto& pieces = h.pieces();
    std::size_t first = 0;
    while (first < pieces.size() && pieces[first].is_identity())
        ++first;
    const exact::Dyadic x = h.breaks()[first - 1];
    const long n = pieces[first].n;

    // Work with the inverse when the first active slope shrinks; the
    // constructed point is a fixed point of both images, where the two log
    // derivatives are negatives of each other.
    const exact::PLMap hh = n > 0 ? h : h.inverse();
    const ThetaImage img(hh, f);

    const double z = f.fixed_point();
    const double C = f.log_slope();
    const double t_star = embedded_translation(x, f, z);
    const double witness_value = std::abs(img.log_derivative(t_star));
    const double witness_expected = std::abs(static_cast<double>(n)) * C;

    // Independent sweep: coarse grid, then ternary refinement around the
    // best cell.
    constexpr int kGrid = 2048;
    double best_t = t_star;
    double best = witness_value;
    for (int i = 0; i <= kGrid; ++i) {
        const double t = static_cast<double>(i) / kGrid;
        const double v = std::abs(img.log_derivative(t));
        if (v > best) {
            best = v;
            best_t = t;
        }
    }
    double lo = std::max(0.0, best_t - 1.0 / kGrid);
    double hi = std::min(1.0, best_t + 1.0 / kGrid);
    for (int it = 0; it < 80; ++it) {
        const double m1 = lo + (hi - lo) / 3;
        const double m2 = hi - (hi - lo) / 3;
        if (std::abs(img.log_derivative(m1)) <
            std::abs(img.log_derivative(m2)))
            lo = m1;
        else
            hi = m2;
    }
    const double t_ref = 0.5 * (lo + hi);
    const double v_ref = std::abs(img.log_derivative(t_ref));
    if (v_ref > best) {
        best = v_ref;
        best_t = t_ref;
    }

    if (best < C - tol)
        throw SearchFailed("log-derivative gap witness not found");
    return {best_t, best, witness_value, witness_expected, C, n,
            x.to_double()};
}

}  // namespace shavlab::embed
