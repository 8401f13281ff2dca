#pragma once

#include <cmath>

namespace shavlab {

// Positive scalar stored as its natural log. Partitions whose block lengths
// sit thousands of digits below 1 cannot live in double, but their logs can,
// and every ratio or product the library needs becomes ordinary arithmetic
// on the logs. Addition uses the stable log-sum form.
class SLog {
  public:
    static SLog from_log(double lg) {
        SLog s;
        s.lg_ = lg;
        return s;
    }
    static SLog from_value(double v) { return from_log(std::log(v)); }

    double log() const { return lg_; }
    // Overflows to inf or underflows to 0 outside double range by design.
    double value() const { return std::exp(lg_); }

    SLog operator*(SLog o) const { return from_log(lg_ + o.lg_); }
    SLog operator/(SLog o) const { return from_log(lg_ - o.lg_); }
    SLog sqrt() const { return from_log(lg_ / 2); }

    SLog operator+(SLog o) const {
        const double hi = lg_ > o.lg_ ? lg_ : o.lg_;
        const double lo = lg_ > o.lg_ ? o.lg_ : lg_;
        return from_log(hi + std::log1p(std::exp(lo - hi)));
    }

    bool operator<(SLog o) const { return lg_ < o.lg_; }
    bool operator>(SLog o) const { return lg_ > o.lg_; }

  private:
    double lg_ = 0;
};

// log(cosh u), stable for any magnitude of u.
double log_cosh(double u);

}  // namespace shavlab
