#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace shavlab::exact {

using Int = boost::multiprecision::cpp_int;

// Exact dyadic rational num / 2^exp.
//
// Canonical form: num is odd, or num == 0 and exp == 0. exp may be negative
// (the value is then an even integer). All arithmetic is exact; there is no
// rounding anywhere in this class.
class Dyadic {
public:
    Dyadic() = default;
    Dyadic(long v) : num_(v), exp_(0) { normalize(); }  // NOLINT(implicit)
    Dyadic(Int num, long exp) : num_(std::move(num)), exp_(exp) { normalize(); }

    const Int& num() const { return num_; }
    long exp() const { return exp_; }
    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return exp_ <= 0; }
    int sign() const { return num_ == 0 ? 0 : (num_ < 0 ? -1 : 1); }

    Dyadic operator-() const;
    Dyadic operator+(const Dyadic& o) const;
    Dyadic operator-(const Dyadic& o) const;
    Dyadic operator*(const Dyadic& o) const;

    // Value * 2^k (exact).
    Dyadic times_pow2(long k) const;

    bool operator==(const Dyadic& o) const {
        return num_ == o.num_ && exp_ == o.exp_;
    }
    bool operator!=(const Dyadic& o) const { return !(*this == o); }
    bool operator<(const Dyadic& o) const { return cmp(o) < 0; }
    bool operator<=(const Dyadic& o) const { return cmp(o) <= 0; }
    bool operator>(const Dyadic& o) const { return cmp(o) > 0; }
    bool operator>=(const Dyadic& o) const { return cmp(o) >= 0; }

    double to_double() const;
    std::string to_string() const;  // "num/2^exp" or plain integer

    // Parses the to_string format as well as plain integers.
    static Dyadic parse(const std::string& s);

private:
    void normalize();
    int cmp(const Dyadic& o) const;

    Int num_ = 0;
    long exp_ = 0;
};

}  // namespace shavlab::exact
