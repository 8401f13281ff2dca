#include "shavlab/dyadic.hpp"

#include <cmath>

#include "shavlab/errors.hpp"

namespace shavlab::exact {

void Dyadic::normalize() {
    if (num_ == 0) {
        exp_ = 0;
        return;
    }
    while ((num_ & 1) == 0) {
        num_ >>= 1;
        --exp_;
    }
}

int Dyadic::cmp(const Dyadic& o) const {
    // Align to the larger exponent; shifting numerators left is exact.
    const long e = exp_ > o.exp_ ? exp_ : o.exp_;
    Int a = num_ << static_cast<unsigned long>(e - exp_);
    Int b = o.num_ << static_cast<unsigned long>(e - o.exp_);
    if (a < b) return -1;
    if (a > b) return 1;
    return 0;
}

Dyadic Dyadic::operator-() const {
    Dyadic r;
    r.num_ = -num_;
    r.exp_ = exp_;
    return r;
}

Dyadic Dyadic::operator+(const Dyadic& o) const {
    const long e = exp_ > o.exp_ ? exp_ : o.exp_;
    Int a = num_ << static_cast<unsigned long>(e - exp_);
    a += o.num_ << static_cast<unsigned long>(e - o.exp_);
    return Dyadic(std::move(a), e);
}

Dyadic Dyadic::operator-(const Dyadic& o) const { return *this + (-o); }

Dyadic Dyadic::operator*(const Dyadic& o) const {
    return Dyadic(num_ * o.num_, exp_ + o.exp_);
}

Dyadic Dyadic::times_pow2(long k) const {
    if (num_ == 0) return Dyadic();
    Dyadic r;
    r.num_ = num_;
    r.exp_ = exp_ - k;
    return r;
}

double Dyadic::to_double() const {
    return std::ldexp(num_.convert_to<double>(), static_cast<int>(-exp_));
}

std::string Dyadic::to_string() const {
    if (exp_ <= 0) {
        Int v = num_ << static_cast<unsigned long>(-exp_);
        return v.str();
    }
    return num_.str() + "/2^" + std::to_string(exp_);
}

Dyadic Dyadic::parse(const std::string& s) {
    try {
        const auto slash = s.find("/2^");
        if (slash == std::string::npos) return Dyadic(Int(s), 0);
        Int num(s.substr(0, slash));
        const long exp = std::stol(s.substr(slash + 3));
        return Dyadic(std::move(num), exp);
    } catch (const std::exception&) {
        throw ParseError("bad dyadic rational: " + s);
    }
}

}  // namespace shavlab::exact
