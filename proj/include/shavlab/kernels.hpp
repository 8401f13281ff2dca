#pragma once

namespace shavlab::kern {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kEulerGamma = 0.577215664901532860606512090082402431;

// Modified Bessel function of the second kind, order zero, evaluated by three
// independent routes. k0_series is the classical log series (sharp for y < 2),
// k0_integral integrates exp(-y cosh t) over the half line (sharp for y >= 2),
// and k0_alternating sums the signed half-period strips of the defining
// oscillatory integral with averaging acceleration. k0 dispatches between the
// first two by region.
double k0_series(double y);
double k0_integral(double y);
double k0_alternating(double y);
double k0(double y);

// Convolution square of (1+x^2)^{-1/2}: v1(tau) is even, positive, strictly
// decreasing on [0, inf), with v1(0) = pi. v1_prime is its derivative
// (quadrature of the explicitly rationalized integrand, sign-definite for
// tau > 0). v1_fourier is an independent route through the squared k0
// transform, used as an oracle.
double v1(double tau);
double v1_prime(double tau);
double v1_fourier(double tau);

// v_arg(t) = v1(log(t + sqrt(t^2 - 1))) for t >= 1; the argument is acosh(t).
double v_arg(double t);

// Chain moment integrals over n coupled coordinates, computed through the
// one-dimensional reduction (2^{n+1}/pi) * int_0^inf k0(y)^{n+1} dy.
// moment_ratio(n) divides by 2^{n+1} (n+1)!; its limit is 2 e^{-gamma} / pi.
double moment_Tn(int n);
double moment_ratio(int n);
double moment_ratio_limit();

// Constant for the triple-product bound on v_arg: given a floor eps for the
// middle length, r = -(1/2) log eps, R is a numerically located threshold
// beyond which the shifted ratio v1(t - r) / v1(t) stays at most 2, and the
// product constant is c3 = pi * c_star^2 with c_star = max(2, pi / v1(R)).
struct DoublingConstant {
    double eps;
    double r;
    double R;
    double c_star;
    double c3;
};
DoublingConstant product_constant(double eps);

}  // namespace shavlab::kern
