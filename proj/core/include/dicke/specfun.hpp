#pragma once

#include <complex>
#include <compare>
#include <string>

namespace dicke::specfun {

/// Half-integer stored as twice its value, so equality and parity are exact.
class HalfInt {
public:
    constexpr HalfInt() = default;
    constexpr explicit HalfInt(int whole) : twice_(2 * whole) {}

    static constexpr HalfInt from_twice(int twice) {
        HalfInt h;
        h.twice_ = twice;
        return h;
    }
    /// Throws DomainError unless 2*value is an integer.
    static HalfInt from_double(double value);

    constexpr int twice() const { return twice_; }
    constexpr double value() const { return 0.5 * twice_; }
    constexpr bool is_integer() const { return twice_ % 2 == 0; }

    constexpr HalfInt operator-() const { return from_twice(-twice_); }
    constexpr HalfInt operator+(HalfInt o) const { return from_twice(twice_ + o.twice_); }
    constexpr HalfInt operator-(HalfInt o) const { return from_twice(twice_ - o.twice_); }
    constexpr auto operator<=>(const HalfInt&) const = default;

    std::string str() const;

private:
    int twice_ = 0;
};

/// Arguments of a Wigner 3j symbol (j1 j2 j3; m1 m2 m3).
struct ThreeJArgs {
    HalfInt j1, j2, j3;
    HalfInt m1, m2, m3;

    /// |m_i| <= j_i, j_i >= 0 and j_i + m_i integral.
    bool valid() const;
};

/// ln(n!). Table-backed, accurate to a few ulp for n up to the table size and
/// falls back to lgamma beyond it.
double ln_factorial(int n);

/// Wigner 3j symbol via the Racah single sum. Zero (exactly) when the
/// selection rules fail. Throws DomainError on invalid arguments.
double wigner_3j(const ThreeJArgs& args);

/// Associated Legendre function P_l^m(x), 0 <= m <= l, without the
/// Condon-Shortley phase.
double assoc_legendre(int l, int m, double x);

/// Y_KQ(theta, phi), Condon-Shortley convention: Y_{K,-Q} = (-1)^Q conj(Y_KQ).
std::complex<double> spherical_harmonic(int K, int Q, double theta, double phi);

}  // namespace dicke::specfun
