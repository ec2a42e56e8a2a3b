#include "dicke/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "dicke/errors.hpp"

namespace dicke::specfun {

namespace {

constexpr int kFactorialTableSize = 1024;

const std::vector<double>& ln_factorial_table() {
    static const std::vector<double> table = [] {
        std::vector<double> t(kFactorialTableSize + 1);
        long double acc = 0.0L;
        t[0] = 0.0;
        for (int k = 1; k <= kFactorialTableSize; ++k) {
            acc += std::log(static_cast<long double>(k));
            t[k] = static_cast<double>(acc);
        }
        return t;
    }();
    return table;
}

// ln of n! where n is given doubled (must be even).
double ln_fact_twice(int twice_n) { return ln_factorial(twice_n / 2); }

bool triangle(HalfInt a, HalfInt b, HalfInt c) {
    const int ta = a.twice(), tb = b.twice(), tc = c.twice();
    if (tc < std::abs(ta - tb) || tc > ta + tb) return false;
    return (ta + tb + tc) % 2 == 0;
}

}  // namespace

HalfInt HalfInt::from_double(double value) {
    const double twice = 2.0 * value;
    const double rounded = std::round(twice);
    if (!std::isfinite(value) || std::abs(twice - rounded) > 1e-9)
        throw DomainError("HalfInt: " + std::to_string(value) + " is not a half-integer");
    return from_twice(static_cast<int>(rounded));
}

std::string HalfInt::str() const {
    if (is_integer()) return std::to_string(twice_ / 2);
    return std::to_string(twice_) + "/2";
}

bool ThreeJArgs::valid() const {
    const std::array<std::pair<HalfInt, HalfInt>, 3> cols{{{j1, m1}, {j2, m2}, {j3, m3}}};
    return std::all_of(cols.begin(), cols.end(), [](const auto& jm) {
        const auto [j, m] = jm;
        return j.twice() >= 0 && std::abs(m.twice()) <= j.twice() && (j + m).is_integer();
    });
}

double ln_factorial(int n) {
    if (n < 0) throw DomainError("ln_factorial: negative argument " + std::to_string(n));
    if (n <= kFactorialTableSize) return ln_factorial_table()[n];
    return std::lgamma(static_cast<double>(n) + 1.0);
}

double wigner_3j(const ThreeJArgs& a) {
    if (!a.valid()) {
        throw DomainError("wigner_3j: invalid arguments (" + a.j1.str() + " " + a.j2.str() + " " +
                          a.j3.str() + "; " + a.m1.str() + " " + a.m2.str() + " " + a.m3.str() + ")");
    }
    if ((a.m1 + a.m2 + a.m3).twice() != 0) return 0.0;
    if (!triangle(a.j1, a.j2, a.j3)) return 0.0;

    // All quantities below are doubled integers; the sums are even.
    const int j1 = a.j1.twice(), j2 = a.j2.twice(), j3 = a.j3.twice();
    const int m1 = a.m1.twice(), m2 = a.m2.twice(), m3 = a.m3.twice();

    const double ln_prefactor =
        0.5 * (ln_fact_twice(j1 + j2 - j3) + ln_fact_twice(j1 - j2 + j3) +
               ln_fact_twice(-j1 + j2 + j3) - ln_fact_twice(j1 + j2 + j3 + 2)) +
        0.5 * (ln_fact_twice(j1 + m1) + ln_fact_twice(j1 - m1) + ln_fact_twice(j2 + m2) +
               ln_fact_twice(j2 - m2) + ln_fact_twice(j3 + m3) + ln_fact_twice(j3 - m3));

    // Summation index k (ordinary integer) keeps every factorial argument >= 0.
    const int kmin = std::max({0, (j2 - j3 - m1) / 2, (j1 - j3 + m2) / 2});
    const int kmax = std::min({(j1 + j2 - j3) / 2, (j1 - m1) / 2, (j2 + m2) / 2});
    if (kmin > kmax) return 0.0;

    std::vector<double> ln_terms;
    ln_terms.reserve(kmax - kmin + 1);
    for (int k = kmin; k <= kmax; ++k) {
        const double ln_den = ln_factorial(k) + ln_factorial((j3 - j2 + m1) / 2 + k) +
                              ln_factorial((j3 - j1 - m2) / 2 + k) +
                              ln_factorial((j1 + j2 - j3) / 2 - k) + ln_factorial((j1 - m1) / 2 - k) +
                              ln_factorial((j2 + m2) / 2 - k);
        ln_terms.push_back(ln_prefactor - ln_den);
    }
    // Scale by the largest magnitude before exponentiating, then sum the
    // alternating terms by sign to limit cancellation error.
    const double ln_max = *std::max_element(ln_terms.begin(), ln_terms.end());
    double positive = 0.0;
    double negative = 0.0;
    for (int k = kmin; k <= kmax; ++k) {
        const double term = std::exp(ln_terms[k - kmin] - ln_max);
        if (k % 2 == 0)
            positive += term;
        else
            negative += term;
    }
    const double sum = (positive - negative) * std::exp(ln_max);
    // Phase (-1)^(j1 - j2 - m3).
    const int phase_exp = (j1 - j2 - m3) / 2;
    return (phase_exp % 2 == 0) ? sum : -sum;
}

double assoc_legendre(int l, int m, double x) {
    if (m < 0 || m > l) throw DomainError("assoc_legendre: need 0 <= m <= l");
    if (!(std::abs(x) <= 1.0)) throw DomainError("assoc_legendre: |x| > 1");

    // P_m^m = (2m-1)!! (1-x^2)^(m/2)
    double pmm = 1.0;
    if (m > 0) {
        const double s = std::sqrt((1.0 - x) * (1.0 + x));
        double odd = 1.0;
        for (int i = 1; i <= m; ++i) {
            pmm *= odd * s;
            odd += 2.0;
        }
    }
    if (l == m) return pmm;
    double pmmp1 = x * (2.0 * m + 1.0) * pmm;
    if (l == m + 1) return pmmp1;
    double pll = 0.0;
    for (int ll = m + 2; ll <= l; ++ll) {
        pll = (x * (2.0 * ll - 1.0) * pmmp1 - (ll + m - 1.0) * pmm) / (ll - m);
        pmm = pmmp1;
        pmmp1 = pll;
    }
    return pll;
}

std::complex<double> spherical_harmonic(int K, int Q, double theta, double phi) {
    if (K < 0 || std::abs(Q) > K) throw DomainError("spherical_harmonic: need |Q| <= K");
    const int q = std::abs(Q);
    const double norm = std::sqrt((2.0 * K + 1.0) / (4.0 * std::numbers::pi) *
                                  std::exp(ln_factorial(K - q) - ln_factorial(K + q)));
    const double x = std::clamp(std::cos(theta), -1.0, 1.0);
    double radial = norm * assoc_legendre(K, q, x);
    if (q % 2 == 1) radial = -radial;  // Condon-Shortley
    const std::complex<double> y{radial * std::cos(q * phi), radial * std::sin(q * phi)};
    if (Q >= 0) return y;
    return (q % 2 == 0) ? std::conj(y) : -std::conj(y);
}

}  // namespace dicke::specfun
