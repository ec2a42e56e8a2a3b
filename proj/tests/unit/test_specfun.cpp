#include <cmath>
#include <numbers>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "doctest.h"

#include "dicke/errors.hpp"
#include "dicke/specfun.hpp"

using namespace dicke;
using namespace dicke::specfun;

namespace {

HalfInt H2(int twice) { return HalfInt::from_twice(twice); }

// Exact Racah sum in rational arithmetic; returns sign * sqrt(square).
double racah_exact(int j1, int j2, int j3, int m1, int m2, int m3) {
    using boost::multiprecision::cpp_int;
    using boost::multiprecision::cpp_rational;
    if (m1 + m2 + m3 != 0) return 0.0;
    if (j3 < std::abs(j1 - j2) || j3 > j1 + j2 || (j1 + j2 + j3) % 2) return 0.0;
    auto fact = [](int twice_n) {
        cpp_int f = 1;
        for (int k = 2; k <= twice_n / 2; ++k) f *= k;
        return f;
    };
    cpp_rational square = cpp_rational(fact(j1 + j2 - j3) * fact(j1 - j2 + j3) * fact(-j1 + j2 + j3),
                                       fact(j1 + j2 + j3 + 2));
    square *= cpp_rational(fact(j1 + m1) * fact(j1 - m1) * fact(j2 + m2) * fact(j2 - m2) * fact(j3 + m3) *
                           fact(j3 - m3));
    cpp_rational sum = 0;
    for (int k = 0; k <= 200; ++k) {
        const int a[] = {2 * k + j3 - j2 + m1, 2 * k + j3 - j1 - m2, j1 + j2 - j3 - 2 * k, j1 - m1 - 2 * k,
                         j2 + m2 - 2 * k};
        bool ok = true;
        for (int v : a) ok = ok && v >= 0;
        if (!ok) continue;
        cpp_int den = fact(2 * k);
        for (int v : a) den *= fact(v);
        sum += cpp_rational((k % 2 == 0) ? 1 : -1, den);
    }
    const cpp_rational value2 = square * sum * sum;
    double mag = std::sqrt(static_cast<double>(value2));
    if (sum < 0) mag = -mag;
    const int phase = (j1 - j2 - m3) / 2;
    return (phase % 2 == 0) ? mag : -mag;
}

// P_l^m from the explicit polynomial for P_l, differentiated term by term.
double legendre_polynomial_oracle(int l, int m, double x) {
    long double s = 0.0L;
    for (int k = 0; k <= l / 2; ++k) {
        const int p = l - 2 * k;
        if (p < m) continue;
        long double c = std::pow(-1.0L, k) * std::tgamma(l + 1.0L) / (std::tgamma(k + 1.0L) * std::tgamma(l - k + 1.0L)) *
                        std::tgamma(2.0L * l - 2 * k + 1) / (std::tgamma(l + 1.0L) * std::tgamma(l - 2.0L * k + 1)) /
                        std::pow(2.0L, l);
        long double fall = 1.0L;
        for (int i = 0; i < m; ++i) fall *= (p - i);
        s += c * fall * std::pow(static_cast<long double>(x), p - m);
    }
    return static_cast<double>(s * std::pow(1.0L - static_cast<long double>(x) * x, m / 2.0L));
}

ThreeJArgs args(int j1, int j2, int j3, int m1, int m2, int m3) {
    return {H2(j1), H2(j2), H2(j3), H2(m1), H2(m2), H2(m3)};
}

}  // namespace

TEST_CASE("ln_factorial small values and domain") {
    CHECK(ln_factorial(0) == 0.0);
    CHECK(ln_factorial(1) == 0.0);
    CHECK(ln_factorial(10) == doctest::Approx(15.104412573075516).epsilon(1e-15));
    CHECK_THROWS_AS(ln_factorial(-1), DomainError);
}

TEST_CASE("ln_factorial matches 50-digit summation up to 400") {
    using Big = boost::multiprecision::cpp_dec_float_50;
    Big acc = 0;
    for (int n = 1; n <= 400; ++n) {
        acc += boost::multiprecision::log(Big(n));
        const double expected = static_cast<double>(acc);
        const double got = ln_factorial(n);
        if (n >= 2) REQUIRE(std::abs(got - expected) / expected < 1e-14);
    }
}

TEST_CASE("wigner_3j closed forms") {
    // (j j 0; m -m 0) = (-1)^(j-m)/sqrt(2j+1)
    CHECK(wigner_3j(args(2, 2, 0, 2, -2, 0)) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
    CHECK(wigner_3j(args(2, 2, 4, 0, 2, 0)) == 0.0);
    CHECK(wigner_3j(args(2, 2, 4, 0, 0, 0)) == doctest::Approx(0.3651483716701107).epsilon(1e-15));
    for (int tj = 0; tj <= 12; ++tj)
        for (int tm = -tj; tm <= tj; tm += 2) {
            const double expected = (((tj - tm) / 2) % 2 == 0 ? 1.0 : -1.0) / std::sqrt(tj + 1.0);
            CHECK(wigner_3j(args(tj, tj, 0, tm, -tm, 0)) == doctest::Approx(expected).epsilon(1e-14));
        }
}

TEST_CASE("wigner_3j selection rules give exact zeros and invalid input throws") {
    CHECK(wigner_3j(args(2, 2, 6, 0, 0, 0)) == 0.0);  // triangle
    CHECK(wigner_3j(args(2, 2, 2, 0, 0, 0)) == 0.0);  // odd J with all m = 0
    CHECK_THROWS_AS(wigner_3j(args(2, 2, 2, 4, -4, 0)), DomainError);  // |m| > j
    CHECK_THROWS_AS(wigner_3j(args(1, 1, 2, 0, 0, 0)), DomainError);   // parity of j + m
}

TEST_CASE("wigner_3j agrees with the exact rational Racah sum") {
    for (int j1 = 0; j1 <= 8; ++j1)
        for (int j2 = 0; j2 <= 8; ++j2)
            for (int j3 = std::abs(j1 - j2); j3 <= j1 + j2; j3 += 2)
                for (int m1 = -j1; m1 <= j1; m1 += 2)
                    for (int m2 = -j2; m2 <= j2; m2 += 2) {
                        const int m3 = -m1 - m2;
                        if (std::abs(m3) > j3) continue;
                        const double exact = racah_exact(j1, j2, j3, m1, m2, m3);
                        REQUIRE(wigner_3j(args(j1, j2, j3, m1, m2, m3)) == doctest::Approx(exact).epsilon(1e-13));
                    }
}

TEST_CASE("wigner_3j orthogonality for j <= 6") {
    double worst = 0.0;
    for (int j1 = 0; j1 <= 12; ++j1)
        for (int j2 = 0; j2 <= 12; ++j2) {
            const int lo = std::abs(j1 - j2), hi = j1 + j2;
            for (int m3 = -hi; m3 <= hi; m3 += 2) {
                // column vectors over (m1, m2) with m1 + m2 = -m3 for each allowed j3
                std::vector<std::vector<double>> cols;
                std::vector<int> j3s;
                for (int j3 = lo; j3 <= hi; j3 += 2) {
                    if (std::abs(m3) > j3) continue;
                    std::vector<double> v;
                    for (int m1 = -j1; m1 <= j1; m1 += 2) {
                        const int m2 = -m3 - m1;
                        v.push_back(std::abs(m2) <= j2 ? wigner_3j(args(j1, j2, j3, m1, m2, m3)) : 0.0);
                    }
                    cols.push_back(std::move(v));
                    j3s.push_back(j3);
                }
                for (std::size_t a = 0; a < cols.size(); ++a)
                    for (std::size_t b = 0; b < cols.size(); ++b) {
                        double s = 0.0;
                        for (std::size_t i = 0; i < cols[a].size(); ++i) s += cols[a][i] * cols[b][i];
                        s *= j3s[a] + 1.0;
                        worst = std::max(worst, std::abs(s - (a == b ? 1.0 : 0.0)));
                    }
            }
        }
    CHECK(worst < 1e-12);
}

TEST_CASE("wigner_3j permutation and reflection symmetry for j <= 4") {
    for (int j1 = 0; j1 <= 8; ++j1)
        for (int j2 = 0; j2 <= 8; ++j2)
            for (int j3 = std::abs(j1 - j2); j3 <= std::min(8, j1 + j2); j3 += 2)
                for (int m1 = -j1; m1 <= j1; m1 += 2)
                    for (int m2 = -j2; m2 <= j2; m2 += 2) {
                        const int m3 = -m1 - m2;
                        if (std::abs(m3) > j3) continue;
                        const double v = wigner_3j(args(j1, j2, j3, m1, m2, m3));
                        const double odd = (((j1 + j2 + j3) / 2) % 2 == 0) ? 1.0 : -1.0;
                        // even (cyclic) permutations
                        REQUIRE(wigner_3j(args(j2, j3, j1, m2, m3, m1)) == doctest::Approx(v).epsilon(1e-13));
                        REQUIRE(wigner_3j(args(j3, j1, j2, m3, m1, m2)) == doctest::Approx(v).epsilon(1e-13));
                        // odd permutations and sign flip
                        REQUIRE(wigner_3j(args(j2, j1, j3, m2, m1, m3)) == doctest::Approx(odd * v).epsilon(1e-13));
                        REQUIRE(wigner_3j(args(j1, j3, j2, m1, m3, m2)) == doctest::Approx(odd * v).epsilon(1e-13));
                        REQUIRE(wigner_3j(args(j1, j2, j3, -m1, -m2, -m3)) == doctest::Approx(odd * v).epsilon(1e-13));
                    }
}

TEST_CASE("wigner_3j stays finite at the largest rank used (2J = 21)") {
    const double v = wigner_3j(args(21, 42, 21, -21, 0, 21));
    CHECK(std::isfinite(v));
    CHECK(v != 0.0);
}

TEST_CASE("assoc_legendre") {
    CHECK(assoc_legendre(0, 0, 0.3) == 1.0);
    CHECK(assoc_legendre(1, 0, 0.5) == doctest::Approx(0.5));
    CHECK(assoc_legendre(5, 3, 0.3) == doctest::Approx(-8.65914461606197).epsilon(1e-13));
    for (int l = 0; l <= 12; ++l)
        for (int m = 0; m <= l; ++m)
            for (double x : {-0.95, -0.4, 0.0, 0.3, 0.77, 1.0}) {
                const double oracle = legendre_polynomial_oracle(l, m, x);
                REQUIRE(assoc_legendre(l, m, x) == doctest::Approx(oracle).epsilon(1e-11).scale(1.0));
            }
    CHECK_THROWS_AS(assoc_legendre(2, 3, 0.1), DomainError);
    CHECK_THROWS_AS(assoc_legendre(2, 1, 1.5), DomainError);
}

TEST_CASE("spherical_harmonic values") {
    CHECK(spherical_harmonic(0, 0, 0.7, 1.1).real() == doctest::Approx(0.28209479177387814).epsilon(1e-15));
    CHECK(spherical_harmonic(1, 0, 0.0, 2.0).real() == doctest::Approx(0.4886025119029199).epsilon(1e-15));
    const auto y11 = spherical_harmonic(1, 1, std::numbers::pi / 2, 0.0);
    CHECK(y11.real() == doctest::Approx(-0.3454941494713355).epsilon(1e-15));
    CHECK(std::abs(y11.imag()) < 1e-16);
    CHECK_THROWS_AS(spherical_harmonic(2, 3, 0.1, 0.1), DomainError);
}

TEST_CASE("spherical_harmonic conjugation symmetry") {
    for (int K = 0; K <= 21; ++K)
        for (int Q = 1; Q <= K; ++Q)
            for (double th : {0.1, 1.0, 2.2, 3.0})
                for (double ph : {-2.0, 0.4, 1.9}) {
                    const auto a = spherical_harmonic(K, -Q, th, ph);
                    const auto b = (Q % 2 == 0 ? 1.0 : -1.0) * std::conj(spherical_harmonic(K, Q, th, ph));
                    REQUIRE(std::abs(a - b) < 1e-14);
                }
}

TEST_CASE("HalfInt") {
    CHECK(HalfInt::from_double(10.5).twice() == 21);
    CHECK(HalfInt::from_double(3.0).is_integer());
    CHECK_THROWS_AS(HalfInt::from_double(0.3), DomainError);
    CHECK((HalfInt::from_twice(3) + HalfInt::from_twice(1)) == HalfInt(2));
}
