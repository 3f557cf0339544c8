#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <stdexcept>

#include "zenoprot/half_int.hpp"

namespace zenoprot {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

namespace detail {

inline BigInt factorial(int n) {
    if (n < 0) throw std::invalid_argument("factorial of negative integer");
    BigInt f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

}  // namespace detail

/// A signed square root of a rational: value = sign * sqrt(square).
/// Clebsch-Gordan coefficients are exactly of this form, so keeping the
/// square as an exact rational avoids all factorial cancellation error and
/// lets downstream rate ratios be formed as exact rationals.
struct SignedSqrtRational {
    int sign = 0;              // -1, 0, +1
    BigRational square = 0;    // >= 0

    double value() const {
        return sign * std::sqrt(static_cast<double>(square));
    }
    SignedSqrtRational operator*(const SignedSqrtRational& other) const {
        return {sign * other.sign, square * other.square};
    }
};

/// Exact Clebsch-Gordan coefficient <j1 m1 j2 m2 | J M> in the
/// Condon-Shortley convention, via the Racah sum with big-integer factorials.
/// Returns zero (sign 0) when M != m1+m2 or the triangle rule fails.
/// Throws on j/m parity mismatch or invalid quantum numbers.
inline SignedSqrtRational clebsch_gordan_exact(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2,
                                               HalfInt J, HalfInt M) {
    if (j1.twice() < 0 || j2.twice() < 0 || J.twice() < 0)
        throw std::invalid_argument("clebsch_gordan: negative j");
    if (!j1.same_parity(m1) || !j2.same_parity(m2) || !J.same_parity(M))
        throw std::invalid_argument("clebsch_gordan: 2m and 2j parity mismatch");
    if (std::abs(m1.twice()) > j1.twice() || std::abs(m2.twice()) > j2.twice() ||
        std::abs(M.twice()) > J.twice())
        throw std::invalid_argument("clebsch_gordan: |m| > j");

    if (M.twice() != m1.twice() + m2.twice()) return {};
    if (!triangle_ok(j1, j2, J)) return {};

    using detail::factorial;
    // All factorial arguments below are integers once the selection rules hold;
    // they are stored as twice-values, hence the /2.
    const int t_j1 = j1.twice(), t_j2 = j2.twice(), t_J = J.twice();
    const int t_m1 = m1.twice(), t_m2 = m2.twice(), t_M = M.twice();

    auto fact2 = [](int twice_n) { return factorial(twice_n / 2); };

    BigRational prefactor(t_J + 1, 1);
    prefactor *= BigRational(fact2(t_j1 + t_j2 - t_J), fact2(t_j1 + t_j2 + t_J + 2));
    prefactor *= BigRational(fact2(t_j1 - t_j2 + t_J), 1);
    prefactor *= BigRational(fact2(-t_j1 + t_j2 + t_J), 1);
    prefactor *= BigRational(fact2(t_J + t_M) * fact2(t_J - t_M), 1);
    prefactor *= BigRational(fact2(t_j1 - t_m1) * fact2(t_j1 + t_m1), 1);
    prefactor *= BigRational(fact2(t_j2 - t_m2) * fact2(t_j2 + t_m2), 1);

    // Racah sum over k: all denominator factorial arguments must be >= 0.
    const int a = (t_j1 + t_j2 - t_J) / 2;   // j1+j2-J
    const int b = (t_j1 - t_m1) / 2;         // j1-m1
    const int c = (t_j2 + t_m2) / 2;         // j2+m2
    const int d = (t_J - t_j2 + t_m1) / 2;   // J-j2+m1 (may be negative)
    const int e = (t_J - t_j1 - t_m2) / 2;   // J-j1-m2 (may be negative)

    const int k_min = std::max({0, -d, -e});
    const int k_max = std::min({a, b, c});

    BigRational sum = 0;
    for (int k = k_min; k <= k_max; ++k) {
        BigInt denom = factorial(k) * factorial(a - k) * factorial(b - k) * factorial(c - k) *
                       factorial(d + k) * factorial(e + k);
        BigRational term(1, denom);
        if (k % 2 != 0) term = -term;
        sum += term;
    }

    if (sum == 0) return {};
    const int sign = sum > 0 ? 1 : -1;
    return {sign, prefactor * sum * sum};
}

/// Floating-point Clebsch-Gordan coefficient; exact arithmetic internally,
/// one rounding at the boundary.
inline double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M) {
    return clebsch_gordan_exact(j1, m1, j2, m2, J, M).value();
}

}  // namespace zenoprot
