#pragma once

#include <compare>
#include <cstdlib>
#include <ostream>
#include <stdexcept>
#include <string>

namespace zenoprot {

/// Half-integer quantum number stored as twice its value, so j = 0, 1/2, 1,
/// 3/2, ... are exact and parity checks (2m == 2j mod 2) are integer tests.
class HalfInt {
public:
    constexpr HalfInt() = default;
    constexpr explicit HalfInt(int twice) : twice_(twice) {}

    static constexpr HalfInt from_twice(int twice) { return HalfInt(twice); }
    static constexpr HalfInt whole(int n) { return HalfInt(2 * n); }

    constexpr int twice() const { return twice_; }
    constexpr double value() const { return 0.5 * twice_; }
    constexpr bool is_integer() const { return twice_ % 2 == 0; }

    /// m runs over -j..+j in integer steps; number of values is 2j+1.
    constexpr int multiplicity() const { return twice_ + 1; }

    constexpr bool same_parity(HalfInt other) const {
        return ((twice_ - other.twice_) % 2) == 0;
    }

    /// Valid projection m for this j: |2m| <= 2j and 2m = 2j (mod 2).
    constexpr bool admits_projection(HalfInt m) const {
        return std::abs(m.twice_) <= twice_ && same_parity(m);
    }

    friend constexpr HalfInt operator+(HalfInt a, HalfInt b) { return HalfInt(a.twice_ + b.twice_); }
    friend constexpr HalfInt operator-(HalfInt a, HalfInt b) { return HalfInt(a.twice_ - b.twice_); }
    friend constexpr HalfInt operator-(HalfInt a) { return HalfInt(-a.twice_); }
    friend constexpr auto operator<=>(HalfInt a, HalfInt b) = default;

    std::string str() const {
        if (is_integer()) return std::to_string(twice_ / 2);
        return std::to_string(twice_) + "/2";
    }
    friend std::ostream& operator<<(std::ostream& os, HalfInt h) { return os << h.str(); }

private:
    int twice_ = 0;
};

inline namespace literals {
/// 3_half -> HalfInt(3/2)
constexpr HalfInt operator""_half(unsigned long long n) {
    return HalfInt::from_twice(static_cast<int>(n));
}
}  // namespace literals

/// Triangle rule |j1-j2| <= J <= j1+j2 with consistent parity.
constexpr bool triangle_ok(HalfInt j1, HalfInt j2, HalfInt J) {
    if ((j1.twice() + j2.twice() + J.twice()) % 2 != 0) return false;
    return J.twice() >= std::abs(j1.twice() - j2.twice()) && J.twice() <= j1.twice() + j2.twice();
}

}  // namespace zenoprot
