#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace arat {

// Exact fraction with int64 numerator/denominator, always normalized
// (gcd 1, den > 0). Intermediate products go through __int128 and throw
// on overflow instead of silently wrapping; masking-event tallies stay
// far below that in practice because per-slot denominators divide a
// small set of pattern sizes.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(std::int64_t n) : num_(n), den_(1) {}
    Rational(std::int64_t n, std::int64_t d);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    Rational operator/(const Rational& o) const;
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }

    bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const;
    bool operator<=(const Rational& o) const { return *this < o || *this == o; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    // "num/den" exact form
    std::string to_string() const;
    // decimal with 12 significant digits, the only lossy rendering
    std::string to_decimal() const;

private:
    static Rational make(__int128 n, __int128 d);
    std::int64_t num_;
    std::int64_t den_;
};

struct RationalOverflow : std::runtime_error {
    RationalOverflow() : std::runtime_error("rational arithmetic overflow") {}
};

} // namespace arat
