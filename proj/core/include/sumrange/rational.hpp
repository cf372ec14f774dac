#pragma once

#include <climits>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <type_traits>

#include <gmpxx.h>

namespace sumrange {

/// Exact rational number, always reduced with a positive denominator.
///
/// Values whose numerator and denominator fit in a signed 64-bit word are
/// stored inline and use 128-bit intermediate arithmetic; anything larger
/// is promoted to a shared, immutable GMP rational. The representation is
/// normalized after every operation, so two equal values always have the
/// same representation.
class Rational {
public:
    Rational() noexcept = default;

    template <typename Int>
        requires std::is_integral_v<Int>
    Rational(Int value) // NOLINT(google-explicit-constructor)
    {
        if constexpr (std::is_signed_v<Int>) {
            assign(static_cast<std::int64_t>(value), 1);
        } else {
            if (value > static_cast<std::uint64_t>(INT64_MAX)) {
                *this = from_mpq(mpq_class(mpz_class(std::to_string(value))));
            } else {
                assign(static_cast<std::int64_t>(value), 1);
            }
        }
    }

    /// num/den; throws DomainError when den == 0.
    Rational(std::int64_t num, std::int64_t den);

    static Rational from_mpq(const mpq_class& q);

    /// Accepts "n" or "n/d" with optional leading sign on n.
    static Rational parse(std::string_view text);

    mpq_class to_mpq() const;

    /// Always "num/den", also for integers ("3/1").
    std::string str() const;
    std::string numerator_str() const;
    std::string denominator_str() const;

    /// Correctly rounded (round-to-nearest-even) double.
    double to_double() const;

    bool is_zero() const noexcept { return !big_ && num_ == 0; }
    bool is_integer() const noexcept;
    int sign() const noexcept;

    Rational abs() const;
    Rational pow(unsigned exponent) const;
    Rational floor() const;
    Rational ceil() const;

    Rational operator-() const;
    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);

    Rational& operator+=(const Rational& b) { return *this = *this + b; }
    Rational& operator-=(const Rational& b) { return *this = *this - b; }
    Rational& operator*=(const Rational& b) { return *this = *this * b; }
    Rational& operator/=(const Rational& b) { return *this = *this / b; }

    friend bool operator==(const Rational& a, const Rational& b) noexcept;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

    friend std::ostream& operator<<(std::ostream& os, const Rational& r);

private:
    void assign(std::int64_t num, std::int64_t den);
    static Rational normalize(__int128 num, __int128 den);

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
    std::shared_ptr<const mpq_class> big_;
};

inline Rational abs(const Rational& r) { return r.abs(); }

} // namespace sumrange
