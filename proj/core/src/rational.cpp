#include "sumrange/rational.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "sumrange/errors.hpp"

namespace sumrange {
namespace {

using u128 = unsigned __int128;

u128 gcd128(u128 a, u128 b)
{
    while (b != 0) {
        u128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

u128 abs128(__int128 v) { return v < 0 ? u128(-(v + 1)) + 1 : u128(v); }

mpz_class mpz_from_u128(u128 v)
{
    mpz_class hi(static_cast<unsigned long>(static_cast<std::uint64_t>(v >> 64)));
    mpz_class lo(static_cast<unsigned long>(static_cast<std::uint64_t>(v)));
    mpz_class out = hi;
    out <<= 64;
    out += lo;
    return out;
}

mpz_class mpz_from_i128(__int128 v)
{
    mpz_class m = mpz_from_u128(abs128(v));
    return v < 0 ? mpz_class(-m) : m;
}

bool fits_word(const mpz_class& z) { return z.fits_slong_p() && z != LONG_MIN; }

} // namespace

Rational::Rational(std::int64_t num, std::int64_t den)
{
    if (den == 0) {
        throw DomainError("rational with zero denominator");
    }
    assign(num, den);
}

void Rational::assign(std::int64_t num, std::int64_t den)
{
    *this = normalize(num, den);
}

Rational Rational::normalize(__int128 num, __int128 den)
{
    if (den < 0) {
        num = -num;
        den = -den;
    }
    Rational r;
    if (num == 0) {
        return r;
    }
    u128 g = gcd128(abs128(num), u128(den));
    if (g > 1) {
        num /= static_cast<__int128>(g);
        den /= static_cast<__int128>(g);
    }
    if (num > INT64_MIN && num <= INT64_MAX && den <= INT64_MAX) {
        r.num_ = static_cast<std::int64_t>(num);
        r.den_ = static_cast<std::int64_t>(den);
        return r;
    }
    mpq_class q(mpz_from_i128(num), mpz_from_i128(den));
    q.canonicalize();
    r.big_ = std::make_shared<const mpq_class>(std::move(q));
    return r;
}

Rational Rational::from_mpq(const mpq_class& q_in)
{
    mpq_class q = q_in;
    q.canonicalize();
    Rational r;
    if (fits_word(q.get_num()) && fits_word(q.get_den())) {
        r.num_ = q.get_num().get_si();
        r.den_ = q.get_den().get_si();
        return r;
    }
    r.big_ = std::make_shared<const mpq_class>(std::move(q));
    return r;
}

Rational Rational::parse(std::string_view text)
{
    auto trim = [](std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
        return s;
    };
    text = trim(text);
    auto valid_int = [](std::string_view s, bool allow_sign) {
        if (!s.empty() && allow_sign && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
        if (s.empty()) return false;
        for (char c : s) {
            if (c < '0' || c > '9') return false;
        }
        return true;
    };
    auto slash = text.find('/');
    std::string_view num = slash == std::string_view::npos ? text : text.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
    if (!valid_int(num, true) || !valid_int(den, false)) {
        throw ParseError("malformed rational '" + std::string(text) + "'");
    }
    if (num.front() == '+') num.remove_prefix(1);
    mpz_class n(std::string(num), 10);
    mpz_class d(std::string(den), 10);
    if (d == 0) {
        throw ParseError("rational with zero denominator '" + std::string(text) + "'");
    }
    return from_mpq(mpq_class(n, d));
}

mpq_class Rational::to_mpq() const
{
    if (big_) return *big_;
    return mpq_class(mpz_class(static_cast<long>(num_)), mpz_class(static_cast<long>(den_)));
}

std::string Rational::numerator_str() const
{
    return big_ ? big_->get_num().get_str() : std::to_string(num_);
}

std::string Rational::denominator_str() const
{
    return big_ ? big_->get_den().get_str() : std::to_string(den_);
}

std::string Rational::str() const { return numerator_str() + "/" + denominator_str(); }

double Rational::to_double() const
{
    constexpr std::int64_t exact_limit = std::int64_t(1) << 53;
    if (!big_ && num_ > -exact_limit && num_ < exact_limit && den_ < exact_limit) {
        return static_cast<double>(num_) / static_cast<double>(den_);
    }
    mpq_class q = to_mpq();
    if (q == 0) return 0.0;
    bool negative = q < 0;
    mpz_class n = q.get_num();
    if (n < 0) n = -n;
    mpz_class d = q.get_den();
    long shift = 55 - static_cast<long>(mpz_sizeinbase(n.get_mpz_t(), 2)) +
                 static_cast<long>(mpz_sizeinbase(d.get_mpz_t(), 2));
    if (shift >= 0) {
        n <<= static_cast<mp_bitcnt_t>(shift);
    } else {
        d <<= static_cast<mp_bitcnt_t>(-shift);
    }
    mpz_class quot, rem;
    mpz_tdiv_qr(quot.get_mpz_t(), rem.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
    long extra = static_cast<long>(mpz_sizeinbase(quot.get_mpz_t(), 2)) - 53;
    bool sticky = rem != 0;
    if (extra > 0) {
        mpz_class dropped = quot & ((mpz_class(1) << static_cast<mp_bitcnt_t>(extra)) - 1);
        mpz_class half = mpz_class(1) << static_cast<mp_bitcnt_t>(extra - 1);
        quot >>= static_cast<mp_bitcnt_t>(extra);
        bool round_up = dropped > half || (dropped == half && (sticky || mpz_odd_p(quot.get_mpz_t())));
        if (round_up) quot += 1;
    } else {
        extra = 0;
    }
    double mantissa = quot.get_d();
    double out = std::ldexp(mantissa, static_cast<int>(extra - shift));
    return negative ? -out : out;
}

bool Rational::is_integer() const noexcept
{
    if (!big_) return den_ == 1;
    return big_->get_den() == 1;
}

int Rational::sign() const noexcept
{
    if (!big_) return (num_ > 0) - (num_ < 0);
    return sgn(*big_);
}

Rational Rational::abs() const { return sign() < 0 ? -*this : *this; }

Rational Rational::pow(unsigned exponent) const
{
    Rational result(1);
    Rational base = *this;
    while (exponent > 0) {
        if (exponent & 1u) result *= base;
        exponent >>= 1;
        if (exponent > 0) base *= base;
    }
    return result;
}

Rational Rational::floor() const
{
    if (!big_) {
        std::int64_t q = num_ / den_;
        if (num_ % den_ != 0 && num_ < 0) --q;
        return Rational(q);
    }
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), big_->get_num_mpz_t(), big_->get_den_mpz_t());
    return from_mpq(mpq_class(q));
}

Rational Rational::ceil() const { return -((-*this).floor()); }

Rational Rational::operator-() const
{
    if (!big_) {
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }
    return from_mpq(-*big_);
}

Rational operator+(const Rational& a, const Rational& b)
{
    if (!a.big_ && !b.big_) {
        if (a.den_ == b.den_) {
            return Rational::normalize(__int128(a.num_) + b.num_, a.den_);
        }
        return Rational::normalize(__int128(a.num_) * b.den_ + __int128(b.num_) * a.den_,
                                   __int128(a.den_) * b.den_);
    }
    return Rational::from_mpq(a.to_mpq() + b.to_mpq());
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b)
{
    if (!a.big_ && !b.big_) {
        return Rational::normalize(__int128(a.num_) * b.num_, __int128(a.den_) * b.den_);
    }
    return Rational::from_mpq(a.to_mpq() * b.to_mpq());
}

Rational operator/(const Rational& a, const Rational& b)
{
    if (b.is_zero()) {
        throw DomainError("division by zero");
    }
    if (!a.big_ && !b.big_) {
        return Rational::normalize(__int128(a.num_) * b.den_, __int128(a.den_) * b.num_);
    }
    return Rational::from_mpq(a.to_mpq() / b.to_mpq());
}

bool operator==(const Rational& a, const Rational& b) noexcept
{
    if (!a.big_ && !b.big_) return a.num_ == b.num_ && a.den_ == b.den_;
    if (a.big_ && b.big_) return *a.big_ == *b.big_;
    return false;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b)
{
    int c = 0;
    if (!a.big_ && !b.big_) {
        __int128 lhs = __int128(a.num_) * b.den_;
        __int128 rhs = __int128(b.num_) * a.den_;
        c = (lhs > rhs) - (lhs < rhs);
    } else {
        c = cmp(a.to_mpq(), b.to_mpq());
    }
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

} // namespace sumrange
