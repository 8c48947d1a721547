#include "qlu/scalar.hpp"

#include <cctype>
#include <iomanip>
#include <locale>
#include <sstream>

namespace qlu {

namespace {

bool parse_int(std::string_view s, mpz_class& out)
{
    if (s.empty())
        return false;
    std::size_t i = 0;
    if (s[0] == '+' || s[0] == '-')
        i = 1;
    if (i == s.size())
        return false;
    for (std::size_t j = i; j < s.size(); ++j)
        if (!std::isdigit(static_cast<unsigned char>(s[j])))
            return false;
    std::string digits(s.substr(s[0] == '+' ? 1 : 0));
    return out.set_str(digits, 10) == 0;
}

} // namespace

bool is_fraction_literal(std::string_view text)
{
    return text.find('/') != std::string_view::npos;
}

Rational parse_rational(std::string_view text)
{
    auto fail = [&] { return DomainError("not a number: '" + std::string(text) + "'"); };
    if (text.empty())
        throw fail();

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        mpz_class num, den;
        if (!parse_int(text.substr(0, slash), num) || !parse_int(text.substr(slash + 1), den))
            throw fail();
        if (den == 0)
            throw DomainError("zero denominator in '" + std::string(text) + "'");
        Rational r(num, den);
        r.canonicalize();
        return r;
    }

    std::string_view mantissa = text;
    long exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
        mpz_class ex;
        if (!parse_int(text.substr(e + 1), ex) || !ex.fits_slong_p())
            throw fail();
        exponent = ex.get_si();
        mantissa = text.substr(0, e);
    }

    bool negative = false;
    if (!mantissa.empty() && (mantissa[0] == '-' || mantissa[0] == '+')) {
        negative = mantissa[0] == '-';
        mantissa.remove_prefix(1);
    }
    std::string digits;
    bool seen_dot = false;
    bool seen_digit = false;
    for (char c : mantissa) {
        if (c == '.') {
            if (seen_dot)
                throw fail();
            seen_dot = true;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            seen_digit = true;
            if (seen_dot)
                --exponent;
        } else {
            throw fail();
        }
    }
    if (!seen_digit)
        throw fail();

    mpz_class n(digits, 10);
    if (negative)
        n = -n;
    Rational r(n);
    mpz_class ten_pow;
    mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
    if (exponent < 0)
        r /= Rational(ten_pow);
    else
        r *= Rational(ten_pow);
    r.canonicalize();
    return r;
}

std::string to_string(const Rational& v)
{
    return v.get_str();
}

std::string to_string(double v)
{
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(17) << v;
    return os.str();
}

} // namespace qlu
