#ifndef QLU_SCALAR_HPP
#define QLU_SCALAR_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace qlu {

/// Exact rational scalar. All identity checks that must hold with zero
/// residual run in this mode.
using Rational = mpq_class;

/// Raised when parameters fall outside the region a formula is valid on.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a truncated infinite sum or product fails its stopping rule.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a division by an exactly (or numerically) vanishing quantity
/// would occur: zero denominators in a series, repeated grid points, delta_k = 0.
class SingularError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <class T>
struct scalar_traits;

template <>
struct scalar_traits<double> {
    static constexpr bool exact = false;
    static constexpr const char* name = "f64";
};

template <>
struct scalar_traits<Rational> {
    static constexpr bool exact = true;
    static constexpr const char* name = "rational";
};

template <class T>
inline constexpr bool is_exact_v = scalar_traits<T>::exact;

inline double to_double(double v) { return v; }
inline double to_double(const Rational& v) { return v.get_d(); }

inline double abs_value(double v) { return std::abs(v); }
inline Rational abs_value(const Rational& v) { return Rational(abs(v)); }

template <class T>
T from_rational(const Rational& r);

template <>
inline double from_rational<double>(const Rational& r) { return r.get_d(); }

template <>
inline Rational from_rational<Rational>(const Rational& r) { return r; }

/// base^e for any integer e; base = 0 with e < 0 is singular.
template <class T>
T ipow(const T& base, long e)
{
    if (e < 0) {
        if (base == 0)
            throw SingularError("ipow: zero raised to a negative power");
        return T(1) / ipow(base, -e);
    }
    T result(1);
    T b(base);
    auto n = static_cast<unsigned long>(e);
    while (n != 0) {
        if (n & 1UL)
            result *= b;
        n >>= 1;
        if (n != 0)
            b *= b;
    }
    return result;
}

/// (-1)^k
inline long sign_pow(long k) { return (k % 2 == 0) ? 1 : -1; }

/// |a - b| / max(|a|, |b|), or 0 when both vanish.
template <class T>
double rel_diff(const T& a, const T& b)
{
    T diff = abs_value(T(a - b));
    if (diff == 0)
        return 0.0;
    T scale = abs_value(a);
    T sb = abs_value(b);
    if (sb > scale)
        scale = sb;
    return to_double(T(diff / scale));
}

template <class T>
double abs_diff(const T& a, const T& b)
{
    return to_double(abs_value(T(a - b)));
}

/// Parse "3", "-1/4", "0.125", "1e-4", "2.5E+3" exactly.
Rational parse_rational(std::string_view text);

/// True when the text is written as a fraction p/q.
bool is_fraction_literal(std::string_view text);

std::string to_string(const Rational& v);
std::string to_string(double v);

} // namespace qlu

#endif
