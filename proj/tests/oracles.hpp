// Independent reference computations used by the tests. Each one is written
// from the defining formula, without the recurrences or factorizations used by
// the library, and runs in exact arithmetic.
#ifndef QLU_TESTS_ORACLES_HPP
#define QLU_TESTS_ORACLES_HPP

#include <stdexcept>
#include <vector>

#include "qlu/lufact.hpp"

namespace oracle {

using qlu::Rational;

/// n/d in lowest terms; mpq_class(n, d) leaves the fraction as given.
inline Rational frac(long n, long d)
{
    Rational r(n, d);
    r.canonicalize();
    return r;
}

inline Rational power(const Rational& b, long e)
{
    Rational r(1);
    if (e >= 0) {
        for (long i = 0; i < e; ++i)
            r *= b;
    } else {
        for (long i = 0; i < -e; ++i)
            r /= b;
    }
    return r;
}

inline Rational poch(const Rational& a, const Rational& q, long k)
{
    Rational r(1);
    for (long j = 0; j < k; ++j)
        r *= Rational(1) - a * power(q, j);
    return r;
}

/// Term-by-term r-phi-s in the Gasper-Rahman convention, summing k = 0..terms-1.
inline Rational phi(const std::vector<Rational>& num, const std::vector<Rational>& den, const Rational& q,
                    const Rational& z, long terms)
{
    const long e = 1 + static_cast<long>(den.size()) - static_cast<long>(num.size());
    Rational sum(0);
    for (long k = 0; k < terms; ++k) {
        Rational t = power(z, k) / poch(q, q, k);
        for (const auto& u : num)
            t *= poch(u, q, k);
        for (const auto& v : den)
            t /= poch(v, q, k);
        const Rational g = power(Rational(-1), k) * power(q, k * (k - 1) / 2);
        t *= power(g, e);
        sum += t;
    }
    return sum;
}

/// p_n^{a,b;q}(x) = 2phi1(q^{-n}, ab q^{n-1}; a; q, q^{x+1})
inline Rational little_qjacobi(long n, long x, const Rational& a, const Rational& b, const Rational& q)
{
    return phi({power(q, -n), a * b * power(q, n - 1)}, {a}, q, power(q, x + 1), n + 1);
}

/// Q_n^{a,b,N;q}(x) = 3phi2(q^{-n}, ab q^{n-1}, q^{x-N}; a, q^{-N}; q, q)
inline Rational qhahn(long n, long x, const Rational& a, const Rational& b, long N, const Rational& q)
{
    return phi({power(q, -n), a * b * power(q, n - 1), power(q, x - N)}, {a, power(q, -N)}, q, q,
               std::min(n, N - x) + 1);
}

/// Little 0-Jacobi functions from their piecewise definition.
inline Rational little_0jacobi(long n, long x, const Rational& a, const Rational& b)
{
    if (n == 0)
        return 1;
    if (n == 1)
        return x == 0 ? Rational(-a * (1 - b) / (1 - a)) : Rational(1);
    if (x < n - 1)
        return 0;
    if (x == n - 1)
        return Rational(-a / (1 - a));
    return 1;
}

/// Gauss-Jordan inverse with full row pivot search.
inline qlu::Matrix<Rational> inverse(qlu::Matrix<Rational> m)
{
    const std::size_t n = m.rows();
    auto inv = qlu::Matrix<Rational>::identity(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && m(piv, c) == 0)
            ++piv;
        if (piv == n)
            throw std::runtime_error("singular matrix");
        for (std::size_t j = 0; j < n; ++j) {
            std::swap(m(c, j), m(piv, j));
            std::swap(inv(c, j), inv(piv, j));
        }
        const Rational d = m(c, c);
        for (std::size_t j = 0; j < n; ++j) {
            m(c, j) /= d;
            inv(c, j) /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || m(r, c) == 0)
                continue;
            const Rational f = m(r, c);
            for (std::size_t j = 0; j < n; ++j) {
                m(r, j) -= f * m(c, j);
                inv(r, j) -= f * inv(c, j);
            }
        }
    }
    return inv;
}

/// Value at t of the polynomial through (xs[i], ys[i]).
inline Rational lagrange(const std::vector<Rational>& xs, const std::vector<Rational>& ys, const Rational& t)
{
    Rational sum(0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        Rational l(1);
        for (std::size_t j = 0; j < xs.size(); ++j)
            if (j != i)
                l *= (t - xs[j]) / (xs[i] - xs[j]);
        sum += ys[i] * l;
    }
    return sum;
}

} // namespace oracle

#endif
