#include "qlu/qseries.hpp"

#include <cmath>
#include <limits>

namespace qlu {

namespace {

constexpr double kTerminationTol = 1e-9;
constexpr long kMaxInfiniteFactors = 100000;

template <class T>
bool matches_power(const T& u, const T& base, long n)
{
    T target = ipow(base, -n);
    if constexpr (is_exact_v<T>) {
        return u == target;
    } else {
        return std::abs(u - target) <= kTerminationTol * std::abs(target);
    }
}

} // namespace

template <class T>
T qpoch(const T& a, const T& base, long k)
{
    if (k < 0)
        throw DomainError("qpoch: negative length");
    T result(1);
    T power(1);
    for (long j = 0; j < k; ++j) {
        result *= T(1) - a * power;
        power *= base;
    }
    return result;
}

template <class T>
T qpoch_rev(const T& a, const T& base, long k)
{
    if (k < 0)
        throw DomainError("qpoch_rev: negative length");
    if (base == 0)
        throw DomainError("qpoch_rev: base must be nonzero");
    T inv = T(1) / base;
    return qpoch(a, inv, k);
}

template <class T>
T qpoch_inf(const T& a, const T& base, double tol)
{
    if (base < 0 || base >= 1)
        throw DomainError("qpoch_inf: base must lie in [0, 1)");
    T result(1);
    T term(a);
    for (long j = 0; j < kMaxInfiniteFactors; ++j) {
        if (term == 0)
            return result;
        result *= T(1) - term;
        term *= base;
        // remaining factors perturb the product by at most ~|term| / (1 - base)
        if (to_double(abs_value(term)) < tol * (1.0 - to_double(base)))
            return result;
    }
    throw ConvergenceError("qpoch_inf: product did not converge");
}

template <class T>
std::optional<long> termination_index(const std::vector<T>& numerators, const T& base)
{
    if (base == 0 || base == 1 || base == -1)
        return std::nullopt;
    std::optional<long> best;
    const double lb = std::log(std::abs(to_double(base)));
    for (const T& u : numerators) {
        if (u == 0)
            continue;
        double du = to_double(u);
        if (!(du > 0) || !std::isfinite(du))
            continue;
        // u = base^{-n}  =>  n = -log u / log base
        double guess = -std::log(du) / lb;
        if (!std::isfinite(guess) || guess < -0.5 || guess > 1e6)
            continue;
        long n = std::lround(guess);
        for (long cand : {n - 1, n, n + 1}) {
            if (cand < 0 || (best && cand >= *best))
                continue;
            if (matches_power(u, base, cand)) {
                best = cand;
                break;
            }
        }
    }
    return best;
}

template <class T>
T basic_hyp(const SeriesSpec<T>& spec)
{
    const T& q = spec.base;
    if (q == 0)
        throw DomainError("basic_hyp: base must be nonzero");

    long terms = 0;
    if (spec.max_terms) {
        if (*spec.max_terms <= 0)
            throw DomainError("basic_hyp: max_terms must be positive");
        terms = *spec.max_terms;
        if (auto n = termination_index(spec.numerators, q); n && *n + 1 < terms)
            terms = *n + 1;
    } else {
        auto n = termination_index(spec.numerators, q);
        if (!n)
            throw DomainError("basic_hyp: series declared terminating but no numerator equals base^{-n}");
        terms = *n + 1;
    }

    const long r = static_cast<long>(spec.numerators.size());
    const long s = static_cast<long>(spec.denominators.size());
    const long gr_exponent = 1 + s - r;

    T sum(1);
    T term(1);
    T qk(1); // q^k
    for (long k = 0; k + 1 < terms; ++k) {
        T ratio(1);
        for (const T& u : spec.numerators)
            ratio *= T(1) - u * qk;
        T den(1);
        for (const T& v : spec.denominators)
            den *= T(1) - v * qk;
        den *= T(1) - qk * q;
        bool den_zero;
        if constexpr (is_exact_v<T>) {
            den_zero = den == 0;
        } else {
            den_zero = den == 0.0 || !std::isfinite(1.0 / den);
        }
        if (den_zero)
            throw SingularError("basic_hyp: denominator Pochhammer vanishes before termination");
        ratio /= den;
        ratio *= spec.argument;
        if (gr_exponent != 0)
            ratio *= ipow(T(-qk), gr_exponent);
        term *= ratio;
        if (term == 0)
            break;
        sum += term;
        qk *= q;
    }
    return sum;
}

template double qpoch(const double&, const double&, long);
template Rational qpoch(const Rational&, const Rational&, long);
template double qpoch_rev(const double&, const double&, long);
template Rational qpoch_rev(const Rational&, const Rational&, long);
template double qpoch_inf(const double&, const double&, double);
template Rational qpoch_inf(const Rational&, const Rational&, double);
template std::optional<long> termination_index(const std::vector<double>&, const double&);
template std::optional<long> termination_index(const std::vector<Rational>&, const Rational&);
template double basic_hyp(const SeriesSpec<double>&);
template Rational basic_hyp(const SeriesSpec<Rational>&);

} // namespace qlu
