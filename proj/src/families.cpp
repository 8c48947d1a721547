#include "qlu/families.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace qlu {

namespace {

template <class T>
T pw(const T& q, long e)
{
    return ipow(q, e);
}

/// q^{e/2} for an exponent known to be even.
template <class T>
T half_pow(const T& q, long twice_exponent)
{
    if (twice_exponent % 2 != 0)
        throw DomainError("half_pow: odd exponent");
    return ipow(q, twice_exponent / 2);
}

/// q^{k(k-1)/2}
template <class T>
T tri(const T& q, long k)
{
    return ipow(q, k * (k - 1) / 2);
}

template <class T>
T neg_pow(const T& a, long k)
{
    return ipow(T(-a), k);
}

template <class T>
void check_nonzero(const T& v, const char* what)
{
    if (v == 0)
        throw SingularError(what);
}

} // namespace

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

template <class T>
bool LittleQJacobiParams<T>::in_region() const
{
    return a > 0 && a < 1 && b < 1 && q >= 0 && q < 1;
}

template <class T>
void LittleQJacobiParams<T>::validate() const
{
    if (!relaxed && !in_region())
        throw DomainError("little q-Jacobi parameters outside 0<a<1, b<1, 0<=q<1");
}

template <class T>
bool QHahnParams<T>::in_region() const
{
    if (N < 1 || q < 0 || q >= 1)
        return false;
    if (a > 0 && a < 1 && b < 1)
        return true;
    if (q == 0)
        return false;
    T bound = ipow(q, 1 - N);
    return a > bound && b > bound;
}

template <class T>
void QHahnParams<T>::validate() const
{
    if (N < 1)
        throw DomainError("q-Hahn N must be a positive integer");
    if (!relaxed && !in_region())
        throw DomainError("q-Hahn parameters outside (0<a<1, b<1) or (a,b > q^{1-N}), 0<=q<1");
}

GridPoint GridPoint::at(long x)
{
    if (x < 0)
        throw DomainError("grid point must be nonnegative");
    return GridPoint(Kind::finite, x);
}

long GridPoint::index() const
{
    if (is_infinite())
        throw DomainError("grid point at infinity has no index");
    return x_;
}

// ---------------------------------------------------------------------------
// Method names
// ---------------------------------------------------------------------------

std::string_view to_string(JacobiMethod m)
{
    switch (m) {
    case JacobiMethod::phi21: return "phi21";
    case JacobiMethod::phi31: return "phi31";
    case JacobiMethod::lu_series: return "lu_series";
    case JacobiMethod::haran: return "haran";
    case JacobiMethod::dual_phi21: return "dual_phi21";
    case JacobiMethod::ul_series: return "ul_series";
    }
    return "?";
}

std::string_view to_string(HahnMethod m)
{
    switch (m) {
    case HahnMethod::phi32: return "phi32";
    case HahnMethod::lu_series: return "lu_series";
    case HahnMethod::haran: return "haran";
    case HahnMethod::reversed: return "reversed";
    case HahnMethod::ul_series: return "ul_series";
    }
    return "?";
}

JacobiMethod parse_jacobi_method(std::string_view s)
{
    for (auto m : kJacobiMethods)
        if (to_string(m) == s)
            return m;
    throw DomainError("unknown little q-Jacobi method '" + std::string(s) + "'");
}

HahnMethod parse_hahn_method(std::string_view s)
{
    for (auto m : kHahnMethods)
        if (to_string(m) == s)
            return m;
    throw DomainError("unknown q-Hahn method '" + std::string(s) + "'");
}

std::string_view to_string(IdentityKind k)
{
    switch (k) {
    case IdentityKind::duality_qhahn: return "duality_qhahn";
    case IdentityKind::reversed_vs_direct: return "reversed_vs_direct";
    case IdentityKind::hahn_identification: return "hahn_identification";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Little q-Jacobi
// ---------------------------------------------------------------------------

template <class T>
T little_0jacobi(long n, GridPoint x, const T& a, const T& b)
{
    if (n < 0)
        throw DomainError("degree must be nonnegative");
    if (n == 0)
        return T(1);
    if (n == 1) {
        if (!x.is_infinite() && x.index() == 0)
            return T(-a * (T(1) - b) / (T(1) - a));
        return T(1);
    }
    if (x.is_infinite() || x.index() > n - 1)
        return T(1);
    if (x.index() == n - 1)
        return T(-a / (T(1) - a));
    return T(0);
}

template <class T>
T little_qjacobi_lower(long n, long k, const LittleQJacobiParams<T>& p)
{
    if (k < 0 || k > n)
        return T(0);
    const T& a = p.a;
    const T& b = p.b;
    const T& q = p.q;
    if (q == 0) {
        // termwise limit of the expression below
        if (k == n) {
            if (n == 0)
                return T(1);
            if (n == 1)
                return T((T(1) - a * b) / (T(1) - a));
            return T(T(1) / (T(1) - a));
        }
        if (k == n - 1)
            return n == 1 ? T(-a * (T(1) - b) / (T(1) - a)) : T(-a / (T(1) - a));
        return T(0);
    }
    T num = tri(q, n - k) * neg_pow(a, n - k) * qpoch(T(b * pw(q, k)), q, n - k) *
            qpoch(T(a * b * pw(q, n - 1)), q, k) * qpoch_rev(pw(q, n), q, k);
    T den = qpoch(a, q, n) * qpoch(q, q, k);
    check_nonzero(den, "little q-Jacobi: (a;q)_n vanishes");
    return T(num / den);
}

template <class T>
T little_qjacobi_upper(long k, GridPoint x, const T& q)
{
    if (q == 0) {
        if (x.is_infinite())
            return T(1);
        return k <= x.index() ? T(1) : T(0);
    }
    return qpoch_rev(x.qpow(q), q, k);
}

namespace {

template <class T>
T lqj_phi21(long n, GridPoint x, const LittleQJacobiParams<T>& p)
{
    const T& q = p.q;
    SeriesSpec<T> s{{pw(q, -n), T(p.a * p.b * pw(q, n - 1))}, {p.a}, q, T(x.qpow(q) * q), std::nullopt};
    return basic_hyp(s);
}

template <class T>
T lqj_phi31(long n, GridPoint x, const LittleQJacobiParams<T>& p)
{
    if (x.is_infinite())
        return T(1);
    const T& a = p.a;
    const T& b = p.b;
    const T& q = p.q;
    const long xi = x.index();
    T den = qpoch(a, q, n);
    check_nonzero(den, "little q-Jacobi: (a;q)_n vanishes");
    T pref = tri(q, n) * neg_pow(a, n) * qpoch(b, q, n) / den;
    SeriesSpec<T> s{{pw(q, -n), T(a * b * pw(q, n - 1)), pw(q, -xi)}, {b}, q, T(pw(q, xi + 1) / a), std::nullopt};
    return T(pref * basic_hyp(s));
}

template <class T>
T lqj_lu(long n, GridPoint x, const LittleQJacobiParams<T>& p)
{
    const long kmax = x.is_infinite() ? n : std::min(n, x.index());
    T sum(0);
    for (long k = 0; k <= kmax; ++k)
        sum += little_qjacobi_lower(n, k, p) * little_qjacobi_upper(k, x, p.q);
    return sum;
}

template <class T>
T lqj_haran(long n, GridPoint x, const LittleQJacobiParams<T>& p)
{
    const T& a = p.a;
    const T& b = p.b;
    const T& q = p.q;
    const T qx = x.qpow(q);
    const long kmax = x.is_infinite() ? n : std::min(n, x.index());
    T sum(0);
    for (long k = 0; k <= kmax; ++k) {
        // q^{(n-k)(n+2x-3k-1)/2} = q^{(n-k)(n-3k-1)/2} (q^x)^{n-k}
        T term = half_pow(q, (n - k) * (n - 3 * k - 1)) * ipow(qx, n - k) * neg_pow(a, n - k) *
                 qpoch(T(b * pw(q, k)), q, n - k) * qpoch_rev(pw(q, n), q, k) * qpoch_rev(qx, q, k);
        T den = qpoch(a, q, n - k) * qpoch(q, q, k);
        check_nonzero(den, "little q-Jacobi: (a;q)_{n-k} vanishes");
        sum += term / den;
    }
    return sum;
}

template <class T>
T lqj_dual_phi21(long n, GridPoint x, const LittleQJacobiParams<T>& p)
{
    const T& a = p.a;
    const T& b = p.b;
    const T& q = p.q;
    T an = qpoch(a, q, n);
    check_nonzero(an, "little q-Jacobi: (a;q)_n vanishes");
    if (!x.is_infinite() && n >= x.index()) {
        const long xi = x.index();
        T bx = qpoch(b, q, xi);
        check_nonzero(bx, "little q-Jacobi: (b;q)_x vanishes");
        T pref = tri(q, n - xi) * neg_pow(a, n - xi) * qpoch(b, q, n) * qpoch_rev(pw(q, n), q, xi) / (an * bx);
        SeriesSpec<T> s{{T(b * pw(q, n)), pw(q, -xi)}, {pw(q, n - xi + 1)}, q, T(a * pw(q, n)), std::nullopt};
        return T(pref * basic_hyp(s));
    }
    const T qx = x.qpow(q);
    T pref = qpoch_rev(qx, q, n) / an;
    SeriesSpec<T> s{{T(b * qx), pw(q, -n)}, {T(qx * pw(q, 1 - n))}, q, T(a * pw(q, n)), std::nullopt};
    return T(pref * basic_hyp(s));
}

template <class T>
T lqj_ul(long n, GridPoint x, const LittleQJacobiParams<T>& p, const Truncation& trunc)
{
    if (x.is_infinite())
        return T(1);
    const T& a = p.a;
    const T& b = p.b;
    const T& q = p.q;
    const long xi = x.index();
    // (ab q^{n+k};q)_inf / (a;q)_inf = [(ab;q)_inf / (a;q)_inf] / (ab;q)_{n+k}
    T a_inf = qpoch_inf(a, q, trunc.tol);
    check_nonzero(a_inf, "little q-Jacobi: (a;q)_inf vanishes");
    T ratio = qpoch_inf(T(a * b), q, trunc.tol) / a_inf;
    T bx = qpoch(b, q, xi);
    check_nonzero(bx, "little q-Jacobi: (b;q)_x vanishes");

    const long k0 = std::max(n, xi);
    T sum(0);
    int small_run = 0;
    for (long k = k0; k < k0 + trunc.max_terms; ++k) {
        T den = bx * qpoch(q, q, k) * qpoch(T(a * b), q, n + k);
        check_nonzero(den, "little q-Jacobi: (ab;q)_{n+k} vanishes");
        T term = tri(q, k - xi) * neg_pow(a, k - xi) * qpoch(b, q, k) * qpoch_rev(pw(q, k), q, n) *
                 qpoch_rev(pw(q, k), q, xi) / den;
        sum += term;
        double t = to_double(abs_value(term));
        double s = to_double(abs_value(sum));
        if (t <= trunc.tol * s || t < 1e-300) {
            if (++small_run == 3)
                return T(sum * ratio);
        } else {
            small_run = 0;
        }
    }
    throw ConvergenceError("little q-Jacobi ul_series did not converge within max_terms");
}

} // namespace

template <class T>
T little_qjacobi(long n, GridPoint x, const LittleQJacobiParams<T>& p, JacobiMethod method, const Truncation& trunc)
{
    p.validate();
    if (n < 0)
        throw DomainError("degree must be nonnegative");
    if (p.q == 0)
        return little_0jacobi(n, x, p.a, p.b);
    switch (method) {
    case JacobiMethod::phi21: return lqj_phi21(n, x, p);
    case JacobiMethod::phi31: return lqj_phi31(n, x, p);
    case JacobiMethod::lu_series: return lqj_lu(n, x, p);
    case JacobiMethod::haran: return lqj_haran(n, x, p);
    case JacobiMethod::dual_phi21: return lqj_dual_phi21(n, x, p);
    case JacobiMethod::ul_series: return lqj_ul(n, x, p, trunc);
    }
    throw DomainError("unknown method");
}

// ---------------------------------------------------------------------------
// q-Hahn
// ---------------------------------------------------------------------------

template <class T>
T zero_hahn(long n, long x, const T& a, const T& b, long N)
{
    if (n < 0 || x < 0 || n > N || x > N)
        throw DomainError("0-Hahn: n and x must lie in 0..N");
    return little_0jacobi(n, GridPoint::at(x), a, b);
}

namespace {

template <class T>
T hahn_phi32(long n, long x, const QHahnParams<T>& p)
{
    const T& q = p.q;
    SeriesSpec<T> s{{pw(q, -n), T(p.a * p.b * pw(q, n - 1)), pw(q, x - p.N)}, {p.a, pw(q, -p.N)}, q, q, std::nullopt};
    return basic_hyp(s);
}

template <class T>
T hahn_lu(long n, long x, const QHahnParams<T>& p)
{
    const T& q = p.q;
    LittleQJacobiParams<T> lp{p.a, p.b, q, true};
    const T qx = pw(q, x);
    const T qN = pw(q, p.N);
    T sum(0);
    for (long k = 0; k <= std::min(n, x); ++k) {
        T den = qpoch_rev(qN, q, k);
        check_nonzero(den, "q-Hahn: (q^N;q^{-1})_k vanishes");
        sum += little_qjacobi_lower(n, k, lp) * qpoch_rev(qx, q, k) / den;
    }
    return sum;
}

template <class T>
T hahn_haran(long n, long x, const QHahnParams<T>& p)
{
    const T& a = p.a;
    const T& b = p.b;
    const T& q = p.q;
    const T qx = pw(q, x);
    T qNn = qpoch_rev(pw(q, p.N), q, n);
    check_nonzero(qNn, "q-Hahn: (q^N;q^{-1})_n vanishes");
    T sum(0);
    for (long k = 0; k <= std::min(n, x); ++k) {
        T term = half_pow(q, (n - k) * (n + 2 * x - 3 * k - 1)) * neg_pow(a, n - k) *
                 qpoch_rev(pw(q, p.N - x), q, n - k) * qpoch(T(b * pw(q, k)), q, n - k) * qpoch_rev(pw(q, n), q, k) *
                 qpoch_rev(qx, q, k);
        T den = qNn * qpoch(a, q, n - k) * qpoch(q, q, k);
        check_nonzero(den, "q-Hahn: (a;q)_{n-k} vanishes");
        sum += term / den;
    }
    return sum;
}

template <class T>
T hahn_reversed(long n, long x, const QHahnParams<T>& p)
{
    const T& a = p.a;
    const T& b = p.b;
    const T& q = p.q;
    const long N = p.N;
    T den = qpoch(a, q, N - x);
    check_nonzero(den, "q-Hahn: (a;q)_{N-x} vanishes");
    T pref = tri(q, N - x) * neg_pow(a, N - x) * qpoch(T(b * pw(q, x)), q, N - x) / den;

    // 3phi2(q^{n-N}, q^{x-N}, c; d, q^{-N}; q, q) with c = q^{-N-n+1}/(ab), d = q^{1-N}/b.
    // The ratio (c;q)_k/(d;q)_k is taken as prod (b - q^{-N-n+1+j}/a)/(b - q^{1-N+j}),
    // which stays finite at b = 0.
    const long kmax = std::min(N - n, N - x);
    T sum(0);
    T term(1);
    for (long k = 0; k <= kmax; ++k) {
        sum += term;
        if (k == kmax)
            break;
        T qk = pw(q, k);
        T num = (T(1) - pw(q, n - N) * qk) * (T(1) - pw(q, x - N) * qk) * (b - pw(q, -N - n + 1 + k) / a);
        T d = (b - pw(q, 1 - N + k)) * (T(1) - pw(q, -N) * qk) * (T(1) - pw(q, k + 1));
        check_nonzero(d, "q-Hahn reversed: denominator vanishes");
        term *= num * q / d;
    }
    return T(pref * sum);
}

template <class T>
T hahn_ul(long n, long x, const QHahnParams<T>& p)
{
    const T& a = p.a;
    const T& b = p.b;
    const T& q = p.q;
    const long N = p.N;
    const T qN = pw(q, N);
    T common_den = qpoch(a, q, N) * qpoch(b, q, x) * qpoch_rev(qN, q, n) * qpoch_rev(qN, q, x);
    check_nonzero(common_den, "q-Hahn ul_series: denominator vanishes");
    T common_num = qpoch_rev(T(a * pw(q, N - 1)), q, x);
    T sum(0);
    for (long k = std::max(n, x); k <= N; ++k) {
        T term = tri(q, k - x) * neg_pow(a, k - x) * qpoch_rev(qN, q, k) * qpoch(T(a * b * pw(q, n + k)), q, N - k) *
                 qpoch(b, q, k) * qpoch_rev(pw(q, k), q, n) * qpoch_rev(pw(q, k), q, x) / qpoch(q, q, k);
        sum += term;
    }
    return T(sum * common_num / common_den);
}

} // namespace

template <class T>
T qhahn(long n, long x, const QHahnParams<T>& p, HahnMethod method)
{
    p.validate();
    if (n < 0 || x < 0 || n > p.N || x > p.N)
        throw DomainError("q-Hahn: n and x must lie in 0..N");
    if (p.q == 0)
        return zero_hahn(n, x, p.a, p.b, p.N);
    switch (method) {
    case HahnMethod::phi32: return hahn_phi32(n, x, p);
    case HahnMethod::lu_series: return hahn_lu(n, x, p);
    case HahnMethod::haran: return hahn_haran(n, x, p);
    case HahnMethod::reversed: return hahn_reversed(n, x, p);
    case HahnMethod::ul_series: return hahn_ul(n, x, p);
    }
    throw DomainError("unknown method");
}

template <class T>
T qhahn_standard(long n, const T& lattice_value, const T& alpha, const T& beta, long N, const T& base)
{
    SeriesSpec<T> s{{pw(base, -n), T(alpha * beta * pw(base, n + 1)), lattice_value},
                    {T(alpha * base), pw(base, -N)},
                    base,
                    base,
                    std::nullopt};
    return basic_hyp(s);
}

template <class T>
T dual_qhahn_standard(long n, long x, const T& gamma, const T& delta, long N, const T& base)
{
    SeriesSpec<T> s{{pw(base, -n), pw(base, -x), T(gamma * delta * pw(base, x + 1))},
                    {T(gamma * base), pw(base, -N)},
                    base,
                    base,
                    std::nullopt};
    return basic_hyp(s);
}

// ---------------------------------------------------------------------------
// Weights
// ---------------------------------------------------------------------------

template <class T>
T weight(const LittleQJacobiParams<T>& p, long x, const Truncation& trunc)
{
    p.validate();
    if (x < 0)
        throw DomainError("weight: x must be nonnegative");
    const T& a = p.a;
    const T& b = p.b;
    const T& q = p.q;
    if (q == 0) {
        if (x == 0)
            return T((T(1) - a) / (T(1) - a * b));
        return T((T(1) - a) * (T(1) - b) / (T(1) - a * b) * pw(a, x));
    }
    T den = qpoch_inf(T(a * b), q, trunc.tol) * qpoch(q, q, x);
    check_nonzero(den, "weight: (ab;q)_inf vanishes");
    return T(qpoch_inf(a, q, trunc.tol) * qpoch(b, q, x) * pw(a, x) / den);
}

namespace {

template <class T>
T zero_dual_weight(const T& a, const T& b, long n)
{
    if (n == 0)
        return T(1);
    if (n == 1)
        return T((T(1) - a) / (a * (T(1) - b)));
    return T((T(1) - a) * (T(1) - a * b) / (pw(a, n) * (T(1) - b)));
}

template <class T>
T jacobi_dual_weight_core(const T& a, const T& b, const T& q, long n)
{
    T den = (T(1) - a * b * pw(q, n - 1)) * pw(a, n) * qpoch(q, q, n) * qpoch(b, q, n);
    check_nonzero(den, "dual weight: denominator vanishes");
    return T((T(1) - a * b * pw(q, 2 * n - 1)) * qpoch(a, q, n) * qpoch(T(a * b), q, n) / den);
}

} // namespace

template <class T>
T dual_weight(const LittleQJacobiParams<T>& p, long n)
{
    p.validate();
    if (n < 0)
        throw DomainError("dual_weight: n must be nonnegative");
    if (n == 0)
        return T(1);
    if (p.q == 0)
        return zero_dual_weight(p.a, p.b, n);
    return jacobi_dual_weight_core(p.a, p.b, p.q, n);
}

template <class T>
T weight(const QHahnParams<T>& p, long x)
{
    p.validate();
    if (x < 0 || x > p.N)
        throw DomainError("weight: x must lie in 0..N");
    const T& a = p.a;
    const T& b = p.b;
    const T& q = p.q;
    const long N = p.N;
    if (q == 0) {
        if (x == 0)
            return T((T(1) - a) / (T(1) - a * b));
        if (x < N)
            return T((T(1) - a) * (T(1) - b) / (T(1) - a * b) * pw(a, x));
        return T((T(1) - b) / (T(1) - a * b) * pw(a, N));
    }
    T den = qpoch(T(a * b), q, N) * qpoch_rev(T(a * pw(q, N - 1)), q, x) * qpoch(q, q, x);
    check_nonzero(den, "q-Hahn weight: denominator vanishes");
    return T(qpoch(a, q, N) * qpoch_rev(pw(q, N), q, x) * qpoch(b, q, x) * pw(a, x) / den);
}

template <class T>
T dual_weight(const QHahnParams<T>& p, long n)
{
    p.validate();
    if (n < 0 || n > p.N)
        throw DomainError("dual_weight: n must lie in 0..N");
    if (n == 0)
        return T(1);
    if (p.q == 0)
        return zero_dual_weight(p.a, p.b, n);
    const T& q = p.q;
    T den = qpoch(T(p.a * p.b * pw(q, p.N)), q, n);
    check_nonzero(den, "q-Hahn dual weight: denominator vanishes");
    return T(qpoch_rev(pw(q, p.N), q, n) / den * jacobi_dual_weight_core(p.a, p.b, q, n));
}

// ---------------------------------------------------------------------------
// Orthogonality
// ---------------------------------------------------------------------------

template <class T>
OrthogonalityResult verify_orthogonality(const LittleQJacobiParams<T>& p, long m, long n, double tol, long max_points)
{
    p.validate();
    if (m < 0 || n < 0)
        throw DomainError("orthogonality: degrees must be nonnegative");
    const T& a = p.a;
    const T& b = p.b;
    const T& q = p.q;
    const T target = m == n ? T(T(1) / dual_weight(p, n)) : T(0);
    OrthogonalityResult out;

    if (q == 0) {
        // p_m, p_n are identically 1 beyond max(m,n); the tail is geometric.
        const long X = std::max(m, n) + 1;
        T sum(0);
        for (long x = 0; x <= X; ++x)
            sum += little_0jacobi(m, GridPoint::at(x), a, b) * little_0jacobi(n, GridPoint::at(x), a, b) * weight(p, x);
        sum += (T(1) - b) * pw(a, X + 1) / (T(1) - a * b);
        out.residual = abs_diff(sum, target);
        out.points = X + 1;
        return out;
    }

    // |p_k(x)| <= sum_j |L_{k,j}| once x >= k, since then 0 < 1 - q^{x-j} < 1.
    auto row_bound = [&](long k) {
        T s(0);
        for (long j = 0; j <= k; ++j)
            s += abs_value(little_qjacobi_lower(k, j, p));
        return to_double(s);
    };
    const double pbound = row_bound(m) * row_bound(n);
    const long min_x = std::max(m, n);

    Truncation trunc;
    T w = weight(p, 0, trunc);
    T sum(0);
    for (long x = 0; x < max_points; ++x) {
        GridPoint gx = GridPoint::at(x);
        sum += lqj_lu(m, gx, p) * lqj_lu(n, gx, p) * w;
        // w_{x+1}
        w *= a * (T(1) - b * pw(q, x)) / (T(1) - pw(q, x + 1));
        if (x + 1 >= min_x) {
            const double qd = to_double(q);
            const double rho = to_double(a) * (1.0 + std::abs(to_double(b)) * std::pow(qd, double(x + 1))) /
                               (1.0 - std::pow(qd, double(x + 2)));
            if (rho < 1.0) {
                const double bound = pbound * std::abs(to_double(w)) / (1.0 - rho);
                if (bound < tol / 10) {
                    out.residual = abs_diff(sum, target);
                    out.tail_bound = bound;
                    out.points = x + 1;
                    return out;
                }
            }
        }
    }
    throw ConvergenceError("orthogonality: tail bound not reached within max_points");
}

template <class T>
OrthogonalityResult verify_orthogonality(const QHahnParams<T>& p, long m, long n)
{
    p.validate();
    T sum(0);
    for (long x = 0; x <= p.N; ++x)
        sum += qhahn(m, x, p) * qhahn(n, x, p) * weight(p, x);
    const T target = m == n ? T(T(1) / dual_weight(p, n)) : T(0);
    OrthogonalityResult out;
    out.residual = abs_diff(sum, target);
    out.points = p.N + 1;
    return out;
}

// ---------------------------------------------------------------------------
// Limits
// ---------------------------------------------------------------------------

template <class T>
T limit_q_to_zero(long n, long x, const LittleQJacobiParams<T>& p)
{
    GridPoint gx = GridPoint::at(x);
    return abs_value(T(little_qjacobi(n, gx, p) - little_0jacobi(n, gx, p.a, p.b)));
}

template <class T>
T limit_q_to_zero(long n, long x, const QHahnParams<T>& p)
{
    return abs_value(T(qhahn(n, x, p) - zero_hahn(n, x, p.a, p.b, p.N)));
}

template <class T>
T limit_n_to_infinity(long n, long x, const QHahnParams<T>& p)
{
    LittleQJacobiParams<T> lp{p.a, p.b, p.q, p.relaxed};
    return abs_value(T(qhahn(n, x, p) - little_qjacobi(n, GridPoint::at(x), lp)));
}

template <class T>
T limit_asymptotic(long n, long x, const LittleQJacobiParams<T>& p)
{
    if (x < 1 || x > n - 1)
        throw DomainError("asymptotic limit requires 1 <= x <= n-1");
    T scaled = little_qjacobi(n, GridPoint::at(x), p) / tri(p.q, n - x);
    T expected = neg_pow(p.a, n - x) / (T(1) - p.a);
    return abs_value(T(scaled - expected));
}

// ---------------------------------------------------------------------------
// Identities
// ---------------------------------------------------------------------------

template <class T>
T verify_identity(IdentityKind kind, long n, long x, const QHahnParams<T>& p)
{
    p.validate();
    const T& a = p.a;
    const T& b = p.b;
    const T& q = p.q;
    const long N = p.N;
    if (q == 0)
        throw DomainError("identity checks need q > 0");
    if (n < 0 || x < 0 || n > N || x > N)
        throw DomainError("identity: n and x must lie in 0..N");

    auto worst = [](const T& lhs, std::initializer_list<T> rhs) {
        T r(0);
        for (const T& v : rhs) {
            T d = abs_value(T(lhs - v));
            if (d > r)
                r = d;
        }
        return r;
    };

    switch (kind) {
    case IdentityKind::reversed_vs_direct:
        return abs_value(T(qhahn(n, x, p, HahnMethod::reversed) - qhahn(n, x, p, HahnMethod::phi32)));

    case IdentityKind::duality_qhahn: {
        if (b == 0 || a == 0)
            throw DomainError("duality_qhahn needs a, b nonzero");
        T an = qpoch(a, q, n);
        check_nonzero(an, "duality: (a;q)_n vanishes");
        T bn = qpoch(b, q, n);
        check_nonzero(bn, "duality: (b;q)_n vanishes");
        T lhs = qhahn(n, x, p, HahnMethod::phi32) * an / (tri(q, n) * neg_pow(a, n) * bn);
        const T qi = T(1) / q;
        SeriesSpec<T> s1{{pw(q, -n), T(a * b * pw(q, n - 1)), pw(q, -x)},
                         {b, pw(q, -N)},
                         q,
                         T(pw(q, x - N + 1) / a),
                         std::nullopt};
        SeriesSpec<T> s2{{pw(q, x), pw(q, n), T(pw(q, 1 - n) / (a * b))}, {T(T(1) / b), pw(q, N)}, qi, qi, std::nullopt};
        QHahnParams<T> flipped{T(T(1) / b), T(T(1) / a), N, qi, true};
        return worst(lhs, {basic_hyp(s1), basic_hyp(s2), qhahn(n, N - x, flipped, HahnMethod::phi32),
                           qhahn_standard(n, pw(q, x), T(q / b), T(q / a), N, qi),
                           dual_qhahn_standard(x, n, T(q / b), T(q / a), N, qi)});
    }

    case IdentityKind::hahn_identification: {
        if (b == 0 || a == 0)
            throw DomainError("hahn_identification needs a, b nonzero");
        T bx = qpoch(T(b * pw(q, x)), q, N - x);
        check_nonzero(bx, "identification: (bq^x;q)_{N-x} vanishes");
        T lhs = qhahn(n, x, p, HahnMethod::phi32) * qpoch(a, q, N - x) / (tri(q, N - x) * neg_pow(a, N - x) * bx);
        const T alpha = pw(q, -N) / b;
        const T beta = pw(q, -N) / a;
        return worst(lhs, {qhahn_standard(N - n, pw(q, x - N), alpha, beta, N, q),
                           dual_qhahn_standard(N - x, N - n, alpha, beta, N, q)});
    }
    }
    throw DomainError("unknown identity");
}

// ---------------------------------------------------------------------------
// Instantiations
// ---------------------------------------------------------------------------

#define QLU_FAMILIES_INSTANTIATE(T)                                                                                 \
    template struct LittleQJacobiParams<T>;                                                                         \
    template struct QHahnParams<T>;                                                                                 \
    template T little_qjacobi(long, GridPoint, const LittleQJacobiParams<T>&, JacobiMethod, const Truncation&);     \
    template T little_qjacobi_lower(long, long, const LittleQJacobiParams<T>&);                                     \
    template T little_qjacobi_upper(long, GridPoint, const T&);                                                     \
    template T little_0jacobi(long, GridPoint, const T&, const T&);                                                 \
    template T qhahn(long, long, const QHahnParams<T>&, HahnMethod);                                                \
    template T zero_hahn(long, long, const T&, const T&, long);                                                     \
    template T qhahn_standard(long, const T&, const T&, const T&, long, const T&);                                  \
    template T dual_qhahn_standard(long, long, const T&, const T&, long, const T&);                                 \
    template T weight(const LittleQJacobiParams<T>&, long, const Truncation&);                                      \
    template T dual_weight(const LittleQJacobiParams<T>&, long);                                                    \
    template T weight(const QHahnParams<T>&, long);                                                                 \
    template T dual_weight(const QHahnParams<T>&, long);                                                            \
    template OrthogonalityResult verify_orthogonality(const LittleQJacobiParams<T>&, long, long, double, long);     \
    template OrthogonalityResult verify_orthogonality(const QHahnParams<T>&, long, long);                           \
    template T limit_q_to_zero(long, long, const LittleQJacobiParams<T>&);                                          \
    template T limit_q_to_zero(long, long, const QHahnParams<T>&);                                                  \
    template T limit_n_to_infinity(long, long, const QHahnParams<T>&);                                              \
    template T limit_asymptotic(long, long, const LittleQJacobiParams<T>&);                                         \
    template T verify_identity(IdentityKind, long, long, const QHahnParams<T>&);

QLU_FAMILIES_INSTANTIATE(double)
QLU_FAMILIES_INSTANTIATE(Rational)

#undef QLU_FAMILIES_INSTANTIATE

} // namespace qlu
