#include "qlu/lufact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <type_traits>

namespace qlu {

// ---------------------------------------------------------------------------
// Dense helpers
// ---------------------------------------------------------------------------

template <class T>
Matrix<T> operator*(const Matrix<T>& lhs, const Matrix<T>& rhs)
{
    if (lhs.cols() != rhs.rows())
        throw DomainError("matrix product: inner dimensions differ");
    Matrix<T> out(lhs.rows(), rhs.cols());
    for (std::size_t i = 0; i < lhs.rows(); ++i)
        for (std::size_t k = 0; k < lhs.cols(); ++k) {
            if (lhs(i, k) == 0)
                continue;
            for (std::size_t j = 0; j < rhs.cols(); ++j)
                out(i, j) += lhs(i, k) * rhs(k, j);
        }
    return out;
}

template <class T>
Matrix<T> transpose(const Matrix<T>& m)
{
    Matrix<T> out(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            out(j, i) = m(i, j);
    return out;
}

template <class T>
double max_abs_diff(const Matrix<T>& lhs, const Matrix<T>& rhs)
{
    if (lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols())
        throw DomainError("max_abs_diff: shapes differ");
    double worst = 0;
    for (std::size_t i = 0; i < lhs.rows(); ++i)
        for (std::size_t j = 0; j < lhs.cols(); ++j)
            worst = std::max(worst, abs_diff(lhs(i, j), rhs(i, j)));
    return worst;
}

template <class T>
TriangularMatrix<T>::TriangularMatrix(Matrix<T> dense, Orientation o) : orientation_(o), entries_(std::move(dense))
{
    if (entries_.rows() != entries_.cols())
        throw DomainError("triangular matrix must be square");
    for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t j = 0; j < size(); ++j)
            if (!in_structure(i, j) && entries_(i, j) != 0)
                throw DomainError("entry outside the triangular structure is nonzero");
}

template <class T>
void TriangularMatrix<T>::set(std::size_t i, std::size_t j, const T& v)
{
    if (!in_structure(i, j)) {
        if (v != 0)
            throw DomainError("cannot set a structural zero");
        return;
    }
    entries_(i, j) = v;
}

// ---------------------------------------------------------------------------
// Systems
// ---------------------------------------------------------------------------

namespace {

template <class T, class Error = SingularError>
void require_distinct(std::span<const T> grid, const char* what)
{
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = i + 1; j < grid.size(); ++j)
            if (grid[i] == grid[j])
                throw Error(std::string(what) + ": repeated grid value at indices " + std::to_string(i) +
                                    " and " + std::to_string(j));
}

/// p_n(y_nu) = (-a)^{-n} q^{-n(n-1)/2} (a;q)_n / (b;q)_n, shared by both q-lattice families.
template <class T>
T lattice_p_at_nu(long n, const T& a, const T& b, const T& q)
{
    T bn = qpoch(b, q, n);
    if (bn == 0)
        throw SingularError("p_n(y_nu): (b;q)_n vanishes");
    return T(ipow(T(-a), -n) * ipow(q, -(n * (n - 1) / 2)) * qpoch(a, q, n) / bn);
}

template <class T>
void fill_lattice(OrthogonalSystem<T>& sys, const T& a, const T& b, const T& q, std::size_t size)
{
    sys.y.resize(size);
    sys.z.resize(size);
    sys.p_at_nu.resize(size);
    for (std::size_t i = 0; i < size; ++i) {
        const long il = static_cast<long>(i);
        sys.y[i] = ipow(q, il);
        sys.z[i] = ipow(q, -il) + a * b * ipow(q, il - 1);
        sys.p_at_nu[i] = lattice_p_at_nu(il, a, b, q);
    }
}

} // namespace

template <class T>
void OrthogonalSystem<T>::validate() const
{
    const std::size_t n = size();
    if (z.size() != n || w.size() != n || omega.size() != n || p_at_nu.size() != n || values.rows() != n ||
        values.cols() != n)
        throw DomainError("orthogonal system: component sizes differ");
    require_distinct<T, DomainError>(y, "orthogonal system y");
    require_distinct<T, DomainError>(z, "orthogonal system z");
    if (index_set == IndexSet::truncated_infinite)
        for (const T& v : y)
            if (v == y_nu)
                throw DomainError("orthogonal system: y_nu coincides with a grid point");
    for (std::size_t i = 0; i < n; ++i)
        if (!(w[i] > 0) || !(omega[i] > 0))
            throw DomainError("orthogonal system: weights must be positive");
}

template <class T>
OrthogonalSystem<T> build_system(const LittleQJacobiParams<T>& p, long cutoff, const Truncation& trunc)
{
    p.validate();
    if (p.q == 0)
        throw DomainError("build_system: the dual grid degenerates at q = 0; use zero_lu");
    if (cutoff < 0)
        throw DomainError("build_system: cutoff must be nonnegative");
    const auto size = static_cast<std::size_t>(cutoff + 1);
    OrthogonalSystem<T> sys;
    sys.index_set = IndexSet::truncated_infinite;
    sys.family = p;
    sys.y_nu = T(0);
    fill_lattice(sys, p.a, p.b, p.q, size);

    sys.w.resize(size);
    sys.omega.resize(size);
    for (std::size_t i = 0; i < size; ++i) {
        sys.w[i] = weight(p, static_cast<long>(i), trunc);
        sys.omega[i] = dual_weight(p, static_cast<long>(i));
    }

    Matrix<T> L(size, size);
    Matrix<T> U(size, size);
    for (std::size_t n = 0; n < size; ++n)
        for (std::size_t k = 0; k <= n; ++k)
            L(n, k) = little_qjacobi_lower(static_cast<long>(n), static_cast<long>(k), p);
    for (std::size_t k = 0; k < size; ++k)
        for (std::size_t x = k; x < size; ++x)
            U(k, x) = little_qjacobi_upper(static_cast<long>(k), GridPoint::at(static_cast<long>(x)), p.q);
    sys.values = L * U;
    sys.validate();
    return sys;
}

template <class T>
OrthogonalSystem<T> build_system(const QHahnParams<T>& p)
{
    p.validate();
    if (p.q == 0)
        throw DomainError("build_system: the dual grid degenerates at q = 0; use zero_lu");
    const auto size = static_cast<std::size_t>(p.N + 1);
    OrthogonalSystem<T> sys;
    sys.index_set = IndexSet::finite;
    sys.family = p;
    sys.y_nu = ipow(p.q, p.N);
    fill_lattice(sys, p.a, p.b, p.q, size);

    sys.w.resize(size);
    sys.omega.resize(size);
    sys.values = Matrix<T>(size, size);
    for (std::size_t i = 0; i < size; ++i) {
        sys.w[i] = weight(p, static_cast<long>(i));
        sys.omega[i] = dual_weight(p, static_cast<long>(i));
    }
    for (std::size_t n = 0; n < size; ++n)
        for (std::size_t x = 0; x < size; ++x)
            sys.values(n, x) = qhahn(static_cast<long>(n), static_cast<long>(x), p, HahnMethod::lu_series);
    sys.validate();
    return sys;
}

// ---------------------------------------------------------------------------
// Cellular and dual matrices
// ---------------------------------------------------------------------------

template <class T>
T cellular(long k, const T& y, std::span<const T> grid)
{
    if (k < 0 || static_cast<std::size_t>(k) > grid.size())
        throw DomainError("cellular: k out of range");
    T prod(1);
    for (long j = 0; j < k; ++j)
        prod *= grid[static_cast<std::size_t>(j)] - y;
    return prod;
}

template <class T>
TriangularMatrix<T> cellular_matrix(std::span<const T> grid)
{
    TriangularMatrix<T> c(grid.size(), Orientation::upper);
    for (std::size_t x = 0; x < grid.size(); ++x) {
        T prod(1);
        for (std::size_t k = 0; k <= x; ++k) {
            c.set(k, x, prod);
            prod *= grid[k] - grid[x];
        }
    }
    return c;
}

template <class T>
TriangularMatrix<T> dual_matrix(std::span<const T> zgrid)
{
    TriangularMatrix<T> b(zgrid.size(), Orientation::lower);
    for (std::size_t n = 0; n < zgrid.size(); ++n) {
        T prod(1);
        for (std::size_t k = 0; k <= n; ++k) {
            b.set(n, k, prod);
            prod *= zgrid[k] - zgrid[n];
        }
    }
    return b;
}

template <class T>
TriangularMatrix<T> invert_triangular(const TriangularMatrix<T>& m, std::span<const T> grid)
{
    if (m.size() != grid.size())
        throw DomainError("invert_triangular: grid length differs from matrix size");
    require_distinct(grid, "invert_triangular");
    const bool upper = m.orientation() == Orientation::upper;
    const TriangularMatrix<T> expected = upper ? cellular_matrix(grid) : dual_matrix(grid);
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) {
            bool same;
            if constexpr (is_exact_v<T>)
                same = m(i, j) == expected(i, j);
            else
                same = rel_diff(m(i, j), expected(i, j)) <= 1e-12;
            if (!same)
                throw DomainError("invert_triangular: matrix is not generated by the supplied grid");
        }

    const std::size_t size = grid.size();
    TriangularMatrix<T> inv(size, m.orientation());
    // Both closed forms are prod_{j<=outer, j!=inner} (g_j - g_inner)^{-1}; only the
    // placement differs: (inner, outer) for C^{-1}, (outer, inner) for B^{-1}.
    for (std::size_t outer = 0; outer < size; ++outer)
        for (std::size_t inner = 0; inner <= outer; ++inner) {
            T prod(1);
            for (std::size_t j = 0; j <= outer; ++j)
                if (j != inner)
                    prod *= grid[j] - grid[inner];
            T v = T(1) / prod;
            if (upper)
                inv.set(inner, outer, v);
            else
                inv.set(outer, inner, v);
        }
    return inv;
}

// ---------------------------------------------------------------------------
// delta_k
// ---------------------------------------------------------------------------

std::string_view to_string(DeltaMethod m)
{
    switch (m) {
    case DeltaMethod::limit_formula: return "limit_formula";
    case DeltaMethod::closed_jacobi: return "closed_jacobi";
    case DeltaMethod::closed_hahn: return "closed_hahn";
    case DeltaMethod::sixphi4: return "sixphi4";
    }
    return "?";
}

namespace {

template <class T>
struct LatticeParams {
    T a;
    T b;
    T q;
    long N = -1; // -1 for little q-Jacobi
};

template <class T>
LatticeParams<T> lattice_params(const OrthogonalSystem<T>& sys, DeltaMethod method)
{
    if (auto* j = std::get_if<LittleQJacobiParams<T>>(&sys.family)) {
        if (method == DeltaMethod::closed_hahn)
            throw DomainError("delta: closed_hahn requested for a little q-Jacobi system");
        return {j->a, j->b, j->q, -1};
    }
    if (auto* h = std::get_if<QHahnParams<T>>(&sys.family)) {
        if (method == DeltaMethod::closed_jacobi)
            throw DomainError("delta: closed_jacobi requested for a q-Hahn system");
        return {h->a, h->b, h->q, h->N};
    }
    throw DomainError("delta: method " + std::string(to_string(method)) + " needs a family-built system");
}

template <class T>
T hahn_factor(const LatticeParams<T>& lp, long m)
{
    if (lp.N < 0)
        return T(1);
    T d = qpoch_rev(ipow(lp.q, lp.N), lp.q, m);
    if (d == 0)
        throw SingularError("delta: (q^N;q^{-1})_m vanishes");
    return T(T(1) / d);
}

template <class T>
T delta_limit_formula(long m, const OrthogonalSystem<T>& sys)
{
    const auto mm = static_cast<std::size_t>(m);
    using W = std::conditional_t<is_exact_v<T>, T, long double>;
    W sum(0);
    for (std::size_t n = 0; n <= mm; ++n) {
        W prod(1);
        for (std::size_t i = 0; i <= mm; ++i)
            if (i != n)
                prod *= W(sys.z[i]) - W(sys.z[n]);
        if (prod == 0)
            throw SingularError("delta: repeated dual grid value");
        sum += W(sys.p_at_nu[n]) / prod;
    }
    T den(1);
    for (std::size_t j = 0; j < mm; ++j)
        den *= sys.y[j] - sys.y_nu;
    if (den == 0)
        throw SingularError("delta: y_nu coincides with a grid point below m");
    return T(sum / W(den));
}

template <class T>
T delta_closed(long m, const LatticeParams<T>& lp)
{
    T den = qpoch(lp.b, lp.q, m) * qpoch(lp.q, lp.q, m);
    if (den == 0)
        throw SingularError("delta: (b;q)_m vanishes");
    return T(ipow(T(lp.q / lp.a), m) / den * hahn_factor(lp, m));
}

/// Confluent very-well-poised form
///   q^m / (ab, q; q)_m  6phi4(ab/q, +-(qab)^{1/2}, a, 0, q^{-m}; +-(ab/q)^{1/2}, b, ab q^m; q, q^m/a)
/// with the square-root pairs folded into (1 - ab q^{2k-1}) / (1 - ab/q).
template <class T>
T delta_sixphi4(long m, const LatticeParams<T>& lp)
{
    const T& a = lp.a;
    const T& b = lp.b;
    const T& q = lp.q;
    const T ab = a * b;
    const T lead = T(1) - ab / q;
    if (lead == 0)
        throw SingularError("delta sixphi4: ab = q makes the very-well-poised factor singular");
    const T arg = ipow(q, m) / a;
    T sum(0);
    for (long k = 0; k <= m; ++k) {
        T num = qpoch(T(ab / q), q, k) * (T(1) - ab * ipow(q, 2 * k - 1)) * qpoch(a, q, k) *
                qpoch(ipow(q, -m), q, k) * ipow(arg, k);
        T den = lead * qpoch(b, q, k) * qpoch(T(ab * ipow(q, m)), q, k) * qpoch(q, q, k) *
                ipow(T(-1), k) * ipow(q, k * (k - 1) / 2);
        if (den == 0)
            throw SingularError("delta sixphi4: denominator vanishes");
        sum += num / den;
    }
    T pref_den = qpoch(ab, q, m) * qpoch(q, q, m);
    if (pref_den == 0)
        throw SingularError("delta sixphi4: (ab;q)_m vanishes");
    return T(ipow(q, m) / pref_den * sum * hahn_factor(lp, m));
}

} // namespace

template <class T>
T delta(long m, const OrthogonalSystem<T>& sys, DeltaMethod method)
{
    if (m < 0 || static_cast<std::size_t>(m) >= sys.size())
        throw DomainError("delta: m out of range");
    T result(0);
    switch (method) {
    case DeltaMethod::limit_formula: result = delta_limit_formula(m, sys); break;
    case DeltaMethod::closed_jacobi:
    case DeltaMethod::closed_hahn: result = delta_closed(m, lattice_params(sys, method)); break;
    case DeltaMethod::sixphi4: result = delta_sixphi4(m, lattice_params(sys, method)); break;
    }
    if (result == 0)
        throw SingularError("delta_" + std::to_string(m) + " vanishes; the factorization is singular");
    return result;
}

template <class T>
std::vector<T> deltas(const OrthogonalSystem<T>& sys, DeltaMethod method)
{
    std::vector<T> out;
    out.reserve(sys.size());
    for (std::size_t m = 0; m < sys.size(); ++m)
        out.push_back(delta(static_cast<long>(m), sys, method));
    return out;
}

// ---------------------------------------------------------------------------
// Factorization
// ---------------------------------------------------------------------------

namespace {

/// Extended range for float intermediates; exact mode is unaffected.
template <class T>
using Wide = std::conditional_t<is_exact_v<T>, T, long double>;

/// B_{n,k} delta_k / p_n(y_nu). Rows of B and p_n(y_nu) both grow like
/// q^{-n^2/2}, so float mode forms the quotient in extended range.
template <class T>
Matrix<T> scaled_lower(const OrthogonalSystem<T>& sys, std::span<const T> delta_values)
{
    using W = Wide<T>;
    const std::size_t size = sys.size();
    Matrix<T> out(size, size);
    for (std::size_t n = 0; n < size; ++n) {
        W b(1);
        for (std::size_t k = 0; k <= n; ++k) {
            out(n, k) = T(b * W(delta_values[k]) / W(sys.p_at_nu[n]));
            b *= W(sys.z[k]) - W(sys.z[n]);
        }
    }
    return out;
}

} // namespace

template <class T>
Factorization<T> factor(const OrthogonalSystem<T>& sys, DeltaMethod method)
{
    sys.validate();
    const std::size_t size = sys.size();
    Factorization<T> f{dual_matrix<T>(sys.z), deltas(sys, method), cellular_matrix<T>(sys.y), 0.0, 0.0};
    const Matrix<T> bd = scaled_lower(sys, std::span<const T>(f.D));

    for (std::size_t n = 0; n < size; ++n)
        for (std::size_t x = 0; x < size; ++x) {
            T s(0);
            for (std::size_t k = 0; k <= std::min(n, x); ++k)
                s += bd(n, k) * f.C(k, x);
            f.residual = std::max(f.residual, abs_diff(s, sys.values(n, x)));
        }

    // P C^{-1} against B D
    const TriangularMatrix<T> cinv = invert_triangular(f.C, std::span<const T>(sys.y));
    for (std::size_t n = 0; n < size; ++n)
        for (std::size_t k = 0; k <= n; ++k) {
            T s(0);
            for (std::size_t x = 0; x <= k; ++x)
                s += sys.values(n, x) * cinv(x, k);
            f.expansion_residual = std::max(f.expansion_residual, abs_diff(s, bd(n, k)));
        }
    return f;
}

template <class T>
NormalizedLU<T> normalized_lu(const OrthogonalSystem<T>& sys, std::span<const T> delta_values)
{
    const std::size_t size = sys.size();
    if (delta_values.size() < size)
        throw DomainError("normalized_lu: not enough delta values");
    const Matrix<T> bd = scaled_lower(sys, delta_values);
    const TriangularMatrix<T> C = cellular_matrix<T>(sys.y);
    NormalizedLU<T> out{TriangularMatrix<T>(size, Orientation::lower), TriangularMatrix<T>(size, Orientation::upper)};
    std::vector<T> yprod(size);
    T acc(1);
    for (std::size_t k = 0; k < size; ++k) {
        yprod[k] = acc;
        acc *= sys.y[k];
    }
    for (std::size_t n = 0; n < size; ++n)
        for (std::size_t k = 0; k <= n; ++k)
            out.L.set(n, k, bd(n, k) * yprod[k]);
    for (std::size_t k = 0; k < size; ++k)
        for (std::size_t x = k; x < size; ++x)
            out.U.set(k, x, C(k, x) / yprod[k]);
    return out;
}

template <class T>
NormalizedLU<T> zero_lu(const T& a, const T& b, std::size_t size)
{
    LittleQJacobiParams<T> p{a, b, T(0)};
    p.validate();
    NormalizedLU<T> out{TriangularMatrix<T>(size, Orientation::lower), TriangularMatrix<T>(size, Orientation::upper)};
    for (std::size_t n = 0; n < size; ++n)
        for (std::size_t k = 0; k <= n; ++k)
            out.L.set(n, k, little_qjacobi_lower(static_cast<long>(n), static_cast<long>(k), p));
    for (std::size_t k = 0; k < size; ++k)
        for (std::size_t x = k; x < size; ++x)
            out.U.set(k, x, T(1));
    return out;
}

// ---------------------------------------------------------------------------
// Upper times lower
// ---------------------------------------------------------------------------

template <class T>
T ul_value(long n, long x, const OrthogonalSystem<T>& sys, std::span<const T> delta_values, double tol)
{
    const long size = static_cast<long>(sys.size());
    if (n < 0 || x < 0 || n >= size || x >= size)
        throw DomainError("ul_value: index out of range");
    if (static_cast<long>(delta_values.size()) < size)
        throw DomainError("ul_value: not enough delta values");
    const auto ni = static_cast<std::size_t>(n);
    const auto xi = static_cast<std::size_t>(x);
    const bool truncated = sys.index_set == IndexSet::truncated_infinite;

    // running prod_{i<=k, i!=n} (z_i - z_n)^{-1} prod_{j<=k, j!=x} (y_j - y_x)^{-1},
    // interleaved so that the two products balance each other in float mode
    T prod(1);
    const long k0 = std::max(n, x);
    auto absorb = [&](std::size_t i) {
        T f(1);
        if (i != ni)
            f *= sys.z[i] - sys.z[ni];
        if (i != xi)
            f *= sys.y[i] - sys.y[xi];
        if (f == 0)
            throw SingularError("ul_value: repeated grid value");
        prod /= f;
    };
    for (long i = 0; i < k0; ++i)
        absorb(static_cast<std::size_t>(i));

    T sum(0);
    int small_run = 0;
    for (long k = k0; k < size; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        absorb(kk);
        T term = prod / delta_values[kk];
        sum += term;
        if (truncated) {
            const double t = to_double(abs_value(term));
            const double s = to_double(abs_value(sum));
            if (t <= tol * s || t < 1e-300) {
                if (++small_run == 3)
                    break;
            } else {
                small_run = 0;
            }
            if (k == size - 1)
                throw ConvergenceError("ul_value: truncated sum did not settle before the cutoff");
        }
    }
    // p_n(y_x) = omega_n^{-1} w_x^{-1} sum with omega_n = omega[n] / p_at_nu[n]^2
    return T(sum * sys.p_at_nu[ni] / (sys.omega[ni] * sys.w[xi]));
}

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

namespace {

/// For x > X the normalized values satisfy p_n(x) - 1 = sum_k L_{n,k} ((q^x;q^{-1})_k - 1)
/// and |1 - (q^x;q^{-1})_k| <= q^{x-k+1}/(1-q). The weight ratio w_{x+1}/w_x decreases towards a, so the
/// tail of the weights is at most w_{X+1}/(1 - rho) with rho taken at X+1.
template <class T>
double primal_tail_bound(const OrthogonalSystem<T>& sys, const LittleQJacobiParams<T>& p, std::size_t block)
{
    const long X = static_cast<long>(sys.size()) - 1;
    const double w1 = to_double(weight(p, X + 1));
    const double rho = to_double(weight(p, X + 2)) / w1;
    if (!(rho < 1))
        return std::numeric_limits<double>::infinity();
    const double wtail = w1 / (1 - rho);
    const double q = to_double(p.q);
    std::vector<double> lam(block, 1.0);
    for (std::size_t n = 0; n < block; ++n)
        for (std::size_t k = 1; k <= n; ++k) {
            const double lk = std::abs(to_double(little_qjacobi_lower(static_cast<long>(n), static_cast<long>(k), p)));
            lam[n] += lk * std::pow(q, static_cast<double>(X + 2 - static_cast<long>(k))) / (1 - q);
        }
    // the stored values are already p_n(x) / p_n(y_nu), with dual weights omega
    double worst = 0;
    for (std::size_t n = 0; n < block; ++n)
        for (std::size_t m = 0; m < block; ++m)
            worst = std::max(worst, to_double(sys.omega[n]) * lam[n] * lam[m] * wtail);
    return worst;
}

} // namespace

template <class T>
BiorthogonalityResult verify_biorthogonality(const OrthogonalSystem<T>& sys)
{
    sys.validate();
    const std::size_t size = sys.size();
    BiorthogonalityResult out;
    out.block = sys.index_set == IndexSet::finite ? size : std::max<std::size_t>(1, size / 2);

    for (std::size_t n = 0; n < out.block; ++n)
        for (std::size_t m = 0; m < out.block; ++m) {
            T s(0);
            for (std::size_t x = 0; x < size; ++x)
                s += sys.values(n, x) * sys.values(m, x) * sys.w[x];
            s *= sys.omega[n];
            out.primal = std::max(out.primal, abs_diff(s, T(n == m ? 1 : 0)));
        }
    for (std::size_t x = 0; x < out.block; ++x)
        for (std::size_t xp = 0; xp < out.block; ++xp) {
            T s(0);
            for (std::size_t n = 0; n < size; ++n)
                s += sys.values(n, x) * sys.values(n, xp) * sys.omega[n];
            s *= sys.w[x];
            out.dual = std::max(out.dual, abs_diff(s, T(x == xp ? 1 : 0)));
        }
    if (const auto* p = std::get_if<LittleQJacobiParams<T>>(&sys.family);
        p && sys.index_set == IndexSet::truncated_infinite)
        out.tail_bound = primal_tail_bound(sys, *p, out.block);
    return out;
}

template <class T>
T verify_vandermonde_identity(long m, long n, std::span<const T> grid)
{
    if (m < 0 || m > n || static_cast<std::size_t>(n) >= grid.size())
        throw DomainError("vandermonde identity: need 0 <= m <= n < grid size");
    T sum(0);
    for (long k = m; k <= n; ++k) {
        const T& yk = grid[static_cast<std::size_t>(k)];
        T num(1);
        for (long j = 0; j < m; ++j)
            num *= grid[static_cast<std::size_t>(j)] - yk;
        T den(1);
        for (long j = 0; j <= n; ++j)
            if (j != k)
                den *= grid[static_cast<std::size_t>(j)] - yk;
        if (den == 0)
            throw SingularError("vandermonde identity: repeated grid value");
        sum += num / den;
    }
    return abs_value(T(sum - T(m == n ? 1 : 0)));
}

// ---------------------------------------------------------------------------
// Instantiations
// ---------------------------------------------------------------------------

#define QLU_LUFACT_INSTANTIATE(T)                                                                                   \
    template Matrix<T> operator*(const Matrix<T>&, const Matrix<T>&);                                               \
    template Matrix<T> transpose(const Matrix<T>&);                                                                 \
    template double max_abs_diff(const Matrix<T>&, const Matrix<T>&);                                               \
    template class TriangularMatrix<T>;                                                                             \
    template struct OrthogonalSystem<T>;                                                                            \
    template OrthogonalSystem<T> build_system(const LittleQJacobiParams<T>&, long, const Truncation&);              \
    template OrthogonalSystem<T> build_system(const QHahnParams<T>&);                                               \
    template T cellular(long, const T&, std::span<const T>);                                                        \
    template TriangularMatrix<T> cellular_matrix(std::span<const T>);                                               \
    template TriangularMatrix<T> dual_matrix(std::span<const T>);                                                   \
    template TriangularMatrix<T> invert_triangular(const TriangularMatrix<T>&, std::span<const T>);                 \
    template T delta(long, const OrthogonalSystem<T>&, DeltaMethod);                                                \
    template std::vector<T> deltas(const OrthogonalSystem<T>&, DeltaMethod);                                        \
    template Factorization<T> factor(const OrthogonalSystem<T>&, DeltaMethod);                                      \
    template NormalizedLU<T> normalized_lu(const OrthogonalSystem<T>&, std::span<const T>);                         \
    template NormalizedLU<T> zero_lu(const T&, const T&, std::size_t);                                              \
    template T ul_value(long, long, const OrthogonalSystem<T>&, std::span<const T>, double);                        \
    template BiorthogonalityResult verify_biorthogonality(const OrthogonalSystem<T>&);                              \
    template T verify_vandermonde_identity(long, long, std::span<const T>);

QLU_LUFACT_INSTANTIATE(double)
QLU_LUFACT_INSTANTIATE(Rational)

#undef QLU_LUFACT_INSTANTIATE

} // namespace qlu
