#include "qlu/hypergroup.hpp"

#include <algorithm>
#include <array>
#include <string>

namespace qlu {

namespace {

template <class T>
void check_params(const T& a, const T& b)
{
    LittleQJacobiParams<T>{a, b, T(0)}.validate();
}

void check_index(long v, const char* what)
{
    if (v < 0)
        throw DomainError(std::string(what) + " must be nonnegative");
}

template <class T>
T p0(long n, long x, const T& a, const T& b)
{
    return little_0jacobi(n, GridPoint::at(x), a, b);
}

template <class T>
void raise_to(T& worst, const T& candidate)
{
    if (candidate > worst)
        worst = candidate;
}

} // namespace

// ---------------------------------------------------------------------------
// Product formula
// ---------------------------------------------------------------------------

template <class T>
T product_coeff(long x, long y, long z, const T& a, const T& b)
{
    check_params(a, b);
    check_index(x, "x");
    check_index(y, "y");
    check_index(z, "z");
    if (x != y)
        return T(z == std::min(x, y) ? 1 : 0);
    if (x > z)
        return T(0);
    if (x == 0)
        return z == 0 ? T((T(1) - 2 * a + a * b) / (T(1) - a)) : T((T(1) - b) * ipow(a, z));
    if (x == z)
        return T((T(1) - 2 * a) / (T(1) - a));
    return ipow(a, z - x);
}

template <class T>
T verify_linearization(long n_max, long x, long y, const T& a, const T& b)
{
    check_params(a, b);
    check_index(n_max, "n_max");
    check_index(x, "x");
    check_index(y, "y");
    T worst(0);
    for (long n = 0; n <= n_max; ++n) {
        const long Z = std::max({x, y, n}) + 1;
        T rhs(0);
        for (long z = 0; z <= Z; ++z) {
            T c = product_coeff(x, y, z, a, b);
            if (c != 0)
                rhs += c * p0(n, z, a, b);
        }
        // for z > Z: p_n(z) = 1 and c_{x,x,z} decays with ratio a
        if (x == y)
            rhs += product_coeff(x, y, Z + 1, a, b) / (T(1) - a);
        raise_to(worst, abs_value(T(p0(n, x, a, b) * p0(n, y, a, b) - rhs)));
    }
    return worst;
}

std::string_view to_string(SymMethod m)
{
    return m == SymMethod::closed ? "closed" : "spherical_sum";
}

template <class T>
T sym_coeff(long x, long y, long z, const T& a, const T& b, SymMethod method)
{
    check_params(a, b);
    check_index(x, "x");
    check_index(y, "y");
    check_index(z, "z");
    if (method == SymMethod::spherical_sum) {
        const LittleQJacobiParams<T> p{a, b, T(0)};
        const long top = std::min({x, y, z}) + 1;
        T sum(0);
        for (long n = 0; n <= top; ++n)
            sum += p0(n, x, a, b) * p0(n, y, a, b) * p0(n, z, a, b) * dual_weight(p, n);
        return T((T(1) - a) / (T(1) - a * b) * sum);
    }
    std::array<long, 3> s{x, y, z};
    std::sort(s.begin(), s.end());
    const long lo = s[0];
    if (lo < s[1])
        return T(0);
    if (s[1] < s[2])
        return lo == 0 ? T(1) : T(ipow(a, -lo) / (T(1) - b));
    if (lo == 0)
        return T((T(1) - 2 * a + a * b) / (T(1) - a));
    return T((T(1) - 2 * a) / ((T(1) - a) * (T(1) - b)) * ipow(a, -lo));
}

template <class T>
bool nonneg_region(const T& a, const T& b)
{
    check_params(a, b);
    return 2 * a <= T(1) && T(2) - T(1) / a <= b;
}

template <class T>
NonnegScan scan_nonnegativity(const T& a, const T& b, long bound)
{
    check_index(bound, "scan bound");
    NonnegScan out;
    out.region = nonneg_region(a, b);
    for (long x = 0; x <= bound; ++x)
        for (long y = 0; y <= bound; ++y)
            for (long z = 0; z <= bound; ++z) {
                T c = product_coeff(x, y, z, a, b);
                if (c < 0) {
                    out.all_nonnegative = false;
                    if (!out.witness)
                        out.witness = SignWitness{x, y, z, to_double(c)};
                }
            }
    return out;
}

// ---------------------------------------------------------------------------
// p-adic maps
// ---------------------------------------------------------------------------

namespace {

bool is_prime(long p)
{
    if (p < 2)
        return false;
    for (long f = 2; f * f <= p; ++f)
        if (p % f == 0)
            return false;
    return true;
}

Rational inverse_power(long p, long k)
{
    return ipow(Rational(p), -k);
}

} // namespace

void PadicParams::validate() const
{
    if (!is_prime(p))
        throw DomainError("p must be prime, got " + std::to_string(p));
    if (r < 1 || e < 1)
        throw DomainError("residue degree and ramification index must be positive");
    if (m < 1 || m >= d)
        throw DomainError("need 1 <= m < d");
}

std::pair<Rational, Rational> padic_params(const PadicParams& pp)
{
    pp.validate();
    return {inverse_power(pp.p, pp.r * (pp.d - pp.m)), inverse_power(pp.p, pp.r * pp.m)};
}

template <class T>
T OrbitMeasure<T>::mu(long k) const
{
    return weight(LittleQJacobiParams<T>{a, b, T(0)}, k);
}

template <class T>
T OrbitMeasure<T>::nu(long i) const
{
    check_index(i, "nu index");
    if (i == 0)
        return T(1);
    return T((T(1) - b) * ipow(a, i) / (T(1) - a * b));
}

template <class T>
OrbitMeasure<T> orbit_measure(const T& a, const T& b)
{
    check_params(a, b);
    return OrbitMeasure<T>{a, b};
}

Rational laguerre_measure_check(long p, long r, long m, long j)
{
    if (!is_prime(p))
        throw DomainError("p must be prime, got " + std::to_string(p));
    if (r < 1 || m < 1)
        throw DomainError("r and m must be positive");
    check_index(j, "j");
    const Rational a = inverse_power(p, r * m);
    const Rational orbit = (Rational(1) - a) * inverse_power(p, r * j * m);
    return abs_value(Rational(orbit - weight(LittleQJacobiParams<Rational>{a, Rational(0), Rational(0)}, j)));
}

// ---------------------------------------------------------------------------
// Convolution algebra
// ---------------------------------------------------------------------------

std::string_view to_string(ConvBasis b)
{
    switch (b) {
    case ConvBasis::e: return "e";
    case ConvBasis::c: return "c";
    case ConvBasis::g: return "g";
    case ConvBasis::ghat: return "ghat";
    }
    return "?";
}

template <class T>
ConvAlgebra<T>::ConvAlgebra(const T& a, const T& b, long K) : a_(a), b_(b), K_(K)
{
    check_params(a, b);
    check_index(K, "window");
    const OrbitMeasure<T> m{a, b};
    const auto n = static_cast<std::size_t>(K + 1);
    mass_.resize(n);
    nu_.resize(n);
    for (long i = 0; i <= K; ++i) {
        nu_[static_cast<std::size_t>(i)] = m.nu(i);
        mass_[static_cast<std::size_t>(i)] = i < K ? m.mu(i) : m.nu(K);
    }
}

template <class T>
ConvElement<T> ConvAlgebra<T>::zero(ConvBasis basis) const
{
    return ConvElement<T>{a_, b_, K_, basis, std::vector<T>(static_cast<std::size_t>(K_ + 1), T(0))};
}

template <class T>
ConvElement<T> ConvAlgebra<T>::unit_vector(ConvBasis basis, long i) const
{
    if (i < 0 || i > K_)
        throw DomainError("basis index outside the window");
    ConvElement<T> u = zero(basis);
    u.coeffs[static_cast<std::size_t>(i)] = T(1);
    return u;
}

template <class T>
void ConvAlgebra<T>::check(const ConvElement<T>& u) const
{
    if (u.a != a_ || u.b != b_ || u.K != K_)
        throw DomainError("convolution element belongs to a different measure or window");
    if (u.coeffs.size() != static_cast<std::size_t>(K_ + 1))
        throw DomainError("convolution element has the wrong number of coefficients");
}

template <class T>
std::vector<T> ConvAlgebra<T>::to_e(const ConvElement<T>& u) const
{
    const auto n = static_cast<std::size_t>(K_ + 1);
    if (u.basis == ConvBasis::e)
        return u.coeffs;
    std::vector<T> c(n);
    switch (u.basis) {
    case ConvBasis::c: c = u.coeffs; break;
    case ConvBasis::g:
    case ConvBasis::ghat: {
        // g_i = c_i - c_{i+1}, g_K = c_K
        std::vector<T> g = u.coeffs;
        if (u.basis == ConvBasis::ghat)
            for (std::size_t i = 0; i < n; ++i)
                g[i] /= mass_[i];
        for (std::size_t i = 0; i < n; ++i)
            c[i] = i == 0 ? g[0] : T(g[i] - g[i - 1]);
        break;
    }
    case ConvBasis::e: break;
    }
    // c_i = nu(i) sum_{j<=i} e_j
    std::vector<T> e(n);
    T suffix(0);
    for (std::size_t j = n; j-- > 0;) {
        suffix += nu_[j] * c[j];
        e[j] = suffix;
    }
    return e;
}

template <class T>
std::vector<T> ConvAlgebra<T>::from_e(const std::vector<T>& e, ConvBasis target) const
{
    const auto n = static_cast<std::size_t>(K_ + 1);
    if (target == ConvBasis::e)
        return e;
    // e_i = c_i / nu(i) - c_{i-1} / nu(i-1)
    std::vector<T> c(n, T(0));
    for (std::size_t i = 0; i < n; ++i) {
        c[i] += e[i] / nu_[i];
        if (i > 0)
            c[i - 1] -= e[i] / nu_[i - 1];
    }
    if (target == ConvBasis::c)
        return c;
    // c_i = sum_{j>=i} g_j within the window
    std::vector<T> g(n);
    T prefix(0);
    for (std::size_t j = 0; j < n; ++j) {
        prefix += c[j];
        g[j] = prefix;
    }
    if (target == ConvBasis::ghat)
        for (std::size_t j = 0; j < n; ++j)
            g[j] *= mass_[j];
    return g;
}

template <class T>
ConvElement<T> ConvAlgebra<T>::convert(const ConvElement<T>& u, ConvBasis target) const
{
    check(u);
    if (u.basis == target)
        return u;
    ConvElement<T> out = zero(target);
    out.coeffs = from_e(to_e(u), target);
    return out;
}

template <class T>
std::vector<T> ConvAlgebra<T>::as_function(const ConvElement<T>& u) const
{
    return convert(u, ConvBasis::g).coeffs;
}

template <class T>
ConvElement<T> ConvAlgebra<T>::star(const ConvElement<T>& u, const ConvElement<T>& v) const
{
    check(u);
    check(v);
    std::vector<T> eu = to_e(u);
    const std::vector<T> ev = to_e(v);
    for (std::size_t i = 0; i < eu.size(); ++i)
        eu[i] *= ev[i];
    ConvElement<T> out = zero(u.basis);
    out.coeffs = from_e(eu, u.basis);
    return out;
}

namespace {

template <class T>
std::vector<T> expected_product(const ConvAlgebra<T>& alg, ConvBasis basis, long i, long j)
{
    const long K = alg.window();
    std::vector<T> out(static_cast<std::size_t>(K + 1), T(0));
    const auto lo = static_cast<std::size_t>(std::min(i, j));
    const long hi = std::max(i, j);
    // nu past the window is empty
    const T nu_next = i + 1 <= K ? alg.nu(i + 1) : T(0);
    switch (basis) {
    case ConvBasis::e:
        if (i == j)
            out[lo] = T(1);
        break;
    case ConvBasis::c: out[lo] = alg.nu(hi); break;
    case ConvBasis::g:
        if (i != j) {
            out[lo] = alg.cell_mass(hi);
        } else {
            out[lo] = alg.cell_mass(i) - nu_next;
            for (long k = i + 1; k <= K; ++k)
                out[static_cast<std::size_t>(k)] = alg.cell_mass(i);
        }
        break;
    case ConvBasis::ghat:
        if (i != j) {
            out[lo] = T(1);
        } else {
            out[lo] = T(1) - nu_next / alg.cell_mass(i);
            for (long k = i + 1; k <= K; ++k)
                out[static_cast<std::size_t>(k)] = alg.cell_mass(k) / alg.cell_mass(i);
        }
        break;
    }
    return out;
}

} // namespace

template <class T>
T verify_star_tables(const ConvAlgebra<T>& alg)
{
    T worst(0);
    const long K = alg.window();
    for (ConvBasis basis : {ConvBasis::e, ConvBasis::c, ConvBasis::g, ConvBasis::ghat})
        for (long i = 0; i <= K; ++i)
            for (long j = 0; j <= K; ++j) {
                const auto got = alg.star(alg.unit_vector(basis, i), alg.unit_vector(basis, j)).coeffs;
                const auto want = expected_product(alg, basis, i, j);
                for (std::size_t k = 0; k < got.size(); ++k)
                    raise_to(worst, abs_value(T(got[k] - want[k])));
            }
    return worst;
}

template <class T>
T verify_ghat_product_formula(const ConvAlgebra<T>& alg)
{
    const long K = alg.window();
    const T& a = alg.a();
    const T& b = alg.b();
    T worst(0);
    for (long i = 0; i <= K; ++i) {
        const auto u = alg.unit_vector(ConvBasis::ghat, i);
        const auto got = alg.star(u, u).coeffs;
        for (long z = 0; z < K; ++z)
            raise_to(worst, abs_value(T(got[static_cast<std::size_t>(z)] - product_coeff(i, i, z, a, b))));
        // merged cell: sum_{z>=K} c_{i,i,z}, geometric beyond K
        const T tail = product_coeff(i, i, K, a, b) + product_coeff(i, i, K + 1, a, b) / (T(1) - a);
        raise_to(worst, abs_value(T(got[static_cast<std::size_t>(K)] - tail)));
    }
    return worst;
}

template <class T>
T verify_idempotent_functions(const ConvAlgebra<T>& alg)
{
    const long K = alg.window();
    const LittleQJacobiParams<T> p{alg.a(), alg.b(), T(0)};
    T worst(0);
    for (long n = 0; n <= K; ++n) {
        const auto f = alg.as_function(alg.unit_vector(ConvBasis::e, n));
        const T omega = dual_weight(p, n);
        for (long x = 0; x <= K; ++x)
            raise_to(worst,
                     abs_value(T(f[static_cast<std::size_t>(x)] - omega * p0(n, x, alg.a(), alg.b()))));
    }
    return worst;
}

#define QLU_HYPERGROUP_INSTANTIATE(T)                                                                               \
    template T product_coeff(long, long, long, const T&, const T&);                                                 \
    template T verify_linearization(long, long, long, const T&, const T&);                                          \
    template T sym_coeff(long, long, long, const T&, const T&, SymMethod);                                          \
    template bool nonneg_region(const T&, const T&);                                                                \
    template NonnegScan scan_nonnegativity(const T&, const T&, long);                                               \
    template struct OrbitMeasure<T>;                                                                                \
    template OrbitMeasure<T> orbit_measure(const T&, const T&);                                                     \
    template class ConvAlgebra<T>;                                                                                  \
    template T verify_star_tables(const ConvAlgebra<T>&);                                                           \
    template T verify_ghat_product_formula(const ConvAlgebra<T>&);                                                  \
    template T verify_idempotent_functions(const ConvAlgebra<T>&);

QLU_HYPERGROUP_INSTANTIATE(double)
QLU_HYPERGROUP_INSTANTIATE(Rational)

#undef QLU_HYPERGROUP_INSTANTIATE

} // namespace qlu
