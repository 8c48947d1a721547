#ifndef QLU_HYPERGROUP_HPP
#define QLU_HYPERGROUP_HPP

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "qlu/families.hpp"

namespace qlu {

// ---------------------------------------------------------------------------
// Product formula for little 0-Jacobi functions
// ---------------------------------------------------------------------------

/// c_{x,y,z}^{a,b,0}: p_n(x) p_n(y) = sum_z c_{x,y,z} p_n(z) with p_n = p_n^{a,b;0}.
template <class T>
T product_coeff(long x, long y, long z, const T& a, const T& b);

/// max over n <= n_max of |p_n(x) p_n(y) - sum_z c_{x,y,z} p_n(z)|. The z-sum
/// runs explicitly up to max(x,y,n)+1; beyond that p_n(z) = 1 and the
/// remaining coefficients form a geometric series summed in closed form.
template <class T>
T verify_linearization(long n_max, long x, long y, const T& a, const T& b);

enum class SymMethod { closed, spherical_sum };

std::string_view to_string(SymMethod m);

/// Symmetric coefficient C_{x,y,z} with c_{x,y,z} = (1-ab)/(1-a) C_{x,y,z} w_z.
/// The spherical sum over n stops at min(x,y,z)+1, beyond which a factor vanishes.
template <class T>
T sym_coeff(long x, long y, long z, const T& a, const T& b, SymMethod method = SymMethod::closed);

/// 0 < a <= 1/2 and 2 - 1/a <= b < 1.
template <class T>
bool nonneg_region(const T& a, const T& b);

struct SignWitness {
    long x = 0;
    long y = 0;
    long z = 0;
    double value = 0;
};

struct NonnegScan {
    bool region = false;
    bool all_nonnegative = true;
    /// first negative coefficient found, if any
    std::optional<SignWitness> witness;

    bool consistent() const { return region == all_nonnegative; }
};

/// Exhaustive sign scan of product_coeff over x, y, z <= bound.
template <class T>
NonnegScan scan_nonnegativity(const T& a, const T& b, long bound = 10);

// ---------------------------------------------------------------------------
// p-adic parameters and orbit measure
// ---------------------------------------------------------------------------

/// Residue field of size p^r; the orbit space of GL(d) acting on lines with
/// an m-dimensional distinguished block. The ramification index takes part in
/// no formula and is carried only for completeness.
struct PadicParams {
    long p = 2;
    long r = 1;
    long d = 2;
    long m = 1;
    long e = 1;

    void validate() const;
};

/// (a, b) = (p^{-r(d-m)}, p^{-rm}).
std::pair<Rational, Rational> padic_params(const PadicParams& pp);

/// Point masses mu(k) = w_k^{a,b;0} on the orbits; the point at infinity is null.
template <class T>
struct OrbitMeasure {
    T a;
    T b;

    T mu(long k) const;
    /// nu(i) = sum_{j >= i} mu(j)
    T nu(long i) const;
};

template <class T>
OrbitMeasure<T> orbit_measure(const T& a, const T& b);

template <class T>
T nu(long i, const OrbitMeasure<T>& m)
{
    return m.nu(i);
}

/// |(1 - p^{-rm}) p^{-rjm} - w_j^{a,0;0}| with a = p^{-rm}.
Rational laguerre_measure_check(long p, long r, long m, long j);

// ---------------------------------------------------------------------------
// Convolution algebra on the orbit space
// ---------------------------------------------------------------------------

enum class ConvBasis { e, c, g, ghat };

std::string_view to_string(ConvBasis b);

/// Element of the convolution algebra restricted to the window 0..K. The
/// orbits K, K+1, ... are merged into one cell, so g_K stands for c_K and
/// carries mass nu(K); with that convention every product closes exactly.
template <class T>
struct ConvElement {
    T a;
    T b;
    long K = 0;
    ConvBasis basis = ConvBasis::g;
    std::vector<T> coeffs;
};

template <class T>
class ConvAlgebra {
public:
    ConvAlgebra(const T& a, const T& b, long K);

    const T& a() const { return a_; }
    const T& b() const { return b_; }
    long window() const { return K_; }

    /// mu(i) for i < K, nu(K) for the merged cell
    const T& cell_mass(long i) const { return mass_[static_cast<std::size_t>(i)]; }
    const T& nu(long i) const { return nu_[static_cast<std::size_t>(i)]; }

    ConvElement<T> zero(ConvBasis basis) const;
    ConvElement<T> unit_vector(ConvBasis basis, long i) const;

    ConvElement<T> convert(const ConvElement<T>& u, ConvBasis target) const;

    /// Values on the cells 0..K.
    std::vector<T> as_function(const ConvElement<T>& u) const;

    /// Product declared by e_i * e_j = delta_{ij} e_i, expanded in u's basis.
    /// Throws DomainError when u and v come from different measures or windows.
    ConvElement<T> star(const ConvElement<T>& u, const ConvElement<T>& v) const;

private:
    void check(const ConvElement<T>& u) const;
    std::vector<T> to_e(const ConvElement<T>& u) const;
    std::vector<T> from_e(const std::vector<T>& e, ConvBasis target) const;

    T a_;
    T b_;
    long K_;
    std::vector<T> mass_;
    std::vector<T> nu_;
};

template <class T>
ConvElement<T> conv_star(const ConvAlgebra<T>& alg, const ConvElement<T>& u, const ConvElement<T>& v)
{
    return alg.star(u, v);
}

/// Largest deviation of the star products of basis elements from the four
/// multiplication tables (e, c, g, ghat), over all pairs in the window.
template <class T>
T verify_star_tables(const ConvAlgebra<T>& alg);

/// Largest |(ghat_i * ghat_i)_z - c_{i,i,z}| for z < K, with the merged cell
/// compared against the tail sum nu(K)/mu(i).
template <class T>
T verify_ghat_product_formula(const ConvAlgebra<T>& alg);

/// Largest |e_n(x) - omega_n p_n^{a,b;0}(x)| over the window.
template <class T>
T verify_idempotent_functions(const ConvAlgebra<T>& alg);

} // namespace qlu

#endif
